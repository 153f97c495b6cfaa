// Copyright (c) the teamlmi contributors.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "teamlmi/corpus.hpp"
#include "teamlmi/model.hpp"
#include "teamlmi/oracle.hpp"
#include "teamlmi/solver.hpp"
#include "testing_support.hpp"

using namespace teamlmi;

namespace {

TeamProblem decoupled_problem() {
  TeamProblem prob;
  prob.partition = Partition{{1, 1}, {1, 1}};
  prob.Qww = (Matrix(2, 2) << 2, 0, 0, 1).finished();
  prob.Qwu = Matrix::Zero(2, 2);
  prob.Quu = Matrix::Identity(2, 2);
  prob.D = Matrix::Zero(2, 2);
  prob.E = Matrix::Zero(2, 2);
  return prob;
}

}  // namespace

TEST_CASE("feasibility flips across the game value", "[solver]") {
  const GammaFormProblem prob = corpus::witsenhausen(0.1);
  const SolverConfig cfg;
  const FeasibilityResult above = feasibility_solve(prob, 0.095, cfg);
  CHECK(above.feasible);
  CHECK(above.margin <= feasibility_tolerance(prob, 0.095));

  const FeasibilityResult below = feasibility_solve(prob, 0.05, cfg);
  CHECK(!below.feasible);
  CHECK(below.margin > 0.0);
}

TEST_CASE("feasibility solve re-evaluates its margin", "[solver]") {
  const GammaFormProblem prob = corpus::witsenhausen(0.1);
  const FeasibilityResult r = feasibility_solve(prob, 0.095, SolverConfig{});
  CHECK_THAT(feasibility_margin(prob, r.gain, 0.095),
             Catch::Matchers::WithinAbs(r.margin, 1e-14));
}

TEST_CASE("zero nature cost is feasible with the zero gain", "[solver]") {
  TeamProblem team = corpus::witsenhausen_team(0.1);
  team.Qww.setZero();
  team.Qwu.setZero();
  team.Quu = Matrix::Identity(2, 2);
  const GammaFormProblem prob = to_gamma_form(team);
  const FeasibilityResult r = feasibility_solve(prob, 0.5, SolverConfig{});
  CHECK(r.feasible);
  CHECK(r.gain.norm() <= 1e-8);
}

TEST_CASE("a starved iteration budget is reported as unconverged", "[solver]") {
  const GammaFormProblem prob = corpus::witsenhausen(0.1);
  SolverConfig cfg;
  cfg.max_inner = 2;
  const FeasibilityResult r = feasibility_solve(prob, 0.095, cfg);
  CHECK(r.iterations <= 2);
  CHECK(!r.converged);
}

TEST_CASE("feasibility solve refuses gamma past the ceiling", "[solver]") {
  const GammaFormProblem prob = corpus::witsenhausen(0.1);
  CHECK_THROWS_AS(feasibility_solve(prob, 0.2, SolverConfig{}),
                  std::invalid_argument);
}

TEST_CASE("bisection solves the k2 = 0.1 benchmark", "[solver]") {
  const SolveReport r = bisect_gamma(corpus::witsenhausen(0.1));
  CHECK(r.assumption_ok);
  CHECK_THAT(r.gamma_star, Catch::Matchers::WithinAbs(0.0901, 1e-3));
  CHECK(r.oracle_gamma <= r.gamma_star + 1e-3);
  CHECK_THAT(r.gamma_bar, Catch::Matchers::WithinRel(0.1, 1e-12));
  CHECK_THAT(r.gain.blocks[0](0, 0), Catch::Matchers::WithinAbs(-0.901, 2e-2));
  CHECK_THAT(r.gain.blocks[1](0, 0), Catch::Matchers::WithinAbs(0.0901, 2e-2));
}

TEST_CASE("bisection solves the k2 = 1 benchmark", "[solver]") {
  const SolveReport r = bisect_gamma(corpus::witsenhausen(1.0));
  CHECK_THAT(r.gamma_star, Catch::Matchers::WithinAbs(0.3820, 1e-3));
  CHECK_THAT(r.gain.blocks[0](0, 0), Catch::Matchers::WithinAbs(-0.3856, 2e-2));
  CHECK_THAT(r.gain.blocks[1](0, 0), Catch::Matchers::WithinAbs(0.3840, 2e-2));
  CHECK(r.oracle_gamma <= r.gamma_star + 1e-3);
}

TEST_CASE("decoupled problem has a closed-form value", "[solver]") {
  const SolveReport r = bisect_gamma(decoupled_problem());
  CHECK_THAT(r.gamma_star, Catch::Matchers::WithinAbs(2.0, 1e-6));
  CHECK(r.gain_norm <= 1e-4);
  CHECK_THAT(r.oracle_gamma, Catch::Matchers::WithinAbs(2.0, 1e-9));
}

TEST_CASE("bisection trace is monotone-consistent", "[solver]") {
  const SolveReport r = bisect_gamma(corpus::witsenhausen(0.1));
  for (const auto& step : r.trace) {
    if (step.gamma < r.gamma_star) CHECK(!step.feasible);
    if (step.gamma > r.gamma_star && step.gamma < r.gamma_bar)
      CHECK(step.feasible);
  }
  double last_infeasible = -kInf, first_feasible = kInf;
  for (const auto& step : r.trace) {
    if (step.feasible)
      first_feasible = std::min(first_feasible, step.gamma);
    else
      last_infeasible = std::max(last_infeasible, step.gamma);
  }
  CHECK(last_infeasible < first_feasible);
}

TEST_CASE("identical seeds give identical reports", "[solver]") {
  SolverConfig cfg;
  cfg.seed = 1234;
  const SolveReport a = bisect_gamma(corpus::witsenhausen(0.1), cfg);
  const SolveReport b = bisect_gamma(corpus::witsenhausen(0.1), cfg);
  CHECK(a.gamma_star == b.gamma_star);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].gamma == b.trace[i].gamma);
    CHECK(a.trace[i].feasible == b.trace[i].feasible);
    CHECK(a.trace[i].margin == b.trace[i].margin);
  }
  CHECK((a.gain.assembled() - b.gain.assembled()).norm() == 0.0);
}

TEST_CASE("scaling the numerator scales the value", "[solver]") {
  const GammaFormProblem base = corpus::witsenhausen(1.0);
  GammaFormProblem scaled = base;
  const double alpha = 2.5;
  scaled.Q *= alpha;
  const SolveReport r0 = bisect_gamma(base);
  SolverConfig cfg;
  cfg.gamma_tol = 1e-6;  // tight brackets so the oracle comparison is sharp
  const SolveReport r1 = bisect_gamma(scaled, cfg);
  CHECK_THAT(r1.oracle_gamma,
             Catch::Matchers::WithinRel(alpha * r0.oracle_gamma, 1e-4));
}

TEST_CASE("relay chain: the certified value approaches the ceiling",
          "[solver]") {
  for (int m : {2, 3, 4}) {
    const SolveReport r = bisect_gamma(corpus::multistage(m));
    CHECK(r.assumption_ok);
    CHECK(r.gamma_star < 1.0);
    CHECK(std::abs(r.oracle_gamma - r.gamma_star) <= 1e-3);
  }
}

TEST_CASE("oracle stays within the bisection tolerance of the report",
          "[solver]") {
  for (double k2 : {0.1, 1.0}) {
    const SolveReport r = bisect_gamma(corpus::witsenhausen(k2));
    const double slack =
        r.gamma_tol + feasibility_tolerance(corpus::witsenhausen(k2),
                                            r.gamma_star, r.feas_tol);
    CHECK(r.oracle_gamma <= r.gamma_star + slack);
  }
}

TEST_CASE("an uncertifiable game is flagged, not misreported", "[solver]") {
  // worst case stays >= 1 for every gain (play v = 0, y = Ew + Du), but the
  // ceiling is 0.1: the upper bracket must come back infeasible
  TeamProblem prob;
  prob.partition = Partition{{1}, {1}};
  prob.Qww = Matrix::Identity(1, 1);
  prob.Qwu = Matrix::Zero(1, 1);
  prob.Quu = Matrix::Constant(1, 1, 0.1);
  prob.D = Matrix::Identity(1, 1);
  prob.E = Matrix::Identity(1, 1);
  REQUIRE(validate_problem(prob).empty());
  CHECK_THAT(gamma_bar(prob), Catch::Matchers::WithinRel(0.1, 1e-12));

  const SolveReport r = bisect_gamma(prob);
  CHECK(!r.assumption_ok);
  CHECK(std::isnan(r.gamma_star));
  CHECK(r.oracle_gamma >= 1.0 - 1e-9);
}

TEST_CASE("user bracket overrides are honored", "[solver]") {
  SolverConfig cfg;
  cfg.gamma_lo = 0.08;
  cfg.gamma_hi = 0.095;
  const SolveReport r = bisect_gamma(corpus::witsenhausen(0.1), cfg);
  CHECK(r.gamma_star <= 0.095);
  CHECK(r.gamma_star >= 0.08);
  CHECK_THAT(r.gamma_star, Catch::Matchers::WithinAbs(0.0901, 1e-3));

  cfg.gamma_lo = 0.5;
  cfg.gamma_hi = 0.4;
  CHECK_THROWS_AS(bisect_gamma(corpus::witsenhausen(1.0), cfg),
                  std::invalid_argument);
}

TEST_CASE("reports are sound across a random ensemble", "[solver]") {
  // near the ceiling the Schur block's norm (and with it the scale-aware
  // slack) blows up like 1/(gamma_bar - gamma); the certified probes must
  // keep every report's oracle ratio within the stated slack or flag the
  // instance instead
  std::mt19937_64 rng(555);
  int solved = 0, flagged = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const TeamProblem team = testsupport::random_team(rng);
    if (!validate_problem(team).empty()) continue;
    const GammaFormProblem prob = to_gamma_form(team);
    SolverConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const SolveReport r = bisect_gamma(prob, cfg);
    if (!r.assumption_ok) {
      ++flagged;
      continue;
    }
    ++solved;
    const double slack =
        cfg.gamma_tol + feasibility_tolerance(prob, r.gamma_star, cfg.feas_tol);
    CHECK(r.oracle_gamma <= r.gamma_star + slack);
  }
  CHECK(solved > 0);
  CHECK(flagged > 0);  // dense random signaling usually breaches the ceiling
}

TEST_CASE("warm starts do not change the certified value", "[solver]") {
  // solve twice with different seeds; values agree within the tolerance
  SolverConfig a, b;
  a.seed = 1;
  b.seed = 99;
  const SolveReport ra = bisect_gamma(corpus::witsenhausen(1.0), a);
  const SolveReport rb = bisect_gamma(corpus::witsenhausen(1.0), b);
  CHECK(std::abs(ra.gamma_star - rb.gamma_star) <= 2 * a.gamma_tol);
}
