// Copyright (c) the teamlmi contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLMI_CLI_HPP_
#define TEAMLMI_CLI_HPP_

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <variant>

#include <CLI11.hpp>

#include "teamlmi/corpus.hpp"
#include "teamlmi/io.hpp"
#include "teamlmi/lift.hpp"
#include "teamlmi/model.hpp"
#include "teamlmi/oracle.hpp"
#include "teamlmi/solver.hpp"

namespace teamlmi::cli {

// exit codes are a stable contract
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitAssumptionFailed = 2;
inline constexpr int kExitIllPosed = 3;

namespace detail {

inline bool log_enabled() {
  const char* lvl = std::getenv("TEAMLMI_LOG");
  return lvl != nullptr && std::string(lvl) != "" && std::string(lvl) != "off";
}

inline void log(const std::string& msg) {
  if (log_enabled()) std::cerr << "[teamlmi] " << msg << "\n";
}

struct ProblemSource {
  std::string input_path;
  std::string example;
  double k2 = 0.1;
  int m = 3;

  void attach(CLI::App* cmd, bool input_required) {
    auto* in = cmd->add_option("input", input_path, "problem file (JSON)");
    cmd->add_option("--example", example,
                    "built-in problem: witsenhausen | multistage | "
                    "multistage-dynamic")
        ->check(CLI::IsMember(
            {"witsenhausen", "multistage", "multistage-dynamic"}));
    cmd->add_option("--k2", k2, "decision weight for witsenhausen");
    cmd->add_option("--m", m, "stage count for multistage");
    if (input_required) in->excludes("--example");
  }

  Problem load() const {
    if (!example.empty()) {
      if (example == "witsenhausen") return corpus::witsenhausen(k2);
      if (example == "multistage") return corpus::multistage(m);
      return corpus::multistage_dynamic(m);
    }
    if (input_path.empty())
      throw ParseError("no input: give a problem file or --example");
    return problem_from_json(load_json(input_path));
  }
};

inline void write_output(const json& j, const std::string& output_path) {
  if (output_path.empty() || output_path == "-")
    std::cout << j.dump(2) << "\n";
  else
    save_json(j, output_path);
}

// team/dynamic inputs are validated and reduced to the quadratic form the
// solver and oracle operate on
inline GammaFormProblem to_form_checked(const Problem& prob) {
  if (std::holds_alternative<GammaFormProblem>(prob)) {
    GammaFormProblem form = std::get<GammaFormProblem>(prob);
    if (relative_asymmetry(form.Q) > 1e-10 ||
        relative_asymmetry(form.R) > 1e-10)
      throw ParseError("gamma_form: Q and R must be symmetric");
    form.Q = symmetrized(form.Q);
    form.R = symmetrized(form.R);
    if (!is_positive_semidefinite(form.R))
      throw ParseError("gamma_form: R not positive semidefinite");
    return form;
  }
  const TeamProblem team = std::holds_alternative<TeamProblem>(prob)
                               ? std::get<TeamProblem>(prob)
                               : lift_dynamic(std::get<DynamicProblem>(prob));
  const auto violations = validate_problem(team);
  if (!violations.empty()) {
    std::string msg = "invalid problem:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw ParseError(msg);
  }
  return to_gamma_form(team);
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
  CLI::App app{
      "minimax linear-quadratic team decision solver (gamma-parameterized "
      "LMI feasibility with bisection and an eigenvalue-pencil oracle)"};
  app.require_subcommand(1);

  // ---- solve ----
  auto* solve = app.add_subcommand(
      "solve", "compute gamma_star and an optimal block-diagonal gain");
  detail::ProblemSource solve_src;
  solve_src.attach(solve, true);
  std::string solve_out;
  SolverConfig cfg;
  double gamma_lo = -1.0, gamma_hi = -1.0;
  bool quiet = false;
  solve->add_option("--output", solve_out, "report file (default stdout)");
  solve->add_option("--tol", cfg.gamma_tol, "bisection width target")
      ->check(CLI::PositiveNumber);
  solve->add_option("--seed", cfg.seed, "seed for randomized restarts");
  auto* lo_opt = solve->add_option("--gamma-lo", gamma_lo, "bracket override");
  auto* hi_opt = solve->add_option("--gamma-hi", gamma_hi, "bracket override");
  solve->add_flag("--quiet", quiet, "suppress the human-readable summary");

  // ---- verify ----
  auto* verify = app.add_subcommand(
      "verify", "evaluate a given gain: worst-case ratio, witness, margin");
  detail::ProblemSource verify_src;
  verify_src.attach(verify, true);
  std::string gain_path, verify_out;
  verify->add_option("--gain", gain_path, "gain file (JSON)")->required();
  verify->add_option("--output", verify_out, "report file (default stdout)");
  verify->add_flag("--quiet", quiet, "suppress the human-readable summary");

  // ---- lift ----
  auto* lift = app.add_subcommand(
      "lift", "stack a dynamic problem into a static team problem");
  std::string lift_in, lift_out;
  lift->add_option("input", lift_in, "dynamic problem file (JSON)");
  lift->add_option("--output", lift_out, "lifted team file (default stdout)");

  // ---- gamma-bar ----
  auto* gbar = app.add_subcommand(
      "gamma-bar", "print the feasibility ceiling of a problem");
  detail::ProblemSource gbar_src;
  gbar_src.attach(gbar, true);

  // ---- example ----
  auto* example = app.add_subcommand(
      "example", "emit a built-in benchmark problem as a problem file");
  std::string example_name, example_out;
  double example_k2 = 0.1;
  int example_m = 3;
  example->add_option("name", example_name, "witsenhausen | multistage | multistage-dynamic")
      ->required()
      ->check(CLI::IsMember({"witsenhausen", "multistage", "multistage-dynamic"}));
  example->add_option("--k2", example_k2, "decision weight for witsenhausen");
  example->add_option("--m", example_m, "stage count for multistage");
  example->add_option("--output", example_out, "problem file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (solve->parsed()) {
      if (lo_opt->count()) cfg.gamma_lo = gamma_lo;
      if (hi_opt->count()) cfg.gamma_hi = gamma_hi;
      const GammaFormProblem form = detail::to_form_checked(solve_src.load());
      detail::log("solving: q=" + std::to_string(form.q) +
                  " p=" + std::to_string(form.p) + " m=" + std::to_string(form.m));
      const SolveReport report = bisect_gamma(form, cfg);
      detail::write_output(to_json(report), solve_out);
      if (!quiet) {
        std::cerr << "gamma_bar   = " << report.gamma_bar << "\n"
                  << "gamma_star  = " << report.gamma_star << "\n"
                  << "oracle      = " << report.oracle_gamma << "\n"
                  << "lmi margin  = " << report.lmi_margin << "\n"
                  << "probes      = " << report.trace.size() << "\n";
        if (report.assumption_ok &&
            assemble_gamma_matrix(form, report.gamma_star).quu_condition >
                1e12)
          std::cerr << "warning: Quu(gamma_star) has condition above 1e12; "
                       "the certified gain may be poorly determined\n";
      }
      if (!report.assumption_ok) {
        std::cerr << "warning: the upper bracket is infeasible; the game value "
                     "appears to exceed the feasibility ceiling, where the LMI "
                     "characterization makes no claim\n";
        return kExitAssumptionFailed;
      }
      return kExitOk;
    }

    if (verify->parsed()) {
      const Problem prob = verify_src.load();
      const GammaFormProblem form = detail::to_form_checked(prob);
      const BlockGain gain = gain_from_json(load_json(gain_path));
      if (!gain.shape_matches(form.partition))
        throw ParseError("gain block shapes do not match the problem partition");

      json out;
      if (form.source_team && !well_posed(*form.source_team, gain)) {
        std::cerr << "error: I - DK is singular; the measurement loop is "
                     "ill-posed for this gain\n";
        return kExitIllPosed;
      }
      const double ratio = achieved_gamma(form, gain);
      out["oracle_gamma"] = ratio;
      out["well_posed"] =
          form.source_team ? well_posed(*form.source_team, gain) : true;
      out["gamma_bar"] = gamma_bar(form);
      if (std::isfinite(ratio)) {
        const Witness wit = worst_case_witness(form, gain);
        json w{{"ratio", wit.ratio},
               {"x", io_detail::matrix_to_json(wit.x.transpose())}};
        if (wit.team_coords) {
          w["w"] = io_detail::matrix_to_json(wit.w.transpose());
          w["v"] = io_detail::matrix_to_json(wit.v.transpose());
        }
        out["witness"] = w;
        // the LMI margin at the achieved ratio, when it is below the ceiling
        if (ratio < gamma_bar(form))
          out["lmi_margin"] = feasibility_margin(form, gain, ratio);
      }
      detail::write_output(out, verify_out);
      if (!quiet)
        std::cerr << "oracle_gamma = " << ratio << "\n";
      return kExitOk;
    }

    if (lift->parsed()) {
      if (lift_in.empty()) throw ParseError("lift: give a dynamic problem file");
      const Problem prob = problem_from_json(load_json(lift_in));
      if (!std::holds_alternative<DynamicProblem>(prob))
        throw ParseError(
            "lift expects a problem of kind 'dynamic' (lifting is not "
            "idempotent: team and gamma_form files are already static)");
      const TeamProblem team = lift_dynamic(std::get<DynamicProblem>(prob));
      detail::write_output(to_json(team), lift_out);
      return kExitOk;
    }

    if (gbar->parsed()) {
      const Problem prob = gbar_src.load();
      double value;
      if (std::holds_alternative<TeamProblem>(prob))
        value = gamma_bar(std::get<TeamProblem>(prob));
      else if (std::holds_alternative<GammaFormProblem>(prob))
        value = gamma_bar(std::get<GammaFormProblem>(prob));
      else
        value = gamma_bar(lift_dynamic(std::get<DynamicProblem>(prob)));
      if (std::isfinite(value)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", value);
        std::cout << buf << "\n";
      } else {
        std::cout << "inf\n";
      }
      return kExitOk;
    }

    if (example->parsed()) {
      json j;
      if (example_name == "witsenhausen")
        j = to_json(corpus::witsenhausen(example_k2));
      else if (example_name == "multistage")
        j = to_json(corpus::multistage(example_m));
      else
        j = to_json(corpus::multistage_dynamic(example_m));
      detail::write_output(j, example_out);
      return kExitOk;
    }
  } catch (const IllPosedLoopError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIllPosed;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace teamlmi::cli

#endif  // TEAMLMI_CLI_HPP_
