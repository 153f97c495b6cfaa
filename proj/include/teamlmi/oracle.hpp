// Copyright (c) the teamlmi contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLMI_ORACLE_HPP_
#define TEAMLMI_ORACLE_HPP_

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

#include "teamlmi/model.hpp"
#include "teamlmi/types.hpp"

namespace teamlmi {

/// Closed-loop numerator/denominator forms on x = (w, y) under u = KCx:
///   GJ = [I; KC]^T Q [I; KC],   GF = [I; KC]^T R [I; KC].
/// The ratio x^T GJ x / x^T GF x equals the game ratio at u = Ky,
/// v = y - Du - Ew, so the worst case over nature is the largest
/// generalized eigenvalue of the pencil (GJ, GF).
struct ClosedLoopPencil {
  Matrix GJ;
  Matrix GF;  // PSD since R is
};

inline ClosedLoopPencil closed_loop_pencil(const GammaFormProblem& prob,
                                           const BlockGain& gain) {
  const int n = prob.n(), m = prob.m;
  Matrix I_KC(n + m, n);
  I_KC.topRows(n) = Matrix::Identity(n, n);
  I_KC.bottomRows(m) = gain.assembled() * prob.C;
  ClosedLoopPencil out;
  out.GJ = symmetrized(I_KC.transpose() * prob.Q * I_KC);
  out.GF = symmetrized(I_KC.transpose() * prob.R * I_KC);
  return out;
}

namespace detail {

struct PencilTop {
  double value = 0.0;   // largest generalized eigenvalue, or +inf
  Vector witness;       // attaining x (empty in the +inf / degenerate cases)
};

// sup of x^T GJ x / x^T GF x over x^T GF x > 0. GF may be singular: its
// null space is deflated at threshold 1e-12 * |GF| and GJ's restriction to
// the null space decides between a finite value and +inf.
inline PencilTop pencil_sup(const Matrix& GJ, const Matrix& GF) {
  PencilTop out;
  const int n = static_cast<int>(GF.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> ef(GF);
  const double fscale = ef.eigenvalues().cwiseAbs().maxCoeff();
  const double cut = 1e-12 * std::max(1.0, fscale);

  int rank = 0;
  for (int i = 0; i < n; ++i)
    if (ef.eigenvalues()[i] > cut) ++rank;
  if (rank == 0) {
    // GF vanishes: every x with positive numerator blows the ratio up.
    Eigen::SelfAdjointEigenSolver<Matrix> ej(GJ, Eigen::EigenvaluesOnly);
    const double jmax = ej.eigenvalues().maxCoeff();
    out.value = jmax > 1e-12 * std::max(1.0, spectral_norm_sym(GJ)) ? kInf : 0.0;
    return out;
  }

  // columns are sorted ascending, so the kept range is the tail
  const Matrix Uplus = ef.eigenvectors().rightCols(rank);
  const Vector lam = ef.eigenvalues().tail(rank);
  if (rank < n) {
    const Matrix Unull = ef.eigenvectors().leftCols(n - rank);
    Eigen::SelfAdjointEigenSolver<Matrix> ez(
        symmetrized(Unull.transpose() * GJ * Unull), Eigen::EigenvaluesOnly);
    if (ez.eigenvalues().maxCoeff() >
        1e-10 * std::max(1.0, spectral_norm_sym(GJ))) {
      out.value = kInf;
      return out;
    }
  }

  // whiten: M = Lam^-1/2 Uplus^T GJ Uplus Lam^-1/2
  const Matrix W = Uplus * lam.cwiseSqrt().cwiseInverse().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(W.transpose() * GJ * W));
  const int last = rank - 1;
  out.value = es.eigenvalues()[last];
  out.witness = W * es.eigenvectors().col(last);
  return out;
}

}  // namespace detail

/// Exact worst-case ratio of a fixed block gain: the largest generalized
/// eigenvalue of (GJ, GF). Returns +inf when some direction has zero
/// denominator energy but positive cost.
inline double achieved_gamma(const GammaFormProblem& prob,
                             const BlockGain& gain) {
  const ClosedLoopPencil pencil = closed_loop_pencil(prob, gain);
  return detail::pencil_sup(pencil.GJ, pencil.GF).value;
}

inline double achieved_gamma(const TeamProblem& prob, const BlockGain& gain) {
  return achieved_gamma(to_gamma_form(prob), gain);
}

/// Adversarial certificate for a gain: the eigenvector attaining
/// achieved_gamma, reported both in x = (w, y) coordinates and, when the
/// problem descends from a team problem, mapped back to the original
/// nature variables via v = y - Du - Ew.
struct Witness {
  double ratio = 0.0;
  Vector x;           // (w, y) coordinates, unit norm
  Vector w;           // original nature (team-backed problems only)
  Vector v;           // original measurement noise (team-backed only)
  bool team_coords = false;
};

inline Witness worst_case_witness(const GammaFormProblem& prob,
                                  const BlockGain& gain) {
  const ClosedLoopPencil pencil = closed_loop_pencil(prob, gain);
  const detail::PencilTop top = detail::pencil_sup(pencil.GJ, pencil.GF);
  if (std::isinf(top.value))
    throw std::invalid_argument(
        "worst_case_witness: achieved ratio is unbounded");

  Witness out;
  out.ratio = top.value;
  if (top.witness.size() == 0) {
    // degenerate pencil: GF's range carries no cost; report a zero witness
    out.x = Vector::Zero(prob.n());
    out.ratio = 0.0;
    return out;
  }
  out.x = top.witness / top.witness.norm();

  if (prob.source_team) {
    const TeamProblem& team = *prob.source_team;
    out.w = out.x.head(prob.q);
    const Vector y = out.x.tail(prob.p);
    const Vector u = gain.assembled() * y;
    out.v = y - team.D * u - team.E * out.w;
    out.team_coords = true;
  }
  return out;
}

/// Evaluates the game ratio at an explicit nature play (w, v): solves the
/// measurement loop y = DKy + Ew + v, sets u = Ky and returns
/// L(w,u) / (|w|^2 + |v|^2). Throws IllPosedLoopError when I - DK is
/// singular.
inline double sample_ratio(const TeamProblem& prob, const BlockGain& gain,
                           const Vector& w, const Vector& v) {
  const Matrix K = gain.assembled();
  const Matrix loop = Matrix::Identity(prob.p(), prob.p()) - prob.D * K;
  Eigen::JacobiSVD<Matrix> svd(loop, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 1e-10 * smax)
    throw IllPosedLoopError("sample_ratio: I - DK is singular");

  const Vector y = svd.solve(prob.E * w + v);
  const Vector u = K * y;
  const double num = w.dot(prob.Qww * w) + 2.0 * w.dot(prob.Qwu * u) +
                     u.dot(prob.Quu * u);
  const double den = w.squaredNorm() + v.squaredNorm();
  if (den <= 0.0)
    throw std::invalid_argument("sample_ratio: (w, v) must be nonzero");
  return num / den;
}

/// Same evaluation for a bare quadratic-form problem at a point x = (w, y).
inline double sample_ratio(const GammaFormProblem& prob, const BlockGain& gain,
                           const Vector& x) {
  Vector xu(prob.dim());
  xu.head(prob.n()) = x;
  xu.tail(prob.m) = gain.assembled() * prob.C * x;
  const double num = xu.dot(prob.Q * xu);
  const double den = xu.dot(prob.R * xu);
  if (den <= 0.0)
    throw std::invalid_argument("sample_ratio: denominator form vanishes at x");
  return num / den;
}

/// True iff the measurement interconnection is well posed for this gain:
/// smallest singular value of I - DK above 1e-10 times its largest.
inline bool well_posed(const TeamProblem& prob, const BlockGain& gain) {
  const Matrix loop =
      Matrix::Identity(prob.p(), prob.p()) - prob.D * gain.assembled();
  Eigen::JacobiSVD<Matrix> svd(loop);
  const double smax = svd.singularValues().maxCoeff();
  if (smax == 0.0) return false;
  return svd.singularValues().minCoeff() > 1e-10 * smax;
}

}  // namespace teamlmi

#endif  // TEAMLMI_ORACLE_HPP_
