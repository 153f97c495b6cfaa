// Copyright (c) the teamlmi contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLMI_MODEL_HPP_
#define TEAMLMI_MODEL_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

#include "teamlmi/types.hpp"

namespace teamlmi {

inline double spectral_norm_sym(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline double relative_asymmetry(const Matrix& A) {
  const double scale = A.norm();
  if (scale == 0.0) return 0.0;
  return (A - A.transpose()).norm() / scale;
}

/// (A + A^T)/2. Inputs read from files carry round-off; callers check
/// relative_asymmetry() <= 1e-10 first and then work on the symmetrized
/// matrix throughout.
inline Matrix symmetrized(const Matrix& A) { return 0.5 * (A + A.transpose()); }

inline double min_eigenvalue(const Matrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(A), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Scale-aware definiteness tests: PD wants lambda_min > 1e-12 * max(1, |A|),
// PSD tolerates lambda_min down to -1e-10 * max(1, |A|).
inline bool is_positive_definite(const Matrix& A) {
  const double scale = std::max(1.0, spectral_norm_sym(symmetrized(A)));
  return min_eigenvalue(A) > 1e-12 * scale;
}

inline bool is_positive_semidefinite(const Matrix& A) {
  const double scale = std::max(1.0, spectral_norm_sym(symmetrized(A)));
  return min_eigenvalue(A) > -1e-10 * scale;
}

namespace detail {

inline bool all_finite(const Matrix& A) { return A.allFinite(); }

inline void check_symmetric_input(const Matrix& A, const std::string& name,
                                  std::vector<std::string>* out) {
  if (relative_asymmetry(A) > 1e-10)
    out->push_back(name + " is not symmetric (relative asymmetry " +
                   std::to_string(relative_asymmetry(A)) + ")");
}

}  // namespace detail

/// Checks the standing assumptions on a team problem. Returns one message
/// per failed invariant; an empty list means the problem is well posed.
/// Violations are data, not exceptions.
inline std::vector<std::string> validate_problem(const TeamProblem& prob) {
  std::vector<std::string> v;
  const auto& part = prob.partition;
  if (!part.valid()) {
    v.push_back("partition invalid: needs N >= 1 players with positive m_i, p_i");
    return v;
  }
  const int q = prob.q(), m = part.total_m(), p = part.total_p();

  for (const auto* mp : {&prob.Qww, &prob.Qwu, &prob.Quu, &prob.D, &prob.E})
    if (!detail::all_finite(*mp)) {
      v.push_back("problem data contains non-finite entries");
      return v;
    }

  if (prob.Qww.rows() != q || prob.Qww.cols() != q)
    v.push_back("Qww must be square q x q");
  if (prob.Qwu.rows() != q || prob.Qwu.cols() != m)
    v.push_back("Qwu dimension mismatch: expected " + std::to_string(q) + "x" +
                std::to_string(m));
  if (prob.Quu.rows() != m || prob.Quu.cols() != m)
    v.push_back("Quu dimension mismatch: expected " + std::to_string(m) + "x" +
                std::to_string(m));
  if (prob.D.rows() != p || prob.D.cols() != m)
    v.push_back("D dimension mismatch: expected " + std::to_string(p) + "x" +
                std::to_string(m));
  if (prob.E.rows() != p || prob.E.cols() != q)
    v.push_back("E dimension mismatch: expected " + std::to_string(p) + "x" +
                std::to_string(q));
  if (!v.empty()) return v;

  detail::check_symmetric_input(prob.Qww, "Qww", &v);
  detail::check_symmetric_input(prob.Quu, "Quu", &v);

  const Matrix Quu = symmetrized(prob.Quu);
  if (!is_positive_definite(Quu))
    v.push_back("Quu not positive definite (lambda_min = " +
                std::to_string(min_eigenvalue(Quu)) + ")");

  Matrix cost(q + m, q + m);
  cost.topLeftCorner(q, q) = symmetrized(prob.Qww);
  cost.topRightCorner(q, m) = prob.Qwu;
  cost.bottomLeftCorner(m, q) = prob.Qwu.transpose();
  cost.bottomRightCorner(m, m) = Quu;
  if (!is_positive_semidefinite(cost))
    v.push_back("full cost matrix not PSD (lambda_min = " +
                std::to_string(min_eigenvalue(cost)) + ")");
  return v;
}

namespace detail {

// Largest generalized eigenvalue of the pencil (S, T) with T symmetric
// positive definite, computed as lambda_max(L^-1 S L^-T) for T = L L^T.
inline double pencil_lambda_max(const Matrix& S, const Matrix& T) {
  Eigen::LLT<Matrix> llt(symmetrized(T));
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument(
        "pencil denominator matrix is not positive definite");
  const Matrix L = llt.matrixL();
  Matrix W = L.triangularView<Eigen::Lower>().solve(symmetrized(S));
  // right-divide by L^T: solve L X^T = W^T
  Matrix M = L.triangularView<Eigen::Lower>().solve(W.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(M), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace detail

/// Feasibility ceiling: inf over Du != 0 of u^T Quu u / u^T D^T D u,
/// the reciprocal of the largest generalized eigenvalue of (D^T D, Quu).
/// D = 0 leaves the infimum over an empty set: +inf.
inline double gamma_bar(const Matrix& Quu, const Matrix& D) {
  if (!is_positive_definite(Quu))
    throw std::invalid_argument("gamma_bar requires Quu positive definite");
  if (D.size() == 0 || D.isZero(0.0)) return kInf;
  const double lmax = detail::pencil_lambda_max(D.transpose() * D, Quu);
  if (lmax <= 0.0) return kInf;
  return 1.0 / lmax;
}

inline double gamma_bar(const TeamProblem& prob) {
  return gamma_bar(symmetrized(prob.Quu), prob.D);
}

/// Same ceiling read off a quadratic-form problem: the u-blocks of Q and R
/// play the roles of Quu and D^T D.
inline double gamma_bar(const GammaFormProblem& prob) {
  const int m = prob.m;
  const Matrix Quu = symmetrized(prob.Q.bottomRightCorner(m, m));
  const Matrix Ruu = symmetrized(prob.R.bottomRightCorner(m, m));
  if (!is_positive_definite(Quu))
    throw std::invalid_argument("gamma_bar requires the u-block of Q positive definite");
  if (Ruu.isZero(1e-300)) return kInf;
  const double lmax = detail::pencil_lambda_max(Ruu, Quu);
  if (lmax <= 0.0) return kInf;
  return 1.0 / lmax;
}

/// Rewrites a team problem on x = (w, y). The numerator form J carries the
/// cost blocks (zeros in all y rows/columns); the denominator form R is the
/// Gram matrix of the stacked residual (w, y - Du - Ew), so that
///   [x;u]^T R [x;u] = |y - Du - Ew|^2 + |w|^2
/// holds identically. C = [0 I] selects y from x.
inline GammaFormProblem to_gamma_form(const TeamProblem& prob) {
  const int q = prob.q(), p = prob.p(), m = prob.m();
  const int n = q + p, s = n + m;

  GammaFormProblem out;
  out.q = q;
  out.p = p;
  out.m = m;
  out.partition = prob.partition;

  out.Q = Matrix::Zero(s, s);
  out.Q.topLeftCorner(q, q) = symmetrized(prob.Qww);
  out.Q.block(0, n, q, m) = prob.Qwu;
  out.Q.block(n, 0, m, q) = prob.Qwu.transpose();
  out.Q.bottomRightCorner(m, m) = symmetrized(prob.Quu);

  // Residual map V: (w, y, u) -> (w, y - Du - Ew); R = V^T V.
  Matrix V = Matrix::Zero(q + p, s);
  V.topLeftCorner(q, q) = Matrix::Identity(q, q);
  V.block(q, 0, p, q) = -prob.E;
  V.block(q, q, p, p) = Matrix::Identity(p, p);
  V.block(q, n, p, m) = -prob.D;
  out.R = V.transpose() * V;

  out.C = Matrix::Zero(p, n);
  out.C.rightCols(p) = Matrix::Identity(p, p);

  out.source_team = prob;
  return out;
}

}  // namespace teamlmi

#endif  // TEAMLMI_MODEL_HPP_
