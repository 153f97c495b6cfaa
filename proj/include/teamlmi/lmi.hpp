// Copyright (c) the teamlmi contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLMI_LMI_HPP_
#define TEAMLMI_LMI_HPP_

#include <Eigen/Eigenvalues>

#include <stdexcept>
#include <vector>

#include "teamlmi/model.hpp"
#include "teamlmi/types.hpp"

namespace teamlmi {

/// Partitioned gamma-shifted form Q - gamma*R on (x, u).
struct GammaMatrix {
  Matrix Qxx;  // n x n
  Matrix Qxu;  // n x m
  Matrix Quu;  // m x m
  double gamma = 0.0;
  bool quu_pd = false;
  double quu_min_eig = 0.0;
  double quu_condition = 0.0;
};

inline GammaMatrix assemble_gamma_matrix(const GammaFormProblem& prob,
                                         double gamma) {
  const int n = prob.n(), m = prob.m;
  const Matrix G = symmetrized(prob.Q - gamma * prob.R);

  GammaMatrix out;
  out.gamma = gamma;
  out.Qxx = G.topLeftCorner(n, n);
  out.Qxu = G.topRightCorner(n, m);
  out.Quu = G.bottomRightCorner(m, m);

  Eigen::SelfAdjointEigenSolver<Matrix> es(out.Quu, Eigen::EigenvaluesOnly);
  out.quu_min_eig = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  out.quu_pd = out.quu_min_eig > 1e-12 * std::max(1.0, lmax);
  out.quu_condition = out.quu_pd ? lmax / out.quu_min_eig : kInf;
  return out;
}

namespace detail {

inline Matrix sym_inverse(const Matrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(A);
  const Vector inv = es.eigenvalues().cwiseInverse();
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

inline double lambda_max(const Matrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(A), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace detail

/// Schur-complement feasibility block
///   [[Qxx(g) + Qxu(g)KC + (KC)^T Qxu(g)^T,  (KC)^T ],
///    [ KC,                                  -Quu(g)^-1 ]]
/// Negative semidefiniteness of this matrix is equivalent to
/// [I; KC]^T (Q - gamma R) [I; KC] <= 0, and it is affine in K.
/// Requires Quu(gamma) > 0, i.e. gamma below the feasibility ceiling.
inline Matrix schur_lmi(const GammaFormProblem& prob, const BlockGain& gain,
                        double gamma) {
  const int n = prob.n(), m = prob.m;
  const GammaMatrix G = assemble_gamma_matrix(prob, gamma);
  if (!G.quu_pd)
    throw std::invalid_argument(
        "schur_lmi: Quu(gamma) is not positive definite; gamma >= gamma_bar "
        "or the problem is invalid");

  const Matrix KC = gain.assembled() * prob.C;
  Matrix M(n + m, n + m);
  M.topLeftCorner(n, n) =
      G.Qxx + G.Qxu * KC + KC.transpose() * G.Qxu.transpose();
  M.topRightCorner(n, m) = KC.transpose();
  M.bottomLeftCorner(m, n) = KC;
  M.bottomRightCorner(m, m) = -detail::sym_inverse(G.Quu);
  return symmetrized(M);
}

/// The Schur block as an affine function of the free gain entries:
/// LMI(K) = M0 + sum_j k_j M_j. Entries are enumerated player-major, then
/// row-major within each block, so bases are reproducible across runs.
struct AffineLMI {
  Matrix M0;
  std::vector<Matrix> basis;

  Matrix assemble(const Vector& k) const {
    Matrix M = M0;
    for (int j = 0; j < k.size(); ++j) M += k[j] * basis[j];
    return M;
  }
};

/// Flattens the diagonal blocks into the documented entry order.
inline Vector pack_gain(const BlockGain& gain) {
  int d = 0;
  for (const auto& b : gain.blocks) d += static_cast<int>(b.size());
  Vector k(d);
  int j = 0;
  for (const auto& b : gain.blocks)
    for (int r = 0; r < b.rows(); ++r)
      for (int c = 0; c < b.cols(); ++c) k[j++] = b(r, c);
  return k;
}

inline BlockGain unpack_gain(const Vector& k, const Partition& part) {
  BlockGain gain = BlockGain::zero(part);
  int j = 0;
  for (auto& b : gain.blocks)
    for (int r = 0; r < b.rows(); ++r)
      for (int c = 0; c < b.cols(); ++c) b(r, c) = k[j++];
  return gain;
}

inline AffineLMI affine_basis(const GammaFormProblem& prob, double gamma) {
  const int n = prob.n(), m = prob.m;
  const GammaMatrix G = assemble_gamma_matrix(prob, gamma);
  if (!G.quu_pd)
    throw std::invalid_argument(
        "affine_basis: Quu(gamma) is not positive definite");

  AffineLMI out;
  out.M0 = Matrix::Zero(n + m, n + m);
  out.M0.topLeftCorner(n, n) = G.Qxx;
  out.M0.bottomRightCorner(m, m) = -detail::sym_inverse(G.Quu);

  int row0 = 0, col0 = 0;
  for (std::size_t i = 0; i < prob.partition.m_sizes.size(); ++i) {
    const int mi = prob.partition.m_sizes[i], pi = prob.partition.p_sizes[i];
    for (int r = 0; r < mi; ++r) {
      for (int c = 0; c < pi; ++c) {
        Matrix KC = Matrix::Zero(m, n);
        KC.row(row0 + r) = prob.C.row(col0 + c);
        Matrix Mj = Matrix::Zero(n + m, n + m);
        Mj.topLeftCorner(n, n) = G.Qxu * KC + KC.transpose() * G.Qxu.transpose();
        Mj.topRightCorner(n, m) = KC.transpose();
        Mj.bottomLeftCorner(m, n) = KC;
        out.basis.push_back(std::move(Mj));
      }
    }
    row0 += mi;
    col0 += pi;
  }
  return out;
}

/// lambda_max of the Schur block; the gain is feasible at gamma iff the
/// margin does not exceed feasibility_tolerance().
inline double feasibility_margin(const GammaFormProblem& prob,
                                 const BlockGain& gain, double gamma) {
  return detail::lambda_max(schur_lmi(prob, gain, gamma));
}

/// Scale-aware slack for the exact "<= 0" test: 1e-8 * max(1, |M0|).
inline double feasibility_tolerance(const GammaFormProblem& prob, double gamma,
                                    double factor = 1e-8) {
  const BlockGain zero = BlockGain::zero(prob.partition);
  const double scale = spectral_norm_sym(schur_lmi(prob, zero, gamma));
  return factor * std::max(1.0, scale);
}

/// Direct (non-Schur) route to the same feasibility test:
/// lambda_max of [I; KC]^T (Q - gamma R) [I; KC].
inline double direct_margin(const GammaFormProblem& prob, const BlockGain& gain,
                            double gamma) {
  const int n = prob.n(), m = prob.m;
  Matrix I_KC(n + m, n);
  I_KC.topRows(n) = Matrix::Identity(n, n);
  I_KC.bottomRows(m) = gain.assembled() * prob.C;
  const Matrix G = prob.Q - gamma * prob.R;
  return detail::lambda_max(I_KC.transpose() * G * I_KC);
}

}  // namespace teamlmi

#endif  // TEAMLMI_LMI_HPP_
