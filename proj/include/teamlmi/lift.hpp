// Copyright (c) the teamlmi contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLMI_LIFT_HPP_
#define TEAMLMI_LIFT_HPP_

#include <stdexcept>
#include <string>

#include "teamlmi/model.hpp"
#include "teamlmi/types.hpp"

namespace teamlmi {

/// Stacks a finite-horizon problem into a static team problem.
///
/// Stages run k = 1..M with the causal convolution
///   x(k) = A^{k-1} x(1) + sum_{l=1}^{k-1} A^{k-1-l} (B u(l) + w(l)),
/// so nature is (w(0), w(1), ..., w(M-1)) with x(1) = w(0) when
/// include_initial_state is set (otherwise x(1) = 0 and nature starts at
/// w(1)). Each (stage, player) pair becomes one team member, ordered
/// stage-major, so a decision at stage k reaches measurements only at
/// stages > k and the stacked D is strictly block lower triangular.
/// Stage costs are summed over k = 1..M with no terminal term.
inline TeamProblem lift_dynamic(const DynamicProblem& dyn) {
  const int M = dyn.horizon;
  if (M < 1) throw std::invalid_argument("lift_dynamic: horizon must be >= 1");

  const int nx = dyn.nx(), nu = dyn.nu();
  if (dyn.A.cols() != nx || dyn.B.rows() != nx)
    throw std::invalid_argument("lift_dynamic: A/B dimension mismatch");
  if (dyn.Qxx.rows() != nx || dyn.Qxx.cols() != nx ||
      dyn.Qxu.rows() != nx || dyn.Qxu.cols() != nu ||
      dyn.Quu.rows() != nu || dyn.Quu.cols() != nu)
    throw std::invalid_argument("lift_dynamic: stage cost dimension mismatch");
  if (dyn.Cmeas.empty())
    throw std::invalid_argument("lift_dynamic: need at least one player");

  const int N = static_cast<int>(dyn.Cmeas.size());
  int p_stage = 0;
  std::vector<int> mi, pi(N, 0);
  if (!dyn.m_sizes.empty()) {
    if (static_cast<int>(dyn.m_sizes.size()) != N)
      throw std::invalid_argument(
          "lift_dynamic: m_sizes must list one entry per player");
    mi = dyn.m_sizes;
    int total = 0;
    for (int v : mi) total += v;
    if (total != nu)
      throw std::invalid_argument(
          "lift_dynamic: m_sizes must sum to the input dimension");
  } else {
    if (nu % N != 0)
      throw std::invalid_argument(
          "lift_dynamic: input dimension " + std::to_string(nu) +
          " not divisible among " + std::to_string(N) +
          " players; supply m_sizes");
    mi.assign(N, nu / N);
  }
  for (int i = 0; i < N; ++i) {
    if (dyn.Cmeas[i].cols() != nx)
      throw std::invalid_argument("lift_dynamic: C_" + std::to_string(i + 1) +
                                  " column count != state dimension");
    pi[i] = static_cast<int>(dyn.Cmeas[i].rows());
    p_stage += pi[i];
  }

  const int nw = dyn.include_initial_state ? M : M - 1;  // nature blocks
  const int q = nw * nx;
  const int m_total = M * nu;
  const int p_total = M * p_stage;

  // per-stage maps x(k) = Phi_k * w_stacked + Gam_k * u_stacked
  std::vector<Matrix> Phi(M + 1), Gam(M + 1);
  Phi[1] = Matrix::Zero(nx, q);
  if (dyn.include_initial_state) Phi[1].leftCols(nx) = Matrix::Identity(nx, nx);
  Gam[1] = Matrix::Zero(nx, m_total);
  for (int k = 1; k < M; ++k) {
    Phi[k + 1] = dyn.A * Phi[k];
    // w(k) occupies block k-1 of nature when x(1) is excluded, block k else
    const int wcol = (dyn.include_initial_state ? k : k - 1) * nx;
    Phi[k + 1].middleCols(wcol, nx) += Matrix::Identity(nx, nx);
    Gam[k + 1] = dyn.A * Gam[k];
    Gam[k + 1].middleCols((k - 1) * nu, nu) += dyn.B;
  }

  TeamProblem out;
  out.partition.m_sizes.reserve(M * N);
  out.partition.p_sizes.reserve(M * N);
  for (int k = 1; k <= M; ++k)
    for (int i = 0; i < N; ++i) {
      out.partition.m_sizes.push_back(mi[i]);
      out.partition.p_sizes.push_back(pi[i]);
    }

  out.D = Matrix::Zero(p_total, m_total);
  out.E = Matrix::Zero(p_total, q);
  int row = 0;
  for (int k = 1; k <= M; ++k)
    for (int i = 0; i < N; ++i) {
      out.D.middleRows(row, pi[i]) = dyn.Cmeas[i] * Gam[k];
      out.E.middleRows(row, pi[i]) = dyn.Cmeas[i] * Phi[k];
      row += pi[i];
    }

  // cost: sum_k [x(k); u(k)]^T S [x(k); u(k)] pushed through the stage maps
  Matrix S(nx + nu, nx + nu);
  S.topLeftCorner(nx, nx) = symmetrized(dyn.Qxx);
  S.topRightCorner(nx, nu) = dyn.Qxu;
  S.bottomLeftCorner(nu, nx) = dyn.Qxu.transpose();
  S.bottomRightCorner(nu, nu) = symmetrized(dyn.Quu);

  Matrix big = Matrix::Zero(q + m_total, q + m_total);
  Matrix T(nx + nu, q + m_total);
  for (int k = 1; k <= M; ++k) {
    T.setZero();
    T.topLeftCorner(nx, q) = Phi[k];
    T.topRightCorner(nx, m_total) = Gam[k];
    T.block(nx, q + (k - 1) * nu, nu, nu) = Matrix::Identity(nu, nu);
    big += T.transpose() * S * T;
  }
  big = symmetrized(big);

  out.Qww = big.topLeftCorner(q, q);
  out.Qwu = big.topRightCorner(q, m_total);
  out.Quu = big.bottomRightCorner(m_total, m_total);
  return out;
}

}  // namespace teamlmi

#endif  // TEAMLMI_LIFT_HPP_
