// Copyright (c) the teamlmi contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLMI_CORPUS_HPP_
#define TEAMLMI_CORPUS_HPP_

#include <stdexcept>

#include "teamlmi/types.hpp"

namespace teamlmi::corpus {

/// Deterministic two-player signaling benchmark. Player 1 observes y1 and
/// pays k2*u1^2; player 2 observes y2 = y1 + u1 + (noise) and must track
/// y1 + u1. Both measurements double as the adversary's handles, so the
/// problem has no separate measurement-noise vector and is supplied
/// directly in quadratic-form coordinates x = (y1, y2):
///   numerator   J = k2*u1^2 + (y1 + u1 - u2)^2
///   denominator F = y1^2 + (y1 + u1 - y2)^2
/// The feasibility ceiling is gamma_bar = k2.
inline GammaFormProblem witsenhausen(double k2) {
  if (!(k2 > 0.0)) throw std::invalid_argument("witsenhausen: k2 must be > 0");

  GammaFormProblem prob;
  prob.q = 0;
  prob.p = 2;
  prob.m = 2;
  prob.partition = Partition{{1, 1}, {1, 1}};

  // J = k2*u1^2 + c^T c with c = y1 + u1 - u2 on (y1, y2, u1, u2).
  Vector c(4);
  c << 1.0, 0.0, 1.0, -1.0;
  prob.Q = c * c.transpose();
  prob.Q(2, 2) += k2;

  // F = a^T a + b^T b with a = y1, b = y1 - y2 + u1.
  Vector a(4), b(4);
  a << 1.0, 0.0, 0.0, 0.0;
  b << 1.0, -1.0, 1.0, 0.0;
  prob.R = a * a.transpose() + b * b.transpose();

  prob.C = Matrix::Identity(2, 2);  // q = 0: x is the measurement vector
  return prob;
}

/// Team-form companion of the two-player benchmark: decision weights
/// Quu = diag(k2, 1) and signaling pattern D = [[0,0],[1,0]] (player 1
/// writes into player 2's measurement), with nature driving y1. Its
/// feasibility ceiling is the same gamma_bar = k2. Note this form carries a
/// full-dimension measurement noise and is therefore a different game than
/// witsenhausen(k2); it exists for exercising the (D, E, v) machinery.
inline TeamProblem witsenhausen_team(double k2) {
  if (!(k2 > 0.0))
    throw std::invalid_argument("witsenhausen_team: k2 must be > 0");

  TeamProblem prob;
  prob.partition = Partition{{1, 1}, {1, 1}};
  prob.Qww = Matrix::Constant(1, 1, 1.0);
  prob.Qwu = (Matrix(1, 2) << 0.0, -1.0).finished();
  prob.Quu = (Matrix(2, 2) << k2, 0.0, 0.0, 1.0).finished();
  prob.D = (Matrix(2, 2) << 0.0, 0.0, 1.0, 0.0).finished();
  prob.E = (Matrix(2, 1) << 1.0, 0.0).finished();
  return prob;
}

/// m-stage scalar relay chain: nature seeds x0, each stage k passes its
/// decision forward as the next state, every measurement is noisy:
///   x_{k+1} = u_k,  y_k = x_k + v_k,  k = 0..m-1,
///   numerator (u_{m-1} - x0)^2 + sum_{k<=m-2} u_k^2,
///   denominator x0^2 + sum v_k^2.
/// Static data: q = 1, one scalar player per stage, Quu = I_m, D has unit
/// entries on the first subdiagonal, E routes x0 into y_0 only. The
/// feasibility ceiling is gamma_bar = 1 for every m >= 2.
inline TeamProblem multistage(int m) {
  if (m < 2) throw std::invalid_argument("multistage: m must be >= 2");

  TeamProblem prob;
  prob.partition.m_sizes.assign(m, 1);
  prob.partition.p_sizes.assign(m, 1);
  prob.Qww = Matrix::Constant(1, 1, 1.0);
  prob.Qwu = Matrix::Zero(1, m);
  prob.Qwu(0, m - 1) = -1.0;  // cross term of (u_{m-1} - x0)^2
  prob.Quu = Matrix::Identity(m, m);
  prob.D = Matrix::Zero(m, m);
  for (int k = 1; k < m; ++k) prob.D(k, k - 1) = 1.0;
  prob.E = Matrix::Zero(m, 1);
  prob.E(0, 0) = 1.0;
  return prob;
}

/// Dynamic form of the relay chain, for exercising the horizon lifting:
/// scalar state x(k+1) = u(k) + w(k), one player measuring y(k) = x(k) + v(k),
/// stage cost u(k)^2, initial state treated as nature. Its lift has the same
/// unit-subdiagonal D and gamma_bar = 1 as multistage(m).
inline DynamicProblem multistage_dynamic(int m) {
  if (m < 1) throw std::invalid_argument("multistage_dynamic: m must be >= 1");

  DynamicProblem dyn;
  dyn.A = Matrix::Zero(1, 1);
  dyn.B = Matrix::Constant(1, 1, 1.0);
  dyn.Cmeas = {Matrix::Constant(1, 1, 1.0)};
  dyn.Qxx = Matrix::Zero(1, 1);
  dyn.Qxu = Matrix::Zero(1, 1);
  dyn.Quu = Matrix::Constant(1, 1, 1.0);
  dyn.horizon = m;
  dyn.include_initial_state = true;
  return dyn;
}

}  // namespace teamlmi::corpus

#endif  // TEAMLMI_CORPUS_HPP_
