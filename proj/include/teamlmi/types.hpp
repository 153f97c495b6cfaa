// Copyright (c) the teamlmi contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLMI_TYPES_HPP_
#define TEAMLMI_TYPES_HPP_

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace teamlmi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Thrown when a closed measurement loop y = DKy + Ew + v has no unique
/// solution (I - DK singular). Distinct from plain numerical failures so
/// callers can map it to a dedicated exit code.
class IllPosedLoopError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decision/measurement split across players. Player i owns an m_i-vector
/// decision computed from a p_i-vector measurement.
struct Partition {
  std::vector<int> m_sizes;
  std::vector<int> p_sizes;

  int players() const { return static_cast<int>(m_sizes.size()); }
  int total_m() const {
    int s = 0;
    for (int v : m_sizes) s += v;
    return s;
  }
  int total_p() const {
    int s = 0;
    for (int v : p_sizes) s += v;
    return s;
  }
  bool valid() const {
    if (m_sizes.empty() || m_sizes.size() != p_sizes.size()) return false;
    for (int v : m_sizes)
      if (v < 1) return false;
    for (int v : p_sizes)
      if (v < 1) return false;
    return true;
  }
};

/// Block-diagonal strategy K = diag(K_1, ..., K_N), block i of shape
/// m_i x p_i.
struct BlockGain {
  std::vector<Matrix> blocks;

  static BlockGain zero(const Partition& part) {
    BlockGain g;
    g.blocks.reserve(part.m_sizes.size());
    for (std::size_t i = 0; i < part.m_sizes.size(); ++i)
      g.blocks.push_back(Matrix::Zero(part.m_sizes[i], part.p_sizes[i]));
    return g;
  }

  bool shape_matches(const Partition& part) const {
    if (blocks.size() != part.m_sizes.size()) return false;
    for (std::size_t i = 0; i < blocks.size(); ++i)
      if (blocks[i].rows() != part.m_sizes[i] ||
          blocks[i].cols() != part.p_sizes[i])
        return false;
    return true;
  }

  /// Full m x p gain with the blocks on the diagonal, zeros elsewhere.
  Matrix assembled() const {
    int m = 0, p = 0;
    for (const auto& b : blocks) {
      m += static_cast<int>(b.rows());
      p += static_cast<int>(b.cols());
    }
    Matrix K = Matrix::Zero(m, p);
    int r = 0, c = 0;
    for (const auto& b : blocks) {
      K.block(r, c, b.rows(), b.cols()) = b;
      r += static_cast<int>(b.rows());
      c += static_cast<int>(b.cols());
    }
    return K;
  }

  double norm() const {
    double s = 0.0;
    for (const auto& b : blocks) s += b.squaredNorm();
    return std::sqrt(s);
  }
};

/// Static team game against nature: cost
///   L(w,u) = [w;u]^T [[Qww, Qwu],[Qwu^T, Quu]] [w;u]
/// with measurements y = Du + Ew + v. Nature plays (w, v); the team plays
/// u_i = mu_i(y_i).
struct TeamProblem {
  Matrix Qww;  // q x q, symmetric
  Matrix Qwu;  // q x m
  Matrix Quu;  // m x m, symmetric positive definite
  Matrix D;    // p x m, block D_ij couples player j's decision into y_i
  Matrix E;    // p x q
  Partition partition;

  int q() const { return static_cast<int>(Qww.rows()); }
  int m() const { return static_cast<int>(Quu.rows()); }
  int p() const { return static_cast<int>(D.rows()); }
};

/// Quadratic-form representation on x = (w, y): numerator J(x,u) =
/// [x;u]^T Q [x;u], denominator F(x,u) = [x;u]^T R [x;u], measurement
/// selector y = Cx. This is the native input of the LMI machinery and can
/// also be supplied directly when a problem has no natural (D, E, v)
/// decomposition.
struct GammaFormProblem {
  Matrix Q;  // (n+m) x (n+m), symmetric, n = q + p
  Matrix R;  // (n+m) x (n+m), symmetric positive semidefinite
  Matrix C;  // p x n, selects y from x = (w, y)
  Partition partition;
  int q = 0;
  int p = 0;
  int m = 0;

  // Present when the form was derived from a TeamProblem; used to map
  // worst-case witnesses back to (w, v) coordinates.
  std::optional<TeamProblem> source_team;

  int n() const { return q + p; }
  int dim() const { return n() + m; }
};

/// Finite-horizon LQ problem with per-player memoryless measurements:
///   x(k+1) = A x(k) + B u(k) + w(k),   y_i(k) = C_i x(k) + v_i(k),
///   u_i(k) = mu_{k,i}(y_i(k)),         k = 1..horizon,
/// stage cost [x;u]^T [[Qxx, Qxu],[Qxu^T, Quu]] [x;u] summed over stages.
/// When include_initial_state is set, x(1) is an extra nature vector w(0);
/// otherwise x(1) = 0.
struct DynamicProblem {
  Matrix A;
  Matrix B;
  std::vector<Matrix> Cmeas;  // one measurement matrix per player
  Matrix Qxx;
  Matrix Qxu;
  Matrix Quu;
  int horizon = 0;
  bool include_initial_state = true;
  // per-player slice of the input vector; empty means an equal split
  std::vector<int> m_sizes;

  int nx() const { return static_cast<int>(A.rows()); }
  int nu() const { return static_cast<int>(B.cols()); }
};

struct SolverConfig {
  double gamma_tol = 1e-4;  // bisection bracket width target
  double feas_tol = 1e-8;   // scale-aware LMI feasibility slack factor
  int max_outer = 60;       // bisection iteration cap
  int max_inner = 5000;     // eigenvalue-minimization iteration cap
  double inner_tol = 1e-9;  // stationarity tolerance of the inner solve
  std::optional<double> gamma_lo;
  std::optional<double> gamma_hi;
  std::uint64_t seed = 0;
};

struct BisectionStep {
  double gamma = 0.0;
  bool feasible = false;
  double margin = 0.0;
};

struct SolveReport {
  double gamma_star = kInf;
  BlockGain gain;
  double lmi_margin = kInf;    // lambda_max of the LMI at (gain, gamma_star)
  double oracle_gamma = kInf;  // independently verified worst-case ratio
  double gamma_bar = kInf;
  std::vector<BisectionStep> trace;
  bool assumption_ok = true;   // false when the upper bracket is infeasible
  bool inner_converged = true;
  int outer_iterations = 0;
  int inner_iterations = 0;
  std::uint64_t seed = 0;
  double gamma_tol = 0.0;
  double feas_tol = 0.0;
  double gain_norm = 0.0;
  double wall_time_s = 0.0;
};

}  // namespace teamlmi

#endif  // TEAMLMI_TYPES_HPP_
