// Copyright 2026 The vanc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Mechanical control systems in a single chart: metric, potential, external
// force and control coframe, plus the Levi-Civita data derived from them.

#ifndef VANC_GEOMETRY_HPP_
#define VANC_GEOMETRY_HPP_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vanc/expr.hpp"

namespace vanc {

// Largest accepted ratio between extreme eigen/singular values of any matrix
// we solve with.
inline constexpr double kConditionCap = 1e12;

// Velocity symbol of a coordinate: "x" -> "xd".
std::string velocity_name(std::string_view coordinate);

struct State {
  Eigen::VectorXd q;
  Eigen::VectorXd qdot;
};

// Symbolic description of a mechanical control system.
struct ModelSpec {
  std::vector<std::string> coordinates;
  std::map<std::string, double> parameters;
  std::vector<std::vector<Expr>> metric;   // n x n, symmetric as written
  Expr potential;                          // V(q)
  std::vector<Expr> external_force;        // covector F0(q, qdot), n entries
  std::vector<std::vector<Expr>> inputs;   // m rows f^a(q), each n entries
};

// Validated, compiled model. Immutable; evaluation is thread-safe.
//
// Slot layout of every compiled expression: [q (n), qdot (n), parameters].
class MechanicalModel {
 public:
  // Throws ModelError on any inconsistency: dimensions, unknown symbols,
  // velocity dependence of metric/potential/coframe, asymmetric metric,
  // m >= n.
  explicit MechanicalModel(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  int dim() const { return n_; }
  int num_inputs() const { return m_; }
  const SymbolTable& symbols() const { return symbols_; }

  // Fills the evaluation slots. Throws ModelError on dimension mismatch or
  // non-finite entries.
  std::vector<double> slots(const Eigen::VectorXd& q) const;
  std::vector<double> slots(const State& state) const;

  // Raw evaluations from prepared slots; no positivity checks.
  Eigen::MatrixXd eval_metric(std::span<const double> slots) const;
  // Element k holds the matrix of partials d g_ij / d q^k.
  std::vector<Eigen::MatrixXd> eval_metric_derivatives(std::span<const double> slots) const;
  Eigen::VectorXd eval_potential_differential(std::span<const double> slots) const;
  Eigen::VectorXd eval_external_force(std::span<const double> slots) const;
  // m x n, row a is the covector f^a.
  Eigen::MatrixXd eval_input_coframe(std::span<const double> slots) const;

 private:
  ModelSpec spec_;
  int n_ = 0;
  int m_ = 0;
  SymbolTable symbols_;
  std::vector<double> parameter_values_;
  std::vector<Program> metric_;                  // row-major n*n
  std::vector<Program> metric_derivatives_;      // [k][i][j] flattened
  std::vector<Program> potential_differential_;  // n
  std::vector<Program> external_force_;          // n
  std::vector<Program> inputs_;                  // row-major m*n
};

// Cholesky factorization of an evaluated metric with the positivity and
// conditioning checks applied. Throws MetricError.
class MetricSolver {
 public:
  explicit MetricSolver(const Eigen::MatrixXd& g);

  const Eigen::MatrixXd& matrix() const { return g_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double cond() const { return cond_; }

  template <typename Rhs>
  Eigen::Matrix<double, Eigen::Dynamic, Rhs::ColsAtCompileTime> solve(
      const Eigen::MatrixBase<Rhs>& rhs) const {
    return llt_.solve(rhs);
  }

 private:
  Eigen::MatrixXd g_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd eigenvalues_;
  double cond_ = 1.0;
};

// Gamma^k_ij stored as one symmetric n x n matrix per upper index k.
using Christoffel = std::vector<Eigen::MatrixXd>;

Eigen::MatrixXd metric_at(const MechanicalModel& model, const Eigen::VectorXd& q);
Christoffel christoffel_at(const MechanicalModel& model, const Eigen::VectorXd& q);

// Index raising and lowering with the metric at q.
Eigen::VectorXd sharp(const MechanicalModel& model, const Eigen::VectorXd& q,
                      const Eigen::VectorXd& covector);
Eigen::VectorXd flat(const MechanicalModel& model, const Eigen::VectorXd& q,
                     const Eigen::VectorXd& vector);

Eigen::VectorXd grad_potential(const MechanicalModel& model, const Eigen::VectorXd& q);

// Acceleration of the unactuated forced system:
//   a^k = -Gamma^k_ij qdot^i qdot^j - (grad V)^k + (G^-1 F0)^k.
Eigen::VectorXd drift_acceleration(const MechanicalModel& model, const State& state);

// Same, from slots already prepared for the state and a factored metric.
Eigen::VectorXd drift_acceleration(const MechanicalModel& model, std::span<const double> slots,
                                   const Eigen::VectorXd& qdot, const MetricSolver& metric);

}  // namespace vanc

#endif  // VANC_GEOMETRY_HPP_
