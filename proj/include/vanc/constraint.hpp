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

// Affine velocity constraints phi(q, qdot) = S(q) qdot + Z(q).

#ifndef VANC_CONSTRAINT_HPP_
#define VANC_CONSTRAINT_HPP_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vanc/expr.hpp"
#include "vanc/geometry.hpp"

namespace vanc {

// Relative singular-value threshold for rank decisions on S(q).
inline constexpr double kRankTolerance = 1e-9;

struct ConstraintSpec {
  std::vector<std::vector<Expr>> mu;  // m rows of n, the one-forms mu^b
  std::vector<Expr> z;                // m affine terms Z_b(q)
};

// Compiled against the slot layout of the model it was built for.
class AffineConstraint {
 public:
  // Throws ModelError if dimensions disagree with the model, an entry depends
  // on a velocity or an unknown symbol, or the number of constraints differs
  // from the number of control inputs.
  AffineConstraint(ConstraintSpec spec, const MechanicalModel& model);

  // Builds Z = -S X from a vector field X whose entries depend on q only.
  static AffineConstraint from_vector_field(std::vector<std::vector<Expr>> mu,
                                            const std::vector<Expr>& x,
                                            const MechanicalModel& model);

  const ConstraintSpec& spec() const { return spec_; }
  int rows() const { return m_; }
  int dim() const { return n_; }

  Eigen::MatrixXd eval_s(std::span<const double> slots) const;
  Eigen::VectorXd eval_z(std::span<const double> slots) const;
  // Element b holds the n x n matrix (i, j) -> d mu^b_i / d q^j.
  std::vector<Eigen::MatrixXd> eval_s_derivatives(std::span<const double> slots) const;
  // m x n matrix (b, j) -> d Z_b / d q^j.
  Eigen::MatrixXd eval_z_jacobian(std::span<const double> slots) const;

 private:
  ConstraintSpec spec_;
  int n_ = 0;
  int m_ = 0;
  std::vector<Program> s_;    // row-major m*n
  std::vector<Program> z_;    // m
  std::vector<Program> ds_;   // [b][i][j]
  std::vector<Program> dz_;   // [b][j]
};

Eigen::VectorXd phi(const AffineConstraint& con, const MechanicalModel& model, const State& state);

struct RankReport {
  bool ok = false;
  int rank = 0;
  int required = 0;
  Eigen::VectorXd singular_values;
};

// ok iff sigma_min(S(q)) > kRankTolerance * sigma_max(S(q)).
RankReport rank_check(const AffineConstraint& con, const MechanicalModel& model,
                      const Eigen::VectorXd& q);

// Conditioning of P = S Y, with Y the n x m matrix of input fields. `cond`
// is sigma_max(P) / sigma_min(P). `scaled` is |S| |Y| / sigma_min(P): the
// entries of P carry rounding of order eps |S| |Y|, so a P that vanishes up to
// cancellation is caught even when m = 1 and cond(P) is trivially 1.
struct PCondition {
  double cond = 0.0;
  double scaled = 0.0;
  bool ok = false;  // both finite and at most kConditionCap
};

PCondition p_condition(const Eigen::MatrixXd& s, const Eigen::MatrixXd& y, const Eigen::MatrixXd& p);

struct TransversalityReport {
  bool ok = false;
  Eigen::MatrixXd p;  // mu^b(Y^a), empty when the rank check failed
  double det = 0.0;
  double cond = 0.0;  // sigma_max / sigma_min of P, infinite when singular
  double scaled_cond = 0.0;
  Eigen::VectorXd q;
  std::string reason;  // empty when ok
};

// The affine distribution and the input distribution are transversal at q
// iff P(q) is invertible, judged by p_condition.
TransversalityReport transversality_check(const AffineConstraint& con, const MechanicalModel& model,
                                          const Eigen::VectorXd& q);

// Kinetic-energy-minimal velocity correction onto the constraint:
//   qdot' = qdot - G^-1 S^T (S G^-1 S^T)^-1 phi(q, qdot).
// Throws RankDefectError.
State project_onto_A(const AffineConstraint& con, const MechanicalModel& model, const State& state);

}  // namespace vanc

#endif  // VANC_CONSTRAINT_HPP_
