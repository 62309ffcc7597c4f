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

// Feedback synthesis for virtual affine nonholonomic constraints.
//
// Differentiating phi along the controlled second-order field
//   qddot = a_drift(q, qdot) + u_a Y^a(q),   Y^a = G^-1 f^a,
// gives the linear system P(q) u = b(q, qdot) with
//   P_ba = mu^b(Y^a),
//   b_b  = -[ (d mu^b_i / d q^j) qdot^i qdot^j + (d Z_b / d q^j) qdot^j + mu^b_i a_drift^i ].
// When P is invertible its solution is the unique control keeping phi
// constant along the closed loop. The law is evaluated on the whole tangent
// bundle, so off the constraint phi is conserved at its initial value.

#ifndef VANC_CONTROL_HPP_
#define VANC_CONTROL_HPP_

#include <Eigen/Dense>

#include "vanc/constraint.hpp"
#include "vanc/geometry.hpp"

namespace vanc {

struct ControlSolve {
  Eigen::MatrixXd p;
  Eigen::VectorXd b;
  Eigen::VectorXd tau;
  double cond = 0.0;
};

// Velocity-independent. Throws TransversalityViolation if singular or
// p_condition rejects it.
Eigen::MatrixXd p_matrix(const MechanicalModel& model, const AffineConstraint& con,
                         const Eigen::VectorXd& q);

Eigen::VectorXd b_vector(const MechanicalModel& model, const AffineConstraint& con, const State& state);

// Throws TransversalityViolation; never returns a control for singular P.
ControlSolve tau_star(const MechanicalModel& model, const AffineConstraint& con, const State& state);

// a_drift + tau*_a Y^a.
Eigen::VectorXd closed_loop_acceleration(const MechanicalModel& model, const AffineConstraint& con,
                                         const State& state);

// Both at once, sharing the metric factorization. Used by the integrator.
struct ClosedLoop {
  ControlSolve control;
  Eigen::VectorXd acceleration;
};
ClosedLoop closed_loop(const MechanicalModel& model, const AffineConstraint& con, const State& state);

}  // namespace vanc

#endif  // VANC_CONTROL_HPP_
