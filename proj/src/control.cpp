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

#include "vanc/control.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace vanc {

namespace {

struct Evaluated {
  Eigen::MatrixXd s;
  Eigen::MatrixXd input_fields;  // n x m, column a is Y^a
  Eigen::MatrixXd p;
  double cond = 0.0;
};

Evaluated evaluate_p(const MechanicalModel& model, const AffineConstraint& con,
                     std::span<const double> slots, const MetricSolver& metric, const Eigen::VectorXd& q) {
  if (con.dim() != model.dim() || con.rows() != model.num_inputs()) {
    throw ModelError("constraint was not built for this model");
  }
  Evaluated out;
  out.s = con.eval_s(slots);
  out.input_fields = metric.solve(model.eval_input_coframe(slots).transpose());
  out.p = out.s * out.input_fields;
  const PCondition c = p_condition(out.s, out.input_fields, out.p);
  out.cond = c.cond;
  if (!c.ok) {
    std::ostringstream msg;
    msg << "transversality violation: P is singular or ill-conditioned (cond " << c.cond
        << ", |S||Y|/sigma_min(P) " << c.scaled << ")";
    throw TransversalityViolation(msg.str(), out.p, out.cond, q);
  }
  return out;
}

Eigen::VectorXd evaluate_b(const AffineConstraint& con, std::span<const double> slots,
                           const Eigen::MatrixXd& s, const Eigen::VectorXd& qdot,
                           const Eigen::VectorXd& drift) {
  const auto ds = con.eval_s_derivatives(slots);
  const Eigen::VectorXd dz_qdot = con.eval_z_jacobian(slots) * qdot;
  const Eigen::VectorXd s_drift = s * drift;
  Eigen::VectorXd b(con.rows());
  for (int k = 0; k < con.rows(); ++k) {
    b(k) = -(qdot.dot(ds[k] * qdot) + dz_qdot(k) + s_drift(k));
  }
  return b;
}

}  // namespace

Eigen::MatrixXd p_matrix(const MechanicalModel& model, const AffineConstraint& con,
                         const Eigen::VectorXd& q) {
  const auto slots = model.slots(q);
  const MetricSolver metric(model.eval_metric(slots));
  return evaluate_p(model, con, slots, metric, q).p;
}

Eigen::VectorXd b_vector(const MechanicalModel& model, const AffineConstraint& con, const State& state) {
  const auto slots = model.slots(state);
  const MetricSolver metric(model.eval_metric(slots));
  const Eigen::VectorXd drift = drift_acceleration(model, slots, state.qdot, metric);
  return evaluate_b(con, slots, con.eval_s(slots), state.qdot, drift);
}

ClosedLoop closed_loop(const MechanicalModel& model, const AffineConstraint& con, const State& state) {
  const auto slots = model.slots(state);
  const MetricSolver metric(model.eval_metric(slots));
  const Evaluated ev = evaluate_p(model, con, slots, metric, state.q);
  const Eigen::VectorXd drift = drift_acceleration(model, slots, state.qdot, metric);

  ClosedLoop out;
  out.control.p = ev.p;
  out.control.cond = ev.cond;
  out.control.b = evaluate_b(con, slots, ev.s, state.qdot, drift);
  out.control.tau = ev.p.partialPivLu().solve(out.control.b);
  out.acceleration = drift + ev.input_fields * out.control.tau;
  return out;
}

ControlSolve tau_star(const MechanicalModel& model, const AffineConstraint& con, const State& state) {
  return closed_loop(model, con, state).control;
}

Eigen::VectorXd closed_loop_acceleration(const MechanicalModel& model, const AffineConstraint& con,
                                         const State& state) {
  return closed_loop(model, con, state).acceleration;
}

}  // namespace vanc
