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

#include "vanc/sim.hpp"

#include <cmath>
#include <numbers>

#include "vanc/control.hpp"

namespace vanc {

namespace {

struct Derivative {
  Eigen::VectorXd dq;
  Eigen::VectorXd dqdot;
};

Derivative stage(const MechanicalModel& model, const AffineConstraint& con, const State& s) {
  try {
    return {s.qdot, closed_loop(model, con, s).acceleration};
  } catch (const IntegrationError&) {
    throw;
  } catch (const Error& e) {
    throw IntegrationError(std::string("RK4 stage failed: ") + e.what(), 0, s.q, s.qdot);
  }
}

void require_finite(const State& s) {
  if (!s.q.allFinite() || !s.qdot.allFinite()) {
    throw IntegrationError("non-finite state", 0, s.q, s.qdot);
  }
}

}  // namespace

State rk4_step(const MechanicalModel& model, const AffineConstraint& con, const State& state, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error("step size must be positive and finite");
  require_finite(state);
  const Derivative k1 = stage(model, con, state);
  const State s2{state.q + 0.5 * h * k1.dq, state.qdot + 0.5 * h * k1.dqdot};
  require_finite(s2);
  const Derivative k2 = stage(model, con, s2);
  const State s3{state.q + 0.5 * h * k2.dq, state.qdot + 0.5 * h * k2.dqdot};
  require_finite(s3);
  const Derivative k3 = stage(model, con, s3);
  const State s4{state.q + h * k3.dq, state.qdot + h * k3.dqdot};
  require_finite(s4);
  const Derivative k4 = stage(model, con, s4);
  State next{state.q + (h / 6.0) * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq),
             state.qdot + (h / 6.0) * (k1.dqdot + 2.0 * k2.dqdot + 2.0 * k3.dqdot + k4.dqdot)};
  require_finite(next);
  return next;
}

Trajectory integrate(const MechanicalModel& model, const AffineConstraint& con, const State& state0,
                     double t_end, double h, std::size_t sample_every) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error("t_end must be positive and finite");
  if (!(h > 0.0) || !std::isfinite(h)) throw Error("step size must be positive and finite");
  if (sample_every == 0) throw Error("sample_every must be at least 1");

  // Relative slack keeps t_end = k*h from producing a sliver step.
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / h * (1.0 - 1e-12)));

  Trajectory traj;
  auto record = [&](double t, const State& s) {
    const ControlSolve control = tau_star(model, con, s);
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.controls.push_back(control.tau);
    traj.phis.push_back(phi(con, model, s));
  };

  State state = state0;
  try {
    record(0.0, state);
  } catch (const Error& e) {
    throw IntegrationError(std::string("initial state rejected: ") + e.what(), 0, state.q, state.qdot);
  }
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t_prev = static_cast<double>(k - 1) * h;
    const double t = k == steps ? t_end : static_cast<double>(k) * h;
    try {
      state = rk4_step(model, con, state, t - t_prev);
      if (k % sample_every == 0 || k == steps) record(t, state);
    } catch (const IntegrationError& e) {
      throw IntegrationError(e.what(), traj.size() - 1, e.q(), e.qdot());
    } catch (const Error& e) {
      throw IntegrationError(e.what(), traj.size() - 1, state.q, state.qdot);
    }
  }

  traj.drift_report = Eigen::VectorXd::Zero(con.rows());
  for (const auto& p : traj.phis) {
    traj.drift_report = traj.drift_report.cwiseMax((p - traj.phis.front()).cwiseAbs());
  }
  return traj;
}

double wrap_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::fmod(angle, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  if (r > std::numbers::pi) r -= kTwoPi;
  return r;
}

}  // namespace vanc
