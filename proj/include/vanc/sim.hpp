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

#ifndef VANC_SIM_HPP_
#define VANC_SIM_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "vanc/constraint.hpp"
#include "vanc/geometry.hpp"

namespace vanc {

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<Eigen::VectorXd> controls;  // tau* at each sample
  std::vector<Eigen::VectorXd> phis;
  // Per constraint row: max over samples of |phi_b(t) - phi_b(0)|.
  Eigen::VectorXd drift_report;

  std::size_t size() const { return times.size(); }
};

// One classical RK4 step of (q, qdot)' = (qdot, closed-loop acceleration),
// re-solving tau* at every stage. Throws IntegrationError carrying the stage
// state if the control cannot be solved there.
State rk4_step(const MechanicalModel& model, const AffineConstraint& con, const State& state, double h);

// Fixed-step integration over [0, t_end]. Samples every `sample_every` steps
// and always at the final step; the last step is shortened to land on t_end.
Trajectory integrate(const MechanicalModel& model, const AffineConstraint& con, const State& state0,
                     double t_end, double h, std::size_t sample_every = 1);

// Maps an angle to (-pi, pi].
double wrap_angle(double angle);

}  // namespace vanc

#endif  // VANC_SIM_HPP_
