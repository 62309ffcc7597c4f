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

#include "vanc/models.hpp"

#include <cmath>

namespace vanc {

namespace {

// sum_j d f / d q^j * qdot^j
Expr total_derivative(const Expr& f, const std::vector<std::string>& coordinates) {
  Expr out(0.0);
  for (const auto& c : coordinates) out = out + diff(f, c) * Expr::symbol(velocity_name(c));
  return out;
}

}  // namespace

System build_boat(const Expr& c1, const Expr& c2, double m, double inertia) {
  if (!(m > 0.0) || !std::isfinite(m)) throw ModelError("boat mass must be positive");
  if (!(inertia > 0.0) || !std::isfinite(inertia)) throw ModelError("boat inertia must be positive");
  for (const Expr* c : {&c1, &c2}) {
    for (const auto& s : free_symbols(*c)) {
      if (s != "x" && s != "y") throw ModelError("boat current may only depend on x and y, found '" + s + "'");
    }
  }

  const std::vector<std::string> coords{"x", "y", "theta"};
  const Expr theta = Expr::symbol("theta");
  const Expr mass = Expr::symbol("m");
  const Expr zero(0.0);
  const Expr s = sin(theta);
  const Expr c = cos(theta);

  // Velocity field the unforced boat drifts with.
  const Expr drift_x = pow(s, Expr(2.0)) * c1 - s * c * c2;
  const Expr drift_y = -(s * c) * c1 + pow(c, Expr(2.0)) * c2;

  ModelSpec spec;
  spec.coordinates = coords;
  spec.parameters = {{"m", m}, {"I", inertia}};
  spec.metric = {{mass, zero, zero}, {zero, mass, zero}, {zero, zero, Expr::symbol("I")}};
  spec.potential = zero;
  spec.external_force = {mass * total_derivative(drift_x, coords), mass * total_derivative(drift_y, coords),
                         zero};
  spec.inputs = {{s, -c, Expr(1.0)}};
  MechanicalModel model(std::move(spec));

  ConstraintSpec con;
  con.mu = {{s, -c, zero}};
  con.z = {c * c2 - s * c1};
  AffineConstraint constraint(std::move(con), model);
  return System{std::move(model), std::move(constraint)};
}

System build_linear_fixture() {
  const Expr theta = Expr::symbol("theta");
  const Expr zero(0.0);
  const Expr one(1.0);

  ModelSpec spec;
  spec.coordinates = {"x", "y", "theta"};
  spec.metric = {{one, zero, zero}, {zero, one, zero}, {zero, zero, one}};
  spec.potential = zero;
  spec.external_force = {zero, zero, zero};
  spec.inputs = {{sin(theta), -cos(theta), one}};
  MechanicalModel model(std::move(spec));

  ConstraintSpec con;
  con.mu = {{sin(theta), -cos(theta), zero}};
  con.z = {zero};
  AffineConstraint constraint(std::move(con), model);
  return System{std::move(model), std::move(constraint)};
}

System build_degenerate_fixture() {
  const Expr zero(0.0);
  const Expr one(1.0);

  ModelSpec spec;
  spec.coordinates = {"x", "y"};
  spec.metric = {{one, zero}, {zero, one}};
  spec.potential = zero;
  spec.external_force = {zero, zero};
  spec.inputs = {{zero, one}};
  MechanicalModel model(std::move(spec));

  ConstraintSpec con;
  con.mu = {{one, zero}};
  con.z = {zero};
  AffineConstraint constraint(std::move(con), model);
  return System{std::move(model), std::move(constraint)};
}

std::vector<BoatCurrent> boat_current_fixtures() {
  return {
      {"still", Expr(0.0), Expr(0.0)},
      {"shear", parse("0.3"), parse("0.1*x")},
      {"swirl", parse("sin(y)"), parse("cos(x)")},
  };
}

}  // namespace vanc
