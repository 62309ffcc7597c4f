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

// Bundled systems.

#ifndef VANC_MODELS_HPP_
#define VANC_MODELS_HPP_

#include <string>
#include <vector>

#include "vanc/constraint.hpp"
#include "vanc/expr.hpp"
#include "vanc/geometry.hpp"

namespace vanc {

struct System {
  MechanicalModel model;
  AffineConstraint constraint;
};

// Planar boat carrying a payload in a position-dependent current (C1, C2).
// Coordinates (x, y, theta), parameters m and I.
//
//   metric        diag(m, m, I), V = 0
//   force         (W1, W2, 0),  W1 = m d(sin^2 C1 - sin cos C2)(qdot),
//                               W2 = m d(-sin cos C1 + cos^2 C2)(qdot)
//   input         u (sin theta dx - cos theta dy + dtheta)
//   constraint    sin theta xd - cos theta yd + cos theta C2 - sin theta C1 = 0
//
// The closed-loop control is u = -m thetad (cos theta xd + sin theta yd) for
// every current. C1 and C2 may only depend on x and y.
System build_boat(const Expr& c1, const Expr& c2, double m, double inertia);

// The boat current-free knife edge with unit mass and inertia: Euclidean
// metric, mu = sin theta dx - cos theta dy, Z = 0.
System build_linear_fixture();

// Euclidean plane with mu = dx and the single input along dy, so the input
// field lies in ker S. Every control solve on it must fail.
System build_degenerate_fixture();

struct BoatCurrent {
  std::string name;
  Expr c1;
  Expr c2;
};

// Test currents: still water, a linear shear and a smooth swirl.
std::vector<BoatCurrent> boat_current_fixtures();

}  // namespace vanc

#endif  // VANC_MODELS_HPP_
