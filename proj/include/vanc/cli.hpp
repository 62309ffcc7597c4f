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

#ifndef VANC_CLI_HPP_
#define VANC_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "vanc/sim.hpp"

namespace vanc::cli {

// Process exit codes.
inline constexpr int kOk = 0;
inline constexpr int kMathFailure = 1;  // violation, abort
inline constexpr int kUsageError = 2;   // bad flags, unreadable model file

// Runs one command. Structured records go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// CSV trajectory: header t, coordinates, velocities, tau1.., phi1..; 17
// significant digits, locale independent. Coordinates whose indices are in
// `wrapped` are mapped to (-pi, pi].
void write_trajectory_csv(std::ostream& os, const std::vector<std::string>& coordinates,
                          const Trajectory& traj, const std::vector<int>& wrapped = {});

}  // namespace vanc::cli

#endif  // VANC_CLI_HPP_
