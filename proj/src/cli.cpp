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

#include "vanc/cli.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vanc/control.hpp"
#include "vanc/model_file.hpp"

namespace vanc::cli {

namespace {

using nlohmann::json;

// Bad flag values; maps to kUsageError.
class UsageError : public Error {
 public:
  using Error::Error;
};

double parse_real(std::string_view text, const std::string& flag) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw UsageError(flag + ": '" + std::string(text) + "' is not a finite number");
  }
  return v;
}

Eigen::VectorXd parse_vector(const std::string& text, int n, const std::string& flag) {
  std::vector<double> values;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    values.push_back(parse_real(std::string_view(text).substr(start, comma - start), flag));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (static_cast<int>(values.size()) != n) {
    throw UsageError(flag + ": expected " + std::to_string(n) + " comma-separated values, got " +
                     std::to_string(values.size()));
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), n);
}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

// JSON has no infinity.
json real_or_inf(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

void emit(std::ostream& out, const json& record) { out << record.dump(2) << "\n"; }

// --grid NAME=LO:HI:COUNT
struct GridAxis {
  int coordinate = 0;
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;
};

GridAxis parse_grid(const std::string& text, const std::vector<std::string>& coords) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError("--grid: expected NAME=LO:HI:COUNT, got '" + text + "'");
  const std::string name = text.substr(0, eq);
  GridAxis axis;
  auto it = std::find(coords.begin(), coords.end(), name);
  if (it == coords.end()) throw UsageError("--grid: unknown coordinate '" + name + "'");
  axis.coordinate = static_cast<int>(it - coords.begin());
  const std::string rest = text.substr(eq + 1);
  const auto c1 = rest.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : rest.find(':', c1 + 1);
  if (c2 == std::string::npos) throw UsageError("--grid: expected NAME=LO:HI:COUNT, got '" + text + "'");
  axis.lo = parse_real(std::string_view(rest).substr(0, c1), "--grid");
  axis.hi = parse_real(std::string_view(rest).substr(c1 + 1, c2 - c1 - 1), "--grid");
  const double count = parse_real(std::string_view(rest).substr(c2 + 1), "--grid");
  if (count < 1 || count != std::floor(count) || count > 1e6) {
    throw UsageError("--grid: COUNT must be a positive integer");
  }
  axis.count = static_cast<int>(count);
  return axis;
}

std::vector<Eigen::VectorXd> expand_grid(const std::vector<GridAxis>& axes, int n) {
  std::vector<Eigen::VectorXd> points{Eigen::VectorXd::Zero(n)};
  for (const auto& axis : axes) {
    std::vector<Eigen::VectorXd> next;
    for (const auto& p : points) {
      for (int k = 0; k < axis.count; ++k) {
        Eigen::VectorXd q = p;
        q(axis.coordinate) =
            axis.count == 1 ? axis.lo : axis.lo + (axis.hi - axis.lo) * k / (axis.count - 1);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

int cmd_check(const System& sys, const std::vector<std::string>& point_flags,
              const std::vector<std::string>& grid_flags, std::ostream& out) {
  const auto& coords = sys.model.spec().coordinates;
  const int n = sys.model.dim();
  std::vector<Eigen::VectorXd> points;
  for (const auto& p : point_flags) points.push_back(parse_vector(p, n, "--point"));
  if (!grid_flags.empty()) {
    std::vector<GridAxis> axes;
    for (const auto& g : grid_flags) axes.push_back(parse_grid(g, coords));
    for (auto& q : expand_grid(axes, n)) points.push_back(std::move(q));
  }
  if (points.empty()) points.push_back(Eigen::VectorXd::Zero(n));

  json verdicts = json::array();
  int failed = 0;
  for (const auto& q : points) {
    json v;
    v["q"] = to_json(q);
    try {
      const RankReport rank = rank_check(sys.constraint, sys.model, q);
      v["rank"] = {{"ok", rank.ok},
                   {"rank", rank.rank},
                   {"required", rank.required},
                   {"singular_values", to_json(rank.singular_values)}};
      const TransversalityReport tr = transversality_check(sys.constraint, sys.model, q);
      v["transversality"] = {{"ok", tr.ok},
                             {"P", to_json(tr.p)},
                             {"det", tr.det},
                             {"cond", real_or_inf(tr.cond)},
                             {"scaled_cond", real_or_inf(tr.scaled_cond)}};
      if (!tr.ok) v["transversality"]["reason"] = tr.reason;
      v["ok"] = rank.ok && tr.ok;
    } catch (const Error& e) {
      v["ok"] = false;
      v["error"] = e.what();
    }
    if (!v["ok"].get<bool>()) ++failed;
    verdicts.push_back(std::move(v));
  }
  emit(out, {{"command", "check"},
             {"num_points", points.size()},
             {"num_failed", failed},
             {"all_ok", failed == 0},
             {"points", std::move(verdicts)}});
  return failed == 0 ? kOk : kMathFailure;
}

int cmd_control_at(const System& sys, const std::string& q_flag, const std::string& qdot_flag,
                   std::ostream& out) {
  const int n = sys.model.dim();
  const State state{parse_vector(q_flag, n, "--q"), parse_vector(qdot_flag, n, "--qdot")};
  try {
    const ControlSolve solve = tau_star(sys.model, sys.constraint, state);
    emit(out, {{"command", "control-at"},
               {"q", to_json(state.q)},
               {"qdot", to_json(state.qdot)},
               {"P", to_json(solve.p)},
               {"b", to_json(solve.b)},
               {"tau", to_json(solve.tau)},
               {"cond", solve.cond},
               {"phi", to_json(phi(sys.constraint, sys.model, state))}});
    return kOk;
  } catch (const TransversalityViolation& e) {
    emit(out, {{"command", "control-at"},
               {"error", e.what()},
               {"q", to_json(e.q())},
               {"P", to_json(e.p())},
               {"cond", real_or_inf(e.cond())}});
    return kMathFailure;
  } catch (const Error& e) {
    emit(out, {{"command", "control-at"}, {"error", e.what()}});
    return kMathFailure;
  }
}

struct SimulateFlags {
  std::string q0;
  std::string qdot0;
  double t_end = 0.0;
  double dt = 0.0;
  long sample_every = 1;
  bool project = false;
  std::string out_path;
  std::vector<std::string> wrap;
};

int cmd_simulate(const System& sys, const SimulateFlags& flags, std::ostream& out, std::ostream& err) {
  const auto& coords = sys.model.spec().coordinates;
  const int n = sys.model.dim();
  if (!(flags.dt > 0.0) || !std::isfinite(flags.dt)) throw UsageError("--dt must be positive");
  if (!(flags.t_end > 0.0) || !std::isfinite(flags.t_end)) throw UsageError("--t-end must be positive");
  if (flags.sample_every < 1) throw UsageError("--sample-every must be at least 1");
  std::vector<int> wrapped;
  for (const auto& w : flags.wrap) {
    auto it = std::find(coords.begin(), coords.end(), w);
    if (it == coords.end()) throw UsageError("--wrap: unknown coordinate '" + w + "'");
    wrapped.push_back(static_cast<int>(it - coords.begin()));
  }
  State state0{parse_vector(flags.q0, n, "--q0"),
               flags.qdot0.empty() ? Eigen::VectorXd::Zero(n) : parse_vector(flags.qdot0, n, "--qdot0")};

  const auto started = std::chrono::steady_clock::now();
  Trajectory traj;
  try {
    if (flags.project) state0 = project_onto_A(sys.constraint, sys.model, state0);
    traj = integrate(sys.model, sys.constraint, state0, flags.t_end, flags.dt,
                     static_cast<std::size_t>(flags.sample_every));
  } catch (const IntegrationError& e) {
    emit(out, {{"command", "simulate"},
               {"error", e.what()},
               {"last_good_sample", e.last_good_sample()},
               {"q", to_json(e.q())},
               {"qdot", to_json(e.qdot())}});
    return kMathFailure;
  } catch (const Error& e) {
    emit(out, {{"command", "simulate"}, {"error", e.what()}});
    return kMathFailure;
  }
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (!flags.out_path.empty()) {
    std::ofstream csv(flags.out_path, std::ios::binary);
    if (!csv) {
      err << "cannot write " << flags.out_path << "\n";
      return kUsageError;
    }
    write_trajectory_csv(csv, coords, traj, wrapped);
  }

  Eigen::VectorXd max_abs_phi = Eigen::VectorXd::Zero(sys.constraint.rows());
  for (const auto& p : traj.phis) max_abs_phi = max_abs_phi.cwiseMax(p.cwiseAbs());
  json record{{"command", "simulate"},
              {"samples", traj.size()},
              {"t_end", traj.times.back()},
              {"dt", flags.dt},
              {"projected", flags.project},
              {"q0", to_json(traj.states.front().q)},
              {"qdot0", to_json(traj.states.front().qdot)},
              {"phi0", to_json(traj.phis.front())},
              {"phi_final", to_json(traj.phis.back())},
              {"max_abs_phi", to_json(max_abs_phi)},
              {"drift_report", to_json(traj.drift_report)},
              {"runtime_s", runtime}};
  record["out"] = flags.out_path.empty() ? json(nullptr) : json(flags.out_path);
  emit(out, record);
  return kOk;
}

struct ExportFlags {
  std::string fixture;
  std::string c1 = "0";
  std::string c2 = "0";
  double m = 1.0;
  double inertia = 1.0;
  std::string out_path;
};

int cmd_export(const ExportFlags& flags, std::ostream& out, std::ostream& err) {
  System sys = [&] {
    if (flags.fixture == "boat") {
      auto read = [](const std::string& text, const char* flag) {
        try {
          return parse(text);
        } catch (const ParseError& e) {
          throw UsageError(std::string(flag) + ": " + e.what());
        }
      };
      return build_boat(read(flags.c1, "--c1"), read(flags.c2, "--c2"), flags.m, flags.inertia);
    }
    if (flags.fixture == "linear") return build_linear_fixture();
    return build_degenerate_fixture();
  }();
  const std::string text = write_model_file(sys);
  if (flags.out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(flags.out_path, std::ios::binary);
    if (!f) {
      err << "cannot write " << flags.out_path << "\n";
      return kUsageError;
    }
    f << text;
  }
  return kOk;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const std::vector<std::string>& coordinates,
                          const Trajectory& traj, const std::vector<int>& wrapped) {
  const int n = static_cast<int>(coordinates.size());
  const int m = traj.controls.empty() ? 0 : static_cast<int>(traj.controls.front().size());
  os << "t";
  for (const auto& c : coordinates) os << ',' << c;
  for (const auto& c : coordinates) os << ',' << velocity_name(c);
  for (int b = 1; b <= m; ++b) os << ",tau" << b;
  for (int b = 1; b <= m; ++b) os << ",phi" << b;
  os << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    Eigen::VectorXd q = traj.states[k].q;
    for (int i : wrapped) q(i) = wrap_angle(q(i));
    os << format_real(traj.times[k]);
    for (int i = 0; i < n; ++i) os << ',' << format_real(q(i));
    for (int i = 0; i < n; ++i) os << ',' << format_real(traj.states[k].qdot(i));
    for (int b = 0; b < m; ++b) os << ',' << format_real(traj.controls[k](b));
    for (int b = 0; b < m; ++b) os << ',' << format_real(traj.phis[k](b));
    os << '\n';
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feedback synthesis and simulation for virtual affine nonholonomic constraints", "vanc"};
  app.require_subcommand(1);

  std::string model_path;
  std::vector<std::string> point_flags;
  std::vector<std::string> grid_flags;
  auto* check = app.add_subcommand("check", "Check constraint rank and transversality at points");
  check->add_option("model", model_path, "Model file")->required();
  check->add_option("--point", point_flags, "Configuration q as comma-separated values (repeatable)");
  check->add_option("--grid", grid_flags, "Grid axis NAME=LO:HI:COUNT (repeatable); other coordinates at 0");

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Integrate the closed-loop system");
  simulate->add_option("model", model_path, "Model file")->required();
  simulate->add_option("--q0", sim.q0, "Initial configuration")->required();
  simulate->add_option("--qdot0", sim.qdot0, "Initial velocity (default zero)");
  simulate->add_option("--t-end", sim.t_end, "Final time")->required();
  simulate->add_option("--dt", sim.dt, "Step size")->required();
  simulate->add_option("--sample-every", sim.sample_every, "Record every N steps");
  simulate->add_flag("--project", sim.project, "Project the initial velocity onto the constraint");
  simulate->add_option("--out", sim.out_path, "CSV trajectory output");
  simulate->add_option("--wrap", sim.wrap, "Wrap this coordinate to (-pi, pi] in the CSV (repeatable)");

  std::string q_flag;
  std::string qdot_flag;
  auto* control_at = app.add_subcommand("control-at", "Solve for the feedback control at a state");
  control_at->add_option("model", model_path, "Model file")->required();
  control_at->add_option("--q", q_flag, "Configuration")->required();
  control_at->add_option("--qdot", qdot_flag, "Velocity")->required();

  ExportFlags exp;
  auto* export_cmd = app.add_subcommand("export", "Write a bundled system as a model file");
  export_cmd->add_option("fixture", exp.fixture, "boat | linear | degenerate")
      ->required()
      ->check(CLI::IsMember({"boat", "linear", "degenerate"}));
  export_cmd->add_option("--c1", exp.c1, "Boat current, x component (expression in x, y)");
  export_cmd->add_option("--c2", exp.c2, "Boat current, y component (expression in x, y)");
  export_cmd->add_option("--m", exp.m, "Boat mass");
  export_cmd->add_option("--I", exp.inertia, "Boat moment of inertia");
  export_cmd->add_option("--out", exp.out_path, "Output path (default standard output)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (export_cmd->parsed()) return cmd_export(exp, out, err);
    const System sys = load_model_file(model_path);
    if (check->parsed()) return cmd_check(sys, point_flags, grid_flags, out);
    if (control_at->parsed()) return cmd_control_at(sys, q_flag, qdot_flag, out);
    return cmd_simulate(sys, sim, out, err);
  } catch (const ModelFileError& e) {
    json record{{"error", e.what()}, {"location", e.location()}};
    if (e.offset()) record["offset"] = *e.offset();
    emit(out, record);
    err << "vanc: " << e.what() << "\n";
    return kUsageError;
  } catch (const UsageError& e) {
    err << "vanc: " << e.what() << "\n";
    return kUsageError;
  } catch (const ModelError& e) {
    err << "vanc: " << e.what() << "\n";
    return kUsageError;
  }
}

}  // namespace vanc::cli
