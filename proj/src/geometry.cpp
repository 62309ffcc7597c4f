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

#include "vanc/geometry.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace vanc {

std::string velocity_name(std::string_view coordinate) { return std::string(coordinate) + "d"; }

namespace {

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  auto start = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  if (!start(s[0])) return false;
  for (char c : s) {
    if (!start(c) && !(c >= '0' && c <= '9')) return false;
  }
  return true;
}

void require_known_symbols(const Expr& e, const SymbolTable& symbols, const std::string& where) {
  for (const auto& s : free_symbols(e)) {
    if (symbols.find(s) < 0) throw ModelError(where + ": unknown symbol '" + s + "'");
  }
}

void require_velocity_free(const Expr& e, const std::vector<std::string>& coordinates,
                           const std::string& where) {
  for (const auto& c : coordinates) {
    if (depends_on(e, velocity_name(c))) {
      throw ModelError(where + ": depends on velocity '" + velocity_name(c) + "'");
    }
  }
}

std::string index_label(const std::string& field, std::size_t i) {
  return field + "[" + std::to_string(i) + "]";
}

std::string index_label(const std::string& field, std::size_t i, std::size_t j) {
  return field + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

}  // namespace

MechanicalModel::MechanicalModel(ModelSpec spec) : spec_(std::move(spec)) {
  n_ = static_cast<int>(spec_.coordinates.size());
  if (n_ < 1) throw ModelError("model needs at least one coordinate");
  const auto n = static_cast<std::size_t>(n_);

  std::set<std::string> seen;
  auto claim = [&](const std::string& name, const char* what) {
    if (!is_identifier(name)) throw ModelError(std::string(what) + " '" + name + "' is not an identifier");
    if (!seen.insert(name).second) throw ModelError("name '" + name + "' is used twice");
  };
  for (const auto& c : spec_.coordinates) claim(c, "coordinate");
  for (const auto& c : spec_.coordinates) claim(velocity_name(c), "velocity");
  for (const auto& [name, value] : spec_.parameters) {
    claim(name, "parameter");
    if (!std::isfinite(value)) throw ModelError("parameter '" + name + "' is not finite");
  }

  for (const auto& c : spec_.coordinates) symbols_.add(c);
  for (const auto& c : spec_.coordinates) symbols_.add(velocity_name(c));
  for (const auto& [name, value] : spec_.parameters) {
    symbols_.add(name);
    parameter_values_.push_back(value);
  }

  if (spec_.metric.size() != n) throw ModelError("metric must have n rows");
  for (auto& row : spec_.metric) {
    if (row.size() != n) throw ModelError("metric must have n columns");
    for (auto& g : row) g = fold(g);
  }
  spec_.potential = fold(spec_.potential);
  if (spec_.external_force.size() != n) throw ModelError("external_force must have n entries");
  for (auto& f : spec_.external_force) f = fold(f);

  m_ = static_cast<int>(spec_.inputs.size());
  if (m_ < 1) throw ModelError("model needs at least one control input");
  if (m_ >= n_) throw ModelError("number of inputs must be smaller than the dimension");
  for (auto& row : spec_.inputs) {
    if (row.size() != n) throw ModelError("each input covector must have n entries");
    for (auto& f : row) f = fold(f);
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::string where = index_label("metric", i, j);
      require_known_symbols(spec_.metric[i][j], symbols_, where);
      require_velocity_free(spec_.metric[i][j], spec_.coordinates, where);
      if (!structurally_equal(spec_.metric[i][j], spec_.metric[j][i])) {
        throw ModelError("metric is not symmetric at " + where);
      }
    }
  }
  require_known_symbols(spec_.potential, symbols_, "potential");
  require_velocity_free(spec_.potential, spec_.coordinates, "potential");
  for (std::size_t i = 0; i < n; ++i) {
    require_known_symbols(spec_.external_force[i], symbols_, index_label("external_force", i));
  }
  for (std::size_t a = 0; a < spec_.inputs.size(); ++a) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::string where = index_label("inputs", a, i);
      require_known_symbols(spec_.inputs[a][i], symbols_, where);
      require_velocity_free(spec_.inputs[a][i], spec_.coordinates, where);
    }
  }

  for (const auto& row : spec_.metric) {
    for (const auto& g : row) metric_.emplace_back(g, symbols_);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (const auto& row : spec_.metric) {
      for (const auto& g : row) metric_derivatives_.emplace_back(diff(g, spec_.coordinates[k]), symbols_);
    }
  }
  for (const auto& c : spec_.coordinates) {
    potential_differential_.emplace_back(diff(spec_.potential, c), symbols_);
  }
  for (const auto& f : spec_.external_force) external_force_.emplace_back(f, symbols_);
  for (const auto& row : spec_.inputs) {
    for (const auto& f : row) inputs_.emplace_back(f, symbols_);
  }
}

std::vector<double> MechanicalModel::slots(const Eigen::VectorXd& q) const {
  return slots(State{q, Eigen::VectorXd::Zero(n_)});
}

std::vector<double> MechanicalModel::slots(const State& state) const {
  if (state.q.size() != n_ || state.qdot.size() != n_) {
    throw ModelError("state dimension does not match the model (expected " + std::to_string(n_) + ")");
  }
  if (!state.q.allFinite() || !state.qdot.allFinite()) throw ModelError("state has non-finite entries");
  std::vector<double> out;
  out.reserve(symbols_.size());
  out.insert(out.end(), state.q.data(), state.q.data() + n_);
  out.insert(out.end(), state.qdot.data(), state.qdot.data() + n_);
  out.insert(out.end(), parameter_values_.begin(), parameter_values_.end());
  return out;
}

Eigen::MatrixXd MechanicalModel::eval_metric(std::span<const double> slots) const {
  Eigen::MatrixXd g(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) g(i, j) = metric_[i * n_ + j](slots);
  }
  return g;
}

std::vector<Eigen::MatrixXd> MechanicalModel::eval_metric_derivatives(std::span<const double> slots) const {
  std::vector<Eigen::MatrixXd> out(n_, Eigen::MatrixXd(n_, n_));
  for (int k = 0; k < n_; ++k) {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) out[k](i, j) = metric_derivatives_[(k * n_ + i) * n_ + j](slots);
    }
  }
  return out;
}

Eigen::VectorXd MechanicalModel::eval_potential_differential(std::span<const double> slots) const {
  Eigen::VectorXd dv(n_);
  for (int i = 0; i < n_; ++i) dv(i) = potential_differential_[i](slots);
  return dv;
}

Eigen::VectorXd MechanicalModel::eval_external_force(std::span<const double> slots) const {
  Eigen::VectorXd f(n_);
  for (int i = 0; i < n_; ++i) f(i) = external_force_[i](slots);
  return f;
}

Eigen::MatrixXd MechanicalModel::eval_input_coframe(std::span<const double> slots) const {
  Eigen::MatrixXd f(m_, n_);
  for (int a = 0; a < m_; ++a) {
    for (int i = 0; i < n_; ++i) f(a, i) = inputs_[a * n_ + i](slots);
  }
  return f;
}

MetricSolver::MetricSolver(const Eigen::MatrixXd& g) : g_(g) {
  if (!g_.allFinite()) throw MetricError("metric has non-finite entries", Eigen::VectorXd());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g_, Eigen::EigenvaluesOnly);
  eigenvalues_ = eig.eigenvalues();
  const double lo = eigenvalues_.minCoeff();
  const double hi = eigenvalues_.maxCoeff();
  if (!(lo > 0.0)) {
    std::ostringstream msg;
    msg << "metric is not positive definite (min eigenvalue " << lo << ")";
    throw MetricError(msg.str(), eigenvalues_);
  }
  cond_ = hi / lo;
  if (cond_ > kConditionCap) {
    std::ostringstream msg;
    msg << "metric is ill-conditioned (condition " << cond_ << ")";
    throw MetricError(msg.str(), eigenvalues_);
  }
  llt_.compute(g_);
  if (llt_.info() != Eigen::Success) throw MetricError("Cholesky factorization failed", eigenvalues_);
}

Eigen::MatrixXd metric_at(const MechanicalModel& model, const Eigen::VectorXd& q) {
  return MetricSolver(model.eval_metric(model.slots(q))).matrix();
}

Christoffel christoffel_at(const MechanicalModel& model, const Eigen::VectorXd& q) {
  const auto slots = model.slots(q);
  const MetricSolver metric(model.eval_metric(slots));
  const auto dg = model.eval_metric_derivatives(slots);
  const int n = model.dim();

  // First kind: lowered[l](i, j) = 1/2 (d_i g_jl + d_j g_il - d_l g_ij).
  Christoffel lowered(n, Eigen::MatrixXd(n, n));
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        lowered[l](i, j) = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        lowered[l](j, i) = lowered[l](i, j);
      }
    }
  }

  Christoffel gamma(n, Eigen::MatrixXd::Zero(n, n));
  Eigen::VectorXd column(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int l = 0; l < n; ++l) column(l) = lowered[l](i, j);
      const Eigen::VectorXd raised = metric.solve(column);
      for (int k = 0; k < n; ++k) {
        gamma[k](i, j) = raised(k);
        gamma[k](j, i) = raised(k);
      }
    }
  }
  return gamma;
}

Eigen::VectorXd sharp(const MechanicalModel& model, const Eigen::VectorXd& q,
                      const Eigen::VectorXd& covector) {
  if (covector.size() != model.dim()) throw ModelError("covector dimension mismatch");
  return MetricSolver(model.eval_metric(model.slots(q))).solve(covector);
}

Eigen::VectorXd flat(const MechanicalModel& model, const Eigen::VectorXd& q,
                     const Eigen::VectorXd& vector) {
  if (vector.size() != model.dim()) throw ModelError("vector dimension mismatch");
  return MetricSolver(model.eval_metric(model.slots(q))).matrix() * vector;
}

Eigen::VectorXd grad_potential(const MechanicalModel& model, const Eigen::VectorXd& q) {
  const auto slots = model.slots(q);
  const MetricSolver metric(model.eval_metric(slots));
  return metric.solve(model.eval_potential_differential(slots));
}

Eigen::VectorXd drift_acceleration(const MechanicalModel& model, const State& state) {
  const auto slots = model.slots(state);
  const MetricSolver metric(model.eval_metric(slots));
  return drift_acceleration(model, slots, state.qdot, metric);
}

Eigen::VectorXd drift_acceleration(const MechanicalModel& model, std::span<const double> slots,
                                   const Eigen::VectorXd& qdot, const MetricSolver& metric) {
  const int n = model.dim();
  const auto dg = model.eval_metric_derivatives(slots);

  // Lowered quadratic term: sum_ij Gamma_{l,ij} qdot^i qdot^j
  //   = sum_i (d_i g)_{jl} qdot^i qdot^j - 1/2 qdot^T (d_l g) qdot.
  Eigen::MatrixXd directional = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) directional += qdot(i) * dg[i];
  Eigen::VectorXd quadratic = directional * qdot;
  for (int l = 0; l < n; ++l) quadratic(l) -= 0.5 * qdot.dot(dg[l] * qdot);

  const Eigen::VectorXd rhs =
      model.eval_external_force(slots) - model.eval_potential_differential(slots) - quadratic;
  return metric.solve(rhs);
}

}  // namespace vanc
