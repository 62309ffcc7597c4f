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

#include "vanc/constraint.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace vanc {

namespace {

void validate_entry(const Expr& e, const MechanicalModel& model, const std::string& where) {
  for (const auto& s : free_symbols(e)) {
    if (model.symbols().find(s) < 0) throw ModelError(where + ": unknown symbol '" + s + "'");
  }
  for (const auto& c : model.spec().coordinates) {
    if (depends_on(e, velocity_name(c))) {
      throw ModelError(where + ": depends on velocity '" + velocity_name(c) + "'");
    }
  }
}

double largest_singular_value(const Eigen::MatrixXd& a) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
}

}  // namespace

PCondition p_condition(const Eigen::MatrixXd& s, const Eigen::MatrixXd& y, const Eigen::MatrixXd& p) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  PCondition out;
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(p).singularValues();
  const double lo = sv.size() ? sv.minCoeff() : 0.0;
  if (!(lo > 0.0)) {
    out.cond = kInf;
    out.scaled = kInf;
    return out;
  }
  out.cond = sv.maxCoeff() / lo;
  out.scaled = largest_singular_value(s) * largest_singular_value(y) / lo;
  out.ok = std::isfinite(out.cond) && std::isfinite(out.scaled) && out.cond <= kConditionCap &&
           out.scaled <= kConditionCap;
  return out;
}

AffineConstraint::AffineConstraint(ConstraintSpec spec, const MechanicalModel& model)
    : spec_(std::move(spec)), n_(model.dim()), m_(static_cast<int>(spec_.mu.size())) {
  const auto n = static_cast<std::size_t>(n_);
  if (m_ < 1) throw ModelError("constraint needs at least one row");
  if (spec_.z.size() != spec_.mu.size()) throw ModelError("constraint Z must have one entry per mu row");
  if (m_ != model.num_inputs()) {
    throw ModelError("number of constraints (" + std::to_string(m_) +
                     ") must equal the number of control inputs (" +
                     std::to_string(model.num_inputs()) + ")");
  }
  for (std::size_t b = 0; b < spec_.mu.size(); ++b) {
    if (spec_.mu[b].size() != n) throw ModelError("each constraint row mu must have n entries");
    for (std::size_t i = 0; i < n; ++i) {
      spec_.mu[b][i] = fold(spec_.mu[b][i]);
      validate_entry(spec_.mu[b][i], model,
                     "constraint.mu[" + std::to_string(b) + "][" + std::to_string(i) + "]");
    }
    spec_.z[b] = fold(spec_.z[b]);
    validate_entry(spec_.z[b], model, "constraint.Z[" + std::to_string(b) + "]");
  }

  const auto& symbols = model.symbols();
  const auto& coords = model.spec().coordinates;
  for (const auto& row : spec_.mu) {
    for (const auto& e : row) s_.emplace_back(e, symbols);
  }
  for (const auto& e : spec_.z) z_.emplace_back(e, symbols);
  for (const auto& row : spec_.mu) {
    for (const auto& e : row) {
      for (const auto& c : coords) ds_.emplace_back(diff(e, c), symbols);
    }
  }
  for (const auto& e : spec_.z) {
    for (const auto& c : coords) dz_.emplace_back(diff(e, c), symbols);
  }
}

AffineConstraint AffineConstraint::from_vector_field(std::vector<std::vector<Expr>> mu,
                                                     const std::vector<Expr>& x,
                                                     const MechanicalModel& model) {
  if (x.size() != static_cast<std::size_t>(model.dim())) {
    throw ModelError("constraint vector field X must have n entries");
  }
  for (std::size_t i = 0; i < x.size(); ++i) validate_entry(fold(x[i]), model, "constraint.X[" + std::to_string(i) + "]");
  std::vector<Expr> z;
  for (const auto& row : mu) {
    if (row.size() != x.size()) throw ModelError("each constraint row mu must have n entries");
    Expr sx(0.0);
    for (std::size_t i = 0; i < row.size(); ++i) sx = sx + row[i] * x[i];
    z.push_back(-sx);
  }
  return AffineConstraint(ConstraintSpec{std::move(mu), std::move(z)}, model);
}

Eigen::MatrixXd AffineConstraint::eval_s(std::span<const double> slots) const {
  Eigen::MatrixXd s(m_, n_);
  for (int b = 0; b < m_; ++b) {
    for (int i = 0; i < n_; ++i) s(b, i) = s_[b * n_ + i](slots);
  }
  return s;
}

Eigen::VectorXd AffineConstraint::eval_z(std::span<const double> slots) const {
  Eigen::VectorXd z(m_);
  for (int b = 0; b < m_; ++b) z(b) = z_[b](slots);
  return z;
}

std::vector<Eigen::MatrixXd> AffineConstraint::eval_s_derivatives(std::span<const double> slots) const {
  std::vector<Eigen::MatrixXd> out(m_, Eigen::MatrixXd(n_, n_));
  for (int b = 0; b < m_; ++b) {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) out[b](i, j) = ds_[(b * n_ + i) * n_ + j](slots);
    }
  }
  return out;
}

Eigen::MatrixXd AffineConstraint::eval_z_jacobian(std::span<const double> slots) const {
  Eigen::MatrixXd dz(m_, n_);
  for (int b = 0; b < m_; ++b) {
    for (int j = 0; j < n_; ++j) dz(b, j) = dz_[b * n_ + j](slots);
  }
  return dz;
}

Eigen::VectorXd phi(const AffineConstraint& con, const MechanicalModel& model, const State& state) {
  const auto slots = model.slots(state);
  return con.eval_s(slots) * state.qdot + con.eval_z(slots);
}

RankReport rank_check(const AffineConstraint& con, const MechanicalModel& model,
                      const Eigen::VectorXd& q) {
  const Eigen::MatrixXd s = con.eval_s(model.slots(q));
  RankReport report;
  report.required = con.rows();
  report.singular_values = Eigen::JacobiSVD<Eigen::MatrixXd>(s).singularValues();
  const double hi = report.singular_values.size() ? report.singular_values.maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < report.singular_values.size(); ++i) {
    if (hi > 0.0 && report.singular_values(i) > kRankTolerance * hi) ++report.rank;
  }
  report.ok = report.rank == report.required;
  return report;
}

TransversalityReport transversality_check(const AffineConstraint& con, const MechanicalModel& model,
                                          const Eigen::VectorXd& q) {
  TransversalityReport report;
  report.q = q;
  const RankReport rank = rank_check(con, model, q);
  if (!rank.ok) {
    report.cond = std::numeric_limits<double>::infinity();
    report.scaled_cond = report.cond;
    report.reason = "constraint rank " + std::to_string(rank.rank) + " < " + std::to_string(rank.required);
    return report;
  }
  const auto slots = model.slots(q);
  const MetricSolver metric(model.eval_metric(slots));
  const Eigen::MatrixXd inputs = metric.solve(model.eval_input_coframe(slots).transpose());
  const Eigen::MatrixXd s = con.eval_s(slots);
  report.p = s * inputs;
  report.det = report.p.determinant();
  const PCondition c = p_condition(s, inputs, report.p);
  report.cond = c.cond;
  report.scaled_cond = c.scaled;
  report.ok = c.ok;
  if (!report.ok) {
    std::ostringstream msg;
    msg << "input distribution is not transversal to the constraint (cond(P) = " << c.cond
        << ", |S||Y|/sigma_min(P) = " << c.scaled << ")";
    report.reason = msg.str();
  }
  return report;
}

State project_onto_A(const AffineConstraint& con, const MechanicalModel& model, const State& state) {
  const auto slots = model.slots(state);
  const RankReport rank = rank_check(con, model, state.q);
  if (!rank.ok) {
    throw RankDefectError("constraint rank " + std::to_string(rank.rank) + " < " +
                              std::to_string(rank.required),
                          rank.singular_values);
  }
  const MetricSolver metric(model.eval_metric(slots));
  const Eigen::MatrixXd s = con.eval_s(slots);
  const Eigen::VectorXd residual = s * state.qdot + con.eval_z(slots);
  const Eigen::MatrixXd ginv_st = metric.solve(s.transpose());
  const Eigen::MatrixXd schur = s * ginv_st;
  const Eigen::VectorXd multiplier = schur.ldlt().solve(residual);
  return State{state.q, state.qdot - ginv_st * multiplier};
}

}  // namespace vanc
