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

// Test-only oracles, generators and fixtures. Nothing here calls into the
// geometry/constraint/control code paths it is used to check, except where
// a helper says so.

#ifndef VANC_TESTS_SUPPORT_HPP_
#define VANC_TESTS_SUPPORT_HPP_

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vanc/constraint.hpp"
#include "vanc/expr.hpp"
#include "vanc/geometry.hpp"
#include "vanc/models.hpp"
#include "vanc/sim.hpp"

namespace vanc::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Eigen::VectorXd uniform_vector(std::mt19937_64& rng, int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = uniform(rng, lo, hi);
  return v;
}

inline State random_state(std::mt19937_64& rng, int n, double lo = -2.0, double hi = 2.0) {
  return State{uniform_vector(rng, n, lo, hi), uniform_vector(rng, n, lo, hi)};
}

// Central difference of e in symbol s.
inline double central_difference(const Expr& e, const std::string& s, Env env, double h = 1e-6) {
  const double x = env.at(s);
  env[s] = x + h;
  const double up = eval(e, env);
  env[s] = x - h;
  const double down = eval(e, env);
  return (up - down) / (2.0 * h);
}

// Tree-walking environment for a model at a state: coordinates, velocities
// and parameters.
inline Env model_env(const MechanicalModel& model, const State& s) {
  Env env;
  const auto& spec = model.spec();
  for (std::size_t i = 0; i < spec.coordinates.size(); ++i) {
    env[spec.coordinates[i]] = s.q(static_cast<Eigen::Index>(i));
    env[velocity_name(spec.coordinates[i])] = s.qdot(static_cast<Eigen::Index>(i));
  }
  for (const auto& [name, value] : spec.parameters) env[name] = value;
  return env;
}

inline Eigen::MatrixXd eval_grid(const std::vector<std::vector<Expr>>& grid, const Env& env) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(grid.size()),
                      grid.empty() ? 0 : static_cast<Eigen::Index>(grid.front().size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid[i].size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = eval(grid[i][j], env);
    }
  }
  return out;
}

// Christoffel symbols from finite differences of the metric entries and the
// textbook formula with an explicit inverse.
inline std::vector<Eigen::MatrixXd> christoffel_fd(const MechanicalModel& model, const Eigen::VectorXd& q,
                                                   double h = 1e-6) {
  const auto& spec = model.spec();
  const int n = model.dim();
  Env env = model_env(model, State{q, Eigen::VectorXd::Zero(n)});
  std::vector<Eigen::MatrixXd> dg(n, Eigen::MatrixXd(n, n));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) dg[k](i, j) = central_difference(spec.metric[i][j], spec.coordinates[k], env, h);
    }
  }
  const Eigen::MatrixXd ginv = eval_grid(spec.metric, env).inverse();
  std::vector<Eigen::MatrixXd> gamma(n, Eigen::MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) {
          gamma[k](i, j) += 0.5 * ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        }
      }
    }
  }
  return gamma;
}

// The constraint function as one expression per row: mu^b_i qdot^i + Z_b.
inline std::vector<Expr> phi_expressions(const MechanicalModel& model, const AffineConstraint& con) {
  std::vector<Expr> out;
  const auto& coords = model.spec().coordinates;
  for (std::size_t b = 0; b < con.spec().mu.size(); ++b) {
    Expr e = con.spec().z[b];
    for (std::size_t i = 0; i < coords.size(); ++i) {
      e = e + con.spec().mu[b][i] * Expr::symbol(velocity_name(coords[i]));
    }
    out.push_back(e);
  }
  return out;
}

// d phi(X) for the second-order field X = (qdot, accel), via symbolic
// partials of the phi expressions evaluated by the tree walker.
inline Eigen::VectorXd phi_directional(const MechanicalModel& model, const AffineConstraint& con,
                                       const State& s, const Eigen::VectorXd& accel) {
  const auto exprs = phi_expressions(model, con);
  const Env env = model_env(model, s);
  const auto& coords = model.spec().coordinates;
  Eigen::VectorXd out(static_cast<Eigen::Index>(exprs.size()));
  for (std::size_t b = 0; b < exprs.size(); ++b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < coords.size(); ++j) {
      acc += eval(diff(exprs[b], coords[j]), env) * s.qdot(static_cast<Eigen::Index>(j));
      acc += eval(diff(exprs[b], velocity_name(coords[j])), env) * accel(static_cast<Eigen::Index>(j));
    }
    out(static_cast<Eigen::Index>(b)) = acc;
  }
  return out;
}

// The closed form feedback of the boat example.
inline double boat_law(double m, const State& s) {
  const double th = s.q(2);
  return -m * s.qdot(2) * (std::cos(th) * s.qdot(0) + std::sin(th) * s.qdot(1));
}

// Particle in polar coordinates (r, theta) plus a height z: metric
// diag(1, r^2, 1), gravity V = g z, damping-like forces and one
// configuration-dependent input and constraint row, transversal for
// r >= 0.5. Exercises the Christoffel and potential terms that the boat
// never touches.
inline System build_polar_fixture() {
  ModelSpec spec;
  spec.coordinates = {"r", "theta", "z"};
  spec.parameters = {{"g", 9.81}};
  const Expr zero(0.0);
  const Expr one(1.0);
  spec.metric = {{one, zero, zero}, {zero, parse("r^2"), zero}, {zero, zero, one}};
  spec.potential = parse("g*z");
  spec.external_force = {parse("-0.1*rd"), zero, parse("0.2*sin(theta)*zd")};
  spec.inputs = {{parse("sin(theta)"), one, parse("1 + r^2")}};
  MechanicalModel model(std::move(spec));
  ConstraintSpec con;
  con.mu = {{one, parse("r*cos(theta)"), Expr(2.0)}};
  con.z = {parse("0.3*sin(r) - 0.2*z")};
  AffineConstraint c(std::move(con), model);
  return System{std::move(model), std::move(c)};
}

// Expressions met in real model files.
inline const std::vector<std::string>& corpus() {
  static const std::vector<std::string> c = {
      "sin(theta)*xd",
      "sin(theta)^2*C1 - sin(theta)*cos(theta)*C2",
      "-sin(theta)*cos(theta)*C1 + cos(theta)^2*C2",
      "cos(theta)*C2 - sin(theta)*C1",
      "m*xd^2/2 + I*thetad^2/2",
      "1 + x^2",
      "exp(-x^2/2)*cos(3*y)",
      "log(2 + sin(x*y))",
      "sqrt(1 + x^2 + y^2)",
      "tan(0.3*x) - x/(1 + y^2)",
      "(x + y)^3 - 2^x",
      "x^y",
      "sin(y)*cos(x)",
      "0.1*x*yd - 0.3*y*xd",
  };
  return c;
}

inline const std::vector<std::string>& corpus_symbols() {
  static const std::vector<std::string> s = {"x", "y", "theta", "xd", "yd", "thetad", "C1", "C2", "m", "I"};
  return s;
}

inline Env corpus_env(std::mt19937_64& rng) {
  Env env;
  for (const auto& s : corpus_symbols()) env[s] = uniform(rng, -2.0, 2.0);
  // x^y needs a positive base.
  env["x"] = uniform(rng, 0.2, 2.0);
  return env;
}

// A dense, configuration-dependent SPD metric on R^3.
inline MechanicalModel curved_3d() {
  ModelSpec spec;
  spec.coordinates = {"a", "b", "c"};
  spec.parameters = {{"k", 0.7}};
  const Expr g01 = parse("0.3*sin(a*b)");
  const Expr g02 = parse("0.2*cos(c)");
  const Expr g12 = parse("0.1*a*c/(1 + b^2)");
  spec.metric = {{parse("2 + a^2"), g01, g02}, {g01, parse("3 + sin(b)"), g12}, {g02, g12, parse("2 + exp(-c^2)")}};
  spec.potential = parse("k*(a^2 + b*c) + sin(a)");
  spec.external_force = {parse("-0.5*ad"), parse("b*cd"), Expr(0.0)};
  spec.inputs = {{Expr(1.0), parse("a"), Expr(0.0)}};
  return MechanicalModel(std::move(spec));
}

// Random expression over the given symbols whose evaluation stays finite
// and well away from domain boundaries for arguments in [-2, 2].
inline Expr random_expr(std::mt19937_64& rng, const std::vector<std::string>& symbols, int depth) {
  std::uniform_int_distribution<int> pick(0, 13);
  const int choice = depth <= 0 ? pick(rng) % 2 : pick(rng);
  auto leaf_symbol = [&] {
    return Expr::symbol(symbols[std::uniform_int_distribution<std::size_t>(0, symbols.size() - 1)(rng)]);
  };
  auto sub = [&] { return random_expr(rng, symbols, depth - 1); };
  // In [0.5, 2.5].
  auto positive = [&] { return Expr::binary(BinaryOp::kAdd, Expr(1.5), Expr::unary(UnaryOp::kSin, sub())); };
  switch (choice) {
    case 0: return Expr(std::round(uniform(rng, -3.0, 3.0) * 100.0) / 100.0);
    case 1: return leaf_symbol();
    case 2: return Expr::binary(BinaryOp::kAdd, sub(), sub());
    case 3: return Expr::binary(BinaryOp::kSub, sub(), sub());
    case 4: return Expr::binary(BinaryOp::kMul, sub(), sub());
    case 5: return Expr::binary(BinaryOp::kDiv, sub(), positive());
    case 6: return Expr::binary(BinaryOp::kPow, positive(), Expr(std::uniform_int_distribution<int>(-2, 3)(rng)));
    case 7: return Expr::unary(UnaryOp::kNeg, sub());
    case 8: return Expr::unary(UnaryOp::kSin, sub());
    case 9: return Expr::unary(UnaryOp::kCos, sub());
    case 10: return Expr::unary(UnaryOp::kLog, positive());
    case 11: return Expr::unary(UnaryOp::kExp, Expr::unary(UnaryOp::kSin, sub()));
    case 12:
      return Expr::unary(UnaryOp::kTan,
                         Expr::binary(BinaryOp::kMul, Expr(0.5), Expr::unary(UnaryOp::kCos, sub())));
    default: return Expr::unary(UnaryOp::kSqrt, positive());
  }
}

// Random small system for the transversality oracle. With `degenerate` the
// first input field is forced into ker S at every configuration (constant
// metric and constraint rows); otherwise the data is configuration dependent
// and generically transversal.
inline System random_system(std::mt19937_64& rng, int n, int m, bool degenerate) {
  std::vector<std::string> coords;
  for (int i = 0; i < n; ++i) coords.push_back("q" + std::to_string(i));
  auto sym = [&](int i) { return Expr::symbol(coords[i]); };

  const Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return uniform(rng, -1.0, 1.0); });
  const Eigen::MatrixXd g0 = a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd s0 = Eigen::MatrixXd::NullaryExpr(m, n, [&] { return uniform(rng, -1.0, 1.0); });

  ModelSpec spec;
  spec.coordinates = coords;
  spec.metric.assign(n, std::vector<Expr>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) spec.metric[i][j] = Expr(g0(i, j));
    if (!degenerate) spec.metric[i][i] = Expr(g0(i, i)) + Expr(0.2) * sin(sym(i));
  }
  spec.potential = Expr(0.0);
  spec.external_force.assign(n, Expr(0.0));

  ConstraintSpec con;
  con.mu.assign(m, std::vector<Expr>(n));
  con.z.assign(m, Expr(0.0));
  for (int b = 0; b < m; ++b) {
    for (int i = 0; i < n; ++i) {
      con.mu[b][i] = degenerate ? Expr(s0(b, i)) : Expr(s0(b, i)) + Expr(0.3) * cos(sym((i + b) % n));
    }
    con.z[b] = Expr(uniform(rng, -1.0, 1.0)) * sin(sym(b % n));
  }

  spec.inputs.assign(m, std::vector<Expr>(n));
  for (int c = 0; c < m; ++c) {
    for (int i = 0; i < n; ++i) {
      spec.inputs[c][i] = Expr(uniform(rng, -1.0, 1.0)) + Expr(0.3) * sin(sym((i + c + 1) % n));
    }
  }
  if (degenerate) {
    // f^0 = G k with S k = 0, so Y^0 = k.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s0, Eigen::ComputeFullV);
    Eigen::VectorXd k = svd.matrixV().col(n - 1);
    const Eigen::VectorXd f = g0 * k;
    for (int i = 0; i < n; ++i) spec.inputs[0][i] = Expr(f(i));
  }
  MechanicalModel model(std::move(spec));
  AffineConstraint constraint(std::move(con), model);
  return System{std::move(model), std::move(constraint)};
}

// Independent transversality decision: the columns of a kernel basis of S
// together with the input fields Y^a must span R^n.
inline bool transversal_by_kernel_basis(const System& sys, const Eigen::VectorXd& q) {
  const int n = sys.model.dim();
  const int m = sys.constraint.rows();
  const Env env = model_env(sys.model, State{q, Eigen::VectorXd::Zero(n)});
  const Eigen::MatrixXd g = eval_grid(sys.model.spec().metric, env);
  const Eigen::MatrixXd s = eval_grid(sys.constraint.spec().mu, env);
  const Eigen::MatrixXd f = eval_grid(sys.model.spec().inputs, env);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeFullV);
  Eigen::MatrixXd basis(n, n);
  basis.leftCols(n - m) = svd.matrixV().rightCols(n - m);
  basis.rightCols(m) = g.inverse() * f.transpose();
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(basis).singularValues();
  return sv.minCoeff() > 0.0 && sv.maxCoeff() / sv.minCoeff() <= 1e12;
}

// Endpoint-error ratio of runs at h and h/2 against a reference at h/100.
// The error is the max norm over (q, qdot).
inline double rk4_self_convergence_ratio(const System& sys, const State& s0, double t_end, double h) {
  auto endpoint = [&](double step) {
    const Trajectory tr = integrate(sys.model, sys.constraint, s0, t_end, step, 1u << 30);
    Eigen::VectorXd v(2 * sys.model.dim());
    v << tr.states.back().q, tr.states.back().qdot;
    return v;
  };
  const Eigen::VectorXd ref = endpoint(h / 100.0);
  const double coarse = (endpoint(h) - ref).cwiseAbs().maxCoeff();
  const double fine = (endpoint(h / 2.0) - ref).cwiseAbs().maxCoeff();
  return coarse / fine;
}

}  // namespace vanc::testing

#endif  // VANC_TESTS_SUPPORT_HPP_
