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

#include "vanc/model_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace vanc {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ModelFileError(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
    }
  }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ModelFileError(where, "missing key '" + key + "'");
  return *it;
}

Expr read_expr(const json& j, const std::string& where) {
  if (!j.is_string()) throw ModelFileError(where, "expected an expression string");
  try {
    return parse(j.get<std::string>());
  } catch (const ParseError& e) {
    throw ModelFileError(where, e.what(), e.offset());
  }
}

std::vector<Expr> read_expr_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw ModelFileError(where, "expected an array of expressions");
  std::vector<Expr> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(read_expr(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<std::vector<Expr>> read_expr_grid(const json& j, const std::string& where) {
  if (!j.is_array()) throw ModelFileError(where, "expected an array of rows");
  std::vector<std::vector<Expr>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(read_expr_vector(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json write_grid(const std::vector<std::vector<Expr>>& grid) {
  json out = json::array();
  for (const auto& row : grid) {
    json r = json::array();
    for (const auto& e : row) r.push_back(to_string(e));
    out.push_back(std::move(r));
  }
  return out;
}

json write_vector(const std::vector<Expr>& v) {
  json out = json::array();
  for (const auto& e : v) out.push_back(to_string(e));
  return out;
}

System from_json(const json& root) {
  if (!root.is_object()) throw ModelFileError("", "model file must be a JSON object");
  reject_unknown_keys(root,
                      {"n", "coordinates", "parameters", "metric", "potential", "external_force", "inputs",
                       "constraint"},
                      "");

  ModelSpec spec;
  const json& coords = require(root, "coordinates", "");
  if (!coords.is_array()) throw ModelFileError("coordinates", "expected an array of names");
  for (const auto& c : coords) {
    if (!c.is_string()) throw ModelFileError("coordinates", "expected an array of names");
    spec.coordinates.push_back(c.get<std::string>());
  }
  const std::size_t n = spec.coordinates.size();
  if (auto it = root.find("n"); it != root.end()) {
    if (!it->is_number_unsigned() || it->get<std::size_t>() != n) {
      throw ModelFileError("n", "does not match the number of coordinates");
    }
  }

  if (auto it = root.find("parameters"); it != root.end()) {
    if (!it->is_object()) throw ModelFileError("parameters", "expected an object of name: number");
    for (const auto& item : it->items()) {
      if (!item.value().is_number()) throw ModelFileError("parameters." + item.key(), "expected a number");
      spec.parameters[item.key()] = item.value().get<double>();
    }
  }

  spec.metric = read_expr_grid(require(root, "metric", ""), "metric");
  if (auto it = root.find("potential"); it != root.end()) {
    spec.potential = read_expr(*it, "potential");
  }
  if (auto it = root.find("external_force"); it != root.end()) {
    spec.external_force = read_expr_vector(*it, "external_force");
  } else {
    spec.external_force.assign(n, Expr(0.0));
  }
  spec.inputs = read_expr_grid(require(root, "inputs", ""), "inputs");

  const json& con = require(root, "constraint", "");
  if (!con.is_object()) throw ModelFileError("constraint", "expected an object");
  reject_unknown_keys(con, {"mu", "Z", "X"}, "constraint");
  auto mu = read_expr_grid(require(con, "mu", "constraint"), "constraint.mu");
  const bool has_z = con.contains("Z");
  const bool has_x = con.contains("X");
  if (has_z == has_x) throw ModelFileError("constraint", "exactly one of 'Z' and 'X' is required");

  try {
    MechanicalModel model(std::move(spec));
    if (has_z) {
      ConstraintSpec cs{std::move(mu), read_expr_vector(con["Z"], "constraint.Z")};
      AffineConstraint constraint(std::move(cs), model);
      return System{std::move(model), std::move(constraint)};
    }
    auto x = read_expr_vector(con["X"], "constraint.X");
    AffineConstraint constraint = AffineConstraint::from_vector_field(std::move(mu), x, model);
    return System{std::move(model), std::move(constraint)};
  } catch (const ModelFileError&) {
    throw;
  } catch (const ModelError& e) {
    throw ModelFileError("", e.what());
  }
}

}  // namespace

System parse_model_file(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ModelFileError("", std::string("invalid JSON: ") + e.what(), e.byte);
  }
  return from_json(root);
}

System load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFileError(path.string(), "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_file(buf.str());
}

std::string write_model_file(const System& system) {
  const ModelSpec& spec = system.model.spec();
  json root;
  root["n"] = spec.coordinates.size();
  root["coordinates"] = spec.coordinates;
  json params = json::object();
  for (const auto& [name, value] : spec.parameters) params[name] = value;
  root["parameters"] = params;
  root["metric"] = write_grid(spec.metric);
  root["potential"] = to_string(spec.potential);
  root["external_force"] = write_vector(spec.external_force);
  root["inputs"] = write_grid(spec.inputs);
  root["constraint"] = {{"mu", write_grid(system.constraint.spec().mu)},
                        {"Z", write_vector(system.constraint.spec().z)}};
  return root.dump(2) + "\n";
}

}  // namespace vanc
