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

#ifndef VANC_ERRORS_HPP_
#define VANC_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vanc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error("parse error at byte " + std::to_string(offset) + ": " + message),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UnboundSymbolError : public Error {
 public:
  explicit UnboundSymbolError(const std::string& symbol)
      : Error("unbound symbol '" + symbol + "'"), symbol_(symbol) {}
  const std::string& symbol() const { return symbol_; }

 private:
  std::string symbol_;
};

// log of a non-positive number, division by zero, and friends.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, const std::string& subexpression)
      : Error(what + " in '" + subexpression + "'"), subexpression_(subexpression) {}
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

// Malformed or inconsistent model/constraint data.
class ModelError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  MetricError(const std::string& message, Eigen::VectorXd eigenvalues)
      : Error(message), eigenvalues_(std::move(eigenvalues)) {}
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

 private:
  Eigen::VectorXd eigenvalues_;
};

class RankDefectError : public Error {
 public:
  RankDefectError(const std::string& message, Eigen::VectorXd singular_values)
      : Error(message), singular_values_(std::move(singular_values)) {}
  const Eigen::VectorXd& singular_values() const { return singular_values_; }

 private:
  Eigen::VectorXd singular_values_;
};

// P(q) is singular or too ill-conditioned to trust.
class TransversalityViolation : public Error {
 public:
  TransversalityViolation(const std::string& message, Eigen::MatrixXd p, double cond,
                          Eigen::VectorXd q)
      : Error(message), p_(std::move(p)), cond_(cond), q_(std::move(q)) {}
  const Eigen::MatrixXd& p() const { return p_; }
  double cond() const { return cond_; }
  const Eigen::VectorXd& q() const { return q_; }

 private:
  Eigen::MatrixXd p_;
  double cond_;
  Eigen::VectorXd q_;
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& message, std::size_t last_good_sample, Eigen::VectorXd q,
                   Eigen::VectorXd qdot)
      : Error(message), last_good_sample_(last_good_sample), q_(std::move(q)), qdot_(std::move(qdot)) {}
  std::size_t last_good_sample() const { return last_good_sample_; }
  const Eigen::VectorXd& q() const { return q_; }
  const Eigen::VectorXd& qdot() const { return qdot_; }

 private:
  std::size_t last_good_sample_;
  Eigen::VectorXd q_;
  Eigen::VectorXd qdot_;
};

}  // namespace vanc

#endif  // VANC_ERRORS_HPP_
