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

// Scalar expression trees over named symbols: parsing, printing, folding,
// exact partial derivatives and numeric evaluation.
//
// Expressions are immutable and share subtrees, so copies are cheap and
// safe to use from several threads.

#ifndef VANC_EXPR_HPP_
#define VANC_EXPR_HPP_

#include <cstddef>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vanc/errors.hpp"

namespace vanc {

enum class UnaryOp { kNeg, kSin, kCos, kTan, kExp, kLog, kSqrt };
enum class BinaryOp { kAdd, kSub, kMul, kDiv, kPow };

std::string_view to_string(UnaryOp op);
std::string_view to_string(BinaryOp op);

class Expr;

namespace detail {
struct Node;
}

class Expr {
 public:
  enum class Kind { kConstant, kSymbol, kUnary, kBinary };

  // Constant zero.
  Expr();
  Expr(double value);  // NOLINT(google-explicit-constructor)

  static Expr constant(double value);
  static Expr symbol(std::string name);
  // Raw node constructors. They never fold; use the free operators below for
  // folded construction.
  static Expr unary(UnaryOp op, Expr child);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

  Kind kind() const;
  bool is_constant() const { return kind() == Kind::kConstant; }
  bool is_constant(double value) const;

  double value() const;              // kConstant
  const std::string& name() const;   // kSymbol
  UnaryOp unary_op() const;          // kUnary
  BinaryOp binary_op() const;        // kBinary
  const Expr& child() const;         // kUnary
  const Expr& lhs() const;           // kBinary
  const Expr& rhs() const;           // kBinary

 private:
  explicit Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::Node> node_;
};

// Folded builders: constant folding (finite results only) and 0/1 identity
// elimination.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr tan(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);
Expr apply(UnaryOp op, const Expr& a);
Expr apply(BinaryOp op, const Expr& a, const Expr& b);

Expr parse(std::string_view text);

// Rebuilds the tree bottom-up through the folded builders. Idempotent.
Expr fold(const Expr& e);

// Exact partial derivative, folded.
Expr diff(const Expr& e, std::string_view symbol);

// Structural equality; constants compare with ==.
bool structurally_equal(const Expr& a, const Expr& b);

// Prints in DSL syntax such that parse(to_string(e)) folds back to fold(e).
// Constants use 17 significant digits.
std::string to_string(const Expr& e);
std::ostream& operator<<(std::ostream& os, const Expr& e);

std::set<std::string> free_symbols(const Expr& e);
bool depends_on(const Expr& e, std::string_view symbol);

// Replaces every occurrence of a symbol by an expression. Folded.
Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& replacements);

using Env = std::unordered_map<std::string, double>;

// Tree-walking evaluation. Throws UnboundSymbolError or DomainError.
double eval(const Expr& e, const Env& env);

// Ordered list of symbol names that defines the slot layout used by Program.
class SymbolTable {
 public:
  SymbolTable() = default;
  explicit SymbolTable(std::vector<std::string> names);

  // Returns the slot index of a new or existing name.
  std::size_t add(const std::string& name);
  std::ptrdiff_t find(std::string_view name) const;  // -1 when absent
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

// An expression compiled to a postfix program over numbered slots.
// Evaluation produces the same value bit-for-bit as eval() on the same tree.
class Program {
 public:
  Program() = default;
  // Throws UnboundSymbolError if a free symbol is not in the table.
  Program(const Expr& e, const SymbolTable& symbols);

  double operator()(std::span<const double> slots) const;
  const Expr& source() const { return source_; }

 private:
  enum class Code : unsigned char { kConst, kLoad, kUnary, kBinary };
  struct Instr {
    Code code;
    unsigned char op;
    std::size_t arg;  // constant index or slot
  };
  void emit(const Expr& e, const SymbolTable& symbols);

  Expr source_;
  std::vector<Instr> code_;
  std::vector<Expr> nodes_;  // parallel to code_, for error reports
  std::vector<double> constants_;
  std::size_t max_depth_ = 0;
};

}  // namespace vanc

#endif  // VANC_EXPR_HPP_
