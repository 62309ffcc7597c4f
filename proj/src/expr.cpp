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

#include "vanc/expr.hpp"

#include <array>
#include <cassert>
#include <charconv>
#include <cmath>
#include <sstream>

namespace vanc {

namespace detail {

struct Node {
  Expr::Kind kind = Expr::Kind::kConstant;
  double value = 0.0;
  std::string name;
  UnaryOp unary = UnaryOp::kNeg;
  BinaryOp binary = BinaryOp::kAdd;
  std::vector<Expr> children;
};

}  // namespace detail

namespace {

// The single place where operators are evaluated, shared by eval(), Program
// and constant folding so that all three agree bit-for-bit.
double apply_unary(UnaryOp op, double x) {
  switch (op) {
    case UnaryOp::kNeg: return -x;
    case UnaryOp::kSin: return std::sin(x);
    case UnaryOp::kCos: return std::cos(x);
    case UnaryOp::kTan: return std::tan(x);
    case UnaryOp::kExp: return std::exp(x);
    case UnaryOp::kLog: return std::log(x);
    case UnaryOp::kSqrt: return std::sqrt(x);
  }
  return 0.0;
}

double apply_binary(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::kAdd: return a + b;
    case BinaryOp::kSub: return a - b;
    case BinaryOp::kMul: return a * b;
    case BinaryOp::kDiv: return a / b;
    case BinaryOp::kPow: return std::pow(a, b);
  }
  return 0.0;
}

// Empty string when the operation is defined at the given arguments.
const char* unary_domain_violation(UnaryOp op, double x) {
  if (op == UnaryOp::kLog && !(x > 0.0)) return "log of non-positive value";
  if (op == UnaryOp::kSqrt && x < 0.0) return "sqrt of negative value";
  return "";
}

const char* binary_domain_violation(BinaryOp op, double a, double b, double result) {
  if (op == BinaryOp::kDiv && b == 0.0) return "division by zero";
  if (op == BinaryOp::kPow && std::isnan(result) && !std::isnan(a) && !std::isnan(b)) {
    return "power of negative base with non-integer exponent";
  }
  if (op == BinaryOp::kPow && a == 0.0 && b < 0.0) return "zero raised to a negative power";
  return "";
}

}  // namespace

std::string_view to_string(UnaryOp op) {
  switch (op) {
    case UnaryOp::kNeg: return "neg";
    case UnaryOp::kSin: return "sin";
    case UnaryOp::kCos: return "cos";
    case UnaryOp::kTan: return "tan";
    case UnaryOp::kExp: return "exp";
    case UnaryOp::kLog: return "log";
    case UnaryOp::kSqrt: return "sqrt";
  }
  return "?";
}

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd: return "+";
    case BinaryOp::kSub: return "-";
    case BinaryOp::kMul: return "*";
    case BinaryOp::kDiv: return "/";
    case BinaryOp::kPow: return "^";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Nodes

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) {
  auto n = std::make_shared<detail::Node>();
  n->value = value;
  node_ = std::move(n);
}

Expr Expr::constant(double value) { return Expr(value); }

Expr Expr::symbol(std::string name) {
  detail::Node n;
  n.kind = Kind::kSymbol;
  n.name = std::move(name);
  return Expr(std::make_shared<const detail::Node>(std::move(n)));
}

Expr Expr::unary(UnaryOp op, Expr child) {
  detail::Node n;
  n.kind = Kind::kUnary;
  n.unary = op;
  n.children = {std::move(child)};
  return Expr(std::make_shared<const detail::Node>(std::move(n)));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  detail::Node n;
  n.kind = Kind::kBinary;
  n.binary = op;
  n.children = {std::move(lhs), std::move(rhs)};
  return Expr(std::make_shared<const detail::Node>(std::move(n)));
}

Expr::Kind Expr::kind() const { return node_->kind; }
bool Expr::is_constant(double value) const { return is_constant() && node_->value == value; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
UnaryOp Expr::unary_op() const { return node_->unary; }
BinaryOp Expr::binary_op() const { return node_->binary; }
const Expr& Expr::child() const { return node_->children[0]; }
const Expr& Expr::lhs() const { return node_->children[0]; }
const Expr& Expr::rhs() const { return node_->children[1]; }

// ---------------------------------------------------------------------------
// Folded builders

Expr apply(UnaryOp op, const Expr& a) {
  if (a.is_constant()) {
    const double r = apply_unary(op, a.value());
    if (std::isfinite(r) && *unary_domain_violation(op, a.value()) == '\0') return Expr(r);
  }
  return Expr::unary(op, a);
}

Expr apply(BinaryOp op, const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    const double r = apply_binary(op, a.value(), b.value());
    if (std::isfinite(r) && *binary_domain_violation(op, a.value(), b.value(), r) == '\0') {
      return Expr(r);
    }
  }
  switch (op) {
    case BinaryOp::kAdd:
      if (a.is_constant(0.0)) return b;
      if (b.is_constant(0.0)) return a;
      break;
    case BinaryOp::kSub:
      if (b.is_constant(0.0)) return a;
      if (a.is_constant(0.0)) return apply(UnaryOp::kNeg, b);
      break;
    case BinaryOp::kMul:
      if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr(0.0);
      if (a.is_constant(1.0)) return b;
      if (b.is_constant(1.0)) return a;
      break;
    case BinaryOp::kDiv:
      if (b.is_constant(1.0)) return a;
      if (a.is_constant(0.0) && !b.is_constant()) return Expr(0.0);
      break;
    case BinaryOp::kPow:
      if (b.is_constant(0.0)) return Expr(1.0);
      if (b.is_constant(1.0)) return a;
      if (a.is_constant(1.0)) return Expr(1.0);
      break;
  }
  return Expr::binary(op, a, b);
}

Expr operator+(const Expr& a, const Expr& b) { return apply(BinaryOp::kAdd, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return apply(BinaryOp::kSub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return apply(BinaryOp::kMul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return apply(BinaryOp::kDiv, a, b); }
Expr operator-(const Expr& a) { return apply(UnaryOp::kNeg, a); }
Expr pow(const Expr& base, const Expr& exponent) { return apply(BinaryOp::kPow, base, exponent); }
Expr sin(const Expr& a) { return apply(UnaryOp::kSin, a); }
Expr cos(const Expr& a) { return apply(UnaryOp::kCos, a); }
Expr tan(const Expr& a) { return apply(UnaryOp::kTan, a); }
Expr exp(const Expr& a) { return apply(UnaryOp::kExp, a); }
Expr log(const Expr& a) { return apply(UnaryOp::kLog, a); }
Expr sqrt(const Expr& a) { return apply(UnaryOp::kSqrt, a); }

Expr fold(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
    case Expr::Kind::kSymbol:
      return e;
    case Expr::Kind::kUnary:
      return apply(e.unary_op(), fold(e.child()));
    case Expr::Kind::kBinary:
      return apply(e.binary_op(), fold(e.lhs()), fold(e.rhs()));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Queries

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::kConstant:
      return a.value() == b.value();
    case Expr::Kind::kSymbol:
      return a.name() == b.name();
    case Expr::Kind::kUnary:
      return a.unary_op() == b.unary_op() && structurally_equal(a.child(), b.child());
    case Expr::Kind::kBinary:
      return a.binary_op() == b.binary_op() && structurally_equal(a.lhs(), b.lhs()) &&
             structurally_equal(a.rhs(), b.rhs());
  }
  return false;
}

namespace {

void collect_symbols(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
      return;
    case Expr::Kind::kSymbol:
      out.insert(e.name());
      return;
    case Expr::Kind::kUnary:
      collect_symbols(e.child(), out);
      return;
    case Expr::Kind::kBinary:
      collect_symbols(e.lhs(), out);
      collect_symbols(e.rhs(), out);
      return;
  }
}

}  // namespace

std::set<std::string> free_symbols(const Expr& e) {
  std::set<std::string> out;
  collect_symbols(e, out);
  return out;
}

bool depends_on(const Expr& e, std::string_view symbol) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
      return false;
    case Expr::Kind::kSymbol:
      return e.name() == symbol;
    case Expr::Kind::kUnary:
      return depends_on(e.child(), symbol);
    case Expr::Kind::kBinary:
      return depends_on(e.lhs(), symbol) || depends_on(e.rhs(), symbol);
  }
  return false;
}

Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& replacements) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
      return e;
    case Expr::Kind::kSymbol: {
      auto it = replacements.find(e.name());
      return it == replacements.end() ? e : it->second;
    }
    case Expr::Kind::kUnary:
      return apply(e.unary_op(), substitute(e.child(), replacements));
    case Expr::Kind::kBinary:
      return apply(e.binary_op(), substitute(e.lhs(), replacements),
                   substitute(e.rhs(), replacements));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Differentiation

Expr diff(const Expr& e, std::string_view s) {
  if (!depends_on(e, s)) return Expr(0.0);
  switch (e.kind()) {
    case Expr::Kind::kConstant:
      return Expr(0.0);
    case Expr::Kind::kSymbol:
      return Expr(1.0);
    case Expr::Kind::kUnary: {
      const Expr& a = e.child();
      const Expr da = diff(a, s);
      switch (e.unary_op()) {
        case UnaryOp::kNeg: return -da;
        case UnaryOp::kSin: return cos(a) * da;
        case UnaryOp::kCos: return -sin(a) * da;
        case UnaryOp::kTan: return da / pow(cos(a), Expr(2.0));
        case UnaryOp::kExp: return exp(a) * da;
        case UnaryOp::kLog: return da / a;
        case UnaryOp::kSqrt: return da / (Expr(2.0) * sqrt(a));
      }
      break;
    }
    case Expr::Kind::kBinary: {
      const Expr& a = e.lhs();
      const Expr& b = e.rhs();
      const Expr da = diff(a, s);
      const Expr db = diff(b, s);
      switch (e.binary_op()) {
        case BinaryOp::kAdd: return da + db;
        case BinaryOp::kSub: return da - db;
        case BinaryOp::kMul: return da * b + a * db;
        case BinaryOp::kDiv: return (da * b - a * db) / pow(b, Expr(2.0));
        case BinaryOp::kPow:
          if (!depends_on(b, s)) return b * pow(a, b - Expr(1.0)) * da;
          if (!depends_on(a, s)) return pow(a, b) * log(a) * db;
          return pow(a, b) * (db * log(a) + b * da / a);
      }
      break;
    }
  }
  return Expr(0.0);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecNeg = 3;
constexpr int kPrecPow = 4;
constexpr int kPrecAtom = 5;

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
    case Expr::Kind::kSymbol:
      return kPrecAtom;
    case Expr::Kind::kUnary:
      return e.unary_op() == UnaryOp::kNeg ? kPrecNeg : kPrecAtom;
    case Expr::Kind::kBinary:
      switch (e.binary_op()) {
        case BinaryOp::kAdd:
        case BinaryOp::kSub: return kPrecAdd;
        case BinaryOp::kMul:
        case BinaryOp::kDiv: return kPrecMul;
        case BinaryOp::kPow: return kPrecPow;
      }
  }
  return kPrecAtom;
}

void print(const Expr& e, std::ostream& os);

void print_wrapped(const Expr& e, bool parens, std::ostream& os) {
  if (parens) os << '(';
  print(e, os);
  if (parens) os << ')';
}

void print(const Expr& e, std::ostream& os) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
      // Negative constants are printed as "(-c)" so they stay atoms.
      if (std::signbit(e.value())) {
        os << "(-" << format_number(-e.value()) << ')';
      } else {
        os << format_number(e.value());
      }
      return;
    case Expr::Kind::kSymbol:
      os << e.name();
      return;
    case Expr::Kind::kUnary:
      if (e.unary_op() == UnaryOp::kNeg) {
        os << '-';
        print_wrapped(e.child(), precedence(e.child()) < kPrecNeg, os);
      } else {
        os << to_string(e.unary_op()) << '(';
        print(e.child(), os);
        os << ')';
      }
      return;
    case Expr::Kind::kBinary: {
      const int p = precedence(e);
      if (e.binary_op() == BinaryOp::kPow) {
        // power := atom ("^" factor)?
        print_wrapped(e.lhs(), precedence(e.lhs()) < kPrecAtom, os);
        os << '^';
        print_wrapped(e.rhs(), precedence(e.rhs()) < kPrecNeg, os);
      } else {
        // Left associative: the right operand needs parentheses at equal
        // precedence.
        print_wrapped(e.lhs(), precedence(e.lhs()) < p, os);
        os << ' ' << to_string(e.binary_op()) << ' ';
        print_wrapped(e.rhs(), precedence(e.rhs()) <= p, os);
      }
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print(e, os);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Expr& e) {
  print(e, os);
  return os;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail(pos_, std::string("unexpected character '") + text_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& msg) { throw ParseError(at, msg); }

  void skip_space() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(BinaryOp::kAdd, lhs, parse_term());
      } else if (accept('-')) {
        lhs = Expr::binary(BinaryOp::kSub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(BinaryOp::kMul, lhs, parse_factor());
      } else if (accept('/')) {
        lhs = Expr::binary(BinaryOp::kDiv, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_factor() {
    if (accept('-')) return Expr::unary(UnaryOp::kNeg, parse_factor());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (accept('^')) return Expr::binary(BinaryOp::kPow, base, parse_factor());
    return base;
  }

  static bool is_ident_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
  }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  Expr parse_atom() {
    skip_space();
    if (pos_ >= text_.size()) fail(pos_, "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      if (!accept(')')) fail(pos_, "expected ')'");
      return inner;
    }
    if (is_digit(c) || c == '.') return parse_number();
    if (is_ident_start(c)) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (is_ident_start(text_[pos_]) || is_digit(text_[pos_]))) ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        UnaryOp op;
        if (name == "sin") op = UnaryOp::kSin;
        else if (name == "cos") op = UnaryOp::kCos;
        else if (name == "tan") op = UnaryOp::kTan;
        else if (name == "exp") op = UnaryOp::kExp;
        else if (name == "log") op = UnaryOp::kLog;
        else if (name == "sqrt") op = UnaryOp::kSqrt;
        else fail(start, "unknown function '" + name + "'");
        ++pos_;
        Expr arg = parse_expr();
        if (!accept(')')) fail(pos_, "expected ')' after argument of " + name);
        return Expr::unary(op, arg);
      }
      return Expr::symbol(std::move(name));
    }
    fail(pos_, std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && is_digit(text_[p])) {
        while (p < text_.size() && is_digit(text_[p])) ++p;
        pos_ = p;
      }
    }
    const std::string_view lexeme = text_.substr(start, pos_ - start);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
    if (ec != std::errc() || ptr != lexeme.data() + lexeme.size()) {
      fail(start, "malformed number '" + std::string(lexeme) + "'");
    }
    return Expr(value);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Evaluation

double eval(const Expr& e, const Env& env) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
      return e.value();
    case Expr::Kind::kSymbol: {
      auto it = env.find(e.name());
      if (it == env.end()) throw UnboundSymbolError(e.name());
      return it->second;
    }
    case Expr::Kind::kUnary: {
      const double x = eval(e.child(), env);
      const char* bad = unary_domain_violation(e.unary_op(), x);
      if (*bad != '\0') throw DomainError(bad, to_string(e));
      return apply_unary(e.unary_op(), x);
    }
    case Expr::Kind::kBinary: {
      const double a = eval(e.lhs(), env);
      const double b = eval(e.rhs(), env);
      const double r = apply_binary(e.binary_op(), a, b);
      const char* bad = binary_domain_violation(e.binary_op(), a, b, r);
      if (*bad != '\0') throw DomainError(bad, to_string(e));
      return r;
    }
  }
  return 0.0;
}

SymbolTable::SymbolTable(std::vector<std::string> names) {
  for (auto& n : names) add(n);
}

std::size_t SymbolTable::add(const std::string& name) {
  auto [it, inserted] = index_.try_emplace(name, names_.size());
  if (inserted) names_.push_back(name);
  return it->second;
}

std::ptrdiff_t SymbolTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

Program::Program(const Expr& e, const SymbolTable& symbols) : source_(e) {
  emit(e, symbols);
  std::size_t depth = 0;
  for (const Instr& in : code_) {
    switch (in.code) {
      case Code::kConst:
      case Code::kLoad: ++depth; break;
      case Code::kUnary: break;
      case Code::kBinary: --depth; break;
    }
    max_depth_ = std::max(max_depth_, depth);
  }
}

void Program::emit(const Expr& e, const SymbolTable& symbols) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
      constants_.push_back(e.value());
      code_.push_back({Code::kConst, 0, constants_.size() - 1});
      break;
    case Expr::Kind::kSymbol: {
      const std::ptrdiff_t slot = symbols.find(e.name());
      if (slot < 0) throw UnboundSymbolError(e.name());
      code_.push_back({Code::kLoad, 0, static_cast<std::size_t>(slot)});
      break;
    }
    case Expr::Kind::kUnary:
      emit(e.child(), symbols);
      code_.push_back({Code::kUnary, static_cast<unsigned char>(e.unary_op()), 0});
      break;
    case Expr::Kind::kBinary:
      emit(e.lhs(), symbols);
      emit(e.rhs(), symbols);
      code_.push_back({Code::kBinary, static_cast<unsigned char>(e.binary_op()), 0});
      break;
  }
  nodes_.resize(code_.size());
  nodes_.back() = e;
}

double Program::operator()(std::span<const double> slots) const {
  constexpr std::size_t kInline = 32;
  std::array<double, kInline> small{};
  std::vector<double> large;
  double* stack = small.data();
  if (max_depth_ > kInline) {
    large.resize(max_depth_);
    stack = large.data();
  }
  std::size_t top = 0;
  for (std::size_t pc = 0; pc < code_.size(); ++pc) {
    const Instr& in = code_[pc];
    switch (in.code) {
      case Code::kConst:
        stack[top++] = constants_[in.arg];
        break;
      case Code::kLoad:
        assert(in.arg < slots.size());
        stack[top++] = slots[in.arg];
        break;
      case Code::kUnary: {
        const auto op = static_cast<UnaryOp>(in.op);
        const double x = stack[top - 1];
        const char* bad = unary_domain_violation(op, x);
        if (*bad != '\0') throw DomainError(bad, to_string(nodes_[pc]));
        stack[top - 1] = apply_unary(op, x);
        break;
      }
      case Code::kBinary: {
        const auto op = static_cast<BinaryOp>(in.op);
        const double b = stack[--top];
        const double a = stack[top - 1];
        const double r = apply_binary(op, a, b);
        const char* bad = binary_domain_violation(op, a, b, r);
        if (*bad != '\0') throw DomainError(bad, to_string(nodes_[pc]));
        stack[top - 1] = r;
        break;
      }
    }
  }
  return stack[0];
}

}  // namespace vanc
