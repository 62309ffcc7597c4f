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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "vanc/expr.hpp"

namespace vanc {
namespace {

using testing::central_difference;
using testing::corpus;
using testing::corpus_symbols;
using testing::random_expr;
using testing::uniform;

TEST_CASE("parse builds the expected tree") {
  const Expr e = parse("sin(theta)*xd");
  REQUIRE(e.kind() == Expr::Kind::kBinary);
  CHECK(e.binary_op() == BinaryOp::kMul);
  REQUIRE(e.lhs().kind() == Expr::Kind::kUnary);
  CHECK(e.lhs().unary_op() == UnaryOp::kSin);
  CHECK(e.lhs().child().name() == "theta");
  CHECK(e.rhs().name() == "xd");
}

TEST_CASE("precedence and associativity") {
  CHECK(eval(parse("2^3^2"), {}) == 512.0);
  CHECK(eval(parse("-x^2"), {{"x", 3.0}}) == -9.0);
  CHECK(eval(parse("1 - 2 - 3"), {}) == -4.0);
  CHECK(eval(parse("8 / 4 / 2"), {}) == 1.0);
  CHECK(eval(parse("2 + 3 * 4"), {}) == 14.0);
  CHECK(eval(parse("(2 + 3) * 4"), {}) == 20.0);
  CHECK(eval(parse("2^-1"), {}) == 0.5);
  CHECK(eval(parse("2 * -3"), {}) == -6.0);
  CHECK(eval(parse("--2"), {}) == 2.0);
  CHECK(eval(parse("1.5e2 + .5"), {}) == 150.5);
}

TEST_CASE("evaluation examples") {
  CHECK(eval(parse("sin(theta)"), {{"theta", 0.0}}) == 0.0);
  CHECK(eval(parse("m*xd"), {{"m", 2.0}, {"xd", 3.0}}) == 6.0);
  const double v = eval(parse("cos(theta)*C2 - sin(theta)*C1"),
                        {{"theta", std::numbers::pi / 2}, {"C1", 1.0}, {"C2", 5.0}});
  CHECK(v == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("parse errors carry byte offsets") {
  auto offset_of = [](const std::string& text) -> std::size_t {
    try {
      parse(text);
    } catch (const ParseError& e) {
      return e.offset();
    }
    FAIL("expected a parse error for '" << text << "'");
    return 0;
  };
  CHECK(offset_of("1 +") == 3);
  CHECK(offset_of("x * (y + 2") == 10);
  CHECK(offset_of("2 $ 3") == 2);
  CHECK(offset_of("sinh(x)") == 0);
  CHECK(offset_of("x + foo(1)") == 4);
  CHECK(offset_of("") == 0);
  CHECK(offset_of("1e999") == 0);
  CHECK_THROWS_WITH_AS(parse("abs(x)"), doctest::Contains("unknown function 'abs'"), ParseError);
}

TEST_CASE("evaluation errors") {
  CHECK_THROWS_AS(eval(parse("x + y"), {{"x", 1.0}}), UnboundSymbolError);
  try {
    eval(parse("1 + log(x - 1)"), {{"x", 1.0}});
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(e.subexpression() == "log(x - 1)");
  }
  CHECK_THROWS_AS(eval(parse("1/(x - x)"), {{"x", 2.0}}), DomainError);
  CHECK_THROWS_AS(eval(parse("sqrt(x)"), {{"x", -1.0}}), DomainError);

  SymbolTable table({"x"});
  CHECK_THROWS_AS(Program(parse("x + y"), table), UnboundSymbolError);
  const Program p(parse("log(x)"), table);
  const std::vector<double> slots{0.0};
  CHECK_THROWS_AS(p(slots), DomainError);
}

TEST_CASE("diff examples") {
  CHECK(structurally_equal(diff(parse("sin(theta)"), "theta"), parse("cos(theta)")));
  const Expr dxy = diff(parse("x*y"), "x");
  CHECK(structurally_equal(dxy, parse("y")));
  CHECK(diff(parse("3*sin(2)"), "x").is_constant(0.0));
  CHECK(diff(parse("y^2"), "x").is_constant(0.0));
  CHECK(diff(parse("x"), "x").is_constant(1.0));
}

TEST_CASE("diff of the boat drift matches central differences at 100 points") {
  const Expr e = parse("sin(theta)^2*C1 - sin(theta)*cos(theta)*C2");
  const Expr de = diff(e, "theta");
  std::mt19937_64 rng(7);
  for (int k = 0; k < 100; ++k) {
    const Env env{{"theta", uniform(rng, -2.0, 2.0)}, {"C1", uniform(rng, -2.0, 2.0)},
                  {"C2", uniform(rng, -2.0, 2.0)}};
    const double exact = eval(de, env);
    const double fd = central_difference(e, "theta", env);
    CHECK(std::abs(exact - fd) <= 1e-6 * (1.0 + std::abs(exact)));
  }
}

TEST_CASE("symbolic derivatives agree with finite differences on the corpus") {
  std::mt19937_64 rng(11);
  for (const auto& text : corpus()) {
    const Expr e = parse(text);
    for (const auto& s : corpus_symbols()) {
      const Expr de = diff(e, s);
      for (int k = 0; k < 20; ++k) {
        const Env env = testing::corpus_env(rng);
        const double exact = eval(de, env);
        const double fd = central_difference(e, s, env);
        INFO(text, " d/d", s);
        CHECK(std::abs(exact - fd) <= 1e-6 * (1.0 + std::abs(exact)));
      }
    }
  }
}

TEST_CASE("symbolic derivatives agree with finite differences on random trees") {
  std::mt19937_64 rng(13);
  const std::vector<std::string> symbols{"x", "y", "z"};
  for (int t = 0; t < 300; ++t) {
    const Expr e = random_expr(rng, symbols, 4);
    for (const auto& s : symbols) {
      const Expr de = diff(e, s);
      const Env env{{"x", uniform(rng, -2, 2)}, {"y", uniform(rng, -2, 2)}, {"z", uniform(rng, -2, 2)}};
      const double exact = eval(de, env);
      const double fd = central_difference(e, s, env);
      INFO(to_string(e), " d/d", s);
      CHECK(std::abs(exact - fd) <= 1e-6 * (1.0 + std::abs(exact)));
    }
  }
}

TEST_CASE("diff introduces no new symbols") {
  std::mt19937_64 rng(17);
  const std::vector<std::string> symbols{"a", "b", "c"};
  for (int t = 0; t < 300; ++t) {
    const Expr e = random_expr(rng, symbols, 4);
    const auto before = free_symbols(e);
    for (const auto& s : symbols) {
      for (const auto& sym : free_symbols(diff(e, s))) CHECK(before.count(sym) == 1);
    }
  }
}

TEST_CASE("printing round-trips through the parser") {
  std::mt19937_64 rng(19);
  const std::vector<std::string> symbols{"x", "y", "theta"};
  for (int t = 0; t < 500; ++t) {
    const Expr e = fold(random_expr(rng, symbols, 5));
    const Expr again = fold(parse(to_string(e)));
    INFO(to_string(e));
    CHECK(structurally_equal(e, again));
    CHECK(structurally_equal(fold(e), e));
  }
  for (const auto& text : corpus()) {
    const Expr e = fold(parse(text));
    CHECK(structurally_equal(fold(parse(to_string(e))), e));
  }
  // Shapes that need care: negative constants, right-nested operators.
  for (const char* text : {"(-3)^2", "-3^2", "a - (b - c)", "a / (b * c)", "a^b^c", "(a^b)^c", "-(a + b)",
                           "a * -b", "2^-x", "-(-x)", "1e-300 * x", "0.1 + 0.2 * x"}) {
    const Expr e = fold(parse(text));
    INFO(text, " printed as ", to_string(e));
    CHECK(structurally_equal(fold(parse(to_string(e))), e));
  }
}

TEST_CASE("folding") {
  CHECK(fold(parse("2*3 + 1")).is_constant(7.0));
  CHECK(structurally_equal(fold(parse("0 + x*1")), parse("x")));
  CHECK(fold(parse("0*sin(x)")).is_constant(0.0));
  CHECK(structurally_equal(fold(parse("x^1")), parse("x")));
  CHECK(fold(parse("x^0")).is_constant(1.0));
  CHECK(structurally_equal(fold(parse("x - 0")), parse("x")));
  // Undefined constant subexpressions stay unevaluated.
  CHECK_FALSE(fold(parse("log(0)")).is_constant());
  CHECK_FALSE(fold(parse("1/0")).is_constant());
}

TEST_CASE("diff is exactly linear in the folded tree") {
  std::mt19937_64 rng(23);
  const std::vector<std::string> symbols{"x", "y"};
  for (int t = 0; t < 200; ++t) {
    const Expr a = fold(random_expr(rng, symbols, 3));
    const Expr b = fold(random_expr(rng, symbols, 3));
    const Env env{{"x", uniform(rng, -2, 2)}, {"y", uniform(rng, -2, 2)}};
    CHECK(eval(diff(a + b, "x"), env) == eval(diff(a, "x"), env) + eval(diff(b, "x"), env));
  }
}

TEST_CASE("compiled programs agree bit-for-bit with the tree walker") {
  std::mt19937_64 rng(29);
  const SymbolTable table({"x", "y", "z"});
  for (int t = 0; t < 300; ++t) {
    const Expr e = random_expr(rng, table.names(), 5);
    const Program p(e, table);
    const std::vector<double> slots{uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2)};
    const Env env{{"x", slots[0]}, {"y", slots[1]}, {"z", slots[2]}};
    const double a = eval(e, env);
    CHECK(a == p(slots));
    CHECK(a == eval(e, env));
  }
}

TEST_CASE("substitute and queries") {
  const Expr e = parse("x*y + sin(x)");
  CHECK(depends_on(e, "x"));
  CHECK_FALSE(depends_on(e, "z"));
  CHECK(free_symbols(e) == std::set<std::string>{"x", "y"});
  const Expr s = substitute(e, {{"x", Expr(0.0)}});
  CHECK(s.is_constant(0.0));
}

}  // namespace
}  // namespace vanc
