#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "expr_fuzz.hpp"
#include "geomint/autodiff.hpp"
#include "geomint/diagnostics.hpp"
#include "geomint/expr.hpp"

using namespace geomint;
using geomint::testing::draw_fuzz_case;
using geomint::testing::FuzzCase;

namespace {

const std::vector<std::string> kXyz = {"x", "y", "z"};

double eval_at(const Expr& e, std::initializer_list<double> q) {
  std::vector<double> v(q);
  return e.eval(v);
}

double diff_at(const Expr& e, std::initializer_list<double> q, int var) {
  std::vector<double> v(q);
  return e.diff(v, var);
}

}  // namespace

TEST_CASE("parse shapes and precedence") {
  Expr e = Expr::parse("y^2/2", kXyz);
  CHECK(e.structurally_equal(Expr::parse("((y^2)/2)", kXyz)));
  CHECK(e.to_string(kXyz) == "((y^2)/2)");

  Expr f = Expr::parse("-(x)*y + 3", kXyz);
  CHECK(f.structurally_equal(Expr::parse("(((-x)*y)+3)", kXyz)));

  // tighter-than-minus power, right-associative exponent chains
  CHECK(eval_at(Expr::parse("-x^2", kXyz), {3, 0, 0}) == -9.0);
  CHECK(eval_at(Expr::parse("x^2^3", kXyz), {2, 0, 0}) == 256.0);
  CHECK(eval_at(Expr::parse("x-1-1", kXyz), {3, 0, 0}) == 1.0);
  CHECK(eval_at(Expr::parse("6/3/2", kXyz), {0, 0, 0}) == 1.0);
  CHECK(eval_at(Expr::parse("1.5e2", kXyz), {0, 0, 0}) == 150.0);
  CHECK(eval_at(Expr::parse("x^0", kXyz), {0, 0, 0}) == 1.0);
}

TEST_CASE("parse errors carry byte offsets") {
  try {
    Expr::parse("y^^2", kXyz);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
  }
  try {
    Expr::parse("x+foo", kXyz);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
    CHECK(std::string(e.what()).find("foo") != std::string::npos);
  }
  CHECK_THROWS_AS(Expr::parse("x^-2", kXyz), ParseError);
  CHECK_THROWS_AS(Expr::parse("(x+1", kXyz), ParseError);
  CHECK_THROWS_AS(Expr::parse("x )", kXyz), ParseError);
  CHECK_THROWS_AS(Expr::parse("", kXyz), ParseError);
  CHECK_THROWS_AS(Expr::parse("x", std::vector<std::string>{}), ValidationError);
  CHECK_THROWS_AS(Expr::parse("x", std::vector<std::string>{"x", "x"}), ValidationError);
}

TEST_CASE("evaluation") {
  CHECK(eval_at(Expr::parse("y^2/2", kXyz), {0, 2, 0}) == 2.0);
  CHECK(eval_at(Expr::parse("1+0*x", kXyz), {7, 0, 0}) == 1.0);
  CHECK_THROWS_AS(eval_at(Expr::parse("1/x", kXyz), {0, 0, 0}), EvalError);
}

TEST_CASE("derivatives") {
  CHECK(diff_at(Expr::parse("y^2/2", kXyz), {0, 2, 0}, 1) == 2.0);
  CHECK(diff_at(Expr::parse("y^2/2", kXyz), {0, 2, 0}, 0) == 0.0);
  CHECK(diff_at(Expr::parse("x*y", kXyz), {3, 5, 0}, 0) == 5.0);
  CHECK(diff_at(Expr::parse("1/x", kXyz), {2, 0, 0}, 0) == doctest::Approx(-0.25));
}

TEST_CASE("nested duals give exact second derivatives") {
  Expr e = Expr::parse("x^3", kXyz);
  Mat h = fn_hessian(
      [&](const auto& q) {
        using T = std::decay_t<decltype(q[0])>;
        std::span<const T> span(q.data(), q.size());
        return e.eval_t<T>(span);
      },
      Vec(Vec::Constant(3, 2.0)));
  CHECK(h(0, 0) == doctest::Approx(12.0));
  CHECK(h(1, 1) == 0.0);
}

TEST_CASE("automatic derivatives match central differences on random expressions") {
  Rng rng(20240717);
  int accepted = 0;
  int generated = 0;
  const double fd_step = 1e-5;
  while (accepted < 1000 && generated < 20000) {
    ++generated;
    FuzzCase fc;
    if (!draw_fuzz_case(rng, fd_step, fc)) continue;
    ++accepted;

    for (int i = 0; i < 3; ++i) {
      std::vector<double> qp = fc.point, qm = fc.point;
      qp[static_cast<std::size_t>(i)] += fd_step;
      qm[static_cast<std::size_t>(i)] -= fd_step;
      double fd = (fc.expr.eval(qp) - fc.expr.eval(qm)) / (2.0 * fd_step);
      double d_exact = fc.expr.diff(fc.point, i);
      CHECK(std::abs(d_exact - fd) <= 1e-6 * (1.0 + std::abs(d_exact)));
    }

    // parse . print . parse is the identity on trees
    Expr reparsed = Expr::parse(fc.expr.to_string(kXyz), kXyz);
    CHECK(reparsed.structurally_equal(fc.expr));
  }
  CHECK(accepted == 1000);
}
