#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "geomint/diagnostics.hpp"
#include "geomint/expr.hpp"

namespace geomint::testing {

inline const std::vector<std::string> kFuzzVars = {"x", "y", "z"};

/// Random grammar-valid expression text over x, y, z.
inline std::string random_expr_text(Rng& rng, int depth) {
  double pick = rng.uniform(0.0, 1.0);
  if (depth <= 0 || pick < 0.25) {
    if (rng.uniform(0.0, 1.0) < 0.5) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", rng.uniform(-3.0, 3.0));
      return buf[0] == '-' ? std::string("(") + buf + ")" : std::string(buf);
    }
    return kFuzzVars[static_cast<std::size_t>(rng.uniform(0.0, 3.0))];
  }
  if (pick < 0.35) return "(-" + random_expr_text(rng, depth - 1) + ")";
  if (pick < 0.45) {
    int e = static_cast<int>(rng.uniform(0.0, 4.0));
    return "(" + random_expr_text(rng, depth - 1) + ")^" + std::to_string(e);
  }
  const char* op = pick < 0.62 ? "+" : pick < 0.79 ? "*" : pick < 0.9 ? "-" : "/";
  return "(" + random_expr_text(rng, depth - 1) + op + random_expr_text(rng, depth - 1) + ")";
}

struct FuzzCase {
  Expr expr;
  std::vector<double> point;
};

/// Draws an expression and an evaluation point where the central-difference
/// oracle certifies itself (the halved-step estimate moves by less than a
/// quarter of the final tolerance), so the comparison tests the derivative
/// code rather than the stencil's truncation error.
inline bool draw_fuzz_case(Rng& rng, double fd_step, FuzzCase& out) {
  std::string text = random_expr_text(rng, 4);
  Expr e = Expr::parse(text, kFuzzVars);
  std::vector<double> q(3);
  for (int tries = 0; tries < 30; ++tries) {
    for (double& v : q) v = rng.uniform(-2.0, 2.0);
    try {
      double base = e.eval(q);
      if (!std::isfinite(base) || std::abs(base) > 1e4) continue;
      bool ok = true;
      for (int i = 0; i < 3 && ok; ++i) {
        double d = e.diff(q, i);
        if (!std::isfinite(d) || std::abs(d) > 1e4) ok = false;
        auto central = [&](double step) {
          std::vector<double> qp = q, qm = q;
          qp[static_cast<std::size_t>(i)] += step;
          qm[static_cast<std::size_t>(i)] -= step;
          return (e.eval(qp) - e.eval(qm)) / (2.0 * step);
        };
        double fd = central(fd_step);
        double fd_half = central(fd_step / 2.0);
        if (!std::isfinite(fd) || std::abs(fd - fd_half) > 2.5e-7 * (1.0 + std::abs(fd)))
          ok = false;
      }
      if (!ok) continue;
      out.expr = e;
      out.point = q;
      return true;
    } catch (const EvalError&) {
      continue;
    }
  }
  return false;
}

}  // namespace geomint::testing
