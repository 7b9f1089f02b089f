#pragma once

#include <string>
#include <vector>

#include "geomint/catalog.hpp"
#include "geomint/linsys.hpp"

namespace geomint::testing {

inline Vec vec(std::initializer_list<double> vals) {
  Vec v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

/// n-dimensional system over x,y,z...: metric entries, potential, and one
/// constraint row on the last coordinate, all given as expression strings.
inline LinearConstraintSystem make_system(int n, const std::vector<std::string>& metric_rows,
                                          const std::string& potential,
                                          const std::vector<std::string>& gamma_row) {
  LinearConstraintSystem sys;
  sys.split.n = n;
  std::vector<std::string> names = {"x", "y", "z", "w"};
  names.resize(static_cast<std::size_t>(n));
  sys.varnames = names;
  auto table = variable_table(sys.varnames);
  for (const std::string& e : metric_rows) sys.metric.push_back(Expr::parse(e, table));
  sys.potential = Expr::parse(potential, table);
  if (gamma_row.empty()) {
    for (int i = 0; i < n; ++i) sys.split.free.push_back(i);
  } else {
    for (int i = 0; i + 1 < n; ++i) sys.split.free.push_back(i);
    sys.split.constrained.push_back(n - 1);
    for (const std::string& e : gamma_row) sys.gamma_coeffs.push_back(Expr::parse(e, table));
  }
  validate_system(sys);
  return sys;
}

inline std::vector<std::string> identity_metric(int n) {
  std::vector<std::string> rows;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rows.push_back(i == j ? "1" : "0");
  return rows;
}

/// g = I3, constraint vz = (y^2/2) vx.
inline LinearConstraintSystem martinet_distribution() {
  return make_system(3, identity_metric(3), "0", {"y^2/2", "0"});
}

/// g = I3, constraint vz = y vx.
inline LinearConstraintSystem heisenberg() {
  return make_system(3, identity_metric(3), "0", {"y", "0"});
}

/// g = I3, constraint vz = x vx (an exact differential, zero curvature).
inline LinearConstraintSystem holonomic_demo() {
  return make_system(3, identity_metric(3), "0", {"x", "0"});
}

inline LinearConstraintSystem oscillator() { return make_system(1, {"1"}, "x^2/2", {}); }

inline LinearConstraintSystem free_particle(int n) {
  return make_system(n, identity_metric(n), "0", {});
}

}  // namespace geomint::testing
