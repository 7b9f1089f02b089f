#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "geomint/errors.hpp"

namespace geomint {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Forward-mode dual number. Nesting Dual<Dual<double>> yields exact second
/// derivatives; all dynamics code that needs derivatives of user expressions
/// is templated on the scalar so the same formulas serve both orders.
template <class T>
struct Dual {
  T a{};  // value part
  T b{};  // derivative part

  Dual() = default;
  Dual(double v) : a(v), b() {}  // NOLINT: implicit by design, lifts literals
  Dual(T value, T deriv) : a(std::move(value)), b(std::move(deriv)) {}

  Dual& operator+=(const Dual& o) {
    a += o.a;
    b += o.b;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    a -= o.a;
    b -= o.b;
    return *this;
  }

  friend Dual operator+(const Dual& x, const Dual& y) { return {x.a + y.a, x.b + y.b}; }
  friend Dual operator-(const Dual& x, const Dual& y) { return {x.a - y.a, x.b - y.b}; }
  friend Dual operator-(const Dual& x) { return {-x.a, -x.b}; }
  friend Dual operator*(const Dual& x, const Dual& y) {
    return {x.a * y.a, x.b * y.a + x.a * y.b};
  }
  friend Dual operator/(const Dual& x, const Dual& y) {
    T q = x.a / y.a;
    return {q, (x.b - q * y.b) / y.a};
  }
};

inline double primal(double x) { return x; }
template <class T>
double primal(const Dual<T>& x) {
  return primal(x.a);
}

inline double ad_abs(double x) { return std::abs(x); }
template <class T>
double ad_abs(const Dual<T>& x) {
  return std::abs(primal(x));
}

/// x^n for integer n >= 0, by repeated squaring. Defines x^0 == 1.
template <class T>
T ipow(T x, int n) {
  T result = 1.0;
  while (n > 0) {
    if (n & 1) result = result * x;
    n >>= 1;
    if (n) x = x * x;
  }
  return result;
}

using D1 = Dual<double>;
using D2 = Dual<Dual<double>>;

/// Gradient of a scalar function via one dual sweep per coordinate.
/// F must be callable as F(const std::vector<T>&) -> T for T = Dual<double>.
template <class F>
Vec fn_gradient(F&& f, const Vec& x) {
  const int n = static_cast<int>(x.size());
  Vec g(n);
  std::vector<D1> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = D1(x[i]);
  for (int i = 0; i < n; ++i) {
    xs[i].b = 1.0;
    g[i] = f(xs).b;
    xs[i].b = 0.0;
  }
  return g;
}

/// Dense Hessian via nested duals; exploits symmetry.
template <class F>
Mat fn_hessian(F&& f, const Vec& x) {
  const int n = static_cast<int>(x.size());
  Mat h(n, n);
  std::vector<D2> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = D2(x[i]);
  for (int i = 0; i < n; ++i) {
    xs[i].a.b = 1.0;
    for (int j = i; j < n; ++j) {
      xs[j].b.a = 1.0;
      double hij = f(xs).b.b;
      h(i, j) = hij;
      h(j, i) = hij;
      xs[j].b.a = 0.0;
    }
    xs[i].a.b = 0.0;
  }
  return h;
}

/// Jacobian of a vector-valued function, one dual sweep per input coordinate.
/// F must be callable as F(const std::vector<T>&) -> std::vector<T>.
template <class F>
Mat fn_jacobian(F&& f, const Vec& x, int out_dim) {
  const int n = static_cast<int>(x.size());
  Mat j(out_dim, n);
  std::vector<D1> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = D1(x[i]);
  for (int i = 0; i < n; ++i) {
    xs[i].b = 1.0;
    std::vector<D1> r = f(xs);
    for (int k = 0; k < out_dim; ++k) j(k, i) = r[k].b;
    xs[i].b = 0.0;
  }
  return j;
}

}  // namespace geomint
