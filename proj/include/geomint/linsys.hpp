#pragma once

#include <string>
#include <vector>

#include "geomint/expr.hpp"
#include "geomint/types.hpp"

namespace geomint {

/// Mechanical system with a Riemannian metric, a potential, and velocity
/// constraints that are linear in the velocities: each constrained velocity
/// component equals a configuration-dependent combination of the free ones.
/// Metric entries, the potential, and the constraint coefficients are parsed
/// expressions, so all derivatives of the problem data are exact.
struct LinearConstraintSystem {
  IndexSplit split;
  std::vector<std::string> varnames;  // size n
  std::vector<Expr> metric;           // n*n entries, row-major, symmetric
  Expr potential;
  std::vector<Expr> gamma_coeffs;  // k*(n-k) entries, row-major by constraint

  int n() const { return split.n; }
  int k() const { return split.num_constrained(); }
  int nf() const { return split.num_free(); }

  const Expr& metric_entry(int i, int j) const {
    return metric[static_cast<std::size_t>(i * split.n + j)];
  }
  const Expr& gamma_entry(int alpha, int a) const {
    return gamma_coeffs[static_cast<std::size_t>(alpha * split.num_free() + a)];
  }
};

/// Validates structure (counts, symmetry of the metric entries, variable
/// indices in range) and throws ValidationError on the first problem.
void validate_system(const LinearConstraintSystem& sys);

/// Metric evaluated at q; throws NumericalError if not symmetric positive
/// definite there (checked by Cholesky).
Mat metric_at(const LinearConstraintSystem& sys, const Vec& q);

/// Constraint coefficient matrix, shape k x (n-k), evaluated at q.
Mat gamma_at(const LinearConstraintSystem& sys, const Vec& q);

double potential_at(const LinearConstraintSystem& sys, const Vec& q);
Vec potential_gradient(const LinearConstraintSystem& sys, const Vec& q);

/// The metric induced on the free velocities after eliminating the
/// constrained ones, with its inverse and exact partial derivatives.
struct ReducedMetric {
  Mat gamma;                // (n-k) x (n-k), symmetric positive definite
  Mat gamma_inv;            // exact inverse
  std::vector<Mat> dgamma;  // n matrices, dgamma[i] = d(gamma)/dq^i

  /// d(gamma_inv)/dq^i = -gamma_inv * dgamma[i] * gamma_inv.
  Mat dgamma_inv(int i) const { return -gamma_inv * dgamma[static_cast<std::size_t>(i)] * gamma_inv; }
};

ReducedMetric reduced_metric(const LinearConstraintSystem& sys, const Vec& q);

/// Momenta conjugate to the free directions after absorbing the constrained
/// momenta through the constraint coefficients: P_a = p_a + sum_alpha p_alpha * Gamma^alpha_a.
Vec absorbed_momentum(const LinearConstraintSystem& sys, const Vec& q, const Vec& p);

/// H(q,p) = 1/2 P^T gamma^{-1} P + V(q).
double hamiltonian(const LinearConstraintSystem& sys, const PhaseState& state);

/// Exact analytic gradient of the Hamiltonian, assembled by the chain rule.
struct HamiltonianGradient {
  Vec dq;
  Vec dp;
};
HamiltonianGradient hamiltonian_gradient(const LinearConstraintSystem& sys,
                                         const PhaseState& state);

/// (q, vfree, mu) -> (q, p) with p_a = gamma_ab vfree^b - mu_alpha Gamma^alpha_a
/// and p_alpha = mu_alpha.
PhaseState constrained_legendre(const LinearConstraintSystem& sys, const VakonomicState& s);

/// Inverse of the map above: vfree = gamma^{-1} P, mu = p restricted to the
/// constrained block.
VakonomicState legendre_inverse(const LinearConstraintSystem& sys, const PhaseState& state);

/// E = 1/2 vfree^T gamma vfree + V(q); the multiplier terms cancel for
/// velocity-linear constraints, and E equals the Hamiltonian composed with
/// the Legendre map.
double energy(const LinearConstraintSystem& sys, const VakonomicState& s);

/// Templated Hamiltonian evaluation over (q, p) packed as one vector of
/// 2n scalars; lets dual numbers produce exact derivatives of any order.
template <class T>
T hamiltonian_packed(const LinearConstraintSystem& sys, const std::vector<T>& qp);

// --- implementation of the templated kernel ---

namespace detail {

/// Solves the dense symmetric system M x = b by Gaussian elimination with
/// partial pivoting on the primal magnitude. M is row-major, size m x m.
template <class T>
std::vector<T> solve_dense(std::vector<T> m_data, std::vector<T> b, int m) {
  std::vector<int> perm(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) perm[static_cast<std::size_t>(i)] = i;
  auto at = [&](int r, int c) -> T& { return m_data[static_cast<std::size_t>(r * m + c)]; };
  for (int col = 0; col < m; ++col) {
    int piv = col;
    double best = ad_abs(at(col, col));
    for (int r = col + 1; r < m; ++r) {
      double v = ad_abs(at(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) throw NumericalError("singular reduced metric block");
    if (piv != col) {
      for (int c = 0; c < m; ++c) std::swap(at(piv, c), at(col, c));
      std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(col)]);
    }
    for (int r = col + 1; r < m; ++r) {
      T f = at(r, col) / at(col, col);
      for (int c = col; c < m; ++c) at(r, c) -= f * at(col, c);
      b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
    }
  }
  for (int r = m - 1; r >= 0; --r) {
    T acc = b[static_cast<std::size_t>(r)];
    for (int c = r + 1; c < m; ++c) acc -= at(r, c) * b[static_cast<std::size_t>(c)];
    b[static_cast<std::size_t>(r)] = acc / at(r, r);
  }
  return b;
}

}  // namespace detail

template <class T>
T hamiltonian_packed(const LinearConstraintSystem& sys, const std::vector<T>& qp) {
  const int n = sys.n();
  const int nf = sys.nf();
  const int k = sys.k();
  std::span<const T> q(qp.data(), static_cast<std::size_t>(n));

  // P_a = p_a + p_alpha Gamma^alpha_a
  std::vector<T> big_p(static_cast<std::size_t>(nf));
  for (int a = 0; a < nf; ++a) {
    T acc = qp[static_cast<std::size_t>(n + sys.split.free[static_cast<std::size_t>(a)])];
    for (int al = 0; al < k; ++al) {
      T g = sys.gamma_entry(al, a).template eval_t<T>(q);
      acc += qp[static_cast<std::size_t>(n + sys.split.constrained[static_cast<std::size_t>(al)])] * g;
    }
    big_p[static_cast<std::size_t>(a)] = acc;
  }

  // gamma_ab = g_ab + g_a,al G^al_b + g_b,al G^al_a + g_al,be G^al_a G^be_b
  std::vector<T> gam(static_cast<std::size_t>(nf * nf));
  std::vector<T> gcoef(static_cast<std::size_t>(k * nf));
  for (int al = 0; al < k; ++al)
    for (int a = 0; a < nf; ++a)
      gcoef[static_cast<std::size_t>(al * nf + a)] = sys.gamma_entry(al, a).template eval_t<T>(q);
  auto gfull = [&](int i, int j) { return sys.metric_entry(i, j).template eval_t<T>(q); };
  for (int a = 0; a < nf; ++a) {
    for (int b = a; b < nf; ++b) {
      int ia = sys.split.free[static_cast<std::size_t>(a)];
      int ib = sys.split.free[static_cast<std::size_t>(b)];
      T acc = gfull(ia, ib);
      for (int al = 0; al < k; ++al) {
        int ial = sys.split.constrained[static_cast<std::size_t>(al)];
        acc += gfull(ia, ial) * gcoef[static_cast<std::size_t>(al * nf + b)];
        acc += gfull(ib, ial) * gcoef[static_cast<std::size_t>(al * nf + a)];
        for (int be = 0; be < k; ++be) {
          int ibe = sys.split.constrained[static_cast<std::size_t>(be)];
          acc += gfull(ial, ibe) * gcoef[static_cast<std::size_t>(al * nf + a)] *
                 gcoef[static_cast<std::size_t>(be * nf + b)];
        }
      }
      gam[static_cast<std::size_t>(a * nf + b)] = acc;
      gam[static_cast<std::size_t>(b * nf + a)] = acc;
    }
  }

  std::vector<T> u = detail::solve_dense(gam, big_p, nf);
  T h = T(0.0);
  for (int a = 0; a < nf; ++a) h += big_p[static_cast<std::size_t>(a)] * u[static_cast<std::size_t>(a)];
  h = h * 0.5;
  h += sys.potential.template eval_t<T>(q);
  return h;
}

}  // namespace geomint
