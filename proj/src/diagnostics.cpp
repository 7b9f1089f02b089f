#include "geomint/diagnostics.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "geomint/continuous.hpp"

namespace geomint {

DiagnosticReport make_report(std::string name, double value, double tolerance,
                             std::map<std::string, std::string> context) {
  DiagnosticReport r;
  r.name = std::move(name);
  r.value = value;
  r.tolerance = tolerance;
  r.pass = value <= tolerance;
  r.context = std::move(context);
  return r;
}

double symplecticity_defect(const OneStepMap& step, const PhaseState& state, double fd_step) {
  if (fd_step <= 0.0) throw ValidationError("symplecticity_defect requires fd_step > 0");
  const int n = static_cast<int>(state.q.size());
  const int m = 2 * n;

  Vec y0 = pack_phase(state);
  Mat dphi(m, m);
  for (int i = 0; i < m; ++i) {
    Vec yp = y0, ym = y0;
    yp[i] += fd_step;
    ym[i] -= fd_step;
    Vec fp = pack_phase(step(unpack_phase(yp, n)));
    Vec fm = pack_phase(step(unpack_phase(ym, n)));
    dphi.col(i) = (fp - fm) / (2.0 * fd_step);
  }

  Mat j = Mat::Zero(m, m);
  j.topRightCorner(n, n) = Mat::Identity(n, n);
  j.bottomLeftCorner(n, n) = -Mat::Identity(n, n);

  Mat defect = dphi.transpose() * j * dphi - j;
  return defect.cwiseAbs().maxCoeff();
}

std::pair<double, double> energy_drift(const std::function<double(const Vec&, const Vec&)>& h,
                                       const Trajectory& traj) {
  if (traj.rows() == 0) return {0.0, 0.0};
  double h0 = h(traj.block_row(0, "q"), traj.block_row(0, "p"));
  double max_abs = 0.0, final_abs = 0.0;
  for (int r = 0; r < traj.rows(); ++r) {
    final_abs = std::abs(h(traj.block_row(r, "q"), traj.block_row(r, "p")) - h0);
    max_abs = std::max(max_abs, final_abs);
  }
  return {max_abs, final_abs};
}

double constraint_residual(const LinearConstraintSystem& sys, const Trajectory& traj,
                           ResidualKind kind, Discretization disc) {
  if (sys.k() == 0) return 0.0;
  double worst = 0.0;
  if (kind == ResidualKind::Continuous) {
    if (!traj.has_block("q") || !traj.has_block("v"))
      throw ValidationError("continuous constraint residual needs q and v blocks");
    for (int r = 0; r < traj.rows(); ++r) {
      Vec phi = constraint_values(sys, traj.block_row(r, "q"), traj.block_row(r, "v"));
      worst = std::max(worst, phi.cwiseAbs().maxCoeff());
    }
  } else {
    if (!traj.has_block("q"))
      throw ValidationError("discrete constraint residual needs a q block");
    for (int r = 0; r + 1 < traj.rows(); ++r) {
      double h = traj.times()[static_cast<std::size_t>(r + 1)] -
                 traj.times()[static_cast<std::size_t>(r)];
      Vec phi = discrete_constraint_values(sys, disc, traj.block_row(r, "q"),
                                           traj.block_row(r + 1, "q"), h);
      worst = std::max(worst, phi.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double convergence_order(const std::function<PhaseState(const PhaseState&, double)>& step,
                         const HamiltonianSystem& hsys, const PhaseState& start, double total_time,
                         const std::vector<double>& h_list) {
  if (h_list.size() < 3) throw ValidationError("convergence_order needs at least 3 step sizes");
  for (double h : h_list) {
    double steps = total_time / h;
    if (std::abs(steps - std::round(steps)) > 1e-9)
      throw ValidationError("every h must divide the total time");
  }

  // fourth-order reference, two orders of magnitude finer than the finest h
  double h_ref = *std::min_element(h_list.begin(), h_list.end()) / 100.0;
  int ref_steps = static_cast<int>(std::round(total_time / h_ref));
  OdeField field = hamiltonian_field(hsys);
  Vec y = pack_phase(start);
  for (int s = 0; s < ref_steps; ++s) y = rk4_step(field, y, h_ref);
  Vec reference = y;

  std::vector<double> log_h, log_err;
  for (double h : h_list) {
    int steps = static_cast<int>(std::round(total_time / h));
    PhaseState s = start;
    for (int i = 0; i < steps; ++i) s = step(s, h);
    double err = (pack_phase(s) - reference).cwiseAbs().maxCoeff();
    log_h.push_back(std::log(h));
    log_err.push_back(std::log(std::max(err, 1e-300)));
  }

  const int m = static_cast<int>(log_h.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (int i = 0; i < m; ++i) {
    mean_x += log_h[static_cast<std::size_t>(i)];
    mean_y += log_err[static_cast<std::size_t>(i)];
  }
  mean_x /= m;
  mean_y /= m;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < m; ++i) {
    num += (log_h[static_cast<std::size_t>(i)] - mean_x) * (log_err[static_cast<std::size_t>(i)] - mean_y);
    den += (log_h[static_cast<std::size_t>(i)] - mean_x) * (log_h[static_cast<std::size_t>(i)] - mean_x);
  }
  return num / den;
}

std::uint64_t Rng::next_u64() {
  // splitmix64
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform(double lo, double hi) {
  double unit = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

PhaseState random_phase_state(Rng& rng, int n, int pole_coord, double pole_scale) {
  PhaseState s;
  s.q = Vec(n);
  s.p = Vec(n);
  for (int i = 0; i < n; ++i) {
    s.q[i] = rng.uniform(-2.0, 2.0);
    s.p[i] = rng.uniform(-2.0, 2.0);
  }
  if (pole_coord >= 0 && pole_scale != 0.0) {
    while (1.0 + pole_scale * s.q[pole_coord] < 0.5) s.q[pole_coord] = rng.uniform(-2.0, 2.0);
  }
  return s;
}

}  // namespace geomint
