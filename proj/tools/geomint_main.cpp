#include <CLI11.hpp>

#include "geomint/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"geomint: constrained mechanics simulation, comparison, and diagnostics"};
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);

  geomint::CliOptions opts;
  std::vector<double> q, p, v;
  double newton_tol = 0.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->set_help_flag("--help", "print this help message and exit");
    cmd->add_option("--spec", opts.spec_path, "system spec file (JSON)")->required();
    cmd->add_option("--integrator", opts.integrator,
                    "symplectic_euler | midpoint | verlet | oracle_rk4 | vakonomic_euler | "
                    "vakonomic_midpoint | nonholonomic_discrete | none");
    cmd->add_option("--h", opts.h, "step size (default 0.1)");
    cmd->add_option("--steps", opts.steps, "number of steps (default 100)");
    cmd->add_option("--seed", opts.seed, "seed for randomized diagnostics (default 1)");
    cmd->add_option("--out", opts.out_path, "output path (default stdout)");
    cmd->add_option("--format", opts.format, "csv | json (simulate only, default csv)");
    cmd->add_option("--q", q, "initial configuration (overrides the spec defaults)");
    cmd->add_option("--p", p, "initial momentum");
    cmd->add_option("--v", v, "initial velocity (nonholonomic runs)");
    cmd->add_option("--newton-tol", newton_tol,
                    "Newton residual tolerance (also via GEOMINT_NEWTON_TOL; default 1e-12)");
  };

  add_common(app.add_subcommand("simulate", "integrate one trajectory and write it out"));
  add_common(app.add_subcommand("compare",
                                "scan a reaction-force run for variational common solutions"));
  add_common(app.add_subcommand("diagnose", "symplecticity, order, and drift checks"));

  CLI11_PARSE(app, argc, argv);

  opts.command = app.get_subcommands().front()->get_name();
  if (!q.empty()) opts.q0 = q;
  if (!p.empty()) opts.p0 = p;
  if (!v.empty()) opts.v0 = v;
  if (newton_tol != 0.0) opts.newton_tol = newton_tol;

  return geomint::run_cli(opts);
}
