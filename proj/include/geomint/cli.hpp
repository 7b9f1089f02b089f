#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geomint/catalog.hpp"
#include "geomint/newton.hpp"

namespace geomint {

/// Everything one invocation needs. Exit codes: 0 success, 1 validation,
/// 2 numerical failure, 3 I/O failure.
struct CliOptions {
  std::string command;  // simulate | compare | diagnose
  std::string spec_path;
  std::string integrator = "verlet";
  double h = 0.1;
  int steps = 100;
  std::uint64_t seed = 1;
  std::string out_path;        // empty -> stdout
  std::string format = "csv";  // csv | json (simulate)
  std::optional<std::vector<double>> q0;
  std::optional<std::vector<double>> p0;
  std::optional<std::vector<double>> v0;
  std::optional<double> newton_tol;  // beats GEOMINT_NEWTON_TOL, beats 1e-12
};

int run_cli(const CliOptions& opts);

/// The individual commands; they throw, run_cli maps to exit codes.
std::string simulate_to_string(const SystemModel& model, const CliOptions& opts, int& exit_code);
std::string compare_to_string(const SystemModel& model, const CliOptions& opts);
std::string diagnose_to_string(const SystemModel& model, const CliOptions& opts);

/// Effective Newton configuration: flag, else GEOMINT_NEWTON_TOL, else 1e-12.
NewtonConfig effective_newton_config(const CliOptions& opts);

}  // namespace geomint
