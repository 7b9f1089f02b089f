#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "geomint/hamiltonian.hpp"
#include "geomint/linsys.hpp"
#include "geomint/martinet.hpp"

namespace geomint {

/// A fully constructed problem: either a linear-constraint system or the
/// closed-form benchmark, plus default initial data so every run works with
/// zero user authoring.
struct SystemModel {
  std::string name;
  std::variant<LinearConstraintSystem, MartinetSystem> model;
  Vec default_q;
  Vec default_p;
  Vec default_vfree;  // free-block velocities; completed through the constraints

  bool is_linear() const { return std::holds_alternative<LinearConstraintSystem>(model); }
  const LinearConstraintSystem& linear() const { return std::get<LinearConstraintSystem>(model); }
  const MartinetSystem& martinet() const { return std::get<MartinetSystem>(model); }

  int dim() const { return is_linear() ? linear().n() : 3; }
  std::unique_ptr<HamiltonianSystem> make_hamiltonian() const;

  double hamiltonian_value(const Vec& q, const Vec& p) const;

  /// Full velocity vector from free components via the constraints (identity
  /// for unconstrained systems).
  Vec complete_velocity(const Vec& q, const Vec& vfree) const;
};

/// Built-in systems: free, oscillator, heisenberg, martinet_distribution,
/// holonomic_demo, martinet (parameter beta). Throws ValidationError for
/// unknown names or parameters.
SystemModel catalog_system(const std::string& name, const nlohmann::json& params);

/// Builds a model from a parsed spec document (schema 1): either a catalog
/// reference or an explicit n / varnames / metric / potential / constraints
/// description with expression strings.
SystemModel system_from_json(const nlohmann::json& spec);

/// Reads and parses a spec file; IoError on read failure, ValidationError /
/// ParseError on content problems.
SystemModel load_system_file(const std::string& path);

/// Name -> index table for expressions over this system's configuration:
/// declared varnames, q1..qn, and x,y,z when the dimension allows.
std::vector<std::pair<std::string, int>> variable_table(const std::vector<std::string>& varnames);

}  // namespace geomint
