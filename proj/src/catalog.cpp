#include "geomint/catalog.hpp"

#include <fstream>
#include <sstream>

namespace geomint {

namespace {

using nlohmann::json;

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

std::vector<std::string> default_varnames(int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back("q" + std::to_string(i));
  return names;
}

/// Identity-metric system over x,y(,z) with one constraint row on the last
/// coordinate; the workhorse behind most catalog entries.
LinearConstraintSystem plane_field_system(int n, const std::vector<std::string>& coeffs) {
  LinearConstraintSystem sys;
  sys.split.n = n;
  std::vector<std::string> names = n <= 3 ? std::vector<std::string>{"x", "y", "z"} : default_varnames(n);
  names.resize(static_cast<std::size_t>(n));
  sys.varnames = names;
  auto table = variable_table(sys.varnames);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sys.metric.push_back(Expr::constant(i == j ? 1.0 : 0.0));
  sys.potential = Expr::constant(0.0);
  if (coeffs.empty()) {
    for (int i = 0; i < n; ++i) sys.split.free.push_back(i);
  } else {
    for (int i = 0; i + 1 < n; ++i) sys.split.free.push_back(i);
    sys.split.constrained.push_back(n - 1);
    for (const std::string& c : coeffs) sys.gamma_coeffs.push_back(Expr::parse(c, table));
  }
  validate_system(sys);
  return sys;
}

}  // namespace

std::vector<std::pair<std::string, int>> variable_table(const std::vector<std::string>& varnames) {
  std::vector<std::pair<std::string, int>> table;
  auto add = [&](const std::string& name, int idx) {
    for (const auto& [n, i] : table) {
      (void)i;
      if (n == name) return;  // first binding wins
    }
    table.emplace_back(name, idx);
  };
  const int n = static_cast<int>(varnames.size());
  for (int i = 0; i < n; ++i) add(varnames[static_cast<std::size_t>(i)], i);
  for (int i = 0; i < n; ++i) add("q" + std::to_string(i + 1), i);
  if (n <= 3) {
    const char* alias[3] = {"x", "y", "z"};
    for (int i = 0; i < n; ++i) add(alias[i], i);
  }
  return table;
}

std::unique_ptr<HamiltonianSystem> SystemModel::make_hamiltonian() const {
  if (is_linear()) return std::make_unique<LinSysHamiltonian>(linear());
  return std::make_unique<MartinetHamiltonian>(martinet());
}

double SystemModel::hamiltonian_value(const Vec& q, const Vec& p) const {
  if (is_linear()) return hamiltonian(linear(), PhaseState{q, p});
  return martinet_hamiltonian(martinet(), PhaseState{q, p});
}

Vec SystemModel::complete_velocity(const Vec& q, const Vec& vfree) const {
  if (!is_linear()) {
    // benchmark constraint: vz = (y^2/2) vx from (vx, vy)
    Vec v(3);
    v[0] = vfree[0];
    v[1] = vfree[1];
    v[2] = 0.5 * q[1] * q[1] * vfree[0];
    return v;
  }
  const LinearConstraintSystem& sys = linear();
  Vec v = Vec::Zero(sys.n());
  scatter(v, sys.split.free, vfree);
  if (sys.k() > 0) scatter(v, sys.split.constrained, Vec(gamma_at(sys, q) * vfree));
  return v;
}

SystemModel catalog_system(const std::string& name, const nlohmann::json& params) {
  SystemModel m;
  m.name = name;
  if (name == "free") {
    m.model = plane_field_system(2, {});
    m.default_q = to_vec({0.2, -0.1});
    m.default_p = to_vec({1.0, 0.5});
    m.default_vfree = to_vec({1.0, 0.5});
  } else if (name == "oscillator") {
    LinearConstraintSystem sys;
    sys.split.n = 1;
    sys.split.free = {0};
    sys.varnames = {"x"};
    sys.metric.push_back(Expr::constant(1.0));
    sys.potential = Expr::parse("x^2/2", variable_table(sys.varnames));
    validate_system(sys);
    m.model = sys;
    m.default_q = to_vec({1.0});
    m.default_p = to_vec({0.0});
    m.default_vfree = to_vec({0.0});
  } else if (name == "heisenberg") {
    m.model = plane_field_system(3, {"y", "0"});
    m.default_q = to_vec({0.2, 0.3, 0.1});
    m.default_p = to_vec({0.8, -0.4, 0.6});
    m.default_vfree = to_vec({0.7, -0.3});
  } else if (name == "martinet_distribution") {
    m.model = plane_field_system(3, {"y^2/2", "0"});
    m.default_q = to_vec({0.2, 0.3, 0.1});
    m.default_p = to_vec({0.8, -0.4, 0.6});
    m.default_vfree = to_vec({0.7, -0.3});
  } else if (name == "holonomic_demo") {
    m.model = plane_field_system(3, {"x", "0"});
    m.default_q = to_vec({0.2, 0.3, 0.1});
    m.default_p = to_vec({0.8, -0.4, 0.6});
    m.default_vfree = to_vec({0.7, -0.3});
  } else if (name == "martinet") {
    MartinetSystem sys;
    sys.beta = 1.0;
    if (params.is_object() && params.contains("beta")) {
      if (!params["beta"].is_number())
        throw ValidationError("catalog martinet: beta must be a number");
      sys.beta = params["beta"].get<double>();
    }
    m.model = sys;
    m.default_q = to_vec({0.1, 0.4, 0.0});
    m.default_p = to_vec({0.9, 0.5, 0.7});
    m.default_vfree = to_vec({0.9, 0.5});
  } else {
    throw ValidationError("unknown catalog system '" + name + "'");
  }
  return m;
}

SystemModel system_from_json(const nlohmann::json& spec) {
  if (!spec.is_object()) throw ValidationError("system spec must be a JSON object");
  if (spec.contains("schema") && spec["schema"] != 1)
    throw ValidationError("unsupported spec schema (expected 1)");

  if (spec.contains("catalog")) {
    const auto& cat = spec["catalog"];
    SystemModel m;
    if (cat.is_string()) {
      m = catalog_system(cat.get<std::string>(), json::object());
    } else if (cat.is_object() && cat.size() == 1) {
      m = catalog_system(cat.begin().key(), cat.begin().value());
    } else {
      throw ValidationError("field 'catalog' must be a name or {name: {params}}");
    }
    if (spec.contains("name")) m.name = spec["name"].get<std::string>();
    return m;
  }

  if (!spec.contains("n") || !spec["n"].is_number_integer())
    throw ValidationError("field 'n' (integer dimension) is required");
  const int n = spec["n"].get<int>();
  if (n < 1 || n > 16) throw ValidationError("field 'n' must be in 1..16");

  LinearConstraintSystem sys;
  sys.split.n = n;
  sys.varnames = default_varnames(n);
  if (spec.contains("varnames")) {
    if (!spec["varnames"].is_array() || static_cast<int>(spec["varnames"].size()) != n)
      throw ValidationError("field 'varnames' must list exactly n names");
    sys.varnames.clear();
    for (const auto& v : spec["varnames"]) sys.varnames.push_back(v.get<std::string>());
  }
  auto table = variable_table(sys.varnames);

  // constrained indices come from the constraints list; 1-based or by name
  std::vector<int> constrained;
  std::vector<std::vector<std::string>> coeff_rows;
  if (spec.contains("constraints")) {
    if (!spec["constraints"].is_array())
      throw ValidationError("field 'constraints' must be an array");
    for (const auto& c : spec["constraints"]) {
      if (!c.is_object() || !c.contains("alpha_index") || !c.contains("coeffs"))
        throw ValidationError("each constraint needs 'alpha_index' and 'coeffs'");
      int idx = -1;
      if (c["alpha_index"].is_number_integer()) {
        idx = c["alpha_index"].get<int>() - 1;  // config is 1-based
      } else if (c["alpha_index"].is_string()) {
        std::string want = c["alpha_index"].get<std::string>();
        for (const auto& [nm, i] : table)
          if (nm == want) {
            idx = i;
            break;
          }
      }
      if (idx < 0 || idx >= n)
        throw ValidationError("constraint field 'alpha_index' does not name a coordinate");
      constrained.push_back(idx);
      std::vector<std::string> row;
      for (const auto& s : c["coeffs"]) row.push_back(s.get<std::string>());
      coeff_rows.push_back(std::move(row));
    }
  }
  // sorted constrained block; free block is the complement
  std::vector<std::size_t> order(constrained.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return constrained[a] < constrained[b]; });
  for (std::size_t i : order) sys.split.constrained.push_back(constrained[i]);
  for (int i = 0; i < n; ++i)
    if (std::find(sys.split.constrained.begin(), sys.split.constrained.end(), i) ==
        sys.split.constrained.end())
      sys.split.free.push_back(i);

  const int nf = sys.nf();
  for (std::size_t i : order) {
    const auto& row = coeff_rows[i];
    if (static_cast<int>(row.size()) != nf)
      throw ValidationError("constraint 'coeffs' must list n-k = " + std::to_string(nf) +
                            " expressions");
    for (const std::string& s : row) sys.gamma_coeffs.push_back(Expr::parse(s, table));
  }

  if (!spec.contains("metric") || (spec["metric"].is_string() && spec["metric"] == "identity")) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sys.metric.push_back(Expr::constant(i == j ? 1.0 : 0.0));
  } else if (spec["metric"].is_array()) {
    if (static_cast<int>(spec["metric"].size()) != n)
      throw ValidationError("field 'metric' must be \"identity\" or an n x n matrix of expressions");
    for (const auto& row : spec["metric"]) {
      if (!row.is_array() || static_cast<int>(row.size()) != n)
        throw ValidationError("metric rows must list n expressions");
      for (const auto& s : row) sys.metric.push_back(Expr::parse(s.get<std::string>(), table));
    }
  } else {
    throw ValidationError("field 'metric' must be \"identity\" or an n x n matrix of expressions");
  }

  sys.potential = spec.contains("potential")
                      ? Expr::parse(spec["potential"].get<std::string>(), table)
                      : Expr::constant(0.0);
  validate_system(sys);

  SystemModel m;
  m.name = spec.contains("name") ? spec["name"].get<std::string>() : "custom";
  m.model = sys;
  m.default_q = Vec::Zero(n);
  m.default_p = Vec::Zero(n);
  m.default_vfree = Vec::Zero(nf);
  if (spec.contains("initial")) {
    const auto& init = spec["initial"];
    auto read_vec = [&](const char* key, Eigen::Index want) -> std::optional<Vec> {
      if (!init.contains(key)) return std::nullopt;
      Vec v = to_vec(init[key].get<std::vector<double>>());
      if (v.size() != want)
        throw ValidationError(std::string("initial '") + key + "' must have " +
                              std::to_string(want) + " entries");
      return v;
    };
    if (auto v = read_vec("q", n)) m.default_q = *v;
    if (auto v = read_vec("p", n)) m.default_p = *v;
    if (auto v = read_vec("vfree", nf)) m.default_vfree = *v;
  }
  return m;
}

SystemModel load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spec file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("spec file '" + path + "' is not valid JSON: " + e.what());
  }
  return system_from_json(doc);
}

}  // namespace geomint
