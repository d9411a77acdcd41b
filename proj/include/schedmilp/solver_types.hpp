// Shared solver-facing types: the standard form fed to the simplex and the
// solve result surfaced to callers.
#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "schedmilp/model.hpp"

namespace schedmilp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct StandardForm {
  bool minimize = true;
  std::vector<double> objective;  // per variable
  struct Row {
    std::vector<double> coefs;
    ConstraintSense sense = ConstraintSense::ge;
    double rhs = 0.0;
    std::string name;
  };
  std::vector<Row> rows;
  std::vector<double> lb, ub;
  std::vector<std::uint8_t> integer;
  std::vector<std::string> var_names;

  std::size_t num_vars() const { return var_names.size(); }
};

enum class SolveStatus { optimal, infeasible, unbounded, node_limit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::node_limit: return "node-limit";
  }
  return "?";
}

struct SolveResult {
  SolveStatus status = SolveStatus::infeasible;
  double objective = 0.0;
  std::map<std::string, double> assignment;
  long nodes_explored = 0;
  double best_bound = 0.0;
  // Finite bounds substituted for unbounded integer variables, for audit.
  std::vector<std::pair<std::string, double>> applied_auto_bounds;
};

struct SolverOptions {
  long node_limit = 500000;
  long iteration_limit = 20000;
  double integrality_tol = 1e-6;
  double gap_tol = 1e-6;
};

// StandardForm straight off the IR: variables and rows in declaration order,
// nonnegative bounds, integrality from the variable domains.
inline StandardForm to_standard_form(const ModelIR& m) {
  StandardForm sf;
  sf.minimize = m.objective.minimize;
  sf.objective.assign(m.vars.size(), 0.0);
  for (const auto& v : m.vars) {
    sf.var_names.push_back(v.name);
    sf.lb.push_back(0.0);
    sf.ub.push_back(v.domain == VarDomain::binary ? 1.0 : kInfinity);
    sf.integer.push_back(v.domain == VarDomain::nonneg_continuous ? 0 : 1);
  }
  for (const auto& t : m.objective.terms) {
    int idx = m.var_index(t.var);
    if (idx < 0) throw SolverError("objective references unknown variable '" + t.var + "'");
    sf.objective[idx] += t.coef;
  }
  for (const auto& c : m.constraints) {
    StandardForm::Row row;
    row.coefs.assign(m.vars.size(), 0.0);
    for (const auto& t : c.terms) {
      int idx = m.var_index(t.var);
      if (idx < 0)
        throw SolverError("constraint '" + c.label + "' references unknown variable '" + t.var +
                          "'");
      row.coefs[idx] += t.coef;
    }
    row.sense = c.sense;
    row.rhs = c.rhs;
    row.name = c.label;
    sf.rows.push_back(std::move(row));
  }
  return sf;
}

}  // namespace schedmilp
