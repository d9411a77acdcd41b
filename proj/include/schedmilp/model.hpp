// Solver-independent model representation. Every parameter is fully numeric
// by construction; there are no symbolic placeholders anywhere in the IR.
#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "schedmilp/errors.hpp"

namespace schedmilp {

enum class VarDomain { nonneg_integer, nonneg_continuous, binary };
enum class ConstraintSense { le, eq, ge };

inline const char* to_string(ConstraintSense s) {
  switch (s) {
    case ConstraintSense::le: return "<=";
    case ConstraintSense::eq: return "=";
    case ConstraintSense::ge: return ">=";
  }
  return "?";
}

struct LinearTerm {
  double coef = 0.0;
  std::string var;
};

struct ModelVariable {
  std::string name;
  VarDomain domain = VarDomain::nonneg_integer;
  std::string description;
};

struct ModelConstraint {
  std::string label;
  std::vector<LinearTerm> terms;
  ConstraintSense sense = ConstraintSense::ge;
  double rhs = 0.0;
};

struct ModelObjective {
  bool minimize = true;
  std::vector<LinearTerm> terms;
};

struct IndexSet {
  std::string name;         // e.g. "T"
  std::string description;  // e.g. "set of periods"
  std::vector<std::string> elements;
};

// A named numeric tensor with an explicit shape; shape {} is a scalar,
// {n} a vector, {n,m} a matrix stored row-major, and so on.
struct ModelParam {
  std::string name;
  std::string description;
  std::vector<std::size_t> shape;
  std::vector<double> values;

  double at(std::initializer_list<std::size_t> idx) const {
    std::size_t flat = 0;
    std::size_t d = 0;
    for (std::size_t i : idx) {
      flat = flat * shape[d] + i;
      ++d;
    }
    return values[flat];
  }
};

struct ModelIR {
  std::string problem_id;
  std::vector<IndexSet> sets;
  std::vector<ModelParam> params;
  std::vector<ModelVariable> vars;
  std::vector<ModelConstraint> constraints;
  ModelObjective objective;
  std::map<std::string, std::string> provenance;  // component label -> graph node id

  int var_index(const std::string& name) const {
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i].name == name) return static_cast<int>(i);
    return -1;
  }

  const ModelParam* param(const std::string& name) const {
    for (const auto& p : params)
      if (p.name == name) return &p;
    return nullptr;
  }

  // Structural checks: referenced variables exist, every coefficient and
  // parameter value is finite.
  std::vector<std::string> validate() const {
    std::vector<std::string> problems;
    auto check_terms = [&](const std::vector<LinearTerm>& terms, const std::string& where) {
      for (const auto& t : terms) {
        if (var_index(t.var) < 0)
          problems.push_back(where + " references undefined variable '" + t.var + "'");
        if (!std::isfinite(t.coef))
          problems.push_back(where + " has a non-finite coefficient on '" + t.var + "'");
      }
    };
    check_terms(objective.terms, "objective");
    for (const auto& c : constraints) {
      check_terms(c.terms, "constraint '" + c.label + "'");
      if (!std::isfinite(c.rhs))
        problems.push_back("constraint '" + c.label + "' has a non-finite rhs");
    }
    for (const auto& p : params) {
      std::size_t expect = 1;
      for (std::size_t d : p.shape) expect *= d;
      if (p.values.size() != expect)
        problems.push_back("parameter '" + p.name + "' value count does not match its shape");
      for (double v : p.values)
        if (!std::isfinite(v)) {
          problems.push_back("parameter '" + p.name + "' contains a non-finite value");
          break;
        }
    }
    return problems;
  }
};

}  // namespace schedmilp
