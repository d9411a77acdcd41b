// Modelling graphs: typed nodes for scheduling components plus dependency
// edges. Graphs are authored as JSON files and are immutable once loaded.
#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "schedmilp/errors.hpp"

namespace schedmilp {

using json = nlohmann::ordered_json;

enum class NodeKind { entity, parameter, decision_variable, objective, constraint };
enum class EdgeRelation {
  has_parameter,
  uses_variable,
  constrains,
  contributes_to_objective,
  depends_on
};
enum class ProblemType { shift_scheduling, days_off_scheduling };

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::entity: return "entity";
    case NodeKind::parameter: return "parameter";
    case NodeKind::decision_variable: return "decision-variable";
    case NodeKind::objective: return "objective";
    case NodeKind::constraint: return "constraint";
  }
  return "?";
}

inline const char* to_string(EdgeRelation r) {
  switch (r) {
    case EdgeRelation::has_parameter: return "has-parameter";
    case EdgeRelation::uses_variable: return "uses-variable";
    case EdgeRelation::constrains: return "constrains";
    case EdgeRelation::contributes_to_objective: return "contributes-to-objective";
    case EdgeRelation::depends_on: return "depends-on";
  }
  return "?";
}

inline const char* to_string(ProblemType t) {
  return t == ProblemType::shift_scheduling ? "shift-scheduling" : "days-off-scheduling";
}

struct GraphNode {
  std::string id;           // unique, lowercase-hyphenated
  std::string name;         // display name, used verbatim in prompts
  NodeKind kind = NodeKind::entity;
  std::string description;  // prose, used verbatim in prompts

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  std::string from;
  std::string to;
  EdgeRelation relation = EdgeRelation::depends_on;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

struct ModellingGraph {
  ProblemType problem_type = ProblemType::shift_scheduling;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  const GraphNode* node_by_id(const std::string& id) const {
    for (const auto& n : nodes)
      if (n.id == id) return &n;
    return nullptr;
  }
  const GraphNode* node_by_name(const std::string& name) const {
    for (const auto& n : nodes)
      if (n.name == name) return &n;
    return nullptr;
  }
  std::set<std::string> node_names() const {
    std::set<std::string> s;
    for (const auto& n : nodes) s.insert(n.name);
    return s;
  }

  friend bool operator==(const ModellingGraph&, const ModellingGraph&) = default;
};

struct ValidationFinding {
  std::string kind;     // e.g. "duplicate-id", "self-loop"
  std::string subject;  // offending node/edge id
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;

  bool ok() const { return findings.empty(); }
  std::string to_string() const {
    std::ostringstream os;
    for (const auto& f : findings)
      os << f.kind << " [" << f.subject << "]: " << f.message << "\n";
    return os.str();
  }
};

namespace detail {

inline NodeKind parse_node_kind(const std::string& s) {
  if (s == "entity") return NodeKind::entity;
  if (s == "parameter") return NodeKind::parameter;
  if (s == "decision-variable") return NodeKind::decision_variable;
  if (s == "objective") return NodeKind::objective;
  if (s == "constraint") return NodeKind::constraint;
  throw FormatError("unknown node kind '" + s + "'");
}

inline EdgeRelation parse_edge_relation(const std::string& s) {
  if (s == "has-parameter") return EdgeRelation::has_parameter;
  if (s == "uses-variable") return EdgeRelation::uses_variable;
  if (s == "constrains") return EdgeRelation::constrains;
  if (s == "contributes-to-objective") return EdgeRelation::contributes_to_objective;
  if (s == "depends-on") return EdgeRelation::depends_on;
  throw FormatError("unknown edge relation '" + s + "'");
}

inline ProblemType parse_problem_type(const std::string& s) {
  if (s == "shift-scheduling" || s == "shift") return ProblemType::shift_scheduling;
  if (s == "days-off-scheduling" || s == "days-off") return ProblemType::days_off_scheduling;
  throw FormatError("unknown problem type '" + s + "'");
}

inline int line_of_byte_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Parses JSON, translating nlohmann's byte offset into a line number.
inline json parse_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(e.what(), path.string(), line_of_byte_offset(text, e.byte));
  }
}

}  // namespace detail

inline ModellingGraph graph_from_json(const json& j) {
  ModellingGraph g;
  if (!j.is_object()) throw FormatError("graph document must be a JSON object");
  g.problem_type = detail::parse_problem_type(j.at("problem_type").get<std::string>());
  for (const auto& jn : j.at("nodes")) {
    GraphNode n;
    n.id = jn.at("id").get<std::string>();
    n.name = jn.at("name").get<std::string>();
    n.kind = detail::parse_node_kind(jn.at("kind").get<std::string>());
    n.description = jn.at("description").get<std::string>();
    g.nodes.push_back(std::move(n));
  }
  for (const auto& je : j.value("edges", json::array())) {
    GraphEdge e;
    e.from = je.at("from").get<std::string>();
    e.to = je.at("to").get<std::string>();
    e.relation = detail::parse_edge_relation(je.at("relation").get<std::string>());
    g.edges.push_back(std::move(e));
  }
  return g;
}

inline json graph_to_json(const ModellingGraph& g) {
  json j;
  j["problem_type"] = to_string(g.problem_type);
  j["nodes"] = json::array();
  for (const auto& n : g.nodes) {
    j["nodes"].push_back({{"id", n.id},
                          {"name", n.name},
                          {"kind", to_string(n.kind)},
                          {"description", n.description}});
  }
  j["edges"] = json::array();
  for (const auto& e : g.edges) {
    j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"relation", to_string(e.relation)}});
  }
  return j;
}

// Checks every structural invariant; the report carries one finding per
// violation and is empty iff the graph is valid.
inline ValidationReport validate_graph(const ModellingGraph& g) {
  ValidationReport report;
  auto add = [&](std::string kind, std::string subject, std::string message) {
    report.findings.push_back({std::move(kind), std::move(subject), std::move(message)});
  };

  if (g.nodes.empty()) {
    add("empty-graph", "", "graph has no nodes");
    return report;
  }

  std::set<std::string> ids, names;
  for (const auto& n : g.nodes) {
    if (!ids.insert(n.id).second) add("duplicate-id", n.id, "node id declared more than once");
    if (!names.insert(n.name).second)
      add("duplicate-name", n.name, "node name declared more than once");
    if (n.description.empty()) add("empty-description", n.id, "node has no description");
  }

  bool has_decision_variable = false;
  for (const auto& n : g.nodes)
    if (n.kind == NodeKind::decision_variable) has_decision_variable = true;
  if (!has_decision_variable)
    add("no-decision-variable", "", "graph declares no decision-variable node");

  for (const auto& e : g.edges) {
    if (!ids.count(e.from))
      add("dangling-edge", e.from, "edge endpoint '" + e.from + "' is not a node");
    if (!ids.count(e.to)) add("dangling-edge", e.to, "edge endpoint '" + e.to + "' is not a node");
    if (e.from == e.to) add("self-loop", e.from, "edge from a node to itself");
  }

  // Every constraint node must be reachable from some entity or parameter
  // node along the directed edges.
  std::set<std::string> reached;
  std::vector<std::string> frontier;
  for (const auto& n : g.nodes) {
    if (n.kind == NodeKind::entity || n.kind == NodeKind::parameter) {
      reached.insert(n.id);
      frontier.push_back(n.id);
    }
  }
  while (!frontier.empty()) {
    std::string cur = frontier.back();
    frontier.pop_back();
    for (const auto& e : g.edges) {
      if (e.from == cur && !reached.count(e.to)) {
        reached.insert(e.to);
        frontier.push_back(e.to);
      }
    }
  }
  for (const auto& n : g.nodes) {
    if (n.kind == NodeKind::constraint && !reached.count(n.id))
      add("unreachable-constraint", n.id,
          "constraint node not reachable from any entity or parameter node");
  }

  return report;
}

// Loads and validates a graph file. Throws FormatError on malformed input and
// ValidationError when invariants are violated.
inline ModellingGraph load_graph(const std::filesystem::path& path) {
  ModellingGraph g = graph_from_json(detail::parse_json_file(path));
  ValidationReport report = validate_graph(g);
  if (!report.ok())
    throw ValidationError("invalid graph " + path.string() + ":\n" + report.to_string());
  return g;
}

// (name, description) pairs in declaration order; feeds prompt construction.
inline std::vector<std::pair<std::string, std::string>> node_catalog(const ModellingGraph& g) {
  std::vector<std::pair<std::string, std::string>> catalog;
  catalog.reserve(g.nodes.size());
  for (const auto& n : g.nodes) catalog.emplace_back(n.name, n.description);
  return catalog;
}

}  // namespace schedmilp
