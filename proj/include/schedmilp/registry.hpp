// Extraction-task registry: task definitions, node-driven selection with
// prerequisite closure and generalised-task removal, and topological ordering.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "schedmilp/graph.hpp"

namespace schedmilp {

struct ExtractionTask {
  std::string name;
  std::string description;    // prose instructions, used verbatim in prompts
  std::string output_schema;  // expected-output block, used verbatim in prompts
  std::vector<std::string> prerequisites;
  std::optional<std::string> parent_task;  // the generalised/coarser task
  std::vector<std::string> associated_nodes;
};

struct TaskRegistry {
  std::vector<ExtractionTask> tasks;
  // Node names of the graph the registry was validated against; lets
  // select_tasks reject unknown activations without re-threading the graph.
  std::set<std::string> known_nodes;

  const ExtractionTask* find(const std::string& name) const {
    for (const auto& t : tasks)
      if (t.name == name) return &t;
    return nullptr;
  }
};

struct TaskPlan {
  std::vector<std::string> ordered_tasks;

  friend bool operator==(const TaskPlan&, const TaskPlan&) = default;
};

namespace detail {

// Kahn pass over the prerequisite relation restricted to `names`; returns
// tasks that could not be ordered (empty iff acyclic).
inline std::set<std::string> unorderable_tasks(const TaskRegistry& reg,
                                               const std::set<std::string>& names) {
  std::map<std::string, int> indeg;
  for (const auto& n : names) indeg[n] = 0;
  for (const auto& n : names) {
    const ExtractionTask* t = reg.find(n);
    if (!t) continue;
    for (const auto& p : t->prerequisites)
      if (names.count(p)) ++indeg[n];
  }
  std::set<std::string> frontier;
  for (const auto& [n, d] : indeg)
    if (d == 0) frontier.insert(n);
  std::size_t done = 0;
  while (!frontier.empty()) {
    std::string cur = *frontier.begin();
    frontier.erase(frontier.begin());
    ++done;
    for (const auto& n : names) {
      const ExtractionTask* t = reg.find(n);
      if (!t) continue;
      if (std::find(t->prerequisites.begin(), t->prerequisites.end(), cur) !=
          t->prerequisites.end()) {
        if (--indeg[n] == 0) frontier.insert(n);
      }
    }
  }
  std::set<std::string> leftover;
  if (done != names.size()) {
    for (const auto& [n, d] : indeg)
      if (d > 0) leftover.insert(n);
  }
  return leftover;
}

}  // namespace detail

inline TaskRegistry registry_from_json(const json& j) {
  TaskRegistry reg;
  if (!j.is_object()) throw FormatError("registry document must be a JSON object");
  for (const auto& jt : j.at("tasks")) {
    ExtractionTask t;
    t.name = jt.at("name").get<std::string>();
    t.description = jt.at("description").get<std::string>();
    t.output_schema = jt.at("output_schema").get<std::string>();
    for (const auto& p : jt.value("prerequisites", json::array()))
      t.prerequisites.push_back(p.get<std::string>());
    if (jt.contains("parent_task") && !jt.at("parent_task").is_null())
      t.parent_task = jt.at("parent_task").get<std::string>();
    for (const auto& n : jt.value("associated_nodes", json::array()))
      t.associated_nodes.push_back(n.get<std::string>());
    reg.tasks.push_back(std::move(t));
  }
  return reg;
}

inline json registry_to_json(const TaskRegistry& reg) {
  json j;
  j["tasks"] = json::array();
  for (const auto& t : reg.tasks) {
    json jt;
    jt["name"] = t.name;
    jt["description"] = t.description;
    jt["output_schema"] = t.output_schema;
    jt["prerequisites"] = t.prerequisites;
    jt["parent_task"] = t.parent_task ? json(*t.parent_task) : json(nullptr);
    jt["associated_nodes"] = t.associated_nodes;
    j["tasks"].push_back(std::move(jt));
  }
  return j;
}

// Validates all task invariants against the graph. Throws ValidationError.
inline void validate_registry(TaskRegistry& reg, const ModellingGraph& g) {
  reg.known_nodes = g.node_names();
  std::set<std::string> task_names;
  for (const auto& t : reg.tasks) {
    if (!task_names.insert(t.name).second)
      throw ValidationError("duplicate task name '" + t.name + "'");
  }
  std::set<std::string> all;
  for (const auto& t : reg.tasks) {
    all.insert(t.name);
    for (const auto& p : t.prerequisites)
      if (!task_names.count(p))
        throw ValidationError("task '" + t.name + "' references unknown prerequisite '" + p + "'");
    if (t.parent_task) {
      if (*t.parent_task == t.name)
        throw ValidationError("task '" + t.name + "' is its own parent");
      if (!task_names.count(*t.parent_task))
        throw ValidationError("task '" + t.name + "' references unknown parent task '" +
                              *t.parent_task + "'");
    }
    for (const auto& n : t.associated_nodes)
      if (!reg.known_nodes.count(n))
        throw ValidationError("task '" + t.name + "' references unknown graph node '" + n + "'");
  }
  std::set<std::string> leftover = detail::unorderable_tasks(reg, all);
  if (!leftover.empty()) {
    std::string msg = "prerequisite cycle among tasks:";
    for (const auto& n : leftover) msg += " '" + n + "'";
    throw ValidationError(msg);
  }
}

inline TaskRegistry load_registry(const std::filesystem::path& path, const ModellingGraph& g) {
  TaskRegistry reg = registry_from_json(detail::parse_json_file(path));
  validate_registry(reg, g);
  return reg;
}

// Selects tasks for a set of activated node names: a task is in iff one of
// its associated nodes is activated or it is a (transitive) prerequisite of
// an included task; afterwards every generalised task whose more specific
// child is also selected is removed. Removed parents keep their
// prerequisites in the set.
inline std::set<std::string> select_tasks(const TaskRegistry& reg,
                                          const std::set<std::string>& activated) {
  for (const auto& n : activated)
    if (!reg.known_nodes.count(n)) throw ValidationError("unknown node name '" + n + "'");

  std::set<std::string> selected;
  for (const auto& t : reg.tasks) {
    for (const auto& n : t.associated_nodes) {
      if (activated.count(n)) {
        selected.insert(t.name);
        break;
      }
    }
  }

  // Prerequisite closure.
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& name : std::set<std::string>(selected)) {
      const ExtractionTask* t = reg.find(name);
      for (const auto& p : t->prerequisites)
        if (selected.insert(p).second) grew = true;
    }
  }

  // Generalised-task removal, applied to a fixpoint: a parent goes when any
  // selected task names it.
  bool removed = true;
  while (removed) {
    removed = false;
    std::set<std::string> doomed;
    for (const auto& name : selected) {
      const ExtractionTask* t = reg.find(name);
      if (t->parent_task && selected.count(*t->parent_task)) doomed.insert(*t->parent_task);
    }
    for (const auto& d : doomed) {
      selected.erase(d);
      removed = true;
    }
  }
  return selected;
}

// Kahn topological sort with a lexicographic frontier. A prerequisite whose
// generalised task was replaced is satisfied by the replacing specific task.
inline TaskPlan order_tasks(const TaskRegistry& reg, const std::set<std::string>& selected) {
  // Resolve each task's effective dependencies inside the selected set.
  std::map<std::string, std::vector<std::string>> deps;
  for (const auto& name : selected) {
    const ExtractionTask* t = reg.find(name);
    if (!t) throw ValidationError("unknown task '" + name + "'");
    for (const auto& p : t->prerequisites) {
      if (selected.count(p)) {
        deps[name].push_back(p);
        continue;
      }
      // The prerequisite may have been removed in favour of a specific child.
      std::string substitute;
      for (const auto& cand : selected) {
        const ExtractionTask* c = reg.find(cand);
        if (c->parent_task && *c->parent_task == p) {
          substitute = cand;
          break;
        }
      }
      if (substitute.empty())
        throw ValidationError("selected set is not closed: task '" + name +
                              "' needs missing prerequisite '" + p + "'");
      deps[name].push_back(substitute);
    }
  }

  std::map<std::string, int> indeg;
  for (const auto& n : selected) indeg[n] = 0;
  for (const auto& [n, ds] : deps) indeg[n] = static_cast<int>(ds.size());

  std::set<std::string> frontier;  // ordered: lexicographic tie-break
  for (const auto& [n, d] : indeg)
    if (d == 0) frontier.insert(n);

  TaskPlan plan;
  while (!frontier.empty()) {
    std::string cur = *frontier.begin();
    frontier.erase(frontier.begin());
    plan.ordered_tasks.push_back(cur);
    for (const auto& n : selected) {
      auto it = deps.find(n);
      if (it == deps.end()) continue;
      auto& ds = it->second;
      auto pos = std::find(ds.begin(), ds.end(), cur);
      while (pos != ds.end()) {
        ds.erase(pos);
        if (--indeg[n] == 0) frontier.insert(n);
        pos = std::find(ds.begin(), ds.end(), cur);
      }
    }
  }

  if (plan.ordered_tasks.size() != selected.size()) {
    std::string msg = "dependency cycle among tasks:";
    std::set<std::string> placed(plan.ordered_tasks.begin(), plan.ordered_tasks.end());
    for (const auto& n : selected)
      if (!placed.count(n)) msg += " '" + n + "'";
    throw ValidationError(msg);
  }
  return plan;
}

}  // namespace schedmilp
