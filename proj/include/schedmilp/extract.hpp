// Stage 2: execute the planned extraction tasks in order, threading the
// prerequisite outputs forward as Known Information and shape-validating
// every output before it is stored.
#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "schedmilp/llm.hpp"
#include "schedmilp/registry.hpp"
#include "schedmilp/schema.hpp"

namespace schedmilp {

struct ExtractionProvenance {
  std::string prompt_key;
  int attempts = 0;
};

class ExtractionStore {
 public:
  bool has(const std::string& task) const { return index_.count(task) != 0; }

  const json& at(const std::string& task) const {
    auto it = index_.find(task);
    if (it == index_.end())
      throw SequencingError("no stored extraction for task '" + task + "'");
    return entries_[it->second].second;
  }

  void put(const std::string& task, json value) {
    auto it = index_.find(task);
    if (it != index_.end()) {
      entries_[it->second].second = std::move(value);
      return;
    }
    index_[task] = entries_.size();
    entries_.emplace_back(task, std::move(value));
  }

  const std::vector<std::pair<std::string, json>>& entries() const { return entries_; }

  std::map<std::string, ExtractionProvenance> provenance;
  std::vector<std::string> warnings;

  // Entries serialized in insertion order; the same layout prompts use for
  // their Known Information section.
  json entries_json() const {
    json j = json::object();
    for (const auto& [task, value] : entries_) j[task] = value;
    return j;
  }

  json to_json() const {
    json j;
    j["entries"] = entries_json();
    j["provenance"] = json::object();
    for (const auto& [task, prov] : provenance)
      j["provenance"][task] = {{"prompt_key", prov.prompt_key}, {"attempts", prov.attempts}};
    j["warnings"] = warnings;
    return j;
  }

 private:
  std::vector<std::pair<std::string, json>> entries_;
  std::map<std::string, std::size_t> index_;
};

// Task prompt sections, in order: Task Name, Task Description, Expected
// Output Format, compliance sentence, Known Information, Problem Description.
inline ChatRequest build_task_prompt(const ExtractionTask& task, const ExtractionStore& store,
                                     const std::string& description) {
  json known = json::object();
  for (const auto& p : task.prerequisites) {
    if (!store.has(p))
      throw SequencingError("task '" + task.name + "' scheduled before its prerequisite '" + p +
                            "' produced output");
    known[p] = store.at(p);
  }

  std::string prompt;
  prompt += "### Task Name\n";
  prompt += task.name + "\n";
  prompt += "\n";
  prompt += "### Task Description\n";
  prompt += task.description;
  if (prompt.back() != '\n') prompt += "\n";
  prompt += "\n";
  prompt += "### Expected Output Format\n";
  prompt += task.output_schema;
  if (prompt.back() != '\n') prompt += "\n";
  prompt += "\n";
  prompt += "Please ensure your response strictly follows the **Expected Output Format** "
            "provided above. Avoid including any code implementations. The response must "
            "include a **valid JSON object** containing only the requested information.\n";
  prompt += "\n";
  prompt += "### Known Information\n";
  prompt += known.dump(4) + "\n";
  prompt += "### Problem Description\n";
  prompt += description;
  if (prompt.back() != '\n') prompt += "\n";

  ChatRequest req;
  req.user = prompt;
  return req;
}

// Tasks whose absence leaves nothing to assemble; a failed extraction of one
// of these is a stage-2 failure rather than an omit-with-warning.
inline const std::set<std::string>& backbone_tasks() {
  static const std::set<std::string> kBackbone = {
      "set of periods",
      "set of shifts",
      "set of workload-specific shifts",
      "minimum number of employees required for each period",
      "minimum labour demand for each day",
  };
  return kBackbone;
}

// Executes the plan in order. Outputs are shape-validated against the task's
// expected-output block; a task that fails after the bounded retry (or fails
// validation) is recorded as absent with a warning so downstream assembly
// must handle the absence explicitly. When a specific task replaced its
// generalised parent, its output is additionally registered under the
// parent's key so consumers declared against the parent still resolve.
inline ExtractionStore run_extraction(const TaskRegistry& registry, const TaskPlan& plan,
                                      const std::string& description, LlmGateway& gateway) {
  ExtractionStore store;
  const std::set<std::string> planned(plan.ordered_tasks.begin(), plan.ordered_tasks.end());

  for (const auto& name : plan.ordered_tasks) {
    const ExtractionTask* task = registry.find(name);
    if (!task) throw StageError(Stage::extract, "plan names unknown task '" + name + "'");

    ChatRequest req = build_task_prompt(*task, store, description);

    ExtractionProvenance prov;
    json value;
    bool ok = false;
    try {
      int attempts = 0;
      value = structured_call(gateway, req, &attempts);
      prov.attempts = attempts;
      ok = true;
    } catch (const ExtractionParseError&) {
      prov.attempts = 2;
      store.warnings.push_back("task '" + name + "' returned no parseable JSON; stored as absent");
    }

    if (ok) {
      SchemaNode schema = parse_output_schema(task->output_schema);
      std::vector<std::string> problems = check_shape(schema, value);
      if (!problems.empty()) {
        std::string msg = "task '" + name + "' output failed shape validation:";
        for (const auto& p : problems) msg += " " + p + ";";
        store.warnings.push_back(msg + " stored as absent");
        ok = false;
      }
    }

    if (ok) {
      store.put(name, value);
      if (task->parent_task && !planned.count(*task->parent_task))
        store.put(*task->parent_task, value);
    } else if (backbone_tasks().count(name)) {
      throw StageError(Stage::extract, "required task '" + name + "' produced no usable output");
    }

    // The fixture key of the first attempt identifies the prompt.
    ChatRequest keyed = req;
    if (keyed.model_id.empty()) keyed.model_id = gateway.config().model_id;
    prov.prompt_key = fixture_key(keyed);
    store.provenance[name] = prov;
  }
  return store;
}

}  // namespace schedmilp
