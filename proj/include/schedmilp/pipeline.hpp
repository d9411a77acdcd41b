// Orchestration of the three stages plus the audit bundle the CLI writes.
#pragma once

#include <filesystem>
#include <fstream>
#include <optional>

#include "schedmilp/assemble.hpp"
#include "schedmilp/extract.hpp"
#include "schedmilp/identify.hpp"

namespace schedmilp {

// Everything a run produced up to the point it stopped; written out as the
// audit bundle even when a stage fails.
struct FormulationArtifacts {
  std::optional<ActivationReport> report;
  std::optional<TaskPlan> plan;
  std::optional<ExtractionStore> store;
  std::optional<ModelIR> model;
  std::vector<std::string> assembly_warnings;
};

// Runs identification, task selection/ordering, extraction, and assembly.
// Throws StageError with the failing stage; `artifacts` (when given) is
// filled progressively so callers can audit partial runs.
inline ModelIR formulate(const ModellingGraph& graph, const TaskRegistry& registry,
                         const std::string& description, LlmGateway& gateway,
                         FormulationArtifacts* artifacts = nullptr) {
  ActivationReport report = run_identification(graph, description, gateway);
  if (artifacts) artifacts->report = report;

  TaskPlan plan;
  try {
    std::set<std::string> selected = select_tasks(registry, report.activated_nodes);
    plan = order_tasks(registry, selected);
  } catch (const ValidationError& e) {
    throw StageError(Stage::identify, e.what());
  }
  if (artifacts) artifacts->plan = plan;

  ExtractionStore store = run_extraction(registry, plan, description, gateway);
  if (artifacts) artifacts->store = store;

  std::vector<std::string> warnings;
  ModelIR model;
  try {
    model = build_model(store, report, graph, &warnings);
  } catch (const AssemblyError& e) {
    if (artifacts) artifacts->assembly_warnings = warnings;
    throw StageError(Stage::assemble, e.what());
  }
  if (artifacts) {
    artifacts->model = model;
    artifacts->assembly_warnings = warnings;
  }
  return model;
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace detail

// Audit bundle: activation report, task plan, extraction store, and the
// model files when assembly got that far.
inline void write_audit_bundle(const std::filesystem::path& dir,
                               const FormulationArtifacts& artifacts) {
  std::filesystem::create_directories(dir);
  if (artifacts.report)
    detail::write_text(dir / "activation_report.json", artifacts.report->to_json().dump(2) + "\n");
  if (artifacts.plan) {
    json j;
    j["ordered_tasks"] = artifacts.plan->ordered_tasks;
    detail::write_text(dir / "task_plan.json", j.dump(2) + "\n");
  }
  if (artifacts.store) {
    json j = artifacts.store->to_json();
    j["assembly_warnings"] = artifacts.assembly_warnings;
    detail::write_text(dir / "extraction_store.json", j.dump(2) + "\n");
  }
  if (artifacts.model) {
    detail::write_text(dir / "model.tex", render_latex(*artifacts.model));
    detail::write_text(dir / "model.lp", render_lp(*artifacts.model));
  }
}

}  // namespace schedmilp
