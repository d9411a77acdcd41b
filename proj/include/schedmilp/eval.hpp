// Benchmark harness: dataset loading, repeated-trial execution accuracy
// against known optima, recorded model-accuracy verdicts, and report output.
#pragma once

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "schedmilp/pipeline.hpp"
#include "schedmilp/solver.hpp"

namespace schedmilp {

struct Instance {
  std::string id;
  ProblemType problem_type = ProblemType::shift_scheduling;
  std::string description;
  std::optional<double> reference_optimum;
  std::optional<std::string> reference_model;
  std::optional<bool> ma_verdict;
  std::string ma_notes;
  std::filesystem::path dir;
};

// One directory per instance: description.md, meta.json, and optionally
// reference_model.tex, ma.json, and a fixtures/ subdirectory.
inline Instance load_instance(const std::filesystem::path& dir) {
  Instance inst;
  inst.dir = dir;
  inst.id = dir.filename().string();
  inst.description = detail::read_text_file(dir / "description.md");
  if (inst.description.empty()) throw FormatError("empty description", (dir / "description.md").string());
  json meta = detail::parse_json_file(dir / "meta.json");
  inst.problem_type = detail::parse_problem_type(meta.at("problem_type").get<std::string>());
  if (meta.contains("reference_optimum") && !meta.at("reference_optimum").is_null()) {
    double v = meta.at("reference_optimum").get<double>();
    if (!std::isfinite(v))
      throw FormatError("reference_optimum is not finite", (dir / "meta.json").string());
    inst.reference_optimum = v;
  }
  if (std::filesystem::exists(dir / "reference_model.tex"))
    inst.reference_model = detail::read_text_file(dir / "reference_model.tex");
  if (std::filesystem::exists(dir / "ma.json")) {
    json ma = detail::parse_json_file(dir / "ma.json");
    inst.ma_verdict = ma.at("verdict").get<bool>();
    inst.ma_notes = ma.value("notes", "");
  }
  return inst;
}

inline std::vector<Instance> load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw FormatError("dataset directory does not exist", dir.string());
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "meta.json"))
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  std::vector<Instance> out;
  for (const auto& d : dirs) out.push_back(load_instance(d));
  return out;
}

// EA numerator/denominator to a fraction; total must be positive.
inline double compute_ea(int matches, int total) {
  if (total <= 0) throw Error("compute_ea: total must be positive");
  if (matches < 0 || matches > total) throw Error("compute_ea: matches out of range");
  return static_cast<double>(matches) / static_cast<double>(total);
}

// Persists a human model-accuracy verdict next to the instance.
inline void record_ma(const std::filesystem::path& dataset_dir, const std::string& instance_id,
                      bool verdict, const std::string& notes = "") {
  std::filesystem::path dir = dataset_dir / instance_id;
  if (!std::filesystem::exists(dir / "meta.json"))
    throw Error("unknown instance '" + instance_id + "'");
  json j;
  j["verdict"] = verdict;
  j["notes"] = notes;
  detail::write_text(dir / "ma.json", j.dump(2) + "\n");
}

struct TrialOutcome {
  bool match = false;
  std::string status;  // "ok", "mismatch", "failed:<stage>", "no-reference"
  std::optional<double> optimum;
};

struct TrialReport {
  int trials = 0;
  std::vector<std::string> instance_ids;
  std::vector<std::vector<TrialOutcome>> outcomes;  // [instance][trial]
  std::vector<double> ea_per_trial;
  double ea_average = 0.0;
  std::optional<double> ma;

  json to_json() const {
    json j;
    j["trials"] = trials;
    j["instances"] = json::array();
    for (std::size_t i = 0; i < instance_ids.size(); ++i) {
      json ji;
      ji["id"] = instance_ids[i];
      ji["per_trial"] = json::array();
      for (const auto& o : outcomes[i]) {
        json jo;
        jo["status"] = o.status;
        jo["match"] = o.match;
        if (o.optimum) jo["optimum"] = *o.optimum;
        ji["per_trial"].push_back(std::move(jo));
      }
      j["instances"].push_back(std::move(ji));
    }
    j["ea_per_trial"] = ea_per_trial;
    j["ea_average"] = ea_average;
    j["ma"] = ma ? json(*ma) : json(nullptr);
    return j;
  }

  // Plain-text table mirroring the usual EA-per-trial / average / MA layout.
  std::string to_table() const {
    std::ostringstream os;
    std::size_t width = 12;
    for (const auto& id : instance_ids) width = std::max(width, id.size() + 2);
    os << std::left << std::setw(static_cast<int>(width)) << "instance";
    for (int t = 1; t <= trials; ++t) os << std::setw(9) << ("trial " + std::to_string(t));
    os << "\n";
    for (std::size_t i = 0; i < instance_ids.size(); ++i) {
      os << std::setw(static_cast<int>(width)) << instance_ids[i];
      for (const auto& o : outcomes[i]) os << std::setw(9) << o.status;
      os << "\n";
    }
    os << std::setw(static_cast<int>(width)) << "EA";
    for (double ea : ea_per_trial) os << std::setw(9) << (detail::fmt_num(ea * 100) + "%");
    os << "\n";
    os << "EA average: " << detail::fmt_num(ea_average * 100) << "%\n";
    os << "MA: " << (ma ? detail::fmt_num(*ma * 100) + "%" : std::string("n/a")) << "\n";
    return os.str();
  }
};

struct PipelineConfig {
  std::map<ProblemType, ModellingGraph> graphs;
  std::map<ProblemType, TaskRegistry> registries;
  BackendMode mode = BackendMode::replay;
  std::string model_id;
  std::string endpoint;
  std::string api_key;
  std::optional<std::filesystem::path> fixtures_override;  // default: <instance>/fixtures
  SolverOptions solver;
};

namespace detail {

inline bool optimum_matches(double computed, double reference) {
  return std::abs(computed - reference) <= 1e-6 * std::max(1.0, std::abs(reference));
}

}  // namespace detail

// Runs the full pipeline for one instance and solves the model.
inline TrialOutcome run_instance_once(const Instance& inst, const PipelineConfig& cfg,
                                      FormulationArtifacts* artifacts = nullptr) {
  TrialOutcome out;
  try {
    auto git = cfg.graphs.find(inst.problem_type);
    auto rit = cfg.registries.find(inst.problem_type);
    if (git == cfg.graphs.end() || rit == cfg.registries.end())
      throw StageError(Stage::config,
                       "no graph/registry configured for problem type of '" + inst.id + "'");
    GatewayConfig gw_cfg;
    gw_cfg.mode = cfg.mode;
    gw_cfg.model_id = cfg.model_id;
    gw_cfg.endpoint = cfg.endpoint;
    gw_cfg.api_key = cfg.api_key;
    gw_cfg.fixture_dir = cfg.fixtures_override ? *cfg.fixtures_override : inst.dir / "fixtures";
    LlmGateway gateway(gw_cfg);

    ModelIR model = formulate(git->second, rit->second, inst.description, gateway, artifacts);
    SolveResult solved = solve_model(model, cfg.solver);
    if (solved.status != SolveStatus::optimal) {
      out.status = "failed:solve";
      return out;
    }
    out.optimum = solved.objective;
    if (!inst.reference_optimum) {
      out.status = "no-reference";
      return out;
    }
    if (detail::optimum_matches(solved.objective, *inst.reference_optimum)) {
      out.match = true;
      out.status = "ok";
    } else {
      out.status = "mismatch";
    }
  } catch (const StageError& e) {
    out.status = std::string("failed:") + stage_name(e.stage());
  } catch (const FixtureMissError&) {
    out.status = "failed:fixture-miss";
  } catch (const Error&) {
    out.status = "failed:error";
  }
  return out;
}

// Executes every instance `trials` times. A stage failure marks the trial as
// a non-match; it never aborts the batch.
inline TrialReport run_trials(const std::vector<Instance>& dataset, int trials,
                              const PipelineConfig& cfg) {
  if (trials < 1) throw Error("trials must be >= 1");
  if (dataset.empty()) throw Error("dataset is empty");

  TrialReport report;
  report.trials = trials;
  for (const auto& inst : dataset) report.instance_ids.push_back(inst.id);
  report.outcomes.assign(dataset.size(), {});

  for (std::size_t i = 0; i < dataset.size(); ++i)
    for (int t = 0; t < trials; ++t)
      report.outcomes[i].push_back(run_instance_once(dataset[i], cfg));

  for (int t = 0; t < trials; ++t) {
    int matches = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i)
      if (report.outcomes[i][t].match) ++matches;
    report.ea_per_trial.push_back(compute_ea(matches, static_cast<int>(dataset.size())));
  }
  double sum = 0.0;
  for (double ea : report.ea_per_trial) sum += ea;
  report.ea_average = sum / trials;

  int verdicts = 0, correct = 0;
  for (const auto& inst : dataset) {
    if (inst.ma_verdict) {
      ++verdicts;
      if (*inst.ma_verdict) ++correct;
    }
  }
  if (verdicts > 0) report.ma = compute_ea(correct, verdicts);
  return report;
}

}  // namespace schedmilp
