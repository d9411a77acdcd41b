// Command-line entry point: formulate, solve, eval, plan, record-ma.
//
// Exit codes: 0 success, 2 config/usage, 3 I/O or file format, 4 stage-1
// identification, 5 stage-2 extraction, 6 stage-3 assembly, 7 solve,
// 8 fixture miss.
#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "schedmilp/schedmilp.hpp"

namespace {

using namespace schedmilp;

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitIdentify = 4;
constexpr int kExitExtract = 5;
constexpr int kExitAssemble = 6;
constexpr int kExitSolve = 7;
constexpr int kExitFixtureMiss = 8;

int exit_code_for(Stage stage) {
  switch (stage) {
    case Stage::config: return kExitConfig;
    case Stage::io: return kExitIo;
    case Stage::identify: return kExitIdentify;
    case Stage::extract: return kExitExtract;
    case Stage::assemble: return kExitAssemble;
    case Stage::solve: return kExitSolve;
  }
  return 1;
}

std::string fmt_value(double v) {
  double r = std::round(v);
  if (std::abs(v - r) < 1e-9) return std::to_string(static_cast<long long>(r));
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string api_key_from_env() {
  const char* key = std::getenv("SCHEDMILP_API_KEY");
  return key ? key : "";
}

struct BackendFlags {
  std::string backend = "replay";
  std::string model_id = "fixtures-v1";
  std::string endpoint;
  std::string fixtures;

  GatewayConfig gateway_config(const std::filesystem::path& default_fixtures) const {
    GatewayConfig cfg;
    cfg.mode = parse_backend_mode(backend);
    cfg.model_id = model_id;
    cfg.endpoint = endpoint;
    cfg.api_key = api_key_from_env();
    cfg.fixture_dir = fixtures.empty() ? default_fixtures : std::filesystem::path(fixtures);
    if (cfg.mode == BackendMode::live && cfg.api_key.empty())
      throw ConfigError("live mode requires the SCHEDMILP_API_KEY environment variable");
    if (cfg.mode != BackendMode::live && cfg.fixture_dir.empty())
      throw ConfigError("record/replay mode requires --fixtures or an instance fixture dir");
    return cfg;
  }
};

void add_backend_flags(CLI::App* cmd, BackendFlags& flags) {
  cmd->add_option("--backend", flags.backend, "Backend mode: live, record or replay")
      ->check(CLI::IsMember({"live", "record", "replay"}));
  cmd->add_option("--model-id", flags.model_id, "Model identifier sent with every request");
  cmd->add_option("--endpoint", flags.endpoint, "Chat-completions URL for live/record mode");
  cmd->add_option("--fixtures", flags.fixtures, "Fixture directory override");
}

void print_warnings(const FormulationArtifacts& artifacts) {
  auto dump = [](const std::vector<std::string>& ws) {
    for (const auto& w : ws) std::cerr << "WARNING: " << w << "\n";
  };
  if (artifacts.report) dump(artifacts.report->warnings);
  if (artifacts.store) dump(artifacts.store->warnings);
  dump(artifacts.assembly_warnings);
}

int cmd_formulate(const std::string& instance_dir, const std::string& graph_path,
                  const std::string& registry_path, const BackendFlags& flags,
                  const std::string& out_dir, bool also_solve) {
  FormulationArtifacts artifacts;
  try {
    Instance inst = load_instance(instance_dir);
    ModellingGraph graph = load_graph(graph_path);
    TaskRegistry registry = load_registry(registry_path, graph);
    LlmGateway gateway(flags.gateway_config(inst.dir / "fixtures"));

    ModelIR model;
    try {
      model = formulate(graph, registry, inst.description, gateway, &artifacts);
    } catch (...) {
      write_audit_bundle(out_dir, artifacts);  // audit up to the failing stage
      print_warnings(artifacts);
      throw;
    }
    model.problem_id = inst.id;
    artifacts.model = model;
    write_audit_bundle(out_dir, artifacts);
    print_warnings(artifacts);
    std::cout << "model written to " << out_dir << "/model.tex and " << out_dir << "/model.lp\n";

    if (also_solve) {
      SolveResult res = solve_model(model);
      if (res.status == SolveStatus::optimal)
        std::cout << "Optimal objective value: " << fmt_value(res.objective) << "\n";
      else
        std::cout << "No optimal solution found.\n";
    }
    return 0;
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.stage());
  } catch (const FixtureMissError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFixtureMiss;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_solve(const std::string& model_path) {
  try {
    StandardForm sf = parse_lp(detail::read_text_file(model_path));
    SolveResult res = solve_milp(sf);
    if (res.status != SolveStatus::optimal) {
      std::cout << "No optimal solution found.\n";
      return 0;
    }
    std::cout << "Optimal objective value: " << fmt_value(res.objective) << "\n";
    std::cout << "Variable values:\n";
    for (const auto& name : sf.var_names) {
      double v = res.assignment.at(name);
      if (std::abs(v) > 1e-9) std::cout << name << " = " << fmt_value(v) << "\n";
    }
    return 0;
  } catch (const LpParseError& e) {
    std::cerr << "error: " << model_path << ": " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolve;
  }
}

int cmd_eval(const std::string& dataset_dir, const std::string& data_dir, int trials,
             const BackendFlags& flags, const std::string& out_dir) {
  try {
    if (trials < 1) throw ConfigError("--trials must be at least 1");
    std::vector<Instance> dataset = load_dataset(dataset_dir);
    if (dataset.empty()) throw ConfigError("dataset directory holds no instances");

    PipelineConfig cfg;
    std::filesystem::path data(data_dir);
    {
      ModellingGraph g = load_graph(data / "graphs" / "shift_scheduling.json");
      cfg.registries[ProblemType::shift_scheduling] =
          load_registry(data / "registries" / "shift_scheduling.json", g);
      cfg.graphs[ProblemType::shift_scheduling] = std::move(g);
    }
    {
      ModellingGraph g = load_graph(data / "graphs" / "days_off_scheduling.json");
      cfg.registries[ProblemType::days_off_scheduling] =
          load_registry(data / "registries" / "days_off_scheduling.json", g);
      cfg.graphs[ProblemType::days_off_scheduling] = std::move(g);
    }
    cfg.mode = parse_backend_mode(flags.backend);
    cfg.model_id = flags.model_id;
    cfg.endpoint = flags.endpoint;
    cfg.api_key = api_key_from_env();
    if (!flags.fixtures.empty()) cfg.fixtures_override = flags.fixtures;

    TrialReport report = run_trials(dataset, trials, cfg);

    std::filesystem::create_directories(out_dir);
    detail::write_text(std::filesystem::path(out_dir) / "report.json",
                       report.to_json().dump(2) + "\n");
    detail::write_text(std::filesystem::path(out_dir) / "report.txt", report.to_table());

    // Trial-1 audit bundle per instance, model files included.
    for (const auto& inst : dataset) {
      FormulationArtifacts artifacts;
      TrialOutcome outcome = run_instance_once(inst, cfg, &artifacts);
      if (artifacts.model) artifacts.model->problem_id = inst.id;
      write_audit_bundle(std::filesystem::path(out_dir) / inst.id, artifacts);
      (void)outcome;
    }

    std::cout << report.to_table();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_plan(const std::string& graph_path, const std::string& registry_path,
             const std::vector<std::string>& nodes) {
  try {
    ModellingGraph graph = load_graph(graph_path);
    TaskRegistry registry = load_registry(registry_path, graph);
    std::set<std::string> activated(nodes.begin(), nodes.end());
    std::set<std::string> selected = select_tasks(registry, activated);
    TaskPlan plan = order_tasks(registry, selected);
    if (plan.ordered_tasks.empty()) {
      std::cout << "(empty plan)\n";
      return 0;
    }
    for (std::size_t i = 0; i < plan.ordered_tasks.size(); ++i) {
      const ExtractionTask* t = registry.find(plan.ordered_tasks[i]);
      std::cout << i + 1 << ". " << t->name;
      if (!t->prerequisites.empty()) {
        std::cout << "  (after:";
        for (const auto& p : t->prerequisites) std::cout << " " << p;
        std::cout << ")";
      }
      std::cout << "\n";
    }
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_record_ma(const std::string& dataset_dir, const std::string& instance_id,
                  const std::string& verdict, const std::string& notes) {
  try {
    record_ma(dataset_dir, instance_id, verdict == "true", notes);
    std::cout << "recorded MA verdict for " << instance_id << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Natural-language workforce scheduling to MILP, with an embedded exact solver"};
  app.require_subcommand(1);

  // formulate
  std::string instance_dir, graph_path, registry_path, out_dir = "out";
  bool also_solve = false;
  BackendFlags formulate_flags;
  CLI::App* formulate_cmd =
      app.add_subcommand("formulate", "Run the three-stage pipeline on one instance");
  formulate_cmd->add_option("--instance", instance_dir, "Instance directory")->required();
  formulate_cmd->add_option("--graph", graph_path, "Modelling graph file")->required();
  formulate_cmd->add_option("--registry", registry_path, "Task registry file")->required();
  formulate_cmd->add_option("--out", out_dir, "Output directory for model and audit files");
  formulate_cmd->add_flag("--solve", also_solve, "Also solve the generated model");
  add_backend_flags(formulate_cmd, formulate_flags);

  // solve
  std::string model_path;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve an LP-format model file");
  solve_cmd->add_option("model", model_path, "Path to an .lp file")->required();

  // eval
  std::string dataset_dir, data_dir = "data", eval_out = "eval-out";
  int trials = 5;
  BackendFlags eval_flags;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Run the benchmark harness over a dataset");
  eval_cmd->add_option("--dataset", dataset_dir, "Dataset directory")->required();
  eval_cmd->add_option("--data", data_dir, "Root directory with graphs/ and registries/");
  eval_cmd->add_option("--trials", trials, "Number of independent trials");
  eval_cmd->add_option("--out", eval_out, "Output directory for reports");
  add_backend_flags(eval_cmd, eval_flags);

  // plan
  std::string plan_graph, plan_registry;
  std::vector<std::string> plan_nodes;
  CLI::App* plan_cmd =
      app.add_subcommand("plan", "Print the task plan for a set of activated nodes (no LLM)");
  plan_cmd->add_option("--graph", plan_graph, "Modelling graph file")->required();
  plan_cmd->add_option("--registry", plan_registry, "Task registry file")->required();
  plan_cmd->add_option("nodes", plan_nodes, "Activated node names");

  // record-ma
  std::string ma_dataset, ma_instance, ma_verdict, ma_notes;
  CLI::App* ma_cmd = app.add_subcommand("record-ma", "Record a human model-accuracy verdict");
  ma_cmd->add_option("--dataset", ma_dataset, "Dataset directory")->required();
  ma_cmd->add_option("--instance", ma_instance, "Instance id")->required();
  ma_cmd->add_option("--verdict", ma_verdict, "true or false")
      ->required()
      ->check(CLI::IsMember({"true", "false"}));
  ma_cmd->add_option("--notes", ma_notes, "Free-form reviewer notes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (formulate_cmd->parsed())
    return cmd_formulate(instance_dir, graph_path, registry_path, formulate_flags, out_dir,
                         also_solve);
  if (solve_cmd->parsed()) return cmd_solve(model_path);
  if (eval_cmd->parsed()) return cmd_eval(dataset_dir, data_dir, trials, eval_flags, eval_out);
  if (plan_cmd->parsed()) return cmd_plan(plan_graph, plan_registry, plan_nodes);
  if (ma_cmd->parsed()) return cmd_record_ma(ma_dataset, ma_instance, ma_verdict, ma_notes);
  return kExitConfig;
}
