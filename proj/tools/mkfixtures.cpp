// Generates the replay fixtures bundled with an instance. A seed file maps
// the identification prompt and each extraction task to its canned response;
// this tool plays those responses through the real pipeline in record mode so
// the fixture keys match the exact prompts the engine builds.
#include <CLI11.hpp>

#include <iostream>

#include "schedmilp/schedmilp.hpp"

using namespace schedmilp;

namespace {

Transport scripted_transport(const json& seed) {
  return [seed](const ChatRequest& req) -> ChatResponse {
    ChatResponse resp;
    if (req.user.rfind("### Task: Identify Relevant Nodes", 0) == 0) {
      resp.text = seed.at("identify").dump(2);
      return resp;
    }
    const std::string marker = "### Task Name\n";
    if (req.user.rfind(marker, 0) == 0) {
      std::size_t start = marker.size();
      std::size_t end = req.user.find('\n', start);
      std::string task = req.user.substr(start, end - start);
      if (!seed.at("tasks").contains(task))
        throw Error("seed file has no response for task '" + task + "'");
      resp.text = seed.at("tasks").at(task).dump(2);
      return resp;
    }
    throw Error("scripted transport got an unexpected prompt:\n" + req.user.substr(0, 200));
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate replay fixtures for an instance from its seed file"};
  std::string instance_dir, graph_path, registry_path, model_id = "fixtures-v1";
  app.add_option("--instance", instance_dir, "Instance directory with seed.json")->required();
  app.add_option("--graph", graph_path, "Modelling graph file")->required();
  app.add_option("--registry", registry_path, "Task registry file")->required();
  app.add_option("--model-id", model_id, "Model id recorded into the fixtures");
  CLI11_PARSE(app, argc, argv);

  try {
    Instance inst = load_instance(instance_dir);
    ModellingGraph graph = load_graph(graph_path);
    TaskRegistry registry = load_registry(registry_path, graph);
    json seed = detail::parse_json_file(std::filesystem::path(instance_dir) / "seed.json");

    GatewayConfig cfg;
    cfg.mode = BackendMode::record;
    cfg.fixture_dir = inst.dir / "fixtures";
    cfg.model_id = model_id;
    LlmGateway gateway(cfg, scripted_transport(seed));

    FormulationArtifacts artifacts;
    ModelIR model = formulate(graph, registry, inst.description, gateway, &artifacts);
    for (const auto& w : artifacts.store->warnings) std::cerr << "WARNING: " << w << "\n";

    SolveResult res = solve_model(model);
    std::cout << inst.id << ": recorded " << artifacts.store->entries().size()
              << " task outputs; solved status " << to_string(res.status);
    if (res.status == SolveStatus::optimal) {
      std::cout << ", optimum " << res.objective;
      if (inst.reference_optimum)
        std::cout << (std::abs(res.objective - *inst.reference_optimum) <= 1e-6 ? " (matches meta)"
                                                                                : " (MISMATCH)");
    }
    std::cout << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
