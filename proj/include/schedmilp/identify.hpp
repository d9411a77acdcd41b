// Stage 1: the problem description is segmented into sentences by the LLM
// itself and each sentence is matched to at most three modelling-graph nodes.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "schedmilp/graph.hpp"
#include "schedmilp/llm.hpp"

namespace schedmilp {

struct ActivationReport {
  std::vector<std::string> sentences;
  std::vector<std::vector<std::string>> matches;  // matches[i] for sentences[i], each <= 3 names
  std::set<std::string> activated_nodes;          // union of all matches
  std::vector<std::string> warnings;

  json to_json() const {
    json j;
    j["sentences"] = sentences;
    j["matches"] = json::object();
    for (std::size_t i = 0; i < matches.size(); ++i)
      j["matches"]["sentence_" + std::to_string(i + 1)] = matches[i];
    j["activated_nodes"] = std::vector<std::string>(activated_nodes.begin(),
                                                    activated_nodes.end());
    j["warnings"] = warnings;
    return j;
  }
};

// The identification prompt: full node catalog, the verbatim description,
// six numbered instructions, and the expected output schema.
inline ChatRequest build_identification_prompt(const ModellingGraph& g,
                                               const std::string& description) {
  if (description.empty()) throw Error("problem description is empty");

  std::string p;
  p += "### Task: Identify Relevant Nodes for Each Sentence\n";
  p += "\n";
  p += "#### Problem Description:\n";
  p += description;
  if (p.back() != '\n') p += "\n";
  p += "\n";
  p += "#### Modelling Graph Nodes:\n";
  p += "Below are all the available modelling graph nodes. Each node has a **name** and a "
       "**description**. Your task is to match each sentence from the **Problem Description** "
       "to one or more of these nodes.\n";
  p += "\n";
  for (const auto& [name, desc] : node_catalog(g)) {
    p += "**Node Name**: " + name + "\n";
    p += "**Description**: " + desc + "\n";
    p += "\n";
  }
  p += "#### Instructions:\n";
  p += "1. **Extract all sentences from the Problem Description**, ensuring they are listed in "
       "the correct order.\n";
  p += "2. **Assign a unique identifier to each sentence (e.g., \"sentence_1\", \"sentence_2\", "
       "etc.).**\n";
  p += "3. **Ensure that each sentence is returned exactly as it appears in the original Problem "
       "Description.**\n";
  p += "4. **Match each sentence to up to 3 most relevant nodes from the Modelling Graph.**\n";
  p += "5. **Ignore tables as separate sentences.** If a sentence introduces a table, it must "
       "still be processed normally.\n";
  p += "6. **Ensure the response follows the JSON format strictly** with the correct number of "
       "sentences.\n";
  p += "\n";
  p += "#### Expected Output Format:\n";
  p += "```json\n";
  p += "{\n";
  p += "  \"sentences\": [\n";
  p += "    \"Sentence 1\",\n";
  p += "    \"Sentence 2\",\n";
  p += "    \"Sentence 3\",\n";
  p += "    ...\n";
  p += "  ],\n";
  p += "  \"matches\": {\n";
  p += "    \"sentence_1\": [\"Node A\", \"Node B\"],\n";
  p += "    \"sentence_2\": [\"Node C\"],\n";
  p += "    \"sentence_3\": []\n";
  p += "  }\n";
  p += "}\n";
  p += "```\n";
  p += "\n";
  p += "Return only the JSON response. Do not include explanations or additional formatting.\n";

  ChatRequest req;
  req.user = p;
  return req;
}

// Runs the identification call and post-processes the response: unknown node
// names are dropped with a warning rather than failing the run, and match
// lists are truncated to three entries.
inline ActivationReport run_identification(const ModellingGraph& g,
                                           const std::string& description, LlmGateway& gateway) {
  ChatRequest req = build_identification_prompt(g, description);
  json response;
  try {
    response = structured_call(gateway, req);
  } catch (const ExtractionParseError& e) {
    throw StageError(Stage::identify, std::string("unparseable response after retry: ") +
                                          e.what());
  }

  ActivationReport report;
  if (!response.contains("sentences") || !response["sentences"].is_array())
    throw StageError(Stage::identify, "response lacks a 'sentences' array");
  for (const auto& s : response["sentences"]) {
    if (!s.is_string() || s.get<std::string>().empty())
      throw StageError(Stage::identify, "response contains an empty or non-string sentence");
    report.sentences.push_back(s.get<std::string>());
  }

  const std::set<std::string> valid = g.node_names();
  report.matches.resize(report.sentences.size());
  const json matches = response.value("matches", json::object());
  for (std::size_t i = 0; i < report.sentences.size(); ++i) {
    std::string key = "sentence_" + std::to_string(i + 1);
    if (!matches.contains(key)) continue;
    const json& list = matches.at(key);
    if (!list.is_array()) continue;
    for (const auto& m : list) {
      if (!m.is_string()) continue;
      std::string name = m.get<std::string>();
      if (!valid.count(name)) {
        report.warnings.push_back("dropped unknown node name '" + name + "' matched to " + key);
        continue;
      }
      if (report.matches[i].size() >= 3) {
        report.warnings.push_back("truncated matches of " + key + " to 3 nodes");
        break;
      }
      report.matches[i].push_back(name);
    }
    for (const auto& name : report.matches[i]) report.activated_nodes.insert(name);
  }
  return report;
}

}  // namespace schedmilp
