// The single chokepoint for LLM calls: a live chat-completions HTTP backend,
// a record/replay fixture store keyed by a hash of the canonicalized request,
// and strict structured-output parsing.
#pragma once

#include <json.hpp>
#include <openssl/evp.h>

#include <cctype>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include "schedmilp/errors.hpp"

namespace schedmilp {

using json = nlohmann::ordered_json;

struct ChatRequest {
  std::string model_id;
  std::string system;  // empty means no system message
  std::string user;
  double temperature = 0.0;  // fixed at zero for deterministic completions
};

struct TokenUsage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

struct ChatResponse {
  std::string text;
  std::optional<TokenUsage> usage;
};

enum class BackendMode { live, record, replay };

inline const char* to_string(BackendMode m) {
  switch (m) {
    case BackendMode::live: return "live";
    case BackendMode::record: return "record";
    case BackendMode::replay: return "replay";
  }
  return "?";
}

inline BackendMode parse_backend_mode(const std::string& s) {
  if (s == "live") return BackendMode::live;
  if (s == "record") return BackendMode::record;
  if (s == "replay") return BackendMode::replay;
  throw ConfigError("unknown backend mode '" + s + "'");
}

namespace detail {

// CRLF/CR -> LF, plus trailing spaces/tabs stripped per line. Line-end
// whitespace is non-semantic for prompts and must not change fixture keys.
inline std::string normalize_text(const std::string& in) {
  std::string out;
  out.reserve(in.size());
  std::string line;
  auto flush_line = [&] {
    std::size_t end = line.size();
    while (end > 0 && (line[end - 1] == ' ' || line[end - 1] == '\t')) --end;
    out.append(line, 0, end);
    line.clear();
  };
  for (std::size_t i = 0; i < in.size(); ++i) {
    char c = in[i];
    if (c == '\r') {
      if (i + 1 < in.size() && in[i + 1] == '\n') ++i;
      flush_line();
      out.push_back('\n');
    } else if (c == '\n') {
      flush_line();
      out.push_back('\n');
    } else {
      line.push_back(c);
    }
  }
  flush_line();
  return out;
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr))
    throw Error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

inline std::string format_temperature(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

}  // namespace detail

inline std::string canonicalize_request(const ChatRequest& req) {
  std::string c;
  c += "model=" + req.model_id + "\n";
  c += "temperature=" + detail::format_temperature(req.temperature) + "\n";
  c += "system=" + detail::normalize_text(req.system) + "\n";
  c += "user=" + detail::normalize_text(req.user) + "\n";
  return c;
}

inline std::string fixture_key(const ChatRequest& req) {
  return detail::sha256_hex(canonicalize_request(req));
}

// One file per key under a directory; each file holds the canonicalized
// request alongside the raw response, so stores are auditable and a loaded
// fixture can be integrity-checked against its filename.
class FixtureStore {
 public:
  explicit FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }

  std::optional<ChatResponse> load(const std::string& key) const {
    std::filesystem::path file = dir_ / (key + ".json");
    std::ifstream in(file);
    if (!in) return std::nullopt;
    json j;
    try {
      in >> j;
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(std::string("bad fixture file: ") + e.what(), file.string());
    }
    if (j.value("key", "") != key)
      throw FormatError("fixture key does not match filename", file.string());
    ChatRequest req;
    req.model_id = j.at("request").at("model_id").get<std::string>();
    req.system = j.at("request").value("system", "");
    req.user = j.at("request").at("user").get<std::string>();
    req.temperature = j.at("request").value("temperature", 0.0);
    if (fixture_key(req) != key)
      throw FormatError("stored request does not hash to fixture key", file.string());
    ChatResponse resp;
    resp.text = j.at("response").at("text").get<std::string>();
    if (j.at("response").contains("usage")) {
      TokenUsage u;
      u.prompt_tokens = j.at("response").at("usage").value("prompt_tokens", 0L);
      u.completion_tokens = j.at("response").at("usage").value("completion_tokens", 0L);
      resp.usage = u;
    }
    return resp;
  }

  void save(const std::string& key, const ChatRequest& req, const ChatResponse& resp) const {
    std::filesystem::create_directories(dir_);
    json j;
    j["key"] = key;
    j["request"] = {{"model_id", req.model_id},
                    {"system", req.system},
                    {"user", req.user},
                    {"temperature", req.temperature}};
    j["response"]["text"] = resp.text;
    if (resp.usage) {
      j["response"]["usage"] = {{"prompt_tokens", resp.usage->prompt_tokens},
                                {"completion_tokens", resp.usage->completion_tokens}};
    }
    std::ofstream out(dir_ / (key + ".json"));
    if (!out) throw Error("cannot write fixture file under " + dir_.string());
    out << j.dump(2) << "\n";
  }

 private:
  std::filesystem::path dir_;
};

// A live source of completions; injectable so tests and tooling can script
// responses while reusing the record/replay machinery.
using Transport = std::function<ChatResponse(const ChatRequest&)>;

struct GatewayConfig {
  BackendMode mode = BackendMode::replay;
  std::filesystem::path fixture_dir;  // required for record/replay
  std::string model_id;               // filled into requests that leave it empty
  std::string endpoint;               // full chat-completions URL, live mode
  std::string api_key;                // from environment, live mode
  int transport_attempts = 3;
};

Transport http_chat_transport(const GatewayConfig& cfg);

class LlmGateway {
 public:
  explicit LlmGateway(GatewayConfig cfg, Transport live_transport = {})
      : cfg_(std::move(cfg)), transport_(std::move(live_transport)) {
    if (cfg_.mode != BackendMode::live && cfg_.fixture_dir.empty())
      throw ConfigError("record/replay mode requires a fixture directory");
    if (cfg_.mode != BackendMode::replay && !transport_)
      transport_ = http_chat_transport(cfg_);
  }

  const GatewayConfig& config() const { return cfg_; }

  // Record mode persists (key -> response) before returning; replay mode
  // returns the stored response byte-identically and never falls through to
  // a live call.
  ChatResponse complete(ChatRequest req) {
    if (req.model_id.empty()) req.model_id = cfg_.model_id;
    if (req.user.empty()) throw Error("chat request has empty user prompt");
    const std::string key = fixture_key(req);

    if (cfg_.mode == BackendMode::replay) {
      FixtureStore store(cfg_.fixture_dir);
      auto resp = store.load(key);
      if (!resp) {
        std::string digest = req.user.substr(0, 80);
        throw FixtureMissError(key, digest);
      }
      return *resp;
    }

    ChatResponse resp = transport_(req);
    if (cfg_.mode == BackendMode::record) {
      std::lock_guard<std::mutex> lock(write_mutex_);
      FixtureStore store(cfg_.fixture_dir);
      store.save(key, req, resp);
    }
    return resp;
  }

 private:
  GatewayConfig cfg_;
  Transport transport_;
  std::mutex write_mutex_;
};

// Strips code fences and surrounding prose, then extracts the outermost
// well-formed JSON object. Throws ExtractionParseError otherwise.
inline json parse_structured(const std::string& text) {
  // Candidate start positions: every '{', in order. The first candidate with
  // a balanced, parseable object wins.
  for (std::size_t start = text.find('{'); start != std::string::npos;
       start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      char c = text[i];
      if (in_string) {
        if (c == '\\')
          ++i;
        else if (c == '"')
          in_string = false;
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) {
          std::string candidate = text.substr(start, i - start + 1);
          try {
            return json::parse(candidate);
          } catch (const nlohmann::json::parse_error&) {
            break;  // try the next '{'
          }
        }
      }
    }
  }
  throw ExtractionParseError(text);
}

inline constexpr const char* kJsonOnlyReminder = "Respond with only the JSON object.";

// Completion plus structured parsing with the bounded retry policy: on parse
// failure the request is re-asked once with a corrective instruction; both
// attempts go through the gateway so replay covers them.
inline json structured_call(LlmGateway& gw, const ChatRequest& req, int* attempts_out = nullptr) {
  ChatResponse first = gw.complete(req);
  try {
    json v = parse_structured(first.text);
    if (attempts_out) *attempts_out = 1;
    return v;
  } catch (const ExtractionParseError&) {
  }
  ChatRequest retry = req;
  retry.user += std::string("\n\n") + kJsonOnlyReminder;
  ChatResponse second = gw.complete(retry);
  if (attempts_out) *attempts_out = 2;
  return parse_structured(second.text);  // throws if still unparseable
}

}  // namespace schedmilp

// The HTTP transport lives out-of-line of the class to keep httplib's
// (heavy) header at the bottom of this file.
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

namespace schedmilp {

// Any chat-completions-compatible endpoint: POST {endpoint} with
// {model, temperature, messages:[...]}; the completion text is read from
// choices[0].message.content.
inline Transport http_chat_transport(const GatewayConfig& cfg) {
  std::string endpoint = cfg.endpoint;
  std::string api_key = cfg.api_key;
  int attempts = cfg.transport_attempts;
  return [endpoint, api_key, attempts](const ChatRequest& req) -> ChatResponse {
    if (endpoint.empty()) throw ConfigError("live backend requires an endpoint URL");

    // Split scheme://host[:port] from the path.
    std::size_t scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint URL needs a scheme");
    std::size_t path_start = endpoint.find('/', scheme_end + 3);
    std::string base = path_start == std::string::npos ? endpoint : endpoint.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/v1/chat/completions"
                                                       : endpoint.substr(path_start);

    json body;
    body["model"] = req.model_id;
    body["temperature"] = req.temperature;
    body["messages"] = json::array();
    if (!req.system.empty())
      body["messages"].push_back({{"role", "system"}, {"content", req.system}});
    body["messages"].push_back({{"role", "user"}, {"content", req.user}});

    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

    std::string last_error;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
      httplib::Client client(base);
      client.set_read_timeout(120, 0);
      auto res = client.Post(path, headers, body.dump(), "application/json");
      if (!res) {
        last_error = "transport failure: " + httplib::to_string(res.error());
      } else if (res->status != 200) {
        last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
      } else {
        json j;
        try {
          j = json::parse(res->body);
        } catch (const nlohmann::json::parse_error& e) {
          throw TransportError(std::string("unparseable completion body: ") + e.what(), attempt);
        }
        ChatResponse out;
        out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        if (j.contains("usage")) {
          TokenUsage u;
          u.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
          u.completion_tokens = j["usage"].value("completion_tokens", 0L);
          out.usage = u;
        }
        return out;
      }
      if (attempt < attempts)
        std::this_thread::sleep_for(std::chrono::milliseconds(200 * attempt));
    }
    throw TransportError(last_error, attempts);
  };
}

}  // namespace schedmilp
