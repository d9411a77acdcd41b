// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace schedmilp {

// Pipeline stages, used for error attribution and CLI exit codes.
enum class Stage { config, io, identify, extract, assemble, solve };

inline const char* stage_name(Stage s) {
  switch (s) {
    case Stage::config: return "config";
    case Stage::io: return "io";
    case Stage::identify: return "identify";
    case Stage::extract: return "extract";
    case Stage::assemble: return "assemble";
    case Stage::solve: return "solve";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file (JSON syntax, bad enum value, ...). Carries the
// offending location when known.
class FormatError : public Error {
 public:
  FormatError(const std::string& msg, std::string file = "", int line = -1)
      : Error(line >= 0 ? file + ":" + std::to_string(line) + ": " + msg
                        : (file.empty() ? msg : file + ": " + msg)),
        file_(std::move(file)),
        line_(line) {}
  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

// Structural invariant violations found by a validator.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Replay-mode request with no stored fixture.
class FixtureMissError : public Error {
 public:
  FixtureMissError(std::string key, std::string digest)
      : Error("fixture miss for key " + key + " (request digest: " + digest + ")"),
        key_(std::move(key)),
        digest_(std::move(digest)) {}
  const std::string& key() const { return key_; }
  const std::string& request_digest() const { return digest_; }

 private:
  std::string key_;
  std::string digest_;
};

class TransportError : public Error {
 public:
  TransportError(const std::string& msg, int attempts)
      : Error(msg + " (after " + std::to_string(attempts) + " attempts)"),
        attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

// No parseable JSON object in a completion. Keeps the raw text for diagnosis.
class ExtractionParseError : public Error {
 public:
  explicit ExtractionParseError(std::string raw)
      : Error("no parseable JSON object in completion; raw text follows:\n" + raw),
        raw_(std::move(raw)) {}
  const std::string& raw_text() const { return raw_; }

 private:
  std::string raw_;
};

// Prerequisite output missing at prompt-build time; indicates a planner bug,
// not bad input.
class SequencingError : public Error {
 public:
  explicit SequencingError(const std::string& msg) : Error(msg) {}
};

class AssemblyError : public Error {
 public:
  explicit AssemblyError(const std::string& msg) : Error(msg) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& msg) : Error(msg) {}
};

class LpParseError : public Error {
 public:
  LpParseError(const std::string& msg, int line)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Stage-attributed failure thrown at pipeline boundaries.
class StageError : public Error {
 public:
  StageError(Stage stage, const std::string& msg)
      : Error(std::string(stage_name(stage)) + ": " + msg), stage_(stage) {}
  Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

}  // namespace schedmilp
