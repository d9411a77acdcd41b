// Shape validation for extraction outputs. A task's expected-output block is
// pseudo-JSON: real structure with bracketed placeholders where values go
// ("[integer]", "[HH:MM]") and "..." ellipses marking repetition. This parser
// turns such a block into a shape tree; check_shape then verifies required
// keys and element kinds recursively.
#pragma once

#include <json.hpp>

#include <cctype>
#include <cstdlib>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "schedmilp/errors.hpp"

namespace schedmilp {

struct SchemaNode {
  enum class Kind { object, array, integer, number, string, boolean, any };

  Kind kind = Kind::any;
  std::vector<std::pair<std::string, SchemaNode>> fields;  // object
  std::shared_ptr<SchemaNode> element;                     // array
};

namespace detail {

class SchemaParser {
 public:
  explicit SchemaParser(const std::string& text) : text_(text) {}

  SchemaNode parse() {
    skip_ws();
    SchemaNode n = parse_value();
    return n;
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) {
    throw FormatError("output schema: " + msg + " near offset " + std::to_string(pos_));
  }

  char peek() { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  char take() { return pos_ < text_.size() ? text_[pos_++] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool try_ellipsis() {
    if (text_.compare(pos_, 3, "...") == 0) {
      pos_ += 3;
      return true;
    }
    return false;
  }

  static SchemaNode::Kind classify_placeholder(std::string content) {
    for (auto& c : content) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (content.find("integer") != std::string::npos) return SchemaNode::Kind::integer;
    if (content.find("number") != std::string::npos ||
        content.find("float") != std::string::npos ||
        content.find("amount") != std::string::npos)
      return SchemaNode::Kind::number;
    if (content.find("boolean") != std::string::npos) return SchemaNode::Kind::boolean;
    return SchemaNode::Kind::string;
  }

  // A '[' that opens a placeholder rather than an array: the first
  // non-space character after it is a letter.
  bool bracket_is_placeholder() {
    std::size_t p = pos_ + 1;
    while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
    return p < text_.size() && std::isalpha(static_cast<unsigned char>(text_[p]));
  }

  SchemaNode parse_placeholder() {
    take();  // '['
    std::string content;
    int depth = 1;
    while (pos_ < text_.size()) {
      char c = take();
      if (c == '[') ++depth;
      if (c == ']' && --depth == 0) {
        SchemaNode n;
        n.kind = classify_placeholder(content);
        return n;
      }
      content.push_back(c);
    }
    fail("unterminated placeholder");
  }

  SchemaNode parse_string() {
    take();  // '"'
    std::string content;
    while (pos_ < text_.size()) {
      char c = take();
      if (c == '\\' && pos_ < text_.size()) {
        content.push_back(take());
        continue;
      }
      if (c == '"') {
        SchemaNode n;
        // A quoted placeholder ("[integer]") expects the value as a string;
        // numeric kinds below already tolerate numeric strings, so the kind
        // classification carries over unchanged.
        if (content.size() >= 2 && content.front() == '[' && content.back() == ']')
          n.kind = classify_placeholder(content.substr(1, content.size() - 2));
        else
          n.kind = SchemaNode::Kind::string;
        return n;
      }
      content.push_back(c);
    }
    fail("unterminated string");
  }

  SchemaNode parse_object() {
    take();  // '{'
    SchemaNode n;
    n.kind = SchemaNode::Kind::object;
    skip_ws();
    if (peek() == '}') {
      take();
      return n;
    }
    while (true) {
      skip_ws();
      if (try_ellipsis()) {  // "..." entry: further keys permitted
        skip_ws();
        if (peek() == ',') take();
        skip_ws();
        if (peek() == '}') {
          take();
          return n;
        }
        continue;
      }
      if (peek() != '"') fail("expected object key");
      std::size_t key_start = ++pos_;
      while (pos_ < text_.size() && text_[pos_] != '"') ++pos_;
      std::string key = text_.substr(key_start, pos_ - key_start);
      if (take() != '"') fail("unterminated key");
      skip_ws();
      if (take() != ':') fail("expected ':' after key");
      skip_ws();
      n.fields.emplace_back(key, parse_value());
      skip_ws();
      if (peek() == ',') {
        take();
        skip_ws();
        if (peek() == '}') {  // trailing comma
          take();
          return n;
        }
        continue;
      }
      if (peek() == '}') {
        take();
        return n;
      }
      fail("expected ',' or '}' in object");
    }
  }

  SchemaNode parse_array() {
    take();  // '['
    SchemaNode n;
    n.kind = SchemaNode::Kind::array;
    skip_ws();
    if (peek() == ']') {
      take();
      return n;
    }
    while (true) {
      skip_ws();
      if (try_ellipsis()) {
        skip_ws();
        if (peek() == ',') {
          take();
          continue;
        }
        if (peek() == ']') {
          take();
          return n;
        }
        continue;
      }
      SchemaNode el = parse_value();
      if (!n.element) n.element = std::make_shared<SchemaNode>(std::move(el));
      skip_ws();
      if (peek() == ',') {
        take();
        skip_ws();
        if (peek() == ']') {
          take();
          return n;
        }
        continue;
      }
      if (peek() == ']') {
        take();
        return n;
      }
      fail("expected ',' or ']' in array");
    }
  }

  SchemaNode parse_value() {
    skip_ws();
    char c = peek();
    if (c == '{') return parse_object();
    if (c == '[') return bracket_is_placeholder() ? parse_placeholder() : parse_array();
    if (c == '"') return parse_string();
    if (text_.compare(pos_, 4, "true") == 0 || text_.compare(pos_, 5, "false") == 0) {
      pos_ += (text_[pos_] == 't') ? 4 : 5;
      SchemaNode n;
      n.kind = SchemaNode::Kind::boolean;
      return n;
    }
    if (text_.compare(pos_, 4, "null") == 0) {
      pos_ += 4;
      SchemaNode n;
      n.kind = SchemaNode::Kind::any;
      return n;
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      bool is_float = false;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-' ||
              text_[pos_] == '+' || text_[pos_] == '.' || text_[pos_] == 'e' ||
              text_[pos_] == 'E')) {
        if (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E') is_float = true;
        ++pos_;
      }
      SchemaNode n;
      n.kind = is_float ? SchemaNode::Kind::number : SchemaNode::Kind::integer;
      return n;
    }
    fail("unexpected character");
  }
};

inline bool is_integer_string(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

inline bool is_numeric_string(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::string t = s;
  std::strtod(t.c_str(), &end);
  return end && *end == '\0' && end != t.c_str();
}

inline void check_shape_impl(const SchemaNode& schema, const nlohmann::ordered_json& value,
                             const std::string& path, std::vector<std::string>& problems) {
  using Kind = SchemaNode::Kind;
  auto add = [&](const std::string& msg) { problems.push_back(path + ": " + msg); };

  switch (schema.kind) {
    case Kind::any:
      return;
    case Kind::object: {
      if (!value.is_object()) {
        add("expected object, got " + std::string(value.type_name()));
        return;
      }
      for (const auto& [key, sub] : schema.fields) {
        if (!value.contains(key)) {
          add("missing required key '" + key + "'");
          continue;
        }
        check_shape_impl(sub, value.at(key), path + "." + key, problems);
      }
      return;
    }
    case Kind::array: {
      if (!value.is_array()) {
        add("expected array, got " + std::string(value.type_name()));
        return;
      }
      if (schema.element) {
        for (std::size_t i = 0; i < value.size(); ++i)
          check_shape_impl(*schema.element, value[i], path + "[" + std::to_string(i) + "]",
                           problems);
      }
      return;
    }
    case Kind::integer: {
      if (value.is_number_integer() || value.is_number_unsigned()) return;
      if (value.is_string() && is_integer_string(value.get<std::string>())) return;
      add("expected integer (or integer string)");
      return;
    }
    case Kind::number: {
      if (value.is_number()) return;
      if (value.is_string() && is_numeric_string(value.get<std::string>())) return;
      if (value.is_null()) return;  // optional amounts may be null
      add("expected number (or numeric string)");
      return;
    }
    case Kind::string: {
      if (value.is_string() || value.is_number()) return;
      add("expected string");
      return;
    }
    case Kind::boolean: {
      if (value.is_boolean()) return;
      add("expected boolean");
      return;
    }
  }
}

}  // namespace detail

inline SchemaNode parse_output_schema(const std::string& schema_text) {
  return detail::SchemaParser(schema_text).parse();
}

// Returns one problem string per shape violation; empty means the value fits.
inline std::vector<std::string> check_shape(const SchemaNode& schema,
                                            const nlohmann::ordered_json& value) {
  std::vector<std::string> problems;
  detail::check_shape_impl(schema, value, "$", problems);
  return problems;
}

}  // namespace schedmilp
