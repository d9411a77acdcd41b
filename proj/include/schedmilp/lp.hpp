// Reader for the CPLEX-style LP subset emitted by render_lp: an objective
// section, Subject To rows, optional Bounds, integer sections, End.
#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "schedmilp/solver_types.hpp"

namespace schedmilp {

namespace detail {

struct LpToken {
  std::string text;
  int line = 0;
};

inline bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
inline bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

inline std::vector<LpToken> lp_tokenize(const std::string& text) {
  std::vector<LpToken> tokens;
  int line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '\\') {  // comment to end of line
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (c == '<' || c == '>') {
      std::string t(1, c);
      if (i + 1 < text.size() && text[i + 1] == '=') {
        t += '=';
        ++i;
      }
      tokens.push_back({t, line});
      ++i;
      continue;
    }
    if (c == '=' || c == ':' || c == '+' || c == '-') {
      tokens.push_back({std::string(1, c), line});
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.' ||
              text[j] == 'e' || text[j] == 'E' ||
              ((text[j] == '+' || text[j] == '-') && j > i &&
               (text[j - 1] == 'e' || text[j - 1] == 'E'))))
        ++j;
      tokens.push_back({text.substr(i, j - i), line});
      i = j;
      continue;
    }
    if (is_name_start(c)) {
      std::size_t j = i;
      while (j < text.size() && is_name_char(text[j])) ++j;
      tokens.push_back({text.substr(i, j - i), line});
      i = j;
      continue;
    }
    throw LpParseError(std::string("unexpected character '") + c + "'", line);
  }
  return tokens;
}

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline bool is_number_token(const std::string& t) {
  return !t.empty() && (std::isdigit(static_cast<unsigned char>(t[0])) || t[0] == '.');
}

}  // namespace detail

// Parses LP text into a StandardForm. Variables get default bounds
// [0, +inf) and appear in first-use order.
inline StandardForm parse_lp(const std::string& text) {
  using detail::LpToken;
  const std::vector<LpToken> tokens = detail::lp_tokenize(text);
  std::size_t pos = 0;

  auto peek = [&]() -> const LpToken* { return pos < tokens.size() ? &tokens[pos] : nullptr; };
  auto at_keyword = [&](std::initializer_list<const char*> kws) -> bool {
    const LpToken* t = peek();
    if (!t) return false;
    std::string low = detail::lower(t->text);
    for (const char* k : kws) {
      if (low == k) return true;
    }
    // two-word "subject to"
    if (low == "subject" && pos + 1 < tokens.size() &&
        detail::lower(tokens[pos + 1].text) == "to") {
      for (const char* k : kws)
        if (std::string(k) == "subject to") return true;
    }
    return false;
  };

  StandardForm sf;
  auto var_index = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < sf.var_names.size(); ++i)
      if (sf.var_names[i] == name) return static_cast<int>(i);
    sf.var_names.push_back(name);
    sf.lb.push_back(0.0);
    sf.ub.push_back(kInfinity);
    sf.integer.push_back(0);
    for (auto& row : sf.rows) row.coefs.push_back(0.0);
    sf.objective.push_back(0.0);
    return static_cast<int>(sf.var_names.size()) - 1;
  };

  // Objective sense.
  if (at_keyword({"minimize", "minimise", "min"}))
    sf.minimize = true;
  else if (at_keyword({"maximize", "maximise", "max"}))
    sf.minimize = false;
  else
    throw LpParseError("expected Minimize or Maximize", peek() ? peek()->line : 0);
  ++pos;

  // Reads "name:"? then a linear expression into `coefs`; stops at a sense
  // token, a section keyword, or end of input.
  auto is_section = [&]() {
    return at_keyword({"subject to", "st", "s.t.", "bounds", "general", "generals", "integer",
                       "integers", "binary", "binaries", "end"});
  };
  auto parse_expression = [&](std::vector<double>& into, std::string* row_name) {
    if (peek() && !detail::is_number_token(peek()->text) && pos + 1 < tokens.size() &&
        tokens[pos + 1].text == ":" && !is_section()) {
      if (row_name) *row_name = peek()->text;
      pos += 2;
    }
    double sign = 1.0;
    bool expect_term = true;
    while (const LpToken* t = peek()) {
      if (t->text == "+" ) {
        ++pos;
        expect_term = true;
        continue;
      }
      if (t->text == "-") {
        sign = -sign;
        ++pos;
        expect_term = true;
        continue;
      }
      if (!expect_term && (is_section() || t->text == "<=" || t->text == ">=" || t->text == "=" ||
                           t->text == "<" || t->text == ">"))
        return;
      if (is_section() || t->text == "<=" || t->text == ">=" || t->text == "=" ||
          t->text == "<" || t->text == ">")
        return;
      double coef = 1.0;
      if (detail::is_number_token(t->text)) {
        coef = std::stod(t->text);
        ++pos;
      }
      const LpToken* v = peek();
      if (v && detail::is_name_start(v->text[0]) && !is_section()) {
        int idx = var_index(v->text);
        while (static_cast<int>(into.size()) <= idx) into.push_back(0.0);
        into[idx] += sign * coef;
        ++pos;
      } else if (v == nullptr || !detail::is_name_start(v->text[0]) || is_section()) {
        // A bare constant in an objective is tolerated and folded away.
        if (coef == 1.0 && !detail::is_number_token(t->text))
          throw LpParseError("expected a variable name, got '" + t->text + "'", t->line);
      }
      sign = 1.0;
      expect_term = false;
    }
  };

  // Objective.
  {
    std::string name;
    std::vector<double> coefs;
    parse_expression(coefs, &name);
    sf.objective = coefs;
  }

  if (!at_keyword({"subject to", "st", "s.t."}))
    throw LpParseError("expected Subject To", peek() ? peek()->line : 0);
  pos += detail::lower(peek()->text) == "subject" ? 2 : 1;

  // Constraint rows.
  while (peek() && !at_keyword({"bounds", "general", "generals", "integer", "integers", "binary",
                                "binaries", "end"})) {
    StandardForm::Row row;
    row.coefs.assign(sf.var_names.size(), 0.0);
    std::string name = "r" + std::to_string(sf.rows.size() + 1);
    parse_expression(row.coefs, &name);
    row.name = name;
    const LpToken* s = peek();
    if (!s) throw LpParseError("constraint missing sense and rhs", tokens.back().line);
    if (s->text == "<=" || s->text == "<")
      row.sense = ConstraintSense::le;
    else if (s->text == ">=" || s->text == ">")
      row.sense = ConstraintSense::ge;
    else if (s->text == "=")
      row.sense = ConstraintSense::eq;
    else
      throw LpParseError("expected <=, >= or = in constraint, got '" + s->text + "'", s->line);
    ++pos;
    double rhs_sign = 1.0;
    while (peek() && (peek()->text == "-" || peek()->text == "+")) {
      if (peek()->text == "-") rhs_sign = -rhs_sign;
      ++pos;
    }
    const LpToken* r = peek();
    if (!r || !detail::is_number_token(r->text))
      throw LpParseError("expected numeric rhs", r ? r->line : tokens.back().line);
    row.rhs = rhs_sign * std::stod(r->text);
    ++pos;
    row.coefs.resize(sf.var_names.size(), 0.0);
    sf.rows.push_back(std::move(row));
  }

  // Bounds.
  if (at_keyword({"bounds"})) {
    ++pos;
    while (peek() && !at_keyword({"general", "generals", "integer", "integers", "binary",
                                  "binaries", "end"})) {
      // Forms: "l <= x <= u" | "x <= u" | "x >= l" | "x = v"
      const LpToken* t = peek();
      double first_num = 0.0;
      bool has_first_num = false;
      double sign = 1.0;
      while (peek() && (peek()->text == "-" || peek()->text == "+")) {
        if (peek()->text == "-") sign = -sign;
        ++pos;
        t = peek();
      }
      if (t && detail::is_number_token(t->text)) {
        first_num = sign * std::stod(t->text);
        has_first_num = true;
        ++pos;
        if (!peek() || peek()->text != "<=")
          throw LpParseError("expected <= after lower bound", t->line);
        ++pos;
      }
      const LpToken* v = peek();
      if (!v || !detail::is_name_start(v->text[0]))
        throw LpParseError("expected variable name in bounds", v ? v->line : 0);
      if (detail::lower(v->text) == "free" || (pos + 1 < tokens.size() &&
                                               detail::lower(tokens[pos + 1].text) == "free"))
        throw LpParseError("free variables are not supported", v->line);
      int idx = var_index(v->text);
      ++pos;
      if (has_first_num) sf.lb[idx] = first_num;
      if (peek() && (peek()->text == "<=" || peek()->text == ">=" || peek()->text == "=")) {
        std::string op = peek()->text;
        ++pos;
        double s2 = 1.0;
        while (peek() && (peek()->text == "-" || peek()->text == "+")) {
          if (peek()->text == "-") s2 = -s2;
          ++pos;
        }
        const LpToken* n = peek();
        if (!n || !detail::is_number_token(n->text))
          throw LpParseError("expected numeric bound", n ? n->line : 0);
        double val = s2 * std::stod(n->text);
        ++pos;
        if (op == "<=")
          sf.ub[idx] = val;
        else if (op == ">=")
          sf.lb[idx] = val;
        else
          sf.lb[idx] = sf.ub[idx] = val;
      }
    }
  }

  // Integer / binary sections.
  while (peek() && !at_keyword({"end"})) {
    bool binary = at_keyword({"binary", "binaries"});
    bool general = at_keyword({"general", "generals", "integer", "integers"});
    if (!binary && !general)
      throw LpParseError("unexpected token '" + peek()->text + "'", peek()->line);
    ++pos;
    while (peek() && !at_keyword({"general", "generals", "integer", "integers", "binary",
                                  "binaries", "end", "bounds"})) {
      const LpToken* v = peek();
      if (!detail::is_name_start(v->text[0]))
        throw LpParseError("expected variable name, got '" + v->text + "'", v->line);
      int idx = var_index(v->text);
      sf.integer[idx] = 1;
      if (binary) {
        sf.lb[idx] = 0.0;
        sf.ub[idx] = 1.0;
      }
      ++pos;
    }
  }
  if (!peek()) throw LpParseError("missing End", tokens.empty() ? 0 : tokens.back().line);
  ++pos;  // End

  for (auto& row : sf.rows) row.coefs.resize(sf.var_names.size(), 0.0);
  sf.objective.resize(sf.var_names.size(), 0.0);
  return sf;
}

}  // namespace schedmilp
