#pragma once

// Text front end.
//
//   # comment
//   group BS 2                      (or: group wreath Z^1 x Z_2 x Z_6)
//   X^-1 a X = a^3                  one equation per line, `1` is the empty word
//
// Identifiers starting with an upper-case letter are variables; everything
// else must be a generator of the group.

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "metadio/system.hpp"

namespace metadio {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& reason)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + reason),
        line(line),
        column(column),
        reason(reason) {}
  std::size_t line;
  std::size_t column;
  std::string reason;
};

namespace detail {

struct Token {
  std::string text;
  std::size_t column;  // 1-based
};

inline std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

inline std::vector<Token> split_ws(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  for (;;) {
    auto nl = text.find('\n', start);
    std::string line = text.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  return lines;
}

inline bool parse_int(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  std::size_t i = 0;
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i >= s.size() || s.size() - i > 17) return false;
  std::int64_t v = 0;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    v = v * 10 + (s[i] - '0');
  }
  out = neg ? -v : v;
  return true;
}

inline GroupSpec parse_header(const std::vector<Token>& toks, std::size_t line) {
  auto err = [&](std::size_t col, const std::string& why) -> ParseError { return ParseError(line, col, why); };
  if (toks.empty() || toks[0].text != "group") throw err(toks.empty() ? 1 : toks[0].column, "expected `group` header");
  if (toks.size() < 2) throw err(toks[0].column, "missing group kind after `group`");
  if (toks[1].text == "BS") {
    if (toks.size() != 3) throw err(toks[1].column, "expected `group BS <k>`");
    std::int64_t k = 0;
    if (!parse_int(toks[2].text, k)) throw err(toks[2].column, "malformed BS parameter `" + toks[2].text + "`");
    if (k < 1) throw err(toks[2].column, "BS(1,k) requires k >= 1");
    return GroupSpec::bs(k);
  }
  if (toks[1].text == "wreath") {
    if (toks.size() < 3 || toks[2].text.rfind("Z^", 0) != 0)
      throw err(toks.size() < 3 ? toks[1].column : toks[2].column, "expected `Z^<m>` after `wreath`");
    std::int64_t m = 0;
    if (!parse_int(std::string_view(toks[2].text).substr(2), m) || m < 0)
      throw err(toks[2].column, "malformed free rank `" + toks[2].text + "`");
    std::vector<std::int64_t> torsion;
    std::size_t i = 3;
    while (i < toks.size()) {
      if (toks[i].text != "x") throw err(toks[i].column, "expected `x` between factors");
      if (i + 1 >= toks.size()) throw err(toks[i].column, "dangling `x`");
      const auto& f = toks[i + 1];
      std::int64_t n = 0;
      if (f.text.rfind("Z_", 0) != 0 || !parse_int(std::string_view(f.text).substr(2), n))
        throw err(f.column, "malformed cyclic factor `" + f.text + "`");
      if (n < 2) throw err(f.column, "cyclic factor order must be >= 2");
      torsion.push_back(n);
      i += 2;
    }
    return GroupSpec::wreath(static_cast<std::size_t>(m), std::move(torsion));
  }
  throw err(toks[1].column, "unknown group kind `" + toks[1].text + "`");
}

inline Word parse_word(const std::vector<Token>& toks, const GroupSpec& spec, std::size_t line) {
  Word w;
  if (toks.size() == 1 && toks[0].text == "1") return w;
  std::set<std::string> gens;
  for (const auto& g : spec.generator_names()) gens.insert(g);
  for (const auto& t : toks) {
    std::string name = t.text;
    std::int64_t exp = 1;
    auto caret = t.text.find('^');
    if (caret != std::string::npos) {
      name = t.text.substr(0, caret);
      if (!parse_int(std::string_view(t.text).substr(caret + 1), exp))
        throw ParseError(line, t.column + caret + 1, "malformed exponent in `" + t.text + "`");
      if (exp == 0) throw ParseError(line, t.column + caret + 1, "exponent must be nonzero");
    }
    if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0])))
      throw ParseError(line, t.column, "expected a generator or variable, got `" + t.text + "`");
    for (char c : name)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
        throw ParseError(line, t.column, "invalid character in `" + name + "`");
    if (std::isupper(static_cast<unsigned char>(name[0]))) {
      w.push_back({Letter::Kind::Var, name, exp});
    } else {
      if (!gens.count(name)) throw ParseError(line, t.column, "unknown generator " + name);
      w.push_back({Letter::Kind::Const, name, exp});
    }
  }
  return w;
}

inline void parse_equation_line(const std::string& raw, std::size_t line, EquationSystem& sys) {
  std::string text = strip_comment(raw);
  auto eq = text.find('=');
  if (eq == std::string::npos) throw ParseError(line, 1, "missing `=`");
  if (text.find('=', eq + 1) != std::string::npos) throw ParseError(line, text.find('=', eq + 1) + 1, "more than one `=`");
  auto lhs_toks = split_ws(text.substr(0, eq));
  auto rhs_toks = split_ws(text.substr(eq + 1));
  for (auto& t : rhs_toks) t.column += eq + 1;
  if (lhs_toks.empty()) throw ParseError(line, eq + 1, "empty left-hand side (use `1` for the identity)");
  if (rhs_toks.empty()) throw ParseError(line, eq + 1, "empty right-hand side (use `1` for the identity)");
  Equation e{parse_word(lhs_toks, sys.spec, line), parse_word(rhs_toks, sys.spec, line)};
  for (const Word* w : {&e.lhs, &e.rhs})
    for (const auto& l : *w)
      if (l.is_var() && std::find(sys.variables.begin(), sys.variables.end(), l.name) == sys.variables.end())
        sys.variables.push_back(l.name);
  sys.equations.push_back(std::move(e));
}

inline bool blank(const std::string& line) {
  return split_ws(strip_comment(line)).empty();
}

}  // namespace detail

// Parses the first non-blank line as a group header.
inline GroupSpec parse_spec(const std::string& text) {
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::blank(lines[i])) continue;
    return detail::parse_header(detail::split_ws(detail::strip_comment(lines[i])), i + 1);
  }
  throw ParseError(1, 1, "missing `group` header");
}

// Equation lines only; line numbers are relative to `text` plus `line_offset`.
inline EquationSystem parse_system(const std::string& text, const GroupSpec& spec, std::size_t line_offset = 0) {
  EquationSystem sys;
  sys.spec = spec;
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::blank(lines[i])) continue;
    detail::parse_equation_line(lines[i], i + 1 + line_offset, sys);
  }
  return sys;
}

// A whole input file: header line followed by equations.
inline EquationSystem parse_input(const std::string& text) {
  auto lines = detail::split_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && detail::blank(lines[i])) ++i;
  if (i == lines.size()) throw ParseError(1, 1, "missing `group` header");
  GroupSpec spec = detail::parse_header(detail::split_ws(detail::strip_comment(lines[i])), i + 1);
  std::string rest;
  for (std::size_t j = i + 1; j < lines.size(); ++j) rest += lines[j] + "\n";
  return parse_system(rest, spec, i + 1);
}

}  // namespace metadio
