#pragma once

// Loader for the identity corpus (data/identities.corpus).  See the header
// of that file for the record format.

#include "phb/parse.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace phb {

class CorpusError : public std::runtime_error {
public:
  CorpusError(std::size_t line, const std::string& msg)
      : std::runtime_error("corpus line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

struct CorpusRecord {
  std::string id;
  std::string title;
  std::string latex;
  std::vector<std::pair<std::string, std::string>> exprs;   // name -> grammar text, in file order
  std::vector<std::pair<std::string, std::string>> params;  // name -> value text
  std::vector<std::string> mutate;                          // empty: every expr

  bool has_expr(const std::string& name) const {
    return std::any_of(exprs.begin(), exprs.end(), [&](const auto& p) { return p.first == name; });
  }

  const std::string& text(const std::string& name) const {
    for (const auto& [n, t] : exprs)
      if (n == name) return t;
    throw std::out_of_range("record " + id + " has no expression '" + name + "'");
  }

  Expression expr(const std::string& name) const { return parse(text(name)); }

  bool has_param(const std::string& name) const {
    return std::any_of(params.begin(), params.end(), [&](const auto& p) { return p.first == name; });
  }

  const std::string& param(const std::string& name) const {
    for (const auto& [n, t] : params)
      if (n == name) return t;
    throw std::out_of_range("record " + id + " has no parameter '" + name + "'");
  }

  /// Names perturbed in mutation mode.
  std::vector<std::string> mutation_targets() const {
    if (!mutate.empty()) return mutate;
    std::vector<std::string> out;
    for (const auto& [n, t] : exprs) out.push_back(n);
    return out;
  }
};

class Corpus {
public:
  Corpus() = default;
  explicit Corpus(std::vector<CorpusRecord> records) : records_(std::move(records)) {}

  const std::vector<CorpusRecord>& records() const { return records_; }

  const CorpusRecord* find(const std::string& id) const {
    for (const auto& r : records_)
      if (r.id == id) return &r;
    return nullptr;
  }

  const CorpusRecord& at(const std::string& id) const {
    if (const auto* r = find(id)) return *r;
    throw std::out_of_range("unknown identity id '" + id + "'");
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& r : records_) out.push_back(r.id);
    return out;
  }

private:
  std::vector<CorpusRecord> records_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parse corpus text.  Every expression is parsed eagerly so syntax errors
/// surface at load time with their line number.
inline Corpus parse_corpus(const std::string& text) {
  std::vector<CorpusRecord> recs;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  std::string* cont = nullptr;  // field extended by indented lines
  std::vector<std::size_t> expr_lines;

  auto finish_record = [&]() {
    if (recs.empty()) return;
    const auto& r = recs.back();
    for (std::size_t k = 0; k < r.exprs.size(); ++k) {
      try {
        parse(r.exprs[k].second);
      } catch (const ParseError& ex) {
        throw CorpusError(expr_lines[k], r.id + "/" + r.exprs[k].first + ": " + ex.what());
      }
    }
    for (const auto& m : r.mutate)
      if (!r.has_expr(m) && !r.has_param(m)) throw CorpusError(lineno, r.id + ": mutate target '" + m + "' unknown");
    expr_lines.clear();
  };

  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && (raw[0] == ' ' || raw[0] == '\t') && !detail::trim(raw).empty()) {
      if (!cont) throw CorpusError(lineno, "continuation line outside a field");
      *cont += " " + detail::trim(raw);
      continue;
    }
    const std::string line = detail::trim(raw);
    cont = nullptr;
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw CorpusError(lineno, "malformed record header");
      finish_record();
      CorpusRecord r;
      r.id = detail::trim(line.substr(1, line.size() - 2));
      if (r.id.empty()) throw CorpusError(lineno, "empty record id");
      for (const auto& o : recs)
        if (o.id == r.id) throw CorpusError(lineno, "duplicate record id '" + r.id + "'");
      recs.push_back(std::move(r));
      continue;
    }
    if (recs.empty()) throw CorpusError(lineno, "field before the first record header");
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw CorpusError(lineno, "expected 'key: value'");
    const std::string key = detail::trim(line.substr(0, colon));
    const std::string value = detail::trim(line.substr(colon + 1));
    CorpusRecord& r = recs.back();
    if (key == "title") {
      r.title = value;
      cont = &r.title;
    } else if (key == "latex") {
      r.latex = value;
      cont = &r.latex;
    } else if (key.rfind("expr ", 0) == 0) {
      const std::string name = detail::trim(key.substr(5));
      if (name.empty() || r.has_expr(name)) throw CorpusError(lineno, "bad or duplicate expression name");
      r.exprs.emplace_back(name, value);
      expr_lines.push_back(lineno);
      cont = &r.exprs.back().second;
    } else if (key.rfind("param ", 0) == 0) {
      const std::string name = detail::trim(key.substr(6));
      if (name.empty() || r.has_param(name)) throw CorpusError(lineno, "bad or duplicate parameter name");
      r.params.emplace_back(name, value);
      cont = &r.params.back().second;
    } else if (key == "mutate") {
      std::istringstream names(value);
      for (std::string n; names >> n;) r.mutate.push_back(n);
    } else {
      throw CorpusError(lineno, "unknown field '" + key + "'");
    }
  }
  finish_record();
  return Corpus(std::move(recs));
}

inline Corpus load_corpus(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open corpus file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_corpus(ss.str());
}

}  // namespace phb
