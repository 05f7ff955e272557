#pragma once

// Replay and export of rewrite traces.  Every step names a rule and carries
// enough detail text to recompute `after` from `before`, so a trace exported
// as text or JSON can be audited independently of the code that produced it.

#include "phb/calculus.hpp"
#include "phb/operators.hpp"

#include <nlohmann/json.hpp>

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace phb {

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

inline Symbol symbol_or_throw(const std::string& name) {
  auto s = symbol_from_name(name);
  if (!s) throw std::invalid_argument("unknown symbol '" + name + "'");
  return *s;
}

// "vanish=A11,Ab1b1" (possibly after other ';'-separated fields).
inline std::set<Symbol> parse_vanishing(const std::string& detail) {
  std::set<Symbol> out;
  for (const auto& field : split(detail, ';')) {
    if (field.rfind("vanish=", 0) != 0) continue;
    for (const auto& n : split(field.substr(7), ',')) out.insert(symbol_or_throw(n));
  }
  return out;
}

inline Scalar constant_value(const std::string& text) {
  Expression e = parse(text);
  if (e.is_zero()) return Scalar(0);
  if (e.size() != 1 || !e.terms().begin()->first.factors.empty() || e.terms().begin()->first.integrated)
    throw std::invalid_argument("not a constant: " + text);
  return e.terms().begin()->second;
}

inline Expression placeholder_for(Space s) {
  return s == Space::Tensor ? Expression(Symbol::E11) : Expression(Symbol::f);
}

}  // namespace detail

/// Operator by name: a registry key, or a family member "L:<alpha>",
/// "Lstar:<alpha>", "Ltensor:<alpha>", "Ltensorstar:<alpha>".
inline OperatorTemplate resolve_operator(const std::string& name) {
  auto reg = operator_registry();
  if (auto it = reg.find(name); it != reg.end()) return it->second;
  const auto colon = name.find(':');
  if (colon != std::string::npos) {
    const std::string family = name.substr(0, colon);
    const Scalar alpha = detail::constant_value(name.substr(colon + 1));
    if (family == "L") return build_Lalpha(alpha);
    if (family == "Lstar") return adjoint(build_Lalpha(alpha));
    if (family == "Ltensor") return build_Lalpha_tensor(alpha);
    if (family == "Ltensorstar") return adjoint(build_Lalpha_tensor(alpha));
  }
  throw std::invalid_argument("unknown operator '" + name + "'");
}

/// Recompute a step's result from its `before` expression and detail.
inline Expression replay_step(const TraceStep& s) {
  const std::string& d = s.detail;
  if (s.rule == "load") return parse(d);
  if (s.rule == "sub") return s.before - parse(d);
  if (s.rule == "add") return s.before + parse(d);
  if (s.rule == "scale") return s.before * detail::constant_value(d);
  if (s.rule == "integrate") return integrate(s.before);
  if (s.rule == "canonicalize") {
    Canonicalizer canon(1'000'000, true, detail::parse_vanishing(d));
    return canon(s.before);
  }
  if (s.rule == "pivot-ibp") {
    Canonicalizer canon(1'000'000, true, detail::parse_vanishing(d));
    return pivot_reduce(s.before, canon);
  }
  if (s.rule == "euler") {
    auto fields = detail::split(d, ';');
    if (fields.empty()) throw std::invalid_argument("euler step without field");
    Canonicalizer canon(1'000'000, true, detail::parse_vanishing(d));
    return canon(euler_operator(s.before, detail::symbol_or_throw(fields.front())));
  }
  if (s.rule == "ibp") {
    auto idx = detail::split(d, ',');
    if (idx.size() != 2) throw std::invalid_argument("ibp detail must be 'term,factor'");
    return integrate_by_parts(s.before, std::stoul(idx[0]), std::stoul(idx[1]));
  }
  if (s.rule == "pair") {
    if (d == "f") return integrate(s.before * Expression(Symbol::f));
    if (d == "E") return integrate(two_re(s.before * Expression(Symbol::Eb1b1)));
    throw std::invalid_argument("pair detail must be f or E");
  }
  if (s.rule == "apply") return apply(resolve_operator(d), s.before);
  if (s.rule == "substitute") {
    auto all = substitution_rules();
    std::vector<SubstitutionRule> rules;
    for (const auto& n : detail::split(d, ',')) {
      auto it = all.find(n);
      if (it == all.end()) throw std::invalid_argument("unknown substitution rule '" + n + "'");
      rules.push_back(it->second);
    }
    return substitute(s.before, rules);
  }
  if (s.rule == "assign") {
    std::map<Symbol, Scalar> values;
    for (const auto& kv : detail::split(d, ',')) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("assign detail must be name=value");
      values[detail::symbol_or_throw(kv.substr(0, eq))] = detail::constant_value(kv.substr(eq + 1));
    }
    return assign_constants(s.before, values);
  }
  if (s.rule == "drop") {
    std::set<Symbol> syms;
    for (const auto& n : detail::split(d, ',')) syms.insert(detail::symbol_or_throw(n));
    return drop_terms_with(s.before, syms);
  }
  if (s.rule == "sub-constraint") {
    // "<operator>;<multiplier>": subtract INT[op(u) * h].
    auto semi = d.find(';');
    if (semi == std::string::npos) throw std::invalid_argument("sub-constraint detail must be op;h");
    const OperatorTemplate op = resolve_operator(d.substr(0, semi));
    Expression c = apply(op, detail::placeholder_for(op.input));
    return s.before - integrate(c * parse(d.substr(semi + 1)));
  }
  throw std::invalid_argument("unknown trace rule '" + s.rule + "'");
}

struct ReplayReport {
  bool ok = true;
  std::size_t steps = 0;
  std::size_t failed_step = 0;
  std::string message;
};

/// Re-derive every step and check that main-chain steps connect: each
/// non-branch step starts where the previous non-branch step ended (a
/// "load" step starts a new chain).
inline ReplayReport replay(const RewriteTrace& t) {
  ReplayReport rep;
  const Expression* chain = nullptr;
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const TraceStep& s = t.steps[k];
    rep.steps = k + 1;
    auto fail = [&](std::string msg) {
      rep.ok = false;
      rep.failed_step = k;
      rep.message = "step " + std::to_string(k) + " (" + s.rule + "): " + std::move(msg);
      return rep;
    };
    if (!s.branch && s.rule != "load" && chain && !(*chain == s.before)) return fail("chain broken");
    Expression got;
    try {
      got = replay_step(s);
    } catch (const std::exception& ex) {
      return fail(ex.what());
    }
    if (!(got == s.after)) return fail("result differs: " + to_string(got - s.after));
    if (!s.branch) chain = &s.after;
  }
  return rep;
}

/// One line per step: "rule [detail]: before => after".
inline std::string trace_to_text(const RewriteTrace& t) {
  std::ostringstream out;
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const auto& s = t.steps[k];
    out << k << (s.branch ? " +" : " ") << s.rule;
    if (!s.detail.empty()) out << " [" << s.detail << "]";
    out << ": " << to_string(s.before) << " => " << to_string(s.after) << "\n";
  }
  return out.str();
}

inline nlohmann::json trace_to_json(const RewriteTrace& t) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : t.steps)
    arr.push_back({{"rule", s.rule},
                   {"detail", s.detail},
                   {"before", to_string(s.before)},
                   {"after", to_string(s.after)},
                   {"branch", s.branch}});
  return arr;
}

inline RewriteTrace trace_from_json(const nlohmann::json& arr) {
  RewriteTrace t;
  for (const auto& j : arr)
    t.record(j.at("rule").get<std::string>(), j.at("detail").get<std::string>(),
             parse(j.at("before").get<std::string>()), parse(j.at("after").get<std::string>()),
             j.value("branch", false));
  return t;
}

}  // namespace phb
