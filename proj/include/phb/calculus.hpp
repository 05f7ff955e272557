#pragma once

// Rewriting engine: commutation of covariant derivatives, canonical forms,
// integration by parts and equality modulo divergences.

#include "phb/expression.hpp"
#include "phb/parse.hpp"

#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace phb {

class RewriteLimitExceeded : public std::runtime_error {
public:
  RewriteLimitExceeded(std::size_t limit, const std::string& where)
      : std::runtime_error("rewrite limit " + std::to_string(limit) + " exceeded at " + where) {}
};

/// Correction K in c_{I,xy} = c_{I,yx} + K for the factor c_I (derivatives
/// after the pair not yet applied).  alpha is counted over the base indices
/// and the letters of I; T-letters do not contribute.
inline Expression commutator_correction(const Factor& c_I, char x, char y) {
  if (x == y) return {};
  const int alpha = c_I.alpha();
  const Scalar a(alpha);
  auto with = [&](char extra) {
    Factor f = c_I;
    f.derivs.push_back(extra);
    return Expression(f);
  };
  const Expression c(c_I);
  auto rank_pair = [](char p, char q) { return std::string{p, q}; };
  const std::string key = rank_pair(x, y);
  // c_{,1b} - c_{,b1} = i c_{,0} + alpha c R
  if (key == "1b") return with(kD0) * Scalar::i() + a * c * Expression(Symbol::R);
  if (key == "b1") return -(with(kD0) * Scalar::i() + a * c * Expression(Symbol::R));
  // c_{,01} - c_{,10} = c_{,b} A11 - alpha c A11_{,b}
  if (key == "01")
    return with(kDb) * Expression(Symbol::A11) - a * c * Expression(Factor(Symbol::A11, "b"));
  if (key == "10")
    return -(with(kDb) * Expression(Symbol::A11) - a * c * Expression(Factor(Symbol::A11, "b")));
  // c_{,0b} - c_{,b0} = c_{,1} Ab1b1 + alpha c Ab1b1_{,1}
  if (key == "0b")
    return with(kD1) * Expression(Symbol::Ab1b1) + a * c * Expression(Factor(Symbol::Ab1b1, "1"));
  if (key == "b0")
    return -(with(kD1) * Expression(Symbol::Ab1b1) + a * c * Expression(Factor(Symbol::Ab1b1, "1")));
  throw std::invalid_argument("bad derivative pair");
}

/// Swap the derivative letters at position and position+1 of a factor,
/// returning the swapped factor plus curvature/torsion corrections.
inline Expression commute_swap(const Factor& f, std::size_t position) {
  if (position + 1 >= f.derivs.size())
    throw std::out_of_range("commute_swap: position " + std::to_string(position) +
                            " out of range for " + std::string(f.info().name) + "_{" + f.derivs + "}");
  const char x = f.derivs[position], y = f.derivs[position + 1];
  if (x == y) return Expression(f);
  Factor c_I(f.symbol, f.derivs.substr(0, position));
  std::string_view rest = std::string_view(f.derivs).substr(position + 2);
  Factor swapped = f;
  std::swap(swapped.derivs[position], swapped.derivs[position + 1]);
  return Expression(swapped) + differentiate(commutator_correction(c_I, x, y), rest);
}

/// Canonicalizer with a per-instance memo of factor normal forms.  Every
/// factor's derivative string is sorted into the order 1 < 1bar < 0 by
/// leftmost-inversion bubble sort.  Sorting alone is not confluent: swap
/// schedules disagree by derivatives of R_{,0} - A11_{,bb} - Ab1b1_{,11}.
/// With bianchi enabled (the default) every sorted R_{w0...} is eliminated in
/// favour of torsion derivatives, which makes the normal form unique.
/// Symbols declared vanishing (with all their derivatives) are set to zero
/// after every rewrite, e.g. {A11, Ab1b1} for the torsion-free case.
class Canonicalizer {
public:
  explicit Canonicalizer(std::size_t rewrite_limit = 1'000'000, bool bianchi = true,
                         std::set<Symbol> vanishing = {})
      : limit_(rewrite_limit), bianchi_(bianchi), vanishing_(std::move(vanishing)) {}

  const std::set<Symbol>& vanishing() const { return vanishing_; }

  Expression operator()(const Expression& e) { return canonicalize(e); }

  Expression canonicalize(const Expression& e) {
    Expression out;
    for (const auto& [m, c] : e.terms()) {
      Expression prod(c);
      for (const auto& f : m.factors) prod = prod * factor(f);
      out += m.integrated ? integrate(prod) : prod;
    }
    return out;
  }

  const Expression& factor(const Factor& f) {
    if (auto it = cache_.find(f); it != cache_.end()) return it->second;
    Expression result;
    std::size_t pos = first_inversion(f);
    if (vanishing_.count(f.symbol)) {
      // zero
    } else if (pos == npos && bianchi_ && f.symbol == Symbol::R && f.derivs.find(kD0) != std::string::npos) {
      if (++rewrites_ > limit_) throw RewriteLimitExceeded(limit_, to_string(f));
      result = eliminate_reeb_derivative(f);
    } else if (pos == npos) {
      result = Expression(f);
    } else {
      if (++rewrites_ > limit_) throw RewriteLimitExceeded(limit_, to_string(f));
      result = canonicalize(commute_swap(f, pos));
    }
    return cache_.emplace(f, std::move(result)).first->second;
  }

  std::size_t rewrites() const { return rewrites_; }
  void charge(std::size_t n, const std::string& where) {
    rewrites_ += n;
    if (rewrites_ > limit_) throw RewriteLimitExceeded(limit_, where);
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  static std::size_t first_inversion(const Factor& f) {
    for (std::size_t k = 0; k + 1 < f.derivs.size(); ++k)
      if (canonical_rank(f.derivs[k]) > canonical_rank(f.derivs[k + 1])) return k;
    return npos;
  }

private:
  // f = R_{1^a b^c 0^d}, d >= 1.  Write R_{,0 s} with s = 1^a b^c 0^(d-1); the
  // T-letter bubbles right past 1^a b^c to reach f, leaving corrections C with
  // fewer letters.  Bianchi turns R_{,0 s} into (A11_{,bb} + Ab1b1_{,11})_{,s},
  // so f = (A11_{,bb} + Ab1b1_{,11})_{,s} - C.
  Expression eliminate_reeb_derivative(const Factor& f) {
    const std::size_t first_zero = f.derivs.find(kD0);
    std::string s = f.derivs;
    s.erase(first_zero, 1);
    Factor moving(Symbol::R, std::string(1, kD0) + s);
    Expression corrections;
    for (std::size_t k = 0; k < first_zero; ++k) {
      Expression swapped = commute_swap(moving, k);
      std::swap(moving.derivs[k], moving.derivs[k + 1]);
      corrections += swapped - Expression(moving);
    }
    Expression torsion = differentiate(bianchi_rule_rhs(), s);
    return canonicalize(torsion - corrections);
  }

  static Expression bianchi_rule_rhs() {
    return Expression(Factor(Symbol::A11, "bb")) + Expression(Factor(Symbol::Ab1b1, "11"));
  }

  std::map<Factor, Expression> cache_;
  std::size_t rewrites_ = 0;
  std::size_t limit_;
  bool bianchi_;
  std::set<Symbol> vanishing_;
};

/// Canonical form: sorted derivative strings, like terms collected.
inline Expression canonicalize(const Expression& e) { return Canonicalizer()(e); }

inline bool is_canonical(const Expression& e) {
  for (const auto& [m, c] : e.terms())
    for (const auto& f : m.factors)
      if (!f.is_canonical()) return false;
  return true;
}

/// Rewrite rule sym_{prefix rest} -> (replacement)_{,rest}.
struct SubstitutionRule {
  std::string name;
  Symbol symbol;
  std::string prefix;
  Expression replacement;

  SubstitutionRule conj() const {
    Factor lhs = Factor(symbol, prefix).conj();
    return {name + "*", lhs.symbol, lhs.derivs, conjugate(replacement)};
  }

  bool matches(const Factor& f) const {
    return f.symbol == symbol && f.derivs.compare(0, prefix.size(), prefix) == 0;
  }
};

/// Apply rules to every matching factor once (first matching rule wins).
inline Expression substitute(const Expression& e, const std::vector<SubstitutionRule>& rules) {
  Expression out;
  for (const auto& [m, c] : e.terms()) {
    Expression prod(c);
    for (const auto& f : m.factors) {
      const SubstitutionRule* hit = nullptr;
      for (const auto& r : rules)
        if (r.matches(f)) {
          hit = &r;
          break;
        }
      if (hit)
        prod = prod * differentiate(hit->replacement, std::string_view(f.derivs).substr(hit->prefix.size()));
      else
        prod = prod * Expression(f);
    }
    out += m.integrated ? integrate(prod) : prod;
  }
  return out;
}

inline Expression substitute(const Expression& e, const SubstitutionRule& rule) {
  return substitute(e, std::vector<SubstitutionRule>{rule});
}

/// R_{,0} -> A11_{,bb} + Ab1b1_{,11}.
inline SubstitutionRule bianchi_rule() {
  return {"bianchi", Symbol::R, "0",
          Expression(Factor(Symbol::A11, "bb")) + Expression(Factor(Symbol::Ab1b1, "11"))};
}

namespace detail {

inline std::pair<Monomial, Scalar> nth_term(const Expression& e, std::size_t index) {
  if (index >= e.size()) throw std::out_of_range("term index out of range");
  auto it = e.terms().begin();
  std::advance(it, static_cast<std::ptrdiff_t>(index));
  return *it;
}

// Coefficient times all factors except one, as a non-integrated expression.
inline Expression cofactor(const Monomial& m, const Scalar& c, std::size_t skip) {
  std::vector<Factor> fs;
  for (std::size_t k = 0; k < m.factors.size(); ++k)
    if (k != skip) fs.push_back(m.factors[k]);
  return Expression::term(c, Monomial(std::move(fs)));
}

}  // namespace detail

/// Move the last derivative of one factor of an integrated term onto the
/// remaining factors: INT[X G_{,d}] = -INT[X_{,d} G].
inline Expression integrate_by_parts(const Expression& e, std::size_t term, std::size_t factor) {
  auto [m, c] = detail::nth_term(e, term);
  if (!m.integrated) throw std::invalid_argument("integrate_by_parts: term is not integrated");
  if (factor >= m.factors.size()) throw std::out_of_range("factor index out of range");
  const Factor& sel = m.factors[factor];
  if (sel.derivs.empty()) throw std::invalid_argument("integrate_by_parts: factor has no derivatives");
  const char d = sel.derivs.back();
  if (d == kD0) throw std::invalid_argument("integrate_by_parts: T-direction derivative");
  Factor g(sel.symbol, sel.derivs.substr(0, sel.derivs.size() - 1));
  Expression moved = -(differentiate(detail::cofactor(m, c, factor), d) * Expression(g));
  Expression out = e;
  out -= Expression::term(c, m);
  out += integrate(moved);
  return out;
}

/// Move every derivative off one factor at once (T-direction included):
/// INT[X G_{,s1..sk}] = (-1)^k INT[X_{,sk..s1} G].
inline Expression move_all_derivatives(const Monomial& m, const Scalar& c, std::size_t factor) {
  const Factor& sel = m.factors[factor];
  std::string rev(sel.derivs.rbegin(), sel.derivs.rend());
  Expression x = differentiate(detail::cofactor(m, c, factor), rev);
  if (sel.derivs.size() % 2) x = -x;
  return integrate(x * Expression(Factor(sel.symbol)));
}

/// Pivot of a term: a factor of the greatest symbol, the least derived one on ties.
inline std::size_t pivot_factor(const Monomial& m) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < m.factors.size(); ++k)
    if (m.factors[k].symbol > m.factors[best].symbol) best = k;
  return best;
}

/// One pass of pivot reduction: every integrated term has all derivatives
/// moved off its pivot, then the result is canonicalized.
inline Expression pivot_reduce(const Expression& e, Canonicalizer& canon) {
  Expression out;
  for (const auto& [m, c] : e.terms()) {
    if (!m.integrated || m.factors.empty()) {
      out.add(m, c);
      continue;
    }
    std::size_t p = pivot_factor(m);
    if (m.factors[p].derivs.empty() || m.factors[p].info().constant) {
      out.add(m, c);
      continue;
    }
    canon.charge(m.factors[p].derivs.size(), to_string(m));
    out += move_all_derivatives(m, c, p);
  }
  return canon(out);
}

/// Variational derivative of an integrated expression with respect to one
/// field: sum over occurrences u_{,s1..sk} of (-1)^k (rest)_{,sk..s1}.
inline Expression euler_operator(const Expression& e, Symbol field) {
  Expression out;
  for (const auto& [m, c] : e.terms()) {
    for (std::size_t k = 0; k < m.factors.size(); ++k) {
      const Factor& f = m.factors[k];
      if (f.symbol != field) continue;
      std::string rev(f.derivs.rbegin(), f.derivs.rend());
      Expression x = differentiate(detail::cofactor(m, c, k), rev);
      out += (f.derivs.size() % 2) ? -x : x;
    }
  }
  return out;
}

struct TraceStep {
  std::string rule;
  std::string detail;
  Expression before;
  Expression after;
  bool branch = false;  // side computation; the main chain continues from `before`
};

/// Ordered audit log of expression-level rewrites.
struct RewriteTrace {
  std::vector<TraceStep> steps;

  void record(std::string rule, std::string detail, const Expression& before, const Expression& after,
              bool branch = false) {
    steps.push_back({std::move(rule), std::move(detail), before, after, branch});
  }
  void append(const RewriteTrace& o) { steps.insert(steps.end(), o.steps.begin(), o.steps.end()); }
  bool empty() const { return steps.empty(); }
};

struct IbpResult {
  bool equal = false;
  Expression residual;  // pivot-reduced canonical difference
  RewriteTrace trace;
  std::size_t rewrites = 0;
  std::vector<Symbol> fields;  // fields whose Euler expression was checked
};

inline constexpr std::size_t kDefaultRewriteLimit = 10'000;

/// Decide a == b.  Non-integrated operands compare by canonical form.
/// Integrated operands: the canonical difference is pivot-reduced; if a
/// residual remains, it is a divergence iff its variational derivative with
/// respect to every placeholder field vanishes identically (and no term is
/// free of placeholders).
struct IbpOptions {
  std::size_t rewrite_limit = kDefaultRewriteLimit;
  std::set<Symbol> vanishing;  // specialization applied during canonicalization
};

inline std::string vanishing_detail(const std::set<Symbol>& v) {
  std::string s;
  for (Symbol x : v) s += (s.empty() ? "vanish=" : ",") + std::string(info(x).name);
  return s;
}

inline IbpResult equal_mod_ibp(const Expression& a, const Expression& b, const IbpOptions& opts) {
  IbpResult res;
  const bool ia = a.is_zero() || a.all_integrated();
  const bool ib = b.is_zero() || b.all_integrated();
  const bool na = !a.any_integrated(), nb = !b.any_integrated();
  if (!((ia && ib) || (na && nb)))
    throw std::invalid_argument("equal_mod_ibp: operands mix integrated and pointwise terms");
  Canonicalizer canon(opts.rewrite_limit, true, opts.vanishing);
  const std::string vdetail = vanishing_detail(opts.vanishing);
  Expression diff = a - b;
  res.trace.record("sub", to_string(b), a, diff);
  Expression d = canon(diff);
  res.trace.record("canonicalize", vdetail, diff, d);
  const bool integrated = !(na && nb);
  if (d.is_zero() || !integrated) {
    res.equal = d.is_zero();
    res.residual = d;
    res.rewrites = canon.rewrites();
    return res;
  }
  Expression r = pivot_reduce(d, canon);
  res.trace.record("pivot-ibp", vdetail, d, r);
  res.residual = r;
  if (r.is_zero()) {
    res.equal = true;
    res.rewrites = canon.rewrites();
    return res;
  }
  bool placeholder_free = false;
  std::set<Symbol> fields;
  for (const auto& [m, c] : r.terms()) {
    bool has = false;
    for (const auto& f : m.factors)
      if (f.info().placeholder) {
        fields.insert(f.symbol);
        has = true;
      }
    placeholder_free = placeholder_free || !has;
  }
  bool all_null = !placeholder_free;
  for (Symbol s : fields) {
    res.fields.push_back(s);
    Expression ev = canon(euler_operator(r, s));
    res.trace.record("euler", std::string(info(s).name) + (vdetail.empty() ? "" : ";" + vdetail), r, ev,
                     true);
    if (!ev.is_zero()) all_null = false;
  }
  res.equal = all_null;
  res.rewrites = canon.rewrites();
  return res;
}

inline IbpResult equal_mod_ibp(const Expression& a, const Expression& b,
                               std::size_t rewrite_limit = kDefaultRewriteLimit) {
  return equal_mod_ibp(a, b, IbpOptions{rewrite_limit, {}});
}

}  // namespace phb
