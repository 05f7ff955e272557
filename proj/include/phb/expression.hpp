#pragma once

// Indexed tensor polynomials over Q(i, sqrt3) in a unitary frame {Z1, Z1bar, T}.
//
// All tensor indices are lowered with h_{1 1bar} = 1.  A factor is a symbol
// carrying fixed base indices plus an ordered string of covariant-derivative
// letters: '1' (Z1), 'b' (Z1bar), '0' (T).  The string is read left to right
// in order of application, so "A11_{b1}" is (A11_{,1bar})_{,1}.

#include "phb/scalar.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace phb {

/// Symbols in their fixed total order; the order drives term sorting and the
/// IBP pivot choice (placeholders last, so they are the greatest).
enum class Symbol : std::uint8_t { lam, rho, R, A11, Ab1b1, Q11, Qb1b1, f, g, E11, Eb1b1 };

inline constexpr std::size_t kSymbolCount = 11;

struct SymbolInfo {
  std::string_view name;
  Symbol conj;
  int base_weight;
  int alpha;         // (#1 - #1bar) over base indices
  bool constant;     // zero covariant derivative
  bool placeholder;  // an unknown the identities are linear/quadratic in
  std::string_view family;  // "A", "E", "Q" for tensors with base indices
};

inline constexpr std::array<SymbolInfo, kSymbolCount> kSymbols{{
    {"lam", Symbol::lam, 0, 0, true, false, ""},
    {"rho", Symbol::rho, 0, 0, true, false, ""},
    {"R", Symbol::R, 2, 0, false, false, ""},
    {"A11", Symbol::Ab1b1, 2, 2, false, false, "A"},
    {"Ab1b1", Symbol::A11, 2, -2, false, false, "A"},
    {"Q11", Symbol::Qb1b1, 4, 2, false, false, "Q"},
    {"Qb1b1", Symbol::Q11, 4, -2, false, false, "Q"},
    {"f", Symbol::f, 0, 0, false, true, ""},
    {"g", Symbol::g, 0, 0, false, true, ""},
    {"E11", Symbol::Eb1b1, 0, 2, false, true, "E"},
    {"Eb1b1", Symbol::E11, 0, -2, false, true, "E"},
}};

inline const SymbolInfo& info(Symbol s) { return kSymbols[static_cast<std::size_t>(s)]; }

inline std::optional<Symbol> symbol_from_name(std::string_view name) {
  for (std::size_t k = 0; k < kSymbols.size(); ++k)
    if (kSymbols[k].name == name) return static_cast<Symbol>(k);
  return std::nullopt;
}

// Derivative letters.
inline constexpr char kD1 = '1';
inline constexpr char kDb = 'b';
inline constexpr char kD0 = '0';

inline bool is_deriv_letter(char c) { return c == kD1 || c == kDb || c == kD0; }

inline char conj_letter(char c) {
  if (c == kD1) return kDb;
  if (c == kDb) return kD1;
  return c;
}

inline int letter_alpha(char c) { return c == kD1 ? 1 : (c == kDb ? -1 : 0); }
inline int letter_weight(char c) { return c == kD0 ? 2 : 1; }

/// Position of a letter in the canonical derivative order 1 < 1bar < 0.
inline int canonical_rank(char c) { return c == kD1 ? 0 : (c == kDb ? 1 : 2); }

struct Factor {
  Symbol symbol;
  std::string derivs;

  Factor(Symbol s, std::string d = {}) : symbol(s), derivs(std::move(d)) {
    for (char c : derivs)
      if (!is_deriv_letter(c)) throw std::invalid_argument("bad derivative letter");
  }

  const SymbolInfo& info() const { return phb::info(symbol); }

  /// alpha counted over base indices and every derivative letter.
  int alpha() const {
    int a = info().alpha;
    for (char c : derivs) a += letter_alpha(c);
    return a;
  }

  int weight() const {
    int w = info().base_weight;
    for (char c : derivs) w += letter_weight(c);
    return w;
  }

  Factor conj() const {
    std::string d = derivs;
    for (char& c : d) c = conj_letter(c);
    return Factor(info().conj, std::move(d));
  }

  bool is_canonical() const {
    return std::is_sorted(derivs.begin(), derivs.end(),
                          [](char x, char y) { return canonical_rank(x) < canonical_rank(y); });
  }

  friend auto operator<=>(const Factor&, const Factor&) = default;
  friend bool operator==(const Factor&, const Factor&) = default;
};

/// Product of factors, optionally under the integral over M with dv_theta.
struct Monomial {
  bool integrated = false;
  std::vector<Factor> factors;  // sorted

  Monomial() = default;
  Monomial(std::vector<Factor> fs, bool integ = false) : integrated(integ), factors(std::move(fs)) {
    std::sort(factors.begin(), factors.end());
  }

  int weight() const {
    int w = 0;
    for (const auto& f : factors) w += f.weight();
    return w;
  }

  int alpha() const {
    int a = 0;
    for (const auto& f : factors) a += f.alpha();
    return a;
  }

  bool contains(Symbol s) const {
    return std::any_of(factors.begin(), factors.end(), [s](const Factor& f) { return f.symbol == s; });
  }

  Monomial conj() const {
    std::vector<Factor> fs;
    fs.reserve(factors.size());
    for (const auto& f : factors) fs.push_back(f.conj());
    return Monomial(std::move(fs), integrated);
  }

  /// True if every factor is a constant symbol (lam, rho).
  bool is_constant() const {
    return std::all_of(factors.begin(), factors.end(), [](const Factor& f) { return f.info().constant; });
  }

  Monomial times(const Monomial& o) const {
    // A constant may scale an integral; anything else under INT must be inside it.
    const bool ok = !(integrated || o.integrated) || (!o.integrated && o.is_constant()) ||
                    (!integrated && is_constant());
    if (!ok) throw std::invalid_argument("cannot multiply an integrated expression");
    std::vector<Factor> fs = factors;
    fs.insert(fs.end(), o.factors.begin(), o.factors.end());
    return Monomial(std::move(fs), integrated || o.integrated);
  }

  friend auto operator<=>(const Monomial&, const Monomial&) = default;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Sum of terms with like terms collected; zero coefficients are never stored.
class Expression {
public:
  using TermMap = std::map<Monomial, Scalar>;

  Expression() = default;
  Expression(Scalar c) { add(Monomial{}, std::move(c)); }
  Expression(long long c) : Expression(Scalar(c)) {}
  Expression(const Factor& f) { add(Monomial({f}), Scalar(1)); }
  Expression(Symbol s) : Expression(Factor(s)) {}

  static Expression term(Scalar c, Monomial m) {
    Expression e;
    e.add(std::move(m), std::move(c));
    return e;
  }

  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  void add(const Monomial& m, const Scalar& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Expression& operator+=(const Expression& o) {
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }
  Expression& operator-=(const Expression& o) {
    for (const auto& [m, c] : o.terms_) add(m, -c);
    return *this;
  }
  Expression& operator*=(const Scalar& s) {
    if (s.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend Expression operator+(Expression a, const Expression& b) { return a += b; }
  friend Expression operator-(Expression a, const Expression& b) { return a -= b; }
  friend Expression operator-(Expression a) { return a *= Scalar(-1); }
  friend Expression operator*(Expression a, const Scalar& s) { return a *= s; }
  friend Expression operator*(const Scalar& s, Expression a) { return a *= s; }

  friend Expression operator*(const Expression& a, const Expression& b) {
    Expression r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add(ma.times(mb), ca * cb);
    return r;
  }

  friend bool operator==(const Expression&, const Expression&) = default;

  bool any_integrated() const {
    return std::any_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.integrated; });
  }
  bool all_integrated() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.integrated; });
  }

  bool contains(Symbol s) const {
    return std::any_of(terms_.begin(), terms_.end(), [s](const auto& t) { return t.first.contains(s); });
  }

  /// Set of symbols occurring anywhere.
  std::set<Symbol> symbols() const {
    std::set<Symbol> out;
    for (const auto& [m, c] : terms_)
      for (const auto& f : m.factors) out.insert(f.symbol);
    return out;
  }

private:
  TermMap terms_;
};

/// Coefficientwise complex conjugation with every index and symbol flipped.
inline Expression conjugate(const Expression& e) {
  Expression r;
  for (const auto& [m, c] : e.terms()) r.add(m.conj(), c.conj());
  return r;
}

/// X + conj(X).
inline Expression two_re(const Expression& e) { return e + conjugate(e); }

inline bool is_real(const Expression& e) { return conjugate(e) == e; }

/// Weight of a term: base weights plus 1 per 1/1bar derivative and 2 per T derivative.
inline int weight(const Monomial& m) { return m.weight(); }

/// Maximum term weight, or -1 for the zero expression.
inline int max_weight(const Expression& e) {
  int w = -1;
  for (const auto& [m, c] : e.terms()) w = std::max(w, m.weight());
  return w;
}

/// Wrap every term in the integral.
inline Expression integrate(const Expression& e) {
  Expression r;
  for (const auto& [m, c] : e.terms()) {
    Monomial mm = m;
    mm.integrated = true;
    r.add(mm, c);
  }
  return r;
}

/// Drop the integral from every term.
inline Expression integrand(const Expression& e) {
  Expression r;
  for (const auto& [m, c] : e.terms()) {
    Monomial mm = m;
    mm.integrated = false;
    r.add(mm, c);
  }
  return r;
}

/// Leibniz rule for one covariant derivative.  Constants differentiate to zero.
inline Expression differentiate(const Expression& e, char letter) {
  if (!is_deriv_letter(letter)) throw std::invalid_argument("bad derivative letter");
  Expression r;
  for (const auto& [m, c] : e.terms()) {
    if (m.integrated) throw std::invalid_argument("cannot differentiate an integrated expression");
    for (std::size_t k = 0; k < m.factors.size(); ++k) {
      if (m.factors[k].info().constant) continue;
      std::vector<Factor> fs = m.factors;
      fs[k].derivs.push_back(letter);
      r.add(Monomial(std::move(fs)), c);
    }
  }
  return r;
}

/// Apply derivative letters left to right.
inline Expression differentiate(Expression e, std::string_view letters) {
  for (char c : letters) e = differentiate(e, c);
  return e;
}

/// Remove every term containing one of the given symbols (e.g. torsion-free specialization).
inline Expression drop_terms_with(const Expression& e, const std::set<Symbol>& syms) {
  Expression r;
  for (const auto& [m, c] : e.terms()) {
    bool hit = false;
    for (Symbol s : syms) hit = hit || m.contains(s);
    if (!hit) r.add(m, c);
  }
  return r;
}

inline Expression drop_terms_with(const Expression& e, std::initializer_list<Symbol> syms) {
  return drop_terms_with(e, std::set<Symbol>(syms));
}

/// Substitute values for constant symbols (lam, rho).
inline Expression assign_constants(const Expression& e, const std::map<Symbol, Scalar>& values) {
  Expression r;
  for (const auto& [m, c] : e.terms()) {
    Scalar k = c;
    std::vector<Factor> fs;
    for (const auto& f : m.factors) {
      auto it = values.find(f.symbol);
      if (it != values.end() && f.info().constant)
        k *= it->second;
      else
        fs.push_back(f);
    }
    r.add(Monomial(std::move(fs), m.integrated), k);
  }
  return r;
}

/// Torsion-free specialization A11 = 0.
inline Expression torsion_free(const Expression& e) {
  return drop_terms_with(e, {Symbol::A11, Symbol::Ab1b1});
}

/// Constant curvature specialization: drop every term with a derivative of R.
inline Expression constant_curvature(const Expression& e) {
  Expression r;
  for (const auto& [m, c] : e.terms()) {
    bool hit = std::any_of(m.factors.begin(), m.factors.end(), [](const Factor& f) {
      return f.symbol == Symbol::R && !f.derivs.empty();
    });
    if (!hit) r.add(m, c);
  }
  return r;
}

/// Keep only terms satisfying a predicate.
template <typename Pred>
Expression filter_terms(const Expression& e, Pred keep) {
  Expression r;
  for (const auto& [m, c] : e.terms())
    if (keep(m, c)) r.add(m, c);
  return r;
}

}  // namespace phb
