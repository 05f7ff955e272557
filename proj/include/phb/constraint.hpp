#pragma once

// Equality modulo divergences and a pointwise constraint C = 0: find a
// multiplier h with  a - b - INT[C h] == 0  mod IBP.  The search is exact
// linear algebra over Q(i, s3) on a finite ansatz for h.

#include "phb/calculus.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace phb {

/// Canonical derivative strings 1^a b^c 0^d of the given weight.
inline std::vector<std::string> canonical_deriv_strings(int weight) {
  std::vector<std::string> out;
  for (int d = 0; 2 * d <= weight; ++d)
    for (int a = 0; a + 2 * d <= weight; ++a) {
      int c = weight - 2 * d - a;
      out.push_back(std::string(a, kD1) + std::string(c, kDb) + std::string(d, kD0));
    }
  return out;
}

namespace detail {

// Products of background factors (with canonical derivatives) of exact weight.
inline void background_products(int weight, const std::vector<Symbol>& background, std::size_t from,
                                 std::vector<Factor>& acc, std::vector<std::vector<Factor>>& out) {
  if (weight == 0) {
    out.push_back(acc);
    return;
  }
  for (std::size_t k = from; k < background.size(); ++k) {
    const int base = info(background[k]).base_weight;
    for (int w = base; w <= weight; ++w)
      for (const auto& d : canonical_deriv_strings(w - base)) {
        acc.emplace_back(background[k], d);
        // Allow the same symbol again (k, not k + 1): products are multisets.
        background_products(weight - w, background, k, acc, out);
        acc.pop_back();
      }
  }
}

}  // namespace detail

/// All monomials of the given weight that are linear in one of the fields,
/// with canonical derivatives on every factor.  Duplicates are removed.
inline std::vector<Expression> linear_ansatz(int weight, const std::vector<Symbol>& fields,
                                             const std::vector<Symbol>& background) {
  std::set<Monomial> seen;
  std::vector<Expression> out;
  for (Symbol u : fields)
    for (int wu = 0; wu <= weight; ++wu)
      for (const auto& du : canonical_deriv_strings(wu)) {
        std::vector<std::vector<Factor>> rests;
        std::vector<Factor> acc;
        detail::background_products(weight - wu - info(u).base_weight, background, 0, acc, rests);
        for (auto fs : rests) {
          fs.emplace_back(u, du);
          Monomial m(std::move(fs));
          if (seen.insert(m).second) out.push_back(Expression::term(Scalar(1), m));
        }
      }
  return out;
}

namespace detail {

using EulerKey = std::pair<Symbol, Monomial>;

// Concatenated canonical Euler expressions w.r.t. every placeholder field.
inline std::map<EulerKey, Scalar> euler_vector(const Expression& e, Canonicalizer& canon) {
  std::map<EulerKey, Scalar> v;
  for (Symbol s : e.symbols()) {
    if (!info(s).placeholder) continue;
    const Expression ev = canon(euler_operator(e, s));
    for (const auto& [m, c] : ev.terms()) v[{s, m}] += c;
  }
  return v;
}

// Solve sum_j x_j cols[j] = rhs exactly; free variables are set to zero.
inline std::optional<std::vector<Scalar>> solve_columns(const std::vector<std::map<EulerKey, Scalar>>& cols,
                                                        const std::map<EulerKey, Scalar>& rhs) {
  std::vector<EulerKey> keys;
  for (const auto& c : cols)
    for (const auto& [k, v] : c) keys.push_back(k);
  for (const auto& [k, v] : rhs) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  const std::size_t n = cols.size();
  std::vector<std::vector<Scalar>> a(keys.size(), std::vector<Scalar>(n + 1));
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (auto it = cols[j].find(keys[i]); it != cols[j].end()) a[i][j] = it->second;
    if (auto it = rhs.find(keys[i]); it != rhs.end()) a[i][n] = it->second;
  }

  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t j = 0; j < n && row < a.size(); ++j) {
    std::size_t p = row;
    while (p < a.size() && a[p][j].is_zero()) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[row]);
    const Scalar inv = a[row][j].inverse();
    for (auto& x : a[row]) x *= inv;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == row || a[i][j].is_zero()) continue;
      const Scalar k = a[i][j];
      for (std::size_t t = j; t <= n; ++t) a[i][t] -= k * a[row][t];
    }
    pivots.push_back(j);
    ++row;
  }
  for (std::size_t i = row; i < a.size(); ++i)
    if (!a[i][n].is_zero()) return std::nullopt;
  std::vector<Scalar> x(n);
  for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = a[i][n];
  return x;
}

}  // namespace detail

/// Find h in span(basis) with  e - INT[constraint * h] == 0  mod IBP.
/// Returns the multiplier h, or nullopt if no combination works.
inline std::optional<Expression> find_multiplier(const Expression& e, const Expression& constraint,
                                                 const std::vector<Expression>& basis,
                                                 const IbpOptions& opts = {}) {
  Canonicalizer canon(1'000'000, true, opts.vanishing);
  const Expression ce = canon(e);
  for (const auto& [m, c] : ce.terms()) {
    bool has = false;
    for (const auto& f : m.factors) has = has || f.info().placeholder;
    if (!has) return std::nullopt;  // a constraint multiple cannot cancel it
  }
  std::vector<std::map<detail::EulerKey, Scalar>> cols;
  cols.reserve(basis.size());
  for (const auto& b : basis) cols.push_back(detail::euler_vector(integrate(constraint * b), canon));
  auto x = detail::solve_columns(cols, detail::euler_vector(ce, canon));
  if (!x) return std::nullopt;
  Expression h;
  for (std::size_t j = 0; j < basis.size(); ++j) h += (*x)[j] * basis[j];
  return h;
}

}  // namespace phb
