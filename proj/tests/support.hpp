#pragma once

// Random generators shared by the property tests.

#include "phb/corpus.hpp"
#include "phb/expression.hpp"
#include "phb/scalar.hpp"

#include <random>
#include <string>
#include <vector>

namespace phb::testing {

inline Corpus default_corpus() { return load_corpus(PHB_DEFAULT_CORPUS); }

inline Scalar random_scalar(std::mt19937_64& rng, int range = 9) {
  std::uniform_int_distribution<int> num(-range, range), den(1, 7);
  auto q = [&] { return Rational(num(rng), den(rng)); };
  return Scalar(q(), q(), q(), q());
}

inline Scalar random_nonzero_scalar(std::mt19937_64& rng) {
  Scalar s;
  while (s.is_zero()) s = random_scalar(rng);
  return s;
}

inline std::string random_derivs(std::mt19937_64& rng, std::size_t max_len) {
  static const char letters[] = {'1', 'b', '0'};
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> pick(0, 2);
  std::string d(len(rng), ' ');
  for (auto& c : d) c = letters[pick(rng)];
  return d;
}

/// Factor of a non-constant symbol with a random derivative string.
inline Factor random_factor(std::mt19937_64& rng, std::size_t max_derivs = 3) {
  static const Symbol syms[] = {Symbol::R, Symbol::A11, Symbol::Ab1b1, Symbol::f, Symbol::E11, Symbol::Eb1b1};
  std::uniform_int_distribution<int> pick(0, 5);
  return Factor(syms[pick(rng)], random_derivs(rng, max_derivs));
}

inline Expression random_expression(std::mt19937_64& rng, std::size_t max_terms = 4, std::size_t max_factors = 3,
                                    std::size_t max_derivs = 3, bool integrated = false) {
  std::uniform_int_distribution<std::size_t> nt(1, max_terms), nf(1, max_factors);
  Expression e;
  for (std::size_t t = nt(rng); t > 0; --t) {
    std::vector<Factor> fs;
    for (std::size_t k = nf(rng); k > 0; --k) fs.push_back(random_factor(rng, max_derivs));
    e += Expression::term(random_nonzero_scalar(rng), Monomial(std::move(fs), integrated));
  }
  return e;
}

}  // namespace phb::testing
