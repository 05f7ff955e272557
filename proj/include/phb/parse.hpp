#pragma once

// Text form of expressions.
//
//   expr    := ['+'|'-'] term (('+'|'-') term)*
//   term    := power (('*' | '/') power | power)*      juxtaposition multiplies
//   power   := postfix ['^' int]
//   postfix := primary ['_{' derivs '}']               derivative of a group
//   primary := int | 'i' | 's3' | factor | '(' expr ')'
//            | 'Re[' expr ']' | 'Im[' expr ']' | 'conj[' expr ']'
//            | 'INT[' expr ']' | '|' expr '|^2'
//   factor  := f | g | R | lam | rho | A11 | Ab1b1 | E11 | Eb1b1 | Q11 | Qb1b1
//              optionally followed by '_{' [','] derivs '}'
//            | A | E | Q followed by '_{' (11|bb) [',' derivs] '}'
//
// Derivative letters are '1', 'b' (1bar) and '0' (T).  Re[X] expands to
// (X + conj X)/2 at parse time; there is no Re node in the tree.  Division is
// only by nonzero constants.

#include "phb/expression.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace phb {

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t pos, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(pos) + ": " + msg), pos_(pos) {}
  std::size_t position() const { return pos_; }

private:
  std::size_t pos_;
};

namespace detail {

class Parser {
public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expression parse_all() {
    skip_ws();
    if (at_end()) throw ParseError(pos_, "empty input");
    Expression e = parse_expr();
    skip_ws();
    if (!at_end()) throw ParseError(pos_, std::string("unexpected '") + s_[pos_] + "'");
    return e;
  }

private:
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) throw ParseError(pos_, std::string("expected '") + c + "'");
    ++pos_;
  }

  Expression parse_expr() {
    skip_ws();
    Expression acc;
    bool negate = false;
    if (peek() == '+' || peek() == '-') {
      negate = peek() == '-';
      ++pos_;
    }
    Expression t = parse_term();
    acc += negate ? -t : t;
    for (;;) {
      skip_ws();
      char c = peek();
      if (c != '+' && c != '-') break;
      ++pos_;
      Expression u = parse_term();
      if (c == '+')
        acc += u;
      else
        acc -= u;
    }
    return acc;
  }

  bool starts_juxtaposed() {
    skip_ws();
    char c = peek();
    return std::isalpha(static_cast<unsigned char>(c)) || c == '(';
  }

  Expression parse_term() {
    Expression acc = parse_power();
    for (;;) {
      skip_ws();
      char c = peek();
      if (c == '*') {
        ++pos_;
        acc = multiply(acc, parse_power());
      } else if (c == '/') {
        std::size_t at = pos_++;
        Expression d = parse_power();
        acc = acc * constant_of(d, at).inverse();
      } else if (starts_juxtaposed()) {
        acc = multiply(acc, parse_power());
      } else {
        break;
      }
    }
    return acc;
  }

  Expression multiply(const Expression& a, const Expression& b) {
    try {
      return a * b;
    } catch (const std::invalid_argument& ex) {
      throw ParseError(pos_, ex.what());
    }
  }

  static Scalar constant_of(const Expression& d, std::size_t at) {
    if (d.size() != 1 || !d.terms().begin()->first.factors.empty() ||
        d.terms().begin()->first.integrated)
      throw ParseError(at, "division by a non-constant");
    return d.terms().begin()->second;
  }

  Expression parse_power() {
    Expression base = parse_postfix();
    skip_ws();
    if (peek() != '^') return base;
    ++pos_;
    skip_ws();
    unsigned n = parse_uint();
    Expression r(1);
    for (unsigned k = 0; k < n; ++k) r = multiply(r, base);
    return r;
  }

  unsigned parse_uint() {
    std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) throw ParseError(pos_, "expected integer");
    return static_cast<unsigned>(std::stoul(std::string(s_.substr(start, pos_ - start))));
  }

  std::string parse_derivs_until(char stop) {
    std::string d;
    for (;;) {
      skip_ws();
      char c = peek();
      if (c == stop) break;
      if (!is_deriv_letter(c)) throw ParseError(pos_, "bad derivative letter");
      d.push_back(c);
      ++pos_;
    }
    return d;
  }

  // '_{' [','] derivs '}' after a symbol or group; returns empty if absent.
  std::string parse_deriv_suffix() {
    skip_ws();
    if (peek() != '_') return {};
    ++pos_;
    expect('{');
    skip_ws();
    if (peek() == ',') ++pos_;
    std::string d = parse_derivs_until('}');
    expect('}');
    return d;
  }

  Expression parse_postfix() {
    skip_ws();
    bool group = peek() == '(';
    std::size_t at = pos_;
    Expression e = parse_primary();
    if (!group) return e;
    std::string d = parse_deriv_suffix();
    if (d.empty()) return e;
    try {
      return differentiate(e, d);
    } catch (const std::invalid_argument& ex) {
      throw ParseError(at, ex.what());
    }
  }

  std::string parse_ident() {
    std::size_t start = pos_;
    while (std::isalnum(static_cast<unsigned char>(peek()))) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  Expression parse_bracketed() {
    expect('[');
    Expression e = parse_expr();
    expect(']');
    return e;
  }

  Expression parse_primary() {
    skip_ws();
    char c = peek();
    std::size_t at = pos_;
    if (at_end()) throw ParseError(pos_, "unexpected end of input");
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      return Expression(Scalar(Rational(std::string(s_.substr(start, pos_ - start)))));
    }
    if (c == '(') {
      ++pos_;
      Expression e = parse_expr();
      expect(')');
      return e;
    }
    if (c == '|') {
      ++pos_;
      Expression e = parse_expr();
      expect('|');
      expect('^');
      skip_ws();
      if (parse_uint() != 2) throw ParseError(pos_, "only |X|^2 is supported");
      return multiply(e, conjugate(e));
    }
    if (!std::isalpha(static_cast<unsigned char>(c))) {
      throw ParseError(pos_, std::string("unexpected '") + c + "'");
    }
    std::string id = parse_ident();
    if (id == "i") return Expression(Scalar::i());
    if (id == "s3") return Expression(Scalar::s3());
    if (id == "Re") return two_re(parse_bracketed()) * Scalar::rational(1, 2);
    if (id == "Im") return parse_im();
    if (id == "conj") return conjugate(parse_bracketed());
    if (id == "INT") {
      Expression inner = parse_bracketed();
      if (inner.any_integrated()) throw ParseError(at, "nested INT");
      return integrate(inner);
    }
    if (id == "A" || id == "E" || id == "Q") return parse_family_factor(id, at);
    auto sym = symbol_from_name(id);
    if (!sym) throw ParseError(at, "unknown symbol '" + id + "'");
    std::string d = parse_deriv_suffix();
    if (!d.empty() && info(*sym).constant)
      throw ParseError(at, "derivative of a constant symbol '" + id + "'");
    return Expression(Factor(*sym, d));
  }

  // Im[X] = (X - conj X) / (2i); the bracket has not been consumed yet.
  Expression parse_im() {
    Expression x = parse_bracketed();
    return (x - conjugate(x)) * (Scalar(2) * Scalar::i()).inverse();
  }

  Expression parse_family_factor(const std::string& fam, std::size_t at) {
    skip_ws();
    if (peek() != '_') throw ParseError(at, "tensor '" + fam + "' needs base indices");
    ++pos_;
    expect('{');
    skip_ws();
    std::string base;
    while (peek() == '1' || peek() == 'b') {
      base.push_back(peek());
      ++pos_;
      skip_ws();
      if (base.size() == 2) break;
    }
    if (base != "11" && base != "bb") throw ParseError(pos_, "base indices must be 11 or bb");
    std::string d;
    skip_ws();
    if (peek() == ',') {
      ++pos_;
      d = parse_derivs_until('}');
    }
    expect('}');
    std::string name = fam + (base == "11" ? "11" : "b1b1");
    auto sym = symbol_from_name(name);
    if (!sym) throw ParseError(at, "unknown symbol '" + name + "'");
    return Expression(Factor(*sym, d));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parse text in the expression grammar.  Throws ParseError with the offending position.
inline Expression parse(std::string_view text) { return detail::Parser(text).parse_all(); }

inline std::string to_string(const Factor& f) {
  std::string s(f.info().name);
  if (!f.derivs.empty()) s += "_{" + f.derivs + "}";
  return s;
}

inline std::string to_string(const Monomial& m) {
  std::string body;
  for (const auto& f : m.factors) {
    if (!body.empty()) body += "*";
    body += to_string(f);
  }
  if (body.empty()) body = "1";
  return m.integrated ? "INT[" + body + "]" : body;
}

/// Canonical text; parse(to_string(e)) == e.
inline std::string to_string(const Expression& e) {
  if (e.is_zero()) return "0";
  std::string out;
  for (const auto& [m, c] : e.terms()) {
    bool bare = m.factors.empty() && !m.integrated;
    bool negative = false;
    std::string coef;
    if (c.component_count() == 1) {
      coef = c.str();
      if (coef.front() == '-') {
        negative = true;
        coef.erase(0, 1);
      }
    } else {
      coef = c.str();
    }
    std::string term;
    if (bare) {
      term = coef;
    } else if (coef == "1") {
      term = to_string(m);
    } else {
      term = coef + "*" + to_string(m);
    }
    if (out.empty())
      out = negative ? "-" + term : term;
    else
      out += (negative ? " - " : " + ") + term;
  }
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const Expression& e) { return os << to_string(e); }

}  // namespace phb
