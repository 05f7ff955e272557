#pragma once

// Named operators as templates over a placeholder: f for real functions,
// E11 (with its conjugate Eb1b1) for deformation tensors.  A tensor-valued
// template stores only its (1,1) coefficient; the full tensor is 2Re of it.

#include "phb/calculus.hpp"
#include "phb/parse.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace phb {

enum class Space { None, Function, Tensor };

inline const char* to_string(Space s) {
  switch (s) {
    case Space::None: return "none";
    case Space::Function: return "function";
    case Space::Tensor: return "tensor";
  }
  return "?";
}

struct OperatorTemplate {
  std::string name;
  Space input = Space::Function;
  Space output = Space::Function;
  Expression body;
  bool linear = true;
};

class NonlinearTemplate : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline bool is_input_placeholder(Space in, Symbol s) {
  if (in == Space::Function) return s == Symbol::f;
  if (in == Space::Tensor) return s == Symbol::E11 || s == Symbol::Eb1b1;
  return false;
}

// Index of the single placeholder factor of a term; throws if not linear.
inline std::size_t placeholder_slot(const OperatorTemplate& op, const Monomial& m) {
  std::size_t slot = m.factors.size(), count = 0;
  for (std::size_t k = 0; k < m.factors.size(); ++k) {
    const Symbol s = m.factors[k].symbol;
    if (is_input_placeholder(op.input, s)) {
      slot = k;
      ++count;
    } else if (m.factors[k].info().placeholder) {
      throw NonlinearTemplate(op.name + ": foreign placeholder " + std::string(info(s).name));
    }
  }
  if (count != 1) throw NonlinearTemplate(op.name + ": term " + to_string(m) + " is not linear");
  return slot;
}

inline std::string reversed(const std::string& s) { return {s.rbegin(), s.rend()}; }

inline std::string conj_letters(std::string s) {
  for (char& c : s) c = conj_letter(c);
  return s;
}

}  // namespace detail

/// Check the template is linear in its placeholder; throws NonlinearTemplate.
inline void require_linear(const OperatorTemplate& op) {
  if (!op.linear) throw NonlinearTemplate(op.name + " is not linear");
  if (op.input == Space::None) return;
  for (const auto& [m, c] : op.body.terms()) detail::placeholder_slot(op, m);
}

/// Substitute an argument for the placeholder (u_{,s} -> arg_{,s}, and for
/// tensors conj(u)_{,s} -> conj(arg)_{,s}).
inline Expression apply(const OperatorTemplate& op, const Expression& arg) {
  if (op.input == Space::None) return op.body;
  Expression out;
  const Expression arg_conj = conjugate(arg);
  for (const auto& [m, c] : op.body.terms()) {
    Expression prod(c);
    for (const auto& f : m.factors) {
      if (op.input == Space::Function && f.symbol == Symbol::f)
        prod = prod * differentiate(arg, f.derivs);
      else if (op.input == Space::Tensor && f.symbol == Symbol::E11)
        prod = prod * differentiate(arg, f.derivs);
      else if (op.input == Space::Tensor && f.symbol == Symbol::Eb1b1)
        prod = prod * differentiate(arg_conj, f.derivs);
      else
        prod = prod * Expression(f);
    }
    out += m.integrated ? integrate(prod) : prod;
  }
  return out;
}

/// Formal adjoint by integration by parts.  Inner products: Re-part-free
/// <u,v> = INT[u conj(v)] on functions, <S,T> = INT[2Re(S11 conj(T11))] on
/// tensors.  Function templates are complex-linear.
inline OperatorTemplate adjoint(const OperatorTemplate& op) {
  require_linear(op);
  if (op.input == Space::None) throw std::invalid_argument(op.name + " has no argument");
  OperatorTemplate out{op.name + "*", op.output, op.input, {}, true};
  const Expression f(Symbol::f), e(Symbol::E11), eb(Symbol::Eb1b1);
  for (const auto& [m, c] : op.body.terms()) {
    const std::size_t slot = detail::placeholder_slot(op, m);
    const Factor& u = m.factors[slot];
    const std::string rev = detail::reversed(u.derivs);
    const bool odd = u.derivs.size() % 2;
    const Expression x = detail::cofactor(m, c, slot);
    Expression piece;
    if (op.input == Space::Function && op.output == Space::Function) {
      piece = differentiate(conjugate(x) * f, detail::conj_letters(rev));
    } else if (op.input == Space::Function && op.output == Space::Tensor) {
      Expression y = differentiate(x * eb, rev);
      piece = y + conjugate(y);
    } else if (op.input == Space::Tensor && op.output == Space::Function) {
      if (u.symbol != Symbol::Eb1b1) continue;
      piece = differentiate(x * f, rev);
    } else {
      if (u.symbol == Symbol::E11)
        piece = differentiate(conjugate(x) * e, detail::conj_letters(rev));
      else
        piece = differentiate(x * eb, rev);
    }
    out.body += odd ? -piece : piece;
  }
  return out;
}

/// Coefficient of D_J f: f_{,11} + i A11 f.
inline OperatorTemplate build_DJ() {
  return {"DJ", Space::Function, Space::Tensor, parse("f_{11} + i*A11*f")};
}

/// D_J^* E = E11_{,bb} + i A11 Eb1b1 + conjugate.
inline OperatorTemplate build_DJstar() {
  return {"DJstar", Space::Tensor, Space::Function, parse("2Re[E11_{bb} + i*A11*Eb1b1]")};
}

/// Sublaplacian with lowered indices: -(f_{,1b} + f_{,b1}).
inline OperatorTemplate build_sublaplacian() {
  return {"sublaplacian", Space::Function, Space::Function, parse("-f_{1b} - f_{b1}")};
}

/// |grad_b f|^2 = 2 f_{,1} f_{,b} for real f (quadratic).
inline OperatorTemplate build_subgradient_sq() {
  return {"subgradient_sq", Space::Function, Space::Function, parse("2*f_{1}*f_{b}"), false};
}

/// L_alpha f = sublaplacian(f) + i alpha f_{,0}.
inline OperatorTemplate build_Lalpha(const Scalar& alpha) {
  Expression body = build_sublaplacian().body + Scalar::i() * alpha * Expression(Factor(Symbol::f, "0"));
  return {"L[" + alpha.str() + "]", Space::Function, Space::Function, body};
}

/// L_alpha acting on the (1,1) coefficient of a deformation tensor.
inline OperatorTemplate build_Lalpha_tensor(const Scalar& alpha) {
  Expression body = parse("-E11_{1b} - E11_{b1}") + Scalar::i() * alpha * Expression(Factor(Symbol::E11, "0"));
  return {"Ltensor[" + alpha.str() + "]", Space::Tensor, Space::Tensor, body};
}

/// Cartan tensor coefficient Q11.
inline OperatorTemplate build_Q11() {
  return {"Q11", Space::None, Space::Tensor,
          parse("1/6*R_{11} + i/2*R*A11 - A11_{0} - 2/3*i*A11_{b1}")};
}

/// Composition a(b(.)).
inline OperatorTemplate compose(const OperatorTemplate& a, const OperatorTemplate& b) {
  if (a.input != b.output) throw std::invalid_argument("compose: space mismatch");
  Expression placeholder = b.input == Space::Tensor ? Expression(Symbol::E11) : Expression(Symbol::f);
  return {a.name + "." + b.name, b.input, a.output, apply(a, apply(b, placeholder)), a.linear && b.linear};
}

/// The (1,1) coefficient X of -DQ_J(2E) + (1/6) D_J D_J^* E, which this
/// toolkit takes as the definition of DQ_J.
inline Expression build_DQJ_rhs() {
  return parse(
      "1/3*E11_{bb11} - E11_{00} - 2/3*i*E11_{0b1} + i/3*(A11*Eb1b1)_{11}"
      " - 1/6*E11*R_{1b} + 1/6*E11_{b}*R_{1} - 1/6*(E11*R_{b})_{1}"
      " + 1/2*A11*(i*E11_{bb} - i*Eb1b1_{11} - A11*Eb1b1 - Ab1b1*E11) + i/2*R*E11_{0}"
      " + 2*A11*(A11*Eb1b1 + Ab1b1*E11) + 2/3*i*E11*A11_{bb} - 2/3*i*E11_{b}*A11_{b}"
      " - 2/3*i*(Eb1b1*A11_{1})_{1} - 4/3*i*(Eb1b1_{1}*A11)_{1}"
      " + i/6*A11*(E11_{bb} + Eb1b1_{11} + i*A11*Eb1b1 - i*Ab1b1*E11)");
}

/// DQ_J(2E) coefficient, defined from the relation above.
inline Expression build_DQJ(const Expression& rhs = build_DQJ_rhs()) {
  Expression djdjstar = apply(build_DJ(), apply(build_DJstar(), Expression(Symbol::E11)));
  return Scalar::rational(1, 6) * djdjstar - rhs;
}

/// f_{,11} -> -i A11 f: the kernel condition D_J f = 0 read as a rewrite.
inline SubstitutionRule killing_rule() {
  return {"killing", Symbol::f, "11", parse("-i*A11*f")};
}

/// Named substitution rules; conjugate rules are registered with a trailing '*'.
inline std::map<std::string, SubstitutionRule> substitution_rules() {
  std::map<std::string, SubstitutionRule> out;
  for (const auto& r : {bianchi_rule(), killing_rule()}) {
    out.emplace(r.name, r);
    SubstitutionRule c = r.conj();
    out.emplace(c.name, c);
  }
  return out;
}

/// Registry of every named operator, keyed by name.
inline std::map<std::string, OperatorTemplate> operator_registry() {
  std::map<std::string, OperatorTemplate> reg;
  auto put = [&](OperatorTemplate t, std::string key = {}) {
    if (key.empty()) key = t.name;
    reg.emplace(std::move(key), std::move(t));
  };
  put(build_DJ());
  put(build_DJstar());
  put(build_sublaplacian());
  put(build_subgradient_sq());
  put(build_Lalpha(Scalar::i() * Scalar::s3()), "L_i_s3");
  put(build_Lalpha_tensor(Scalar(4) + Scalar::i() * Scalar::s3()), "Ltensor_4+i_s3");
  put(build_Q11());
  put({"DQJ_rhs", Space::Tensor, Space::Tensor, build_DQJ_rhs()});
  put({"DQJ", Space::Tensor, Space::Tensor, build_DQJ()});
  put({"bianchi", Space::None, Space::Function, bianchi_rule().replacement});
  return reg;
}

}  // namespace phb
