#include "support.hpp"

#include "phb/operators.hpp"
#include "phb/parse.hpp"
#include "phb/trace.hpp"

#include <gtest/gtest.h>

using namespace phb;
using phb::testing::random_expression;
using phb::testing::random_scalar;

namespace {

const Expression kF(Symbol::f), kG(Symbol::g), kE(Symbol::E11);

bool same(const Expression& a, const Expression& b) { return canonicalize(a - b).is_zero(); }

// <T u, v> - <u, T* v> with the inner products of the adjoint construction.
IbpResult adjoint_identity(const OperatorTemplate& t) {
  const OperatorTemplate ts = adjoint(t);
  auto arg = [](Space s, bool first) { return s == Space::Tensor ? kE : (first ? kF : kG); };
  auto pair = [](Space s, const Expression& x, const Expression& y) {
    return s == Space::Tensor ? integrate(two_re(x * conjugate(y))) : integrate(x * conjugate(y));
  };
  const Expression u = arg(t.input, true), v = arg(t.output, false);
  return equal_mod_ibp(pair(t.output, apply(t, u), v), pair(t.input, u, apply(ts, v)), 100'000);
}

}  // namespace

TEST(Operators, DJOnConstantsAndKernelRule) {
  EXPECT_EQ(apply(build_DJ(), Expression(1)), parse("i*A11"));
  EXPECT_EQ(substitute(parse("f_{11}"), killing_rule()), parse("-i*A11*f"));
  // Ab1b1 f_{,11} = -i |A11|^2 f on the kernel.
  EXPECT_EQ(substitute(parse("Ab1b1*f_{11}"), killing_rule()), parse("-i*A11*Ab1b1*f"));
  EXPECT_EQ(substitute(parse("f_{11b}"), killing_rule()), parse("-i*(A11*f)_{b}"));
}

TEST(Operators, DJstarShape) {
  const Expression djs = apply(build_DJstar(), kE);
  EXPECT_TRUE(is_real(djs));
  EXPECT_EQ(torsion_free(djs), parse("E11_{bb} + Eb1b1_{11}"));
}

TEST(Operators, AdjointOfDJIsDJstar) {
  EXPECT_TRUE(same(adjoint(build_DJ()).body, build_DJstar().body));
  EXPECT_TRUE(adjoint_identity(build_DJ()).equal);
  EXPECT_TRUE(adjoint_identity(build_DJstar()).equal);
}

TEST(Operators, DJstarOfDJLeadingPart) {
  const Expression e = apply(build_DJstar(), apply(build_DJ(), kF));
  EXPECT_EQ(torsion_free(e), parse("f_{11bb} + f_{bb11}"));
}

TEST(Operators, AdjointOfIdentityAndDoubleAdjoint) {
  const OperatorTemplate id{"id", Space::Function, Space::Function, kF};
  EXPECT_EQ(adjoint(id).body, kF);
  const OperatorTemplate tid{"tid", Space::Tensor, Space::Tensor, kE};
  EXPECT_EQ(adjoint(tid).body, kE);
  for (const Scalar& a : {Scalar::i() * Scalar::s3(), Scalar(4) + Scalar::i() * Scalar::s3(), Scalar(0)}) {
    const OperatorTemplate l = build_Lalpha(a);
    EXPECT_TRUE(same(adjoint(adjoint(l)).body, l.body)) << a.str();
    EXPECT_TRUE(adjoint_identity(l).equal);
    const OperatorTemplate lt = build_Lalpha_tensor(a);
    EXPECT_TRUE(same(adjoint(adjoint(lt)).body, lt.body)) << a.str();
    EXPECT_TRUE(adjoint_identity(lt).equal);
  }
}

TEST(Operators, AdjointIdentityOnRandomLinearTemplates) {
  std::mt19937_64 rng(41);
  const Symbol background[] = {Symbol::R, Symbol::A11, Symbol::Ab1b1};
  for (int n = 0; n < 40; ++n) {
    Expression body;
    for (int t = 0; t < 3; ++t) {
      // Pad the derivatives of f so each term maps functions to functions.
      const Factor bg(background[rng() % 3], phb::testing::random_derivs(rng, 2));
      std::string fd = phb::testing::random_derivs(rng, 2);
      int q = bg.symbol == Symbol::A11 ? 2 : bg.symbol == Symbol::Ab1b1 ? -2 : 0;
      for (char d : bg.derivs + fd) q += d == '1' ? 1 : d == 'b' ? -1 : 0;
      fd += std::string(std::abs(q), q > 0 ? 'b' : '1');
      body += Expression::term(random_scalar(rng), Monomial({bg, Factor(Symbol::f, fd)}));
    }
    const OperatorTemplate t{"rand", Space::Function, Space::Function, body};
    EXPECT_TRUE(adjoint_identity(t).equal) << to_string(body);
  }
}

TEST(Operators, LalphaFamily) {
  EXPECT_EQ(build_Lalpha(Scalar(0)).body, build_sublaplacian().body);
  EXPECT_EQ(build_Lalpha(Scalar::i() * Scalar::s3()).body, parse("-f_{1b} - f_{b1} - s3*f_{0}"));
  EXPECT_EQ(build_Lalpha_tensor(Scalar(4) + Scalar::i() * Scalar::s3()).body,
            parse("-E11_{1b} - E11_{b1} + (4*i - s3)*E11_{0}"));
}

TEST(Operators, SublaplacianAndGradient) {
  EXPECT_TRUE(apply(build_sublaplacian(), Expression(1)).is_zero());
  EXPECT_TRUE(adjoint_identity(build_sublaplacian()).equal);
  EXPECT_TRUE(same(adjoint(build_sublaplacian()).body, build_sublaplacian().body));
  EXPECT_TRUE(is_real(apply(build_subgradient_sq(), kF)));
  EXPECT_THROW(adjoint(build_subgradient_sq()), NonlinearTemplate);
}

TEST(Operators, CartanTensorCoefficient) {
  const Expression q = build_Q11().body;
  EXPECT_TRUE(constant_curvature(torsion_free(q)).is_zero());
  for (const auto& [m, c] : q.terms()) {
    EXPECT_EQ(m.weight(), 4);
    EXPECT_EQ(m.alpha(), 2);  // conjugate terms have alpha -2, i.e. belong to Qb1b1
  }
}

TEST(Operators, BianchiRuleTorsionFree) {
  EXPECT_TRUE(torsion_free(substitute(parse("R_{0}"), bianchi_rule())).is_zero());
  EXPECT_EQ(substitution_rules().at("bianchi*").replacement, bianchi_rule().replacement);
  EXPECT_EQ(substitution_rules().at("killing*").replacement, parse("i*Ab1b1*f"));
}

TEST(Operators, DQJRelation) {
  const OperatorTemplate rhs{"DQJ_rhs", Space::Tensor, Space::Tensor, build_DQJ_rhs()};
  EXPECT_TRUE(apply(rhs, Expression()).is_zero());
  const Expression djdjs = apply(build_DJ(), apply(build_DJstar(), kE));
  EXPECT_EQ(build_DQJ(), Scalar::rational(1, 6) * djdjs - build_DQJ_rhs());
  const Expression q = build_DQJ_rhs();
  for (const auto& [m, c] : q.terms()) EXPECT_EQ(m.weight(), 4);
}

TEST(Operators, TemplatesAreLinear) {
  std::mt19937_64 rng(42);
  for (const auto& [name, op] : operator_registry()) {
    if (!op.linear || op.input == Space::None) continue;
    for (int n = 0; n < 10; ++n) {
      const Expression u = integrand(random_expression(rng, 2, 2, 2)),
                       v = integrand(random_expression(rng, 2, 2, 2));
      // Tensor templates act on E11 and its conjugate: real-linear only.
      Scalar a = random_scalar(rng), b = random_scalar(rng);
      if (op.input == Space::Tensor) a = a.real_part(), b = b.real_part();
      EXPECT_EQ(apply(op, a * u + b * v), a * apply(op, u) + b * apply(op, v)) << name;
    }
  }
}

TEST(Operators, RealOperatorsCommuteWithConjugation) {
  std::mt19937_64 rng(43);
  for (int n = 0; n < 30; ++n) {
    const Expression u = integrand(random_expression(rng, 2, 2, 2));
    EXPECT_EQ(apply(build_sublaplacian(), conjugate(u)), conjugate(apply(build_sublaplacian(), u)));
  }
}

TEST(Operators, RegistryAndFamilies) {
  const auto reg = operator_registry();
  for (const char* k : {"DJ", "DJstar", "sublaplacian", "subgradient_sq", "L_i_s3", "Ltensor_4+i_s3", "Q11",
                        "DQJ_rhs", "DQJ", "bianchi"})
    EXPECT_TRUE(reg.count(k)) << k;
  EXPECT_EQ(resolve_operator("L:i*s3").body, reg.at("L_i_s3").body);
  EXPECT_EQ(resolve_operator("Lstar:i*s3").body, adjoint(reg.at("L_i_s3")).body);
  EXPECT_EQ(resolve_operator("Ltensor:4 + i*s3").body, reg.at("Ltensor_4+i_s3").body);
  EXPECT_THROW(resolve_operator("nosuch"), std::exception);
  EXPECT_STREQ(to_string(Space::Tensor), "tensor");
}
