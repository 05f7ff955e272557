#include "phb/rigidity.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace phb;
using namespace phb::rigidity;

namespace {

PointData sphere(double R = 1) {
  PointData p;
  p.id = "sphere";
  p.R = R;
  return p;
}

// Sylvester oracle-free check: determinant by cofactor expansion.
cplx cofactor_det(const Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.rows();
  if (n == 1) return m(0, 0);
  cplx d = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::MatrixXcd minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r)
      for (Eigen::Index c = 0, cc = 0; c < n; ++c)
        if (c != j) minor(r - 1, cc++) = m(r, c);
    d += (j % 2 ? -1.0 : 1.0) * m(0, j) * cofactor_det(minor);
  }
  return d;
}

}  // namespace

TEST(TheoremA, Examples) {
  PointData p = sphere(-1);
  ThmA t = thmA_condition(p);
  EXPECT_EQ(t.value, 0);
  EXPECT_FALSE(t.verdict_a);
  EXPECT_TRUE(t.verdict_b);

  p.R0 = 1;
  t = thmA_condition(p);
  EXPECT_NEAR(t.value, std::sqrt(3.0), 1e-15);
  EXPECT_TRUE(t.verdict_a);
  EXPECT_FALSE(t.verdict_b);

  for (double r0 : {-1.0, 0.0, 1.0}) {
    PointData q = sphere(1);
    q.R0 = r0;
    const ThmA s = thmA_condition(q);
    EXPECT_FALSE(s.verdict_a || s.verdict_b);
  }
}

TEST(TheoremA, ImaginaryPartSign) {
  PointData p = sphere(-1);
  p.A11_bb = cplx(0, -0.5);  // -2 Im = +1
  EXPECT_NEAR(thmA_condition(p).value, 1.0, 1e-15);
  EXPECT_TRUE(thmA_condition(p).verdict_a);
}

TEST(TheoremA, ToleranceBand) {
  PointData p = sphere(-1);
  p.R0 = 1e-14;
  EXPECT_TRUE(thmA_condition(p).verdict_b);
  EXPECT_FALSE(thmA_condition(p, 1e-16).verdict_b);
}

TEST(Condition311, Examples) {
  EXPECT_DOUBLE_EQ(cond_3_11(sphere(1)), 0.375);
  PointData p = sphere(2);
  p.A11 = cplx(0.06, 0.08);
  EXPECT_NEAR(cond_3_11(p), 1.25, 1e-15);
  PointData q = p;
  q.A11_1 = cplx(0.3, -0.2);
  const double by_hand = 3.0 / 8 * 4 - 2 * 2 * std::pow(std::abs(q.A11_1), 2.0 / 3) - 25 * 0.01;
  EXPECT_NEAR(cond_3_11(q), by_hand, 1e-14);
  EXPECT_NEAR(cond_3_11(scale(p, 4.0)), cond_3_11(p) / 16, 1e-15);
}

TEST(Condition312, TorsionFreeValue) {
  EXPECT_NEAR(cond_3_12(sphere(1)), 83.0 / 9216, 1e-16);
  // Torsion free with R1 = 0: (3/8 R^2)(83/3456 R^2 + 55/1152 lapR).
  PointData p = sphere(1.7);
  p.lapR = -0.4;
  EXPECT_NEAR(cond_3_12(p), 3.0 / 8 * p.R * p.R * (83.0 / 3456 * p.R * p.R + 55.0 / 1152 * p.lapR), 1e-15);
}

TEST(Condition312, CrossCouplingUsesConjugates) {
  PointData p = sphere(1);
  p.R1 = cplx(0.48, 0.96);
  p.A11_b = cplx(0.1, 0.2);
  const cplx expected = 5.0 / 48 * std::conj(p.R1) - cplx(0, 2) * std::conj(p.A11_b);
  EXPECT_NEAR(std::abs(cross_coupling(p) - expected), 0, 1e-16);
}

TEST(CorollaryC, Examples) {
  const CorollaryC s = corollary_C(sphere(1));
  EXPECT_DOUBLE_EQ(s.value, 20);
  EXPECT_TRUE(s.verdict);

  PointData p = sphere(1);
  p.R1 = cplx(std::sqrt(5.0), 0);  // |grad_b R|^2 = 10
  const CorollaryC t = corollary_C(p);
  EXPECT_NEAR(t.value, -10, 1e-12);
  EXPECT_FALSE(t.verdict);

  p = sphere(1);
  p.A11 = cplx(0.1, 0);
  EXPECT_THROW(corollary_C(p), std::invalid_argument);
  EXPECT_FALSE(corollary_C(sphere(-1)).verdict);
}

TEST(Bianchi, ConsistencyCheck) {
  PointData p = sphere(1);
  p.A11_bb = cplx(0.25, -3);
  EXPECT_FALSE(bianchi_consistent(p));
  p.R0 = 0.5;
  EXPECT_TRUE(bianchi_consistent(p));
  std::mt19937_64 rng(61);
  for (int n = 0; n < 100; ++n) EXPECT_TRUE(bianchi_consistent(random_point(rng)));
}

TEST(Forms, TorsionFreeBlockStructure) {
  const PointData p = sphere(3);
  const Eigen::MatrixXcd m = build_form_4(p).matrix();
  EXPECT_EQ(m(0, 0), cplx(29.0 / 48));
  EXPECT_EQ(m(0, 1), cplx(-1));
  EXPECT_EQ(m(1, 1), cplx(2));
  EXPECT_EQ(m(2, 2), cplx(1));
  EXPECT_EQ(m(3, 3), cplx(3.0 / 8));
  EXPECT_EQ(m(2, 3), cplx(0));
  for (int i = 0; i < 2; ++i)
    for (int j = 2; j < 4; ++j) EXPECT_EQ(m(i, j), cplx(0));
  EXPECT_NEAR(m.topLeftCorner(2, 2).determinant().real(), 5.0 / 24, 1e-15);
  EXPECT_NEAR(m.bottomRightCorner(2, 2).determinant().real(), 3.0 / 8, 1e-15);
  EXPECT_NEAR(cond_3_11(p) / 9, 3.0 / 8, 1e-15);
}

TEST(Forms, FiveVariableEntries) {
  std::mt19937_64 rng(62);
  const PointData p = random_point(rng);
  const Eigen::MatrixXcd m = build_form_5(p).matrix();
  EXPECT_EQ(m(4, 2), std::conj(5.0 / 48 * std::conj(p.R1) - cplx(0, 2) * std::conj(p.A11_b)));
  EXPECT_EQ(m(4, 2), 5.0 / 48 * p.R1 + cplx(0, 2) * p.A11_b);
  EXPECT_EQ(m(0, 4), cplx(-p.R / 6));
  EXPECT_EQ(m(1, 4), cplx(2 * p.R / 3));
  EXPECT_EQ(m.imag().diagonal().cwiseAbs().maxCoeff(), 0);
}

TEST(Forms, HermitianEnforced) {
  Eigen::MatrixXcd m(2, 2);
  m << 1, cplx(0, 1), cplx(0, 1), 1;
  EXPECT_THROW(HermitianForm{m}, std::invalid_argument);
  EXPECT_THROW(HermitianForm{Eigen::MatrixXcd::Zero(2, 3)}, std::invalid_argument);
}

TEST(Sylvester, Examples) {
  const Sylvester id = is_positive_definite(HermitianForm(Eigen::MatrixXcd::Identity(4, 4)));
  EXPECT_TRUE(id.positive_definite);
  for (double d : id.minors) EXPECT_DOUBLE_EQ(d, 1);
  Eigen::MatrixXcd m(2, 2);
  m << 1, 2, 2, 1;
  const Sylvester s = is_positive_definite(HermitianForm(m));
  EXPECT_FALSE(s.positive_definite);
  ASSERT_EQ(s.minors.size(), 2u);
  EXPECT_DOUBLE_EQ(s.minors[0], 1);
  EXPECT_NEAR(s.minors[1], -3, 1e-15);
}

TEST(Sylvester, AgreesWithEigenvalueOracle) {
  const SylvesterBattery b = run_sylvester_battery(2000, 63);
  EXPECT_EQ(b.disagreements, 0u);
  EXPECT_GT(b.positive, 100u);
  EXPECT_LT(b.positive + b.boundary, 1900u);
}

TEST(Equivalence, ExactBlockDeterminant) {
  const ExactBlockCheck c = torsion_block_exact(3, 0, 0, 0);
  EXPECT_EQ(c.det, Scalar::rational(3, 8));
  EXPECT_EQ(c.ninth_of_condition, Scalar::rational(3, 8));
  const ExactBattery b = run_exact_battery(300, 64);
  EXPECT_EQ(b.checks, 300u);
  EXPECT_EQ(b.failures, 0u);
}

TEST(Equivalence, BlockDeterminantMatchesNumericForm) {
  std::mt19937_64 rng(65);
  for (int n = 0; n < 500; ++n) {
    const PointData p = random_point(rng);
    const Equiv4 e = check_equiv_4(p);
    EXPECT_NEAR(e.block_det, e.ninth_cond, 1e-12 * (1 + std::abs(e.ninth_cond)));
  }
}

TEST(Equivalence, DefinitenessBatteries) {
  const EquivBattery b = run_equiv_battery(10000, 66);
  EXPECT_EQ(b.mismatches4, 0u) << b.counterexample;
  EXPECT_EQ(b.mismatches5, 0u) << b.counterexample;
  EXPECT_GT(b.pd4, 300u);
  EXPECT_GT(b.pd5, 100u);
  EXPECT_LT(b.boundary, 50u);
}

TEST(Equivalence, KappaIsNine) {
  const EquivBattery b = run_equiv_battery(5000, 67);
  ASSERT_GT(b.kappa_samples, 4000u);
  EXPECT_NEAR(b.kappa_min, 9, 1e-8);
  EXPECT_NEAR(b.kappa_max, 9, 1e-8);
}

TEST(Equivalence, Det5AgainstCofactorExpansion) {
  std::mt19937_64 rng(68);
  for (int n = 0; n < 200; ++n) {
    const PointData p = random_point(rng);
    const HermitianForm f = build_form_5(p);
    const cplx d = cofactor_det(f.matrix());
    EXPECT_NEAR(d.imag(), 0, 1e-12);
    EXPECT_NEAR(cond_3_12(p), 9 * d.real(), 1e-10 * (1 + std::abs(cond_3_12(p))));
  }
}

TEST(Scaling, ScaleFactorsOfEachField) {
  PointData p = sphere(2);
  p.R1 = cplx(1, 1);
  p.A11 = cplx(1, 0);
  p.A11_1 = cplx(0, 1);
  p.A11_bb = cplx(1, 1);
  p.lapR = 1;
  const PointData q = scale(p, 4.0);
  EXPECT_DOUBLE_EQ(q.R, 0.5);
  EXPECT_EQ(q.A11, cplx(0.25, 0));
  EXPECT_EQ(q.R1, cplx(0.125, 0.125));
  EXPECT_EQ(q.A11_1, cplx(0, 0.125));
  EXPECT_EQ(q.A11_bb, cplx(1.0 / 16, 1.0 / 16));
  EXPECT_DOUBLE_EQ(q.lapR, 1.0 / 16);
  EXPECT_THROW(scale(p, 0.0), std::invalid_argument);
  const PointData same = scale(p, 1.0);
  EXPECT_EQ(same.R, p.R);
  EXPECT_EQ(same.A11_bb, p.A11_bb);
}

TEST(Scaling, LawsHoldOnRandomPoints) {
  std::mt19937_64 rng(69);
  for (int n = 0; n < 300; ++n) {
    PointData p = random_point(rng, n % 3 != 0);
    for (double k : {1.0 / 7, 0.5, 3.0, 100.0}) {
      const ScaleCheck s = scale_check(p, k);
      EXPECT_TRUE(s.ok()) << "k=" << k;
      EXPECT_EQ(s.conditions.size(), p.torsion_free() ? 6u : 5u);
      for (const auto& c : s.conditions) {
        EXPECT_LT(c.rel_error(), 1e-12) << c.name << " k=" << k;
        EXPECT_EQ(c.verdict_base, c.verdict_scaled) << c.name << " k=" << k;
      }
    }
  }
}

TEST(Scaling, Exponents) {
  const ScaleCheck s = scale_check(sphere(1), 2.0);
  std::map<std::string, double> power;
  for (const auto& c : s.conditions) power[c.name] = c.power;
  EXPECT_EQ(power.at("3.11"), -2);
  EXPECT_EQ(power.at("3.12"), -4);
  EXPECT_EQ(power.at("thm-a"), -2);
  EXPECT_EQ(power.at("corollaryC"), -3);
  // Direct check of the Corollary C exponent at the sphere: 20 -> 20 / 8.
  EXPECT_DOUBLE_EQ(corollary_C(scale(sphere(1), 2.0)).value, 2.5);
}

TEST(Json, PointRoundTrip) {
  std::mt19937_64 rng(70);
  PointData p = random_point(rng);
  p.id = "p";
  const PointData q = point_from_json(nlohmann::json::parse(point_to_json(p).dump()));
  EXPECT_EQ(q.id, p.id);
  EXPECT_EQ(q.R, p.R);
  EXPECT_EQ(q.R0, p.R0);
  EXPECT_EQ(q.R1, p.R1);
  EXPECT_EQ(q.lapR, p.lapR);
  EXPECT_EQ(q.A11, p.A11);
  EXPECT_EQ(q.A11_1, p.A11_1);
  EXPECT_EQ(q.A11_b, p.A11_b);
  EXPECT_EQ(q.A11_bb, p.A11_bb);
}

TEST(Json, DefaultsAndErrors) {
  const auto pts = points_from_json(nlohmann::json::parse(R"([{"id":"s","R":1},{"R":2,"A11":0.5}])"));
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_TRUE(pts[0].torsion_free());
  EXPECT_EQ(pts[1].A11, cplx(0.5, 0));
  EXPECT_THROW(points_from_json(nlohmann::json::parse(R"({"R":1})")), std::invalid_argument);
  EXPECT_THROW(point_from_json(nlohmann::json::parse(R"({"id":"x"})")), std::invalid_argument);
  EXPECT_THROW(point_from_json(nlohmann::json::parse(R"({"R":1,"A11":[1,2,3]})")), std::invalid_argument);
}
