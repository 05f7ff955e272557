#pragma once

// Pointwise rigidity conditions on curvature/torsion data, the Hermitian
// forms they come from, Sylvester tests and the theta -> k theta scaling.

#include "phb/scalar.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace phb::rigidity {

using cplx = std::complex<double>;

/// R, A11 and their derivatives at one point, in the units of a fixed contact
/// form.  T is the real type (double; long double for the scaling checks).
template <class T>
struct BasicPointData {
  using C = std::complex<T>;
  std::string id;
  T R = 0;
  T R0 = 0;    // R_{,0}
  C R1{};      // R_{,1}; R_{,1bar} = conj
  T lapR = 0;  // sublaplacian of R
  C A11{};
  C A11_1{};   // A11_{,1}
  C A11_b{};   // A11_{,1bar}; Ab1b1_{,1} = conj
  C A11_bb{};  // A11_{,1bar 1bar}

  bool torsion_free() const { return A11 == C{} && A11_1 == C{} && A11_b == C{} && A11_bb == C{}; }

  template <class U>
  BasicPointData<U> as() const {
    using D = std::complex<U>;
    auto c = [](const C& z) { return D(U(z.real()), U(z.imag())); };
    return {id, U(R), U(R0), c(R1), U(lapR), c(A11), c(A11_1), c(A11_b), c(A11_bb)};
  }
};

using PointData = BasicPointData<double>;

/// |grad_b R|^2 = 2 |R_{,1}|^2.
template <class T>
T grad_sq(const BasicPointData<T>& p) {
  return 2 * std::norm(p.R1);
}

/// |z|^{2/3} and |z|^{4/3} through the real cube root of |z|^2.
template <class T>
T abs_pow_2_3(std::complex<T> z) {
  return std::cbrt(std::norm(z));
}
template <class T>
T abs_pow_4_3(std::complex<T> z) {
  const T t = std::cbrt(std::norm(z));
  return t * t;
}

/// Default relative tolerance for "> 0" versus "= 0" decisions.
inline constexpr double kDefaultEps = 1e-12;

/// sqrt3 R_{,0} - 2 Im A11_{,1bar1bar}.
template <class T>
T thmA_value(const BasicPointData<T>& p) {
  return std::sqrt(T(3)) * p.R0 - 2 * p.A11_bb.imag();
}

struct ThmA {
  double value = 0;
  bool verdict_a = false;
  bool verdict_b = false;
};

inline ThmA thmA_condition(const PointData& p, double eps = kDefaultEps) {
  ThmA r;
  r.value = thmA_value(p);
  const double scale = std::max({1.0, std::sqrt(3.0) * std::abs(p.R0), 2 * std::abs(p.A11_bb.imag())});
  const bool zero = std::abs(r.value) <= eps * scale;
  r.verdict_a = p.R < 0 && r.value > 0 && !zero;
  r.verdict_b = p.R < 0 && zero;
  return r;
}

/// 3/8 R^2 - 2 R |A11,1|^{2/3} - 25 |A11|^2.
template <class T>
T cond_3_11(const BasicPointData<T>& p) {
  return T(3) / 8 * p.R * p.R - 2 * p.R * abs_pow_2_3(p.A11_1) - 25 * std::norm(p.A11);
}

/// 5/48 R_{,1bar} - 2i Ab1b1_{,1}: the (E11,1 ; E11) coupling.
template <class T>
std::complex<T> cross_coupling(const BasicPointData<T>& p) {
  return T(5) / 48 * std::conj(p.R1) - std::complex<T>(0, 2) * std::conj(p.A11_b);
}

template <class T>
T cond_3_12(const BasicPointData<T>& p) {
  const T q = abs_pow_2_3(p.A11_1);
  const T brace = T(83) / 3456 * p.R * p.R + T(55) / 1152 * p.lapR + T(5) / 4 * std::norm(p.A11) -
                  T(5) / 36 * q * q - T(10) / 9 * p.A11_bb.imag();
  return cond_3_11(p) * brace - T(15) / 8 * (p.R / 8 - T(2) / 3 * q) * std::norm(cross_coupling(p));
}

/// 4R(5R^2 + 3 lapR) - 3 |grad_b R|^2 (meaningful for torsion-free data).
template <class T>
T corollary_C_value(const BasicPointData<T>& p) {
  return 4 * p.R * (5 * p.R * p.R + 3 * p.lapR) - 3 * grad_sq(p);
}

struct CorollaryC {
  double value = 0;
  bool verdict = false;
};

/// Requires torsion-free data; throws std::invalid_argument otherwise.
inline CorollaryC corollary_C(const PointData& p) {
  if (!p.torsion_free()) throw std::invalid_argument("corollary C requires A11 = 0 (point " + p.id + ")");
  CorollaryC r;
  r.value = corollary_C_value(p);
  r.verdict = p.R > 0 && r.value > 0;
  return r;
}

/// R_{,0} - 2 Re A11_{,1bar1bar}: zero for data obeying the Bianchi identity.
inline double bianchi_residual(const PointData& p) { return p.R0 - 2 * p.A11_bb.real(); }

inline bool bianchi_consistent(const PointData& p, double eps = 1e-9) {
  const double scale = std::max({1.0, std::abs(p.R0), 2 * std::abs(p.A11_bb.real())});
  return std::abs(bianchi_residual(p)) <= eps * scale;
}

/// Square complex matrix equal to its conjugate transpose.
class HermitianForm {
public:
  explicit HermitianForm(Eigen::MatrixXcd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("HermitianForm: matrix is not square");
    for (Eigen::Index i = 0; i < m_.rows(); ++i)
      for (Eigen::Index j = 0; j < m_.cols(); ++j)
        if (m_(i, j) != std::conj(m_(j, i))) throw std::invalid_argument("HermitianForm: matrix is not Hermitian");
  }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  Eigen::Index size() const { return m_.rows(); }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

private:
  Eigen::MatrixXcd m_;
};

/// Entry M of the five-variable form.
inline double form5_M(const PointData& p) {
  return 29.0 / 48 * p.R * p.R + 11.0 / 48 * p.lapR + 6 * std::norm(p.A11) - 2.0 / 3 * abs_pow_4_3(p.A11_1) -
         16.0 / 3 * p.A11_bb.imag();
}

/// Variables (E11,1bar1, iE11,0, E11,1, E11,1bar).
inline HermitianForm build_form_4(const PointData& p) {
  const cplx i(0, 1);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m(0, 0) = 29.0 / 48;
  m(0, 1) = m(1, 0) = -1.0;
  m(1, 1) = 2.0;
  m(2, 2) = p.R / 3;
  m(2, 3) = 5.0 / 3 * i * std::conj(p.A11);
  m(3, 2) = std::conj(m(2, 3));
  m(3, 3) = p.R / 8 - 2.0 / 3 * abs_pow_2_3(p.A11_1);
  return HermitianForm(std::move(m));
}

/// Variables (E11,1bar1, iE11,0, E11,1, E11,1bar, E11).
inline HermitianForm build_form_5(const PointData& p) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(5, 5);
  m.topLeftCorner(4, 4) = build_form_4(p).matrix();
  m(0, 4) = m(4, 0) = -p.R / 6;
  m(1, 4) = m(4, 1) = 2 * p.R / 3;
  m(2, 4) = cross_coupling(p);
  m(4, 2) = std::conj(m(2, 4));
  m(4, 4) = form5_M(p);
  return HermitianForm(std::move(m));
}

struct Sylvester {
  bool positive_definite = false;
  std::vector<double> minors;  // leading principal minors, real for Hermitian input
};

/// Sylvester's criterion: positive definite iff every leading principal minor is > 0.
inline Sylvester is_positive_definite(const HermitianForm& h) {
  Sylvester s;
  s.positive_definite = true;
  for (Eigen::Index k = 1; k <= h.size(); ++k) {
    const double d = h.matrix().topLeftCorner(k, k).determinant().real();
    s.minors.push_back(d);
    if (!(d > 0)) s.positive_definite = false;
  }
  return s;
}

/// Rescale data for theta -> k theta.
template <class T>
BasicPointData<T> scale(const BasicPointData<T>& p, T k) {
  if (!(k > 0)) throw std::invalid_argument("scale factor must be positive");
  const T k1 = 1 / k, k32 = std::pow(k, T(-1.5)), k2 = 1 / (k * k);
  BasicPointData<T> q = p;
  q.R *= k1;
  q.A11 *= k1;
  q.R1 *= k32;
  q.A11_1 *= k32;
  q.A11_b *= k32;
  q.A11_bb *= k2;
  q.lapR *= k2;
  q.R0 *= k2;
  return q;
}

/// Exact determinant of the torsion block [[R/3, 5i/3 conj A], [-5i/3 A, R/8 - 2/3 q]]
/// and (1/9)(3/8 R^2 - 2 R q - 25|A|^2), with q standing for |A11,1|^{2/3}.
struct ExactBlockCheck {
  Scalar det;
  Scalar ninth_of_condition;
  bool equal() const { return det == ninth_of_condition; }
};

inline ExactBlockCheck torsion_block_exact(const Rational& R, const Rational& q, const Rational& a_re,
                                           const Rational& a_im) {
  const Scalar r(R), qq(q), i = Scalar::i();
  const Scalar a(a_re, 0, a_im, 0);
  const Scalar m00 = r * Scalar::rational(1, 3);
  const Scalar m01 = Scalar::rational(5, 3) * i * a.conj();
  const Scalar m10 = -Scalar::rational(5, 3) * i * a;
  const Scalar m11 = r * Scalar::rational(1, 8) - Scalar::rational(2, 3) * qq;
  ExactBlockCheck out;
  out.det = m00 * m11 - m01 * m10;
  const Scalar abs2 = a * a.conj();
  out.ninth_of_condition =
      Scalar::rational(1, 9) * (Scalar::rational(3, 8) * r * r - Scalar(2) * r * qq - Scalar(25) * abs2);
  return out;
}

/// Relative distance of x from zero against a magnitude scale.
inline bool near_zero(double x, double scale, double eps) { return std::abs(x) <= eps * std::max(1.0, scale); }

struct Equiv4 {
  double block_det = 0;
  double ninth_cond = 0;
  bool pd4 = false;
  bool predicted = false;  // R > 0 and (3.11) > 0
  bool boundary = false;   // within the eps band of a decision boundary
  bool agree() const { return pd4 == predicted; }
};

inline Equiv4 check_equiv_4(const PointData& p, double eps = 1e-9) {
  Equiv4 r;
  const HermitianForm f = build_form_4(p);
  r.block_det = f.matrix().bottomRightCorner(2, 2).determinant().real();
  const double c = cond_3_11(p);
  r.ninth_cond = c / 9;
  r.pd4 = is_positive_definite(f).positive_definite;
  r.predicted = p.R > 0 && c > 0;
  const double sc = p.R * p.R + std::abs(p.R) * abs_pow_2_3(p.A11_1) + std::norm(p.A11);
  r.boundary = near_zero(p.R, std::abs(p.R), eps) || near_zero(c, sc, eps);
  return r;
}

struct Equiv5 {
  double det5 = 0;
  double cond = 0;
  double kappa = 0;  // cond / det5
  bool pd4 = false;
  bool pd5 = false;
  bool predicted = false;  // pd4 and (3.12) > 0
  bool boundary = false;
  bool agree() const { return pd5 == predicted; }
};

inline Equiv5 check_equiv_5(const PointData& p, double eps = 1e-9) {
  Equiv5 r;
  const HermitianForm f = build_form_5(p);
  r.det5 = f.matrix().determinant().real();
  r.cond = cond_3_12(p);
  r.kappa = r.det5 != 0 ? r.cond / r.det5 : 0;
  const Equiv4 e4 = check_equiv_4(p, eps);
  r.pd4 = e4.pd4;
  r.pd5 = is_positive_definite(f).positive_definite;
  r.predicted = r.pd4 && r.cond > 0;
  // Scale of (3.12): magnitude of its two products.
  const double q = abs_pow_2_3(p.A11_1);
  const double s11 = p.R * p.R + std::abs(p.R) * q + std::norm(p.A11);
  const double sbr = p.R * p.R + std::abs(p.lapR) + std::norm(p.A11) + q * q + std::abs(p.A11_bb.imag());
  const double sc = s11 * sbr + (std::abs(p.R) + q) * std::norm(cross_coupling(p));
  r.boundary = e4.boundary || near_zero(r.cond, sc, eps);
  return r;
}

/// Seeded random point; ranges straddle every decision boundary.
inline PointData random_point(std::mt19937_64& rng, bool torsion = true) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto c = [&](double s) { return cplx(s * u(rng), s * u(rng)); };
  PointData p;
  p.R = 1.5 * u(rng) + 0.5;
  p.lapR = 2 * u(rng);
  p.R1 = c(1.0);
  if (torsion) {
    p.A11 = c(0.15);
    p.A11_1 = c(0.2);
    p.A11_b = c(0.2);
    p.A11_bb = c(0.3);
  }
  p.R0 = 2 * p.A11_bb.real();
  return p;
}

// JSON: complex numbers are [re, im]; missing torsion fields default to 0.

inline cplx complex_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return {};
  const auto& v = j.at(key);
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2) throw std::invalid_argument(std::string("field ") + key + " must be [re, im]");
  return {v.at(0).get<double>(), v.at(1).get<double>()};
}

inline PointData point_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("point record must be an object");
  PointData p;
  p.id = j.value("id", std::string());
  if (!j.contains("R")) throw std::invalid_argument("point " + p.id + " has no R");
  p.R = j.at("R").get<double>();
  p.R0 = j.value("R0", 0.0);
  p.lapR = j.value("lapR", 0.0);
  p.R1 = complex_from_json(j, "R1");
  p.A11 = complex_from_json(j, "A11");
  p.A11_1 = complex_from_json(j, "A11_1");
  p.A11_b = complex_from_json(j, "A11_b");
  p.A11_bb = complex_from_json(j, "A11_bb");
  return p;
}

inline nlohmann::json complex_to_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline nlohmann::json point_to_json(const PointData& p) {
  return {{"id", p.id},
          {"R", p.R},
          {"R0", p.R0},
          {"R1", complex_to_json(p.R1)},
          {"lapR", p.lapR},
          {"A11", complex_to_json(p.A11)},
          {"A11_1", complex_to_json(p.A11_1)},
          {"A11_b", complex_to_json(p.A11_b)},
          {"A11_bb", complex_to_json(p.A11_bb)}};
}

inline std::vector<PointData> points_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("point file must hold a JSON array");
  std::vector<PointData> out;
  for (const auto& r : j) out.push_back(point_from_json(r));
  return out;
}

// ---- batteries shared by the CLI and the tests -----------------------------

/// Exact block-determinant identity on seeded random rational data.
struct ExactBattery {
  std::size_t checks = 0;
  std::size_t failures = 0;
};

inline ExactBattery run_exact_battery(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-60, 60), den(1, 17);
  auto q = [&] { return Rational(num(rng), den(rng)); };
  ExactBattery b;
  for (std::size_t k = 0; k < n; ++k) {
    Rational qq = q();
    if (qq < 0) qq = -qq;
    ++b.checks;
    if (!torsion_block_exact(q(), qq, q(), q()).equal()) ++b.failures;
  }
  return b;
}

struct EquivBattery {
  std::size_t samples = 0;
  std::size_t mismatches4 = 0;
  std::size_t mismatches5 = 0;
  std::size_t boundary = 0;  // samples inside the eps band (excluded)
  std::size_t pd4 = 0;
  std::size_t pd5 = 0;
  std::size_t kappa_samples = 0;
  double kappa_min = 0;
  double kappa_max = 0;
  std::string counterexample;  // JSON of the first mismatching point
  double kappa_spread() const { return kappa_samples ? (kappa_max - kappa_min) / std::abs(kappa_max) : 0; }
  bool ok() const { return mismatches4 == 0 && mismatches5 == 0; }
};

/// PD(form_4) <=> (R > 0 and (3.11) > 0), PD(form_5) <=> (PD(form_4) and (3.12) > 0),
/// and the ratio kappa = (3.12) / det(form_5) over seeded random points.
inline EquivBattery run_equiv_battery(std::size_t n, std::uint64_t seed, double eps = 1e-9) {
  std::mt19937_64 rng(seed);
  EquivBattery b;
  b.samples = n;
  for (std::size_t k = 0; k < n; ++k) {
    PointData p = random_point(rng);
    p.id = "sample-" + std::to_string(k);
    const Equiv4 e4 = check_equiv_4(p, eps);
    const Equiv5 e5 = check_equiv_5(p, eps);
    b.pd4 += e4.pd4;
    b.pd5 += e5.pd5;
    if (e4.boundary || e5.boundary) {
      ++b.boundary;
      continue;
    }
    const bool bad4 = !e4.agree(), bad5 = !e5.agree();
    b.mismatches4 += bad4;
    b.mismatches5 += bad5;
    if ((bad4 || bad5) && b.counterexample.empty()) b.counterexample = point_to_json(p).dump();
    // kappa only where det(form_5) is well away from zero.
    if (std::abs(e5.det5) > 1e-6) {
      if (b.kappa_samples == 0) b.kappa_min = b.kappa_max = e5.kappa;
      b.kappa_min = std::min(b.kappa_min, e5.kappa);
      b.kappa_max = std::max(b.kappa_max, e5.kappa);
      ++b.kappa_samples;
    }
  }
  return b;
}

struct SylvesterBattery {
  std::size_t matrices = 0;
  std::size_t disagreements = 0;
  std::size_t boundary = 0;
  std::size_t positive = 0;  // positive definite by the eigenvalue oracle
};

/// Sylvester verdicts against the sign of the smallest eigenvalue on random
/// Hermitian matrices of size 2..6.
inline SylvesterBattery run_sylvester_battery(std::size_t n, std::uint64_t seed, double eps = 1e-9) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> size(2, 6);
  SylvesterBattery b;
  for (std::size_t k = 0; k < n; ++k) {
    const int dim = size(rng);
    Eigen::MatrixXcd g(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) g(i, j) = cplx(u(rng), u(rng));
    // Gram matrix shifted across zero: both verdicts occur often.
    Eigen::MatrixXcd m = g * g.adjoint() - 0.25 * dim * (u(rng) + 0.6) * Eigen::MatrixXcd::Identity(dim, dim);
    for (int i = 0; i < dim; ++i) {
      m(i, i) = m(i, i).real();
      for (int j = i + 1; j < dim; ++j) m(j, i) = std::conj(m(i, j));
    }
    const HermitianForm h(m);
    const Sylvester s = is_positive_definite(h);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    ++b.matrices;
    bool near = std::abs(lmin) <= eps * scale;
    for (std::size_t j = 0; j < s.minors.size(); ++j)
      near = near || std::abs(s.minors[j]) <= eps * std::pow(scale, double(j + 1));
    if (near) {
      ++b.boundary;
      continue;
    }
    b.positive += lmin > 0;
    if (s.positive_definite != (lmin > 0)) ++b.disagreements;
  }
  return b;
}

/// Scaling laws: condition name, exponent of k, value and verdict.
struct ScaledCondition {
  std::string name;
  double power = 0;
  double base = 0;
  double scaled = 0;
  bool verdict_base = false;
  bool verdict_scaled = false;
  double rel_error() const {
    if (base == 0 && scaled == 0) return 0;
    return std::abs(scaled - base) / std::max(std::abs(base), std::abs(scaled));
  }
};

struct ScaleCheck {
  std::string id;
  double k = 1;
  std::vector<ScaledCondition> conditions;
  bool ok(double tol = 1e-12) const {
    for (const auto& c : conditions)
      if (c.rel_error() >= tol || c.verdict_base != c.verdict_scaled) return false;
    return true;
  }
};

/// Compare every condition at p with k^power times its value at scale(p, k).
/// Values are evaluated in long double so that cancellation inside a
/// condition does not mask the scaling law; verdicts use the double path.
inline ScaleCheck scale_check(const PointData& p, double k) {
  using L = long double;
  const PointData q = scale(p, k);
  const BasicPointData<L> pl = p.as<L>();
  const BasicPointData<L> ql = scale(pl, L(k));
  ScaleCheck out;
  out.id = p.id;
  out.k = k;
  auto add = [&](std::string name, double power, L a, L b, bool va, bool vb) {
    // Undo the expected factor so base and scaled are directly comparable.
    out.conditions.push_back({std::move(name), power, double(a), double(b * std::pow(L(k), L(-power))), va, vb});
  };
  add("3.11", -2, cond_3_11(pl), cond_3_11(ql), cond_3_11(p) > 0, cond_3_11(q) > 0);
  add("3.12", -4, cond_3_12(pl), cond_3_12(ql), cond_3_12(p) > 0, cond_3_12(q) > 0);
  const ThmA ta = thmA_condition(p), tb = thmA_condition(q);
  add("thm-a", -2, thmA_value(pl), thmA_value(ql), ta.verdict_a || ta.verdict_b, tb.verdict_a || tb.verdict_b);
  if (p.torsion_free()) {
    const CorollaryC ca = corollary_C(p), cb = corollary_C(q);
    add("corollaryC", -3, corollary_C_value(pl), corollary_C_value(ql), ca.verdict, cb.verdict);
  }
  const bool pd4a = is_positive_definite(build_form_4(p)).positive_definite;
  const bool pd4b = is_positive_definite(build_form_4(q)).positive_definite;
  const bool pd5a = is_positive_definite(build_form_5(p)).positive_definite;
  const bool pd5b = is_positive_definite(build_form_5(q)).positive_definite;
  out.conditions.push_back({"form4-pd", 0, double(pd4a), double(pd4b), pd4a, pd4b});
  out.conditions.push_back({"form5-pd", 0, double(pd5a), double(pd5b), pd5a, pd5b});
  return out;
}

}  // namespace phb::rigidity
