#include <gtest/gtest.h>

#include "abdual/bv_complex.hpp"
#include "abdual/wick_engine.hpp"

using namespace abdual;
using GR = GaussianRational;
using G = GradedPolynomial<GR>;

namespace {

BvStructure<GR> two_by_two() {
  BvStructure<GR> bv{DenseMatrix<GR>(2, 2), DenseMatrix<GR>(2, 2)};
  bv.pairing(0, 0) = GR(2L);
  bv.pairing(0, 1) = GR(Rational(1, 3));
  bv.pairing(1, 0) = GR(-1L);
  bv.pairing(1, 1) = GR(5L);
  return bv;
}

}  // namespace

TEST(Graded, AntifieldsAnticommute) {
  const G v0 = G::antifield(1, 2, 0);
  const G v1 = G::antifield(1, 2, 1);
  EXPECT_EQ(v1 * v0, v0 * v1 * GR(-1L));
  EXPECT_TRUE((v0 * v0).is_zero());
  EXPECT_EQ((v0 * v1).degree(), -2);
}

TEST(Graded, LeftAntifieldDerivative) {
  const G v0 = G::antifield(1, 2, 0);
  const G v1 = G::antifield(1, 2, 1);
  EXPECT_EQ(antifield_derivative(v0 * v1, 0), v1);
  EXPECT_EQ(antifield_derivative(v0 * v1, 1), v0 * GR(-1L));
}

TEST(Bv, OperatorContractsFieldsWithAntifields) {
  const auto bv = two_by_two();
  const G x0 = G::field(2, 2, 0);
  const G x1 = G::field(2, 2, 1);
  const G v0 = G::antifield(2, 2, 0);
  const G v1 = G::antifield(2, 2, 1);
  EXPECT_EQ(quantum_bv(v0 * x1, bv), G::constant(2, 2, GR(Rational(1, 3))));
  // D(v0 v1 x0) = P(0,0) v1 - P(1,0) v0
  EXPECT_EQ(quantum_bv(v0 * v1 * x0, bv), v1 * GR(2L) + v0 * GR(1L));
  EXPECT_EQ(poisson_bracket(v1, x0 * x0, bv), x0 * GR(-2L));
  EXPECT_TRUE(poisson_bracket(x0, x1, bv).is_zero());
}

TEST(Bv, BracketRejectsMultiAntifieldTerms) {
  const auto bv = two_by_two();
  const G v0 = G::antifield(2, 2, 0);
  const G v1 = G::antifield(2, 2, 1);
  try {
    poisson_bracket(v0 * v1, G::field(2, 2, 0), bv);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotImplemented);
  }
}

TEST(Bv, ClassicalDifferentialIsTheLinearisedEquationOfMotion) {
  // d_cl v(chi) = -O(2 Q chi): evaluate at a field a
  SpectralForm chi(2, 1, 4);
  chi.set({Wavevector{1, 1}, Phase::kCos, 2}, 0.7);
  chi.set({Wavevector{}, Phase::kCos, 1}, -0.2);
  const TheorySpec t = TheorySpec::pform(2, 1, 1.2, 4);
  const GradedObservable v(t.field_space(), {}, {chi}, GradedPolynomial<Complex>::antifield(0, 1, 0));
  const PolynomialObservable dv = classical_differential(v, t).degree_zero_part();
  SpectralForm a(2, 1, 4);
  a.set({Wavevector{1, 1}, Phase::kCos, 2}, 1.5);
  a.set({Wavevector{}, Phase::kCos, 1}, 2.0);
  const double expected = -2.0 * 1.44 * (0.7 * 1.5 - 0.2 * 2.0);
  EXPECT_NEAR(evaluate(dv, a).real(), expected, 1e-13);
}

TEST(Bv, StokesOnTheSimplestObservable) {
  // W = v(b) O(b): (d_cl + D) W = <b, b> - 2 R^2 O(b)^2, whose expectation is zero
  SpectralForm b(3, 2, 4);
  b.set({Wavevector{0, 1, 1}, Phase::kSin, 3}, 1.3);
  const TheorySpec t = TheorySpec::pform(3, 2, 0.8, 4);
  using GC = GradedPolynomial<Complex>;
  const GradedObservable w(t.field_space(), {b}, {b}, GC::antifield(1, 1, 0) * GC::field(1, 1, 0));
  const GradedObservable dw = total_quantum_differential(w, t);
  EXPECT_EQ(dw.polynomial().max_antifield_count(), 0);
  EXPECT_NEAR(std::abs(expectation_diagrams(dw.degree_zero_part(), t)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(evaluate(dw.degree_zero_part(), SpectralForm(3, 2, 4)) - 1.69), 0.0, 1e-14);
}

TEST(Bv, GaugeInvarianceInTheClosedTheory) {
  const TheorySpec closed = TheorySpec::closed_pform(2, 1, 1.0, 4);
  SpectralForm exact(2, 1, 4);
  exact.set({Wavevector{1, 0}, Phase::kCos, 1}, 1.0);
  SpectralForm coexact(2, 1, 4);
  coexact.set({Wavevector{0, 1}, Phase::kCos, 1}, 1.0);
  EXPECT_TRUE(is_gauge_invariant(PolynomialObservable::power(exact, 2), closed));
  EXPECT_FALSE(is_gauge_invariant(PolynomialObservable::power(coexact, 2), closed));
  EXPECT_THROW(is_gauge_invariant(PolynomialObservable::power(exact, 2), TheorySpec::pform(2, 1, 1.0, 4)), Error);
}
