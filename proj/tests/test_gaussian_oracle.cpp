#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "abdual/gaussian_oracle.hpp"
#include "abdual/rng.hpp"
#include "abdual/wick_engine.hpp"

using namespace abdual;
using GR = GaussianRational;

TEST(Philox, KnownAnswerVectors) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::generate(C{0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Isserlis, ClosedFormMoments) {
  DenseMatrix<GR> cov(2, 2);
  cov(0, 0) = GR(Rational(2));
  cov(1, 1) = GR(Rational(3, 2));
  cov(0, 1) = GR(Rational(-1, 3));
  cov(1, 0) = cov(0, 1);
  const auto g = Gaussian<GR>::centered(cov);
  // E[x^4] = 3 s^2, E[x^2 y^2] = s_xx s_yy + 2 s_xy^2, odd moments vanish
  EXPECT_EQ(moments_isserlis(Polynomial<GR>::monomial({4, 0}, GR(1L)), g), GR(12L));
  EXPECT_EQ(moments_isserlis(Polynomial<GR>::monomial({2, 2}, GR(1L)), g), GR(Rational(3) + Rational(2, 9)));
  EXPECT_EQ(moments_isserlis(Polynomial<GR>::monomial({3, 2}, GR(1L)), g), GR());
  // with a mean: E[x^3] = mu^3 + 3 mu s
  Gaussian<GR> shifted = g;
  shifted.mean = {GR(Rational(1, 2)), GR()};
  EXPECT_EQ(moments_isserlis(Polynomial<GR>::monomial({3, 0}, GR(1L)), shifted), GR(Rational(1, 8) + Rational(3)));
}

TEST(Isserlis, AgreesWithDiagramsOnTheories) {
  SpectralForm b1(2, 0, 4), b2(2, 0, 4);
  b1.set({Wavevector{1, 0}, Phase::kCos, 0}, 1.0);
  b1.set({Wavevector{}, Phase::kCos, 0}, 0.5);
  b2.set({Wavevector{1, 0}, Phase::kCos, 0}, -0.3);
  b2.set({Wavevector{1, 1}, Phase::kSin, 0}, 0.8);
  const TheorySpec t = TheorySpec::scalar(2, 0.6, 4, MassSign::kPlus);
  Polynomial<Complex> poly(2);
  poly.add_term({2, 2}, 1.0);
  poly.add_term({1, 3}, Complex(0.0, 1.0));
  const PolynomialObservable p(t.field_space(), {{b1, "a"}, {b2, "b"}}, poly);
  EXPECT_NEAR(std::abs(expectation_diagrams(p, t) - moments_isserlis(p, gaussian_sector(p, t))), 0.0, 1e-13);
}

TEST(MonteCarlo, WithinStandardErrorsAndThreadIndependent) {
  DenseMatrix<Complex> cov(2, 2);
  cov(0, 0) = 1.0;
  cov(1, 1) = 0.5;
  cov(0, 1) = cov(1, 0) = 0.2;
  const auto g = GaussianSpec::centered(cov);
  Polynomial<Complex> poly(2);
  poly.add_term({2, 2}, 1.0);
  poly.add_term({1, 1}, 2.0);
  const Complex exact = 1.0 * 0.5 + 2.0 * 0.04 + 2.0 * 0.2;
  const MonteCarloResult one = moments_montecarlo(poly, g, 50000, 17, 1);
  const MonteCarloResult four = moments_montecarlo(poly, g, 50000, 17, 4);
  EXPECT_EQ(one.estimate, four.estimate);
  EXPECT_EQ(one.standard_error, four.standard_error);
  EXPECT_LE(std::abs(one.estimate - exact), 4.0 * one.standard_error);
  EXPECT_EQ(one.rng, "philox4x32-10");
  EXPECT_NE(moments_montecarlo(poly, g, 50000, 18, 1).estimate, one.estimate);
}

TEST(MonteCarlo, RejectsIndefiniteCovariance) {
  // m^2 = 2.25 sits between Laplacian eigenvalues 2 and 4: the constant mode has Q < 0
  const TheorySpec t = TheorySpec::scalar(2, 1.5, 4);
  SpectralForm b(2, 0, 4);
  b.set({Wavevector{}, Phase::kCos, 0}, 1.0);
  const PolynomialObservable p = PolynomialObservable::power(b, 2);
  try {
    moments_montecarlo(p, gaussian_sector(p, t), 10000, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotPositive);
  }
  EXPECT_THROW(moments_montecarlo(p, gaussian_sector(p, TheorySpec::scalar(2, 1.5, 4, MassSign::kPlus)), 10, 1, 1),
               Error);
}

TEST(Maxwell, HarmonicSmearingIsAThetaRatio) {
  const double r = 0.6;
  const double c = 0.7;
  SpectralForm b(2, 1, 4);
  b.set({Wavevector{}, Phase::kCos, 1}, c);
  const TheorySpec t = TheorySpec::closed_pform(2, 1, r, 4);
  const LatticeExpectation got = maxwell_expectation(PolynomialObservable::power(b, 2), t, 40.0);
  // lattice element m dx^1 with period 2 sqrt(pi) R m; its unit-mode coefficient is 2 sqrt(pi) R m
  const double g = 2.0 * std::sqrt(std::numbers::pi) * r;
  double num = 0.0, den = 0.0;
  for (int m = -40; m <= 40; ++m) {
    const double w = std::exp(-r * r * g * g * m * m);
    num += w * (c * g * m) * (c * g * m);
    den += w;
  }
  EXPECT_NEAR(got.value.real(), num / den, 1e-12);
  EXPECT_LE(got.tail_bound, 1e-12);
  EXPECT_FALSE(got.warning);
}

TEST(Maxwell, ExactSmearingIsPurelyGaussian) {
  const double r = 1.3;
  SpectralForm b(2, 1, 4);
  b.set({Wavevector{1, 0}, Phase::kSin, 1}, 1.0);  // d(-cos x^1) direction: exact
  const TheorySpec t = TheorySpec::closed_pform(2, 1, r, 4);
  const LatticeExpectation got = maxwell_expectation(PolynomialObservable::power(b, 2), t, 40.0);
  EXPECT_NEAR(got.value.real(), 1.0 / (2.0 * r * r), 1e-14);
}

TEST(Maxwell, TinyCutoffWarns) {
  SpectralForm b(2, 1, 4);
  b.set({Wavevector{}, Phase::kCos, 1}, 1.0);
  const LatticeExpectation got =
      maxwell_expectation(PolynomialObservable::power(b, 2), TheorySpec::closed_pform(2, 1, 1.0, 4), 1.0);
  EXPECT_TRUE(got.warning);
  EXPECT_EQ(got.sectors, 1u);
}

TEST(Action, IsCouplingTimesNorm) {
  SpectralForm a(2, 1, 4);
  a.set({Wavevector{1, 0}, Phase::kCos, 2}, 3.0);
  EXPECT_NEAR(action(a, TheorySpec::pform(2, 1, 0.5, 4)), 0.25 * 9.0, 1e-14);
}
