#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "abdual/wick_engine.hpp"
#include "abdual/wilson_thooft.hpp"

using namespace abdual;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double max_difference(const SpectralForm& a, const SpectralForm& b) { return (a - b).max_abs(); }

}  // namespace

TEST(Chains, CycleMatchesParametricSegment) {
  const CoordinateCycle cycle{0b01, {0.0, 0.7}};
  ParametricChain segment{1, {{{0.0, 0.7}, {kTwoPi, 0.7}}}};
  const SmearedChain a = smear_chain(cycle, 2, 0.05, 6);
  const SmearedChain b = smear_chain(segment, 2, 0.05, 6);
  EXPECT_LE(max_difference(a.smearing, b.smearing), 1e-10);
  EXPECT_LE(b.quadrature_error, kQuadratureTolerance);
  // only k_1 = 0 modes along dx^1 survive
  for (const auto& [m, c] : a.smearing.coefficients()) {
    EXPECT_EQ(m.indices, 0b01);
    EXPECT_EQ(m.k[0], 0);
  }
}

TEST(Chains, SquareFromTwoTrianglesMatchesTwoCycle) {
  const double z = 1.1;
  const CoordinateCycle cycle{0b011, {0.0, 0.0, z}};
  ParametricChain square{2,
                         {{{0.0, 0.0, z}, {kTwoPi, 0.0, z}, {kTwoPi, kTwoPi, z}},
                          {{0.0, 0.0, z}, {kTwoPi, kTwoPi, z}, {0.0, kTwoPi, z}}}};
  const SmearedChain a = smear_chain(cycle, 3, 0.1, 3);
  const SmearedChain b = smear_chain(square, 3, 0.1, 3);
  EXPECT_LE(max_difference(a.smearing, b.smearing), 1e-9);
}

TEST(Chains, RejectsBadInput) {
  EXPECT_THROW(smear_chain(CoordinateCycle{0b01, {0.0, 0.0}}, 2, 0.0, 4), Error);
  EXPECT_THROW(smear_chain(CoordinateCycle{0b01, {0.0}}, 2, 0.1, 4), Error);
  EXPECT_THROW(smear_chain(ParametricChain{1, {{{0.0, 0.0}}}}, 2, 0.1, 4), Error);
}

TEST(Exponentials, WilsonInPFormTheoryIsGaussian) {
  const double r = 1.3;
  const SpectralForm beta = smear_chain(CoordinateCycle{0b10, {0.4, 0.0}}, 2, 0.1, 8).smearing;
  const TheorySpec t = TheorySpec::pform(2, 1, r, 8);
  const double g = pairing(beta, beta).real();
  for (double q : {0.5, 1.0, 2.0}) {
    const auto w = ExponentialObservable::wilson(beta, q);
    EXPECT_NEAR(expectation_exponential(w, t, 10.0).value.real(), std::exp(-q * q * g / (4.0 * r * r)), 1e-13);
  }
}

TEST(Exponentials, TaylorTruncationConverges) {
  SpectralForm beta(2, 1, 4);
  beta.set({Wavevector{1, 0}, Phase::kCos, 2}, 1.5);
  const TheorySpec t = TheorySpec::pform(2, 1, 0.9, 4);
  const auto w = ExponentialObservable::wilson(beta, 0.8);
  const double exact = expectation_exponential(w, t, 10.0).value.real();
  double previous = 1.0;
  for (int n : {4, 8, 16, 24}) {
    const double err = std::abs(expectation_diagrams(taylor_truncate(w, n), t) - exact);
    EXPECT_LE(err, previous);
    previous = err;
  }
  EXPECT_LE(previous, 1e-12);
}

TEST(Exponentials, InverseUndoesDual) {
  const double r = 0.75;
  const SpectralForm beta = smear_chain(CoordinateCycle{0b01, {0.0, 1.9}}, 2, 0.05, 8).smearing;
  const TheorySpec t = TheorySpec::pform(2, 1, r, 8);
  const auto w = ExponentialObservable::wilson(beta, 1.4);
  const ExponentialDual d = dual_exponential(w, t);
  EXPECT_EQ(d.observable.kind, ExponentialKind::kThooft);
  EXPECT_NEAR(std::abs(d.prefactor - std::exp(-1.96 * pairing(beta, beta).real() / (4.0 * r * r))), 0.0, 1e-14);
  EXPECT_NEAR(d.theory.coupling, 1.0 / (2.0 * r), 1e-15);
  const ExponentialDual back = inverse_dual_exponential(d.observable, d.theory);
  EXPECT_EQ(back.observable.kind, ExponentialKind::kWilson);
  EXPECT_NEAR(std::abs(back.observable.charge - 1.4), 0.0, 1e-14);
  EXPECT_LE(max_difference(back.observable.smearing, beta), 1e-14);
  EXPECT_NEAR(std::abs(d.prefactor * back.prefactor - 1.0), 0.0, 1e-13);
}

TEST(Exponentials, DualRequiresWilsonOnPFormTheory) {
  SpectralForm beta(2, 1, 4);
  beta.set({Wavevector{}, Phase::kCos, 1}, 1.0);
  const auto w = ExponentialObservable::wilson(beta, 1.0);
  try {
    dual_exponential(w, TheorySpec::closed_pform(2, 1, 1.0, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kVariantMismatch);
  }
  EXPECT_THROW(dual_exponential(ExponentialObservable::thooft(beta, 1.0), TheorySpec::pform(2, 1, 1.0, 4)), Error);
  EXPECT_THROW(taylor_truncate(w, -1), Error);
}
