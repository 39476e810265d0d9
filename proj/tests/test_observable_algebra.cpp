#include <gtest/gtest.h>

#include <random>

#include "abdual/observable_algebra.hpp"

using namespace abdual;

namespace {

SpectralForm mode_form(int n, int p, int cutoff, std::initializer_list<std::pair<FormMode, double>> entries) {
  SpectralForm f(n, p, cutoff);
  for (const auto& [m, c] : entries) f.set(m, c);
  return f;
}

SpectralForm random_form(std::mt19937_64& rng, int n, int p, int cutoff) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpectralForm f(n, p, cutoff);
  for (const auto& m : ModeBasis::get(n, p, cutoff)->modes()) f.set(m, u(rng));
  return f;
}

const FormMode kA{Wavevector{1, 0}, Phase::kCos, 1};
const FormMode kB{Wavevector{0, 1}, Phase::kSin, 2};
const FormMode kHarmonic{Wavevector{}, Phase::kCos, 1};

}  // namespace

TEST(Observables, EvaluateIsPolynomialInPairings) {
  std::mt19937_64 rng(9);
  const SpectralForm b1 = random_form(rng, 2, 1, 4);
  const SpectralForm b2 = random_form(rng, 2, 1, 4);
  const SpectralForm a = random_form(rng, 2, 1, 4);
  Polynomial<Complex> poly(2);
  poly.add_term({2, 1}, Complex(0.5, 1.0));
  poly.add_term({0, 0}, 3.0);
  const PolynomialObservable p({2, 1, 4}, {{b1, "x"}, {b2, "y"}}, poly);
  double x = 0.0, y = 0.0;
  for (const auto& [m, c] : a.coefficients()) {
    x += (c * b1.coefficient(m)).real();
    y += (c * b2.coefficient(m)).real();
  }
  const Complex expected = Complex(0.5, 1.0) * x * x * y + 3.0;
  EXPECT_NEAR(std::abs(evaluate(p, a) - expected), 0.0, 1e-12);
}

TEST(Observables, CanonicaliseMergesDependentGenerators) {
  const SpectralForm b = mode_form(2, 1, 4, {{kA, 1.0}, {kB, 2.0}});
  Polynomial<Complex> poly(2);
  poly.add_term({1, 1}, 1.0);  // O_b * O_{2b} = 2 O_b^2
  const PolynomialObservable p({2, 1, 4}, {{b, "O"}, {b * 2.0, "O"}}, poly);
  const PolynomialObservable c = canonicalise(p);
  ASSERT_EQ(c.num_generators(), 1u);
  EXPECT_NEAR(std::abs(c.polynomial().coefficient({2}) - 2.0), 0.0, 1e-12);
}

TEST(Observables, CanonicalisePreservesValues) {
  std::mt19937_64 rng(10);
  const SpectralForm b1 = random_form(rng, 2, 1, 2);
  const SpectralForm b2 = random_form(rng, 2, 1, 2);
  const SpectralForm b3 = b1 * 0.5 - b2 * 1.5;
  Polynomial<Complex> poly(4);
  poly.add_term({1, 1, 1, 0}, Complex(1.0, -0.5));
  poly.add_term({0, 0, 2, 3}, 2.0);
  const PolynomialObservable p({2, 1, 2}, {{b1, "a"}, {b2, "b"}, {b3, "c"}, {SpectralForm(2, 1, 2), "zero"}}, poly);
  const PolynomialObservable c = canonicalise(p);
  EXPECT_EQ(c.num_generators(), 2u);
  for (int trial = 0; trial < 5; ++trial) {
    const SpectralForm a = random_form(rng, 2, 1, 2);
    EXPECT_NEAR(std::abs(evaluate(p, a) - evaluate(c, a)), 0.0, 1e-10);
  }
}

TEST(Observables, CanonicaliseKeepsIndependentSetsUnchanged) {
  const SpectralForm b1 = mode_form(2, 1, 4, {{kA, 1.0}});
  const SpectralForm b2 = mode_form(2, 1, 4, {{kB, 1.0}});
  const PolynomialObservable p({2, 1, 4}, {{b1, "a"}, {b2, "b"}}, Polynomial<Complex>::monomial({1, 2}, 1.0));
  EXPECT_EQ(canonicalise(p), p);
}

TEST(Observables, RestrictionDropsCoexactPart) {
  // cos(x^2) dx^1 is coexact on T^2; dx^1 is harmonic
  const SpectralForm coexact = mode_form(2, 1, 4, {{{Wavevector{0, 1}, Phase::kCos, 1}, 1.0}});
  const SpectralForm mixed = coexact + mode_form(2, 1, 4, {{kHarmonic, 0.5}});
  const PolynomialObservable p = PolynomialObservable::power(mixed, 2);
  const PolynomialObservable r = restrict_to_closed(p);
  ASSERT_EQ(r.num_generators(), 1u);
  EXPECT_EQ(r.generators()[0].smearing, mode_form(2, 1, 4, {{kHarmonic, 0.5}}));
  EXPECT_EQ(restrict_to_closed(PolynomialObservable::power(coexact, 3)).num_generators(), 0u);
}

TEST(Observables, StarTransportChangesDegree) {
  const SpectralForm b = mode_form(3, 1, 2, {{{Wavevector{1, 0, 0}, Phase::kSin, 2}, 1.0}});
  const PolynomialObservable p = PolynomialObservable::power(b, 3);
  const PolynomialObservable s = star_transport(p);
  EXPECT_EQ(s.degree(), 2);
  EXPECT_EQ(inverse_star_transport(s), p);
}

TEST(Observables, SupportOrthogonality) {
  const PolynomialObservable p = PolynomialObservable::power(mode_form(2, 1, 4, {{kA, 1.0}}), 2);
  const PolynomialObservable q = PolynomialObservable::power(mode_form(2, 1, 4, {{kB, 1.0}}), 1);
  EXPECT_TRUE(are_support_orthogonal(p, q, 1e-12));
  EXPECT_FALSE(are_support_orthogonal(p, p, 1e-12));
  const PolynomialObservable pq = multiply(p, q);
  EXPECT_EQ(pq.num_generators(), 2u);
  EXPECT_EQ(pq.polynomial().coefficient({2, 1}), Complex(1.0));
}

TEST(Observables, DegreeMismatchIsReported) {
  const SpectralForm b = mode_form(2, 1, 4, {{kA, 1.0}});
  try {
    PolynomialObservable({2, 2, 4}, {{b, "O"}}, Polynomial<Complex>::monomial({1}, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegreeMismatch);
  }
  const PolynomialObservable p = PolynomialObservable::power(b, 1);
  EXPECT_THROW(evaluate(p, SpectralForm(2, 0, 4)), Error);
}
