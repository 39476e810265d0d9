#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "abdual/gaussian_oracle.hpp"
#include "abdual/wick_engine.hpp"

using namespace abdual;
using GR = GaussianRational;

namespace {

// Brute-force sum over perfect matchings of an explicit half-edge list.
GR brute_matchings(std::vector<std::size_t> labels, const DenseMatrix<GR>& edge) {
  if (labels.empty()) return GR(1L);
  if (labels.size() % 2) return GR();
  const std::size_t first = labels.front();
  GR total;
  for (std::size_t j = 1; j < labels.size(); ++j) {
    std::vector<std::size_t> rest;
    for (std::size_t k = 1; k < labels.size(); ++k)
      if (k != j) rest.push_back(labels[k]);
    total += edge(first, labels[j]) * brute_matchings(rest, edge);
  }
  return total;
}

std::vector<std::size_t> half_edges(const Exponents& e) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (int r = 0; r < e[i]; ++r) out.push_back(i);
  return out;
}

// Each half-edge is either paired (weight propagator * gram) or sent to a source.
Polynomial<GR> brute_transform(std::vector<std::size_t> labels, std::size_t vars, const DenseMatrix<GR>& gram,
                               const DiagramRules<GR>& rules) {
  if (labels.empty()) return Polynomial<GR>::constant(vars, GR(1L));
  const std::size_t first = labels.front();
  std::vector<std::size_t> tail(labels.begin() + 1, labels.end());
  Exponents e(vars, 0);
  e[first] = 1;
  Polynomial<GR> total = Polynomial<GR>::monomial(e, rules.source) * brute_transform(tail, vars, gram, rules);
  for (std::size_t j = 0; j < tail.size(); ++j) {
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < tail.size(); ++k)
      if (k != j) rest.push_back(tail[k]);
    total += brute_transform(rest, vars, gram, rules) * (rules.propagator * gram(first, tail[j]));
  }
  return total;
}

DenseMatrix<GR> small_gram(std::mt19937_64& rng, std::size_t k) {
  std::uniform_int_distribution<int> d(-3, 3);
  DenseMatrix<GR> g(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      const GR v(Rational(d(rng), 2));
      g(i, j) = v;
      g(j, i) = v;
    }
  return g;
}

}  // namespace

TEST(Wick, MatchingCountsAreDoubleFactorialsAndInvolutions) {
  EXPECT_EQ(count_matchings({6}, false), 15u);
  EXPECT_EQ(count_matchings({2, 2, 2, 2}, false), 105u);
  EXPECT_EQ(count_matchings({5}, false), 0u);
  const std::vector<std::uint64_t> involutions{1, 1, 2, 4, 10, 26, 76, 232, 764};
  for (int n = 0; n < 9; ++n) EXPECT_EQ(count_matchings({n}, true), involutions[static_cast<std::size_t>(n)]);
}

TEST(Wick, ExpectationMatchesBruteForceMatchings) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> deg(0, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 1 + trial % 3;
    const auto edge = small_gram(rng, k);
    Exponents e(k);
    for (auto& v : e) v = deg(rng);
    const GR fast = wick_expectation(Polynomial<GR>::monomial(e, GR(1L)), edge);
    EXPECT_EQ(fast, brute_matchings(half_edges(e), edge));
  }
}

TEST(Wick, TransformMatchesBruteForceDiagrams) {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> deg(0, 3);
  const auto rules = DiagramRules<GR>::forward(GR(Rational(3, 5)));
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 1 + trial % 3;
    const auto gram = small_gram(rng, k);
    Exponents e(k);
    for (auto& v : e) v = deg(rng);
    const auto fast = wick_transform(Polynomial<GR>::monomial(e, GR(1L)), gram, rules);
    EXPECT_EQ(fast, brute_transform(half_edges(e), k, gram, rules));
  }
}

TEST(Wick, RulesCarryTheCouplings) {
  const auto f = DiagramRules<GR>::forward(GR(Rational(1, 2)));
  EXPECT_EQ(f.propagator, GR(1L));
  EXPECT_EQ(f.source, GR::i());
  const auto inv = DiagramRules<GR>::inverse(GR(Rational(1, 2)));
  EXPECT_EQ(inv.source, -GR::i());
}

TEST(Wick, DualMatchesTransformIntegral) {
  // the dual observable evaluated at a~ equals the completed-square Gaussian integral
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const TheorySpec t = TheorySpec::pform(3, 1, 0.9, 2);
  std::vector<LinearObservable> gens;
  for (int i = 0; i < 2; ++i) {
    SpectralForm b(3, 1, 2);
    for (const auto& m : ModeBasis::get(3, 1, 2)->modes())
      if (u(rng) > 0.6) b.set(m, u(rng));
    gens.push_back({b, "O"});
  }
  Polynomial<Complex> poly(2);
  poly.add_term({3, 1}, Complex(1.0, 0.5));
  poly.add_term({0, 2}, -2.0);
  poly.add_term({1, 0}, 0.25);
  const PolynomialObservable p = canonicalise(PolynomialObservable(t.field_space(), gens, poly));
  const DualResult d = fourier_dual(p, t);
  for (int trial = 0; trial < 4; ++trial) {
    SpectralForm at(3, 2, 2);
    for (const auto& m : ModeBasis::get(3, 2, 2)->modes()) at.set(m, u(rng));
    const Complex lhs = evaluate(d.observable, at);
    const Complex rhs = fourier_dual_integral(p, t, at);
    EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST(Wick, ExpectationInPFormTheory) {
  SpectralForm b(2, 1, 8);
  b.set({Wavevector{1, 2}, Phase::kCos, 1}, 2.0);
  const TheorySpec t = TheorySpec::pform(2, 1, 1.5, 8);
  // <O^2> = <b, b> / (2 R^2)
  EXPECT_NEAR(expectation_diagrams(PolynomialObservable::power(b, 2), t).real(), 4.0 / (2.0 * 2.25), 1e-14);
  // <O^4> = 3 <O^2>^2
  const double v = 4.0 / 4.5;
  EXPECT_NEAR(expectation_diagrams(PolynomialObservable::power(b, 4), t).real(), 3.0 * v * v, 1e-14);
}

TEST(Wick, GuardsAndPreconditions) {
  SpectralForm b(2, 1, 4);
  b.set({Wavevector{1, 0}, Phase::kCos, 2}, 1.0);
  const TheorySpec t = TheorySpec::pform(2, 1, 1.0, 4);
  try {
    expectation_diagrams(PolynomialObservable::power(b, 26), t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooLarge);
  }
  const TheorySpec closed = TheorySpec::closed_pform(2, 1, 1.0, 4);
  try {
    fourier_dual(PolynomialObservable::power(b, 2), closed);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kVariantMismatch);
  }
  SpectralForm h(2, 1, 4);
  h.set({Wavevector{}, Phase::kCos, 1}, 1.0);
  try {
    expectation_diagrams(PolynomialObservable::power(h, 2), closed);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMasslessSector);
  }
  try {
    TheorySpec::scalar(2, 1.0, 4);  // m^2 = 1 is an eigenvalue of the Laplacian
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMasslessMode);
  }
  EXPECT_NO_THROW(TheorySpec::scalar(2, 1.0, 4, MassSign::kPlus));
}
