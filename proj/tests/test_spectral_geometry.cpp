#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "abdual/spectral_geometry.hpp"

using namespace abdual;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralForm random_form(std::mt19937_64& rng, int n, int p, int cutoff) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpectralForm f(n, p, cutoff);
  for (const auto& m : ModeBasis::get(n, p, cutoff)->modes()) f.set(m, u(rng));
  return f;
}

double component(const SpectralForm& f, std::span<const double> x, IndexMask mask) {
  const auto values = evaluate_at(f, x);
  auto it = values.find(mask);
  return it == values.end() ? 0.0 : it->second.real();
}

// Midpoint grid integral of g over T^n; exact for trigonometric polynomials of low degree.
template <class G>
double grid_integral(int n, int points, G&& g) {
  const double h = 2.0 * kPi / points;
  double total = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  std::vector<double> x(static_cast<std::size_t>(n));
  while (true) {
    for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = (idx[static_cast<std::size_t>(j)] + 0.5) * h;
    total += g(std::span<const double>(x));
    int axis = 0;
    while (axis < n && ++idx[static_cast<std::size_t>(axis)] == points) idx[static_cast<std::size_t>(axis++)] = 0;
    if (axis == n) break;
  }
  return total * std::pow(h, n);
}

}  // namespace

TEST(ModeBasis, CountsMatchLatticeEnumeration) {
  // number of real modes = number of k in Z^2 with |k|^2 <= 8, times C(2, p)
  int lattice = 0;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      if (a * a + b * b <= 8) ++lattice;
  EXPECT_EQ(ModeBasis::get(2, 0, 8)->size(), static_cast<std::size_t>(lattice));
  EXPECT_EQ(ModeBasis::get(2, 1, 8)->size(), static_cast<std::size_t>(2 * lattice));
}

TEST(SpectralGeometry, InnerProductMatchesQuadrature) {
  std::mt19937_64 rng(1);
  for (int p : {0, 1, 2}) {
    const SpectralForm a = random_form(rng, 2, p, 5);
    const SpectralForm b = random_form(rng, 2, p, 5);
    const double quad = grid_integral(2, 16, [&](std::span<const double> x) {
      const auto va = evaluate_at(a, x);
      const auto vb = evaluate_at(b, x);
      double s = 0.0;
      for (const auto& [mask, v] : va) {
        auto it = vb.find(mask);
        if (it != vb.end()) s += (v * it->second).real();
      }
      return s;
    });
    EXPECT_NEAR(inner(a, b).real(), quad, 1e-10) << "degree " << p;
  }
}

TEST(SpectralGeometry, ExteriorDerivativeMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  const double h = 1e-5;
  const SpectralForm f0 = random_form(rng, 2, 0, 5);
  const SpectralForm f1 = random_form(rng, 2, 1, 5);
  const SpectralForm df0 = exterior_derivative(f0);
  const SpectralForm df1 = exterior_derivative(f1);
  const std::vector<double> x{0.37, 2.11};
  auto shifted = [&](int axis, double s) {
    std::vector<double> y = x;
    y[static_cast<std::size_t>(axis)] += s;
    return y;
  };
  auto partial = [&](const SpectralForm& f, IndexMask mask, int axis) {
    const auto yp = shifted(axis, h);
    const auto ym = shifted(axis, -h);
    return (component(f, yp, mask) - component(f, ym, mask)) / (2.0 * h);
  };
  EXPECT_NEAR(component(df0, x, 1), partial(f0, 0, 0), 1e-6);
  EXPECT_NEAR(component(df0, x, 2), partial(f0, 0, 1), 1e-6);
  // (d a)_{12} = d_1 a_2 - d_2 a_1
  EXPECT_NEAR(component(df1, x, 3), partial(f1, 2, 0) - partial(f1, 1, 1), 1e-6);
}

TEST(SpectralGeometry, LaplacianOfFunctionsIsMinusSecondDerivative) {
  std::mt19937_64 rng(3);
  const SpectralForm f = random_form(rng, 3, 0, 4);
  const std::vector<double> x{0.4, 1.9, 5.0};
  const double h = 1e-4;
  double lap = 0.0;
  for (int j = 0; j < 3; ++j) {
    std::vector<double> yp = x;
    std::vector<double> ym = x;
    yp[static_cast<std::size_t>(j)] += h;
    ym[static_cast<std::size_t>(j)] -= h;
    lap -= (component(f, yp, 0) - 2.0 * component(f, x, 0) + component(f, ym, 0)) / (h * h);
  }
  EXPECT_NEAR(component(laplacian(f), x, 0), lap, 1e-5);
}

TEST(SpectralGeometry, WedgeWithStarIsPointwiseNorm) {
  std::mt19937_64 rng(4);
  const std::vector<double> x{0.9, 4.4, 2.2};
  // T^2, 1-forms: (a ^ *a)_{12} = a_1 (*a)_2 - a_2 (*a)_1
  const SpectralForm a = random_form(rng, 2, 1, 4);
  const SpectralForm sa = hodge_star(a);
  const std::vector<double> x2{x[0], x[1]};
  const double a1 = component(a, x2, 1), a2 = component(a, x2, 2);
  EXPECT_NEAR(a1 * component(sa, x2, 2) - a2 * component(sa, x2, 1), a1 * a1 + a2 * a2, 1e-12);
  // T^3, 1-forms: (b ^ *b)_{123} = b_1 s_23 - b_2 s_13 + b_3 s_12
  const SpectralForm b = random_form(rng, 3, 1, 3);
  const SpectralForm sb = hodge_star(b);
  const double b1 = component(b, x, 1), b2 = component(b, x, 2), b3 = component(b, x, 4);
  const double wedge = b1 * component(sb, x, 6) - b2 * component(sb, x, 5) + b3 * component(sb, x, 3);
  EXPECT_NEAR(wedge, b1 * b1 + b2 * b2 + b3 * b3, 1e-12);
}

TEST(SpectralGeometry, StarOfCoordinateForms) {
  SpectralForm dx1(2, 1, 0);
  dx1.set({Wavevector{}, Phase::kCos, 1}, 1.0);
  SpectralForm dx2(2, 1, 0);
  dx2.set({Wavevector{}, Phase::kCos, 2}, 1.0);
  EXPECT_EQ(hodge_star(dx1), dx2);
  EXPECT_EQ(hodge_star(dx2), -dx1);
  EXPECT_EQ(inverse_hodge_star(hodge_star(dx1)), dx1);
}

TEST(SpectralGeometry, HarmonicPartIsTheMean) {
  std::mt19937_64 rng(5);
  const SpectralForm a = random_form(rng, 2, 1, 5);
  const SpectralForm h = harmonic_part(a);
  const std::vector<double> x{1.0, 2.0};
  for (IndexMask mask : {IndexMask{1}, IndexMask{2}}) {
    const double mean = grid_integral(2, 16, [&](std::span<const double> y) { return component(a, y, mask); }) /
                        (4.0 * kPi * kPi);
    EXPECT_NEAR(component(h, x, mask), mean, 1e-12);
  }
}

TEST(SpectralGeometry, InverseLaplacianInvertsOnMassiveModes) {
  std::mt19937_64 rng(6);
  const SpectralForm a = random_form(rng, 3, 2, 6);
  const SpectralForm massive = a - harmonic_part(a);
  EXPECT_LE((laplacian(inverse_laplacian_on_massive(a)) - massive).max_abs(), 1e-13);
}

TEST(SpectralGeometry, HeatBumpMatchesComplexExponentialSum) {
  const std::vector<double> center{1.0, 2.5};
  const std::vector<double> x{1.3, 2.1};
  const double t = 0.15;
  const int cutoff = 64;
  const SpectralForm bump = heat_bump(2, cutoff, 2, center, t);
  double expected = 0.0;
  for (int a = -8; a <= 8; ++a)
    for (int b = -8; b <= 8; ++b)
      if (a * a + b * b <= cutoff)
        expected += std::exp(-t * (a * a + b * b)) * std::cos(a * (x[0] - center[0]) + b * (x[1] - center[1]));
  expected /= 4.0 * kPi * kPi;
  EXPECT_NEAR(component(bump, x, 2), expected, 1e-12);
  EXPECT_EQ(component(bump, x, 1), 0.0);
}

TEST(HarmonicLattice, GeneratorPeriodIsScaledCoupling) {
  const double r = 0.8;
  const HarmonicLattice lattice(2, 1, r, 4);
  EXPECT_EQ(lattice.rank(), 2u);
  // integrate the dx^1 generator along x^1 at fixed x^2
  const SpectralForm g = lattice.generator(0);
  double period = 0.0;
  const int steps = 64;
  for (int i = 0; i < steps; ++i) {
    const std::vector<double> y{(i + 0.5) * 2.0 * kPi / steps, 0.3};
    period += component(g, y, 1) * 2.0 * kPi / steps;
  }
  EXPECT_NEAR(period, 2.0 * std::sqrt(kPi) * r, 1e-12);
  EXPECT_NEAR(lattice.period(), period, 1e-12);
}

TEST(HarmonicLattice, PointsMatchBruteForce) {
  const HarmonicLattice lattice(3, 1, 0.6, 4);
  const double radius = 25.0;
  const auto points = lattice_points(lattice, radius);
  const double unit = lattice.action_of(std::vector<int>{1, 0, 0});
  std::size_t brute = 0;
  for (int a = -10; a <= 10; ++a)
    for (int b = -10; b <= 10; ++b)
      for (int c = -10; c <= 10; ++c)
        if (unit * (a * a + b * b + c * c) <= radius) ++brute;
  EXPECT_EQ(points.size(), brute);
  for (std::size_t i = 1; i < points.size(); ++i) EXPECT_LE(points[i - 1].action, points[i].action);
}

TEST(SpectralGeometry, RejectsBadShapes) {
  EXPECT_THROW(SpectralForm(5, 1, 4), Error);
  try {
    SpectralForm(2, 3, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegreeOutOfRange);
  }
  SpectralForm a(2, 1, 4);
  SpectralForm b(2, 2, 4);
  EXPECT_THROW(inner(a, b), Error);
  EXPECT_THROW(a.set({Wavevector{3, 0}, Phase::kCos, 1}, 1.0), Error);
}
