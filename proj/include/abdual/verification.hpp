#pragma once

/**
 * @file verification.hpp
 * @brief Named verification suites (geometry, bd, double-dual, hermite, stokes,
 * plancherel, wilson-thooft, factorisation, oracle).
 *
 * Each suite returns a report of individual checks with the measured error,
 * the tolerance it was held to, and the wall time. Random inputs come from
 * std::mt19937_64 seeded by the options, so reports are reproducible.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "abdual/bv_complex.hpp"
#include "abdual/errors.hpp"
#include "abdual/exact.hpp"
#include "abdual/gaussian_oracle.hpp"
#include "abdual/json_io.hpp"
#include "abdual/observable_algebra.hpp"
#include "abdual/spectral_geometry.hpp"
#include "abdual/theory.hpp"
#include "abdual/wick_engine.hpp"
#include "abdual/wilson_thooft.hpp"

namespace abdual {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
  double max_measured() const {
    double m = 0.0;
    for (const auto& c : checks) m = std::max(m, c.measured);
    return m;
  }
};

struct VerifyOptions {
  std::uint64_t seed = 20240611;
  int mode_cutoff = 64;
  double lattice_cutoff = 40.0;
  unsigned threads = 1;
  std::size_t samples = 100000;
  int trials = 0;  ///< 0 selects each suite's default count
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"geometry", "bd",           "double-dual",   "hermite", "stokes",
                                              "plancherel", "wilson-thooft", "factorisation", "oracle"};
  return names;
}

// ---------------------------------------------------------------------------
// Random inputs

namespace sample {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Rational rational(Rng& rng, int num_range, int max_den) {
  Rational q(uniform_int(rng, -num_range, num_range), uniform_int(rng, 1, max_den));
  q.canonicalize();
  return q;
}

inline GaussianRational gaussian_rational(Rng& rng, int num_range, int max_den, bool complex_part) {
  return {rational(rng, num_range, max_den), complex_part ? rational(rng, num_range, max_den) : Rational(0)};
}

/// Positive rational in [1/4, 4].
inline Rational positive_rational(Rng& rng) {
  Rational q(uniform_int(rng, 1, 16), uniform_int(rng, 4, 16));
  q.canonicalize();
  return q;
}

/// B^T B / d for a small random integer B: an exact symmetric positive semidefinite Gram matrix.
inline DenseMatrix<GaussianRational> exact_gram(Rng& rng, std::size_t k) {
  std::vector<std::vector<int>> b(k, std::vector<int>(k));
  for (auto& row : b)
    for (int& v : row) v = uniform_int(rng, -3, 3);
  for (std::size_t i = 0; i < k; ++i)
    if (b[i][i] == 0) b[i][i] = 1;
  const Rational d(uniform_int(rng, 1, 5));
  DenseMatrix<GaussianRational> g(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      long s = 0;
      for (std::size_t r = 0; r < k; ++r) s += b[r][i] * b[r][j];
      g(i, j) = GaussianRational(Rational(s) / d);
    }
  }
  return g;
}

inline Exponents exponents(Rng& rng, std::size_t k, int max_degree) {
  Exponents e(k, 0);
  const int total = uniform_int(rng, 0, max_degree);
  for (int i = 0; i < total; ++i) ++e[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(k) - 1))];
  return e;
}

template <class S, class Coef>
Polynomial<S> polynomial(Rng& rng, std::size_t k, int max_degree, int max_terms, Coef&& coef) {
  Polynomial<S> p(k);
  const int terms = uniform_int(rng, 1, max_terms);
  for (int t = 0; t < terms; ++t) p.add_term(exponents(rng, k, max_degree), coef());
  return p;
}

/// Real form with a few random modes of |k|^2 <= support, stored at `cutoff`.
inline SpectralForm form(Rng& rng, int n, int p, int support, int cutoff, int num_modes) {
  const auto basis = ModeBasis::get(n, p, support);
  SpectralForm f(n, p, cutoff);
  for (int i = 0; i < num_modes; ++i) {
    const auto& mode = basis->modes()[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(basis->size()) - 1))];
    f.add(mode, uniform(rng, -1.0, 1.0));
  }
  return f;
}

/// Form with every basis coefficient random below the cutoff.
inline SpectralForm dense_form(Rng& rng, int n, int p, int cutoff) {
  SpectralForm f(n, p, cutoff);
  for (const auto& mode : ModeBasis::get(n, p, cutoff)->modes()) f.set(mode, uniform(rng, -1.0, 1.0));
  return f;
}

inline Complex complex_coefficient(Rng& rng) { return {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)}; }

}  // namespace sample

// ---------------------------------------------------------------------------
// Helpers

namespace detail {

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

template <class F>
CheckResult timed_check(std::string name, double tolerance, F&& body) {
  Timer timer;
  CheckResult r;
  r.name = std::move(name);
  r.tolerance = tolerance;
  try {
    auto [measured, detail] = body();
    r.measured = measured;
    r.detail = std::move(detail);
    r.passed = measured <= tolerance;
  } catch (const std::exception& e) {
    r.passed = false;
    r.measured = std::numeric_limits<double>::infinity();
    r.detail = e.what();
  }
  r.seconds = timer.seconds();
  return r;
}

template <class S>
double max_coefficient_difference(const Polynomial<S>& a, const Polynomial<S>& b) {
  const Polynomial<S> d = a - b;
  double m = 0.0;
  for (const auto& [e, c] : d.terms()) m = std::max(m, std::abs(ScalarTraits<S>::to_complex(c)));
  // exact zero differences are reported as 0; a nonzero exact difference that
  // underflows to 0.0 in double is still a failure
  if (m == 0.0 && !d.is_zero()) m = std::numeric_limits<double>::min();
  return m;
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

inline Polynomial<GaussianRational> hermite(int n) {
  Polynomial<GaussianRational> prev = Polynomial<GaussianRational>::constant(1, 1L);
  if (n == 0) return prev;
  Polynomial<GaussianRational> x = Polynomial<GaussianRational>::variable(1, 0);
  Polynomial<GaussianRational> cur = x;
  for (int m = 1; m < n; ++m) {
    Polynomial<GaussianRational> next = x * cur - prev * GaussianRational(static_cast<long>(m));
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

inline GaussianRational i_power(int n) {
  switch (n % 4) {
    case 0: return {1L};
    case 1: return GaussianRational::i();
    case 2: return {-1L};
    default: return -GaussianRational::i();
  }
}

inline DenseMatrix<GaussianRational> exact_matrix(const DenseMatrix<Complex>& m) {
  return map_matrix(m, [](const Complex& z) { return exact_from(z); });
}

inline Polynomial<GaussianRational> exact_polynomial(const Polynomial<Complex>& p) {
  return p.mapped([](const Complex& z) { return exact_from(z); });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Suites

/// d^2 = 0, (d*)^2 = 0, adjointness, ** sign, Hodge split and Laplacian commutation over full bases.
inline SuiteReport verify_geometry(const VerifyOptions& opt) {
  SuiteReport report{"geometry", {}, 0.0};
  detail::Timer timer;
  sample::Rng rng(opt.seed);
  const int cutoff = opt.mode_cutoff;
  for (int n : {2, 3}) {
    const std::string tag = "T" + std::to_string(n) + " cutoff " + std::to_string(cutoff);
    report.checks.push_back(detail::timed_check("d o d = 0 on every basis mode, " + tag, 1e-12, [&] {
      double worst = 0.0;
      for (int p = 0; p + 2 <= n; ++p)
        for (const auto& m : ModeBasis::get(n, p, cutoff)->modes())
          worst = std::max(worst, exterior_derivative(exterior_derivative(SpectralForm::basis(n, cutoff, m))).max_abs());
      return std::pair{worst, std::string()};
    }));
    report.checks.push_back(detail::timed_check("d* o d* = 0 on every basis mode, " + tag, 1e-12, [&] {
      double worst = 0.0;
      for (int p = 2; p <= n; ++p)
        for (const auto& m : ModeBasis::get(n, p, cutoff)->modes())
          worst = std::max(worst, codifferential(codifferential(SpectralForm::basis(n, cutoff, m))).max_abs());
      return std::pair{worst, std::string()};
    }));
    report.checks.push_back(detail::timed_check("<d a, b> = <a, d* b> on all basis pairs, " + tag, 1e-12, [&] {
      double worst = 0.0;
      std::size_t entries = 0;
      for (int p = 0; p < n; ++p) {
        // matrix of d from degree p: entry (target, source)
        std::map<std::pair<FormMode, FormMode>, Complex> dmat;
        for (const auto& m : ModeBasis::get(n, p, cutoff)->modes()) {
          const SpectralForm dm = exterior_derivative(SpectralForm::basis(n, cutoff, m));
          for (const auto& [t, c] : dm.coefficients()) dmat[{t, m}] = c;
        }
        std::map<std::pair<FormMode, FormMode>, Complex> smat;
        for (const auto& t : ModeBasis::get(n, p + 1, cutoff)->modes()) {
          const SpectralForm st = codifferential(SpectralForm::basis(n, cutoff, t));
          for (const auto& [m, c] : st.coefficients()) smat[{t, m}] = c;
        }
        for (const auto& [key, c] : dmat) {
          auto it = smat.find(key);
          worst = std::max(worst, std::abs(c - (it == smat.end() ? Complex{} : it->second)));
        }
        for (const auto& [key, c] : smat)
          if (!dmat.count(key)) worst = std::max(worst, std::abs(c));
        entries += dmat.size();
      }
      return std::pair{worst, std::to_string(entries) + " nonzero entries of d compared"};
    }));
    report.checks.push_back(detail::timed_check("** = (-1)^{p(n-p)} on every basis mode, " + tag, 1e-12, [&] {
      double worst = 0.0;
      for (int p = 0; p <= n; ++p) {
        const double sign = (p * (n - p)) % 2 == 0 ? 1.0 : -1.0;
        for (const auto& m : ModeBasis::get(n, p, cutoff)->modes()) {
          const SpectralForm f = SpectralForm::basis(n, cutoff, m);
          worst = std::max(worst, (hodge_star(hodge_star(f)) - f * sign).max_abs());
          worst = std::max(worst, std::abs(norm(hodge_star(f)) - 1.0));
        }
      }
      return std::pair{worst, std::string()};
    }));
    report.checks.push_back(
        detail::timed_check("Delta = d d* + d* d and commutes with d, d*, *, " + tag, 1e-12, [&] {
          double worst = 0.0;
          for (int p = 0; p <= n; ++p) {
            for (const auto& m : ModeBasis::get(n, p, cutoff)->modes()) {
              const SpectralForm f = SpectralForm::basis(n, cutoff, m);
              SpectralForm hodge_lap(n, p, cutoff);
              if (p > 0) hodge_lap += exterior_derivative(codifferential(f));
              if (p < n) hodge_lap += codifferential(exterior_derivative(f));
              worst = std::max(worst, (laplacian(f) - hodge_lap).max_abs());
              if (p < n)
                worst = std::max(worst, (laplacian(exterior_derivative(f)) - exterior_derivative(laplacian(f))).max_abs());
              if (p > 0)
                worst = std::max(worst, (laplacian(codifferential(f)) - codifferential(laplacian(f))).max_abs());
              worst = std::max(worst, (laplacian(hodge_star(f)) - hodge_star(laplacian(f))).max_abs());
              worst = std::max(worst, std::abs(eigenvalue_of(m) - squared_norm(m.k)));
            }
          }
          return std::pair{worst, std::string()};
        }));
    report.checks.push_back(
        detail::timed_check("Hodge split orthogonal and recomposes (random dense forms), " + tag, 1e-12, [&] {
          double worst = 0.0;
          for (int p = 0; p <= n; ++p) {
            for (int trial = 0; trial < 3; ++trial) {
              const SpectralForm f = sample::dense_form(rng, n, p, cutoff);
              const HodgeSplit s = hodge_decompose(f);
              const double scale = std::max(1.0, norm(f) * norm(f));
              worst = std::max(worst, (s.recompose() - f).max_abs());
              worst = std::max(worst, std::abs(inner(s.exact, s.coexact)) / scale);
              worst = std::max(worst, std::abs(inner(s.exact, s.harmonic)) / scale);
              worst = std::max(worst, std::abs(inner(s.coexact, s.harmonic)) / scale);
              if (p < n) worst = std::max(worst, exterior_derivative(s.exact).max_abs());
              if (p > 0) worst = std::max(worst, codifferential(s.coexact).max_abs());
            }
          }
          return std::pair{worst, std::string()};
        }));
  }
  report.seconds = timer.seconds();
  return report;
}

/// Dual of O^n at R^2 = 1/2 and unit norm against the recurrence table.
inline SuiteReport verify_hermite(const VerifyOptions&) {
  SuiteReport report{"hermite", {}, 0.0};
  detail::Timer timer;
  using GR = GaussianRational;
  DenseMatrix<GR> unit(1, 1);
  unit(0, 0) = GR(1L);
  const auto rules = DiagramRules<GR>::forward(GR(Rational(1, 2)));
  report.checks.push_back(detail::timed_check("dual(O^4) = O~^4 - 6 O~^2 + 3 exactly", 0.0, [&] {
    const Polynomial<GR> dual = wick_transform(Polynomial<GR>::monomial({4}, GR(1L)), unit, rules);
    Polynomial<GR> expected(1);
    expected.add_term({4}, GR(1L));
    expected.add_term({2}, GR(-6L));
    expected.add_term({0}, GR(3L));
    return std::pair{detail::max_coefficient_difference(dual, expected), std::string("coefficients (1, -6, 3)")};
  }));
  report.checks.push_back(detail::timed_check("dual(O^n) = i^n He_n(O~) exactly for n <= 10", 0.0, [&] {
    double worst = 0.0;
    for (int n = 0; n <= 10; ++n) {
      const Polynomial<GR> dual = wick_transform(Polynomial<GR>::monomial({n}, GR(1L)), unit, rules);
      worst = std::max(worst, detail::max_coefficient_difference(dual, detail::hermite(n) * detail::i_power(n)));
    }
    return std::pair{worst, std::string("the i^n phase is 1 only for n = 0 mod 4; see README")};
  }));
  report.checks.push_back(detail::timed_check("smeared route: fourier_dual of a unit mode, n <= 10", 1e-12, [&] {
    SpectralForm beta(2, 1, 4);
    beta.set({Wavevector{1, 1}, Phase::kSin, 1}, 1.0);
    const TheorySpec t = TheorySpec::pform(2, 1, std::sqrt(0.5), 4);
    double worst = 0.0;
    for (int n = 0; n <= 10; ++n) {
      const DualResult d = fourier_dual(PolynomialObservable::power(beta, n), t);
      const Polynomial<Complex> expected =
          (detail::hermite(n) * detail::i_power(n)).mapped([](const GR& z) { return z.to_complex(); });
      double scale = 1.0;
      for (const auto& [e, c] : expected.terms()) scale = std::max(scale, std::abs(c));
      worst = std::max(worst, detail::max_coefficient_difference(d.observable.polynomial(), expected) / scale);
    }
    return std::pair{worst, std::string("relative to the largest Hermite coefficient")};
  }));
  report.seconds = timer.seconds();
  return report;
}

/// inverse_fourier_dual o fourier_dual = id, exactly on random monomials and Grams.
inline SuiteReport verify_double_dual(const VerifyOptions& opt) {
  SuiteReport report{"double-dual", {}, 0.0};
  detail::Timer timer;
  using GR = GaussianRational;
  sample::Rng rng(opt.seed ^ 0x5151);
  const int trials = opt.trials > 0 ? opt.trials : 50;
  report.checks.push_back(detail::timed_check(
      std::to_string(trials) + " random monomials, <= 4 generators, degree <= 8, exact Gram and R^2", 0.0, [&] {
        double worst = 0.0;
        int failures = 0;
        for (int t = 0; t < trials; ++t) {
          const std::size_t k = static_cast<std::size_t>(sample::uniform_int(rng, 1, 4));
          const auto gram = sample::exact_gram(rng, k);
          const Rational r2 = sample::positive_rational(rng);
          Exponents e = sample::exponents(rng, k, 8);
          const Polynomial<GR> mono = Polynomial<GR>::monomial(e, sample::gaussian_rational(rng, 5, 4, true));
          const Polynomial<GR> fwd = wick_transform(mono, gram, DiagramRules<GR>::forward(GR(r2)));
          const Rational rho2 = Rational(1) / (Rational(4) * r2);
          const Polynomial<GR> back = wick_transform(fwd, gram, DiagramRules<GR>::inverse(GR(rho2)));
          const double d = detail::max_coefficient_difference(back, mono);
          worst = std::max(worst, d);
          if (d != 0.0) ++failures;
        }
        return std::pair{worst, std::to_string(failures) + " mismatches"};
      }));
  report.checks.push_back(detail::timed_check("smeared observables: canonical JSON of the double dual", 0.0, [&] {
    int mismatches = 0;
    const int cases = 10;
    for (int t = 0; t < cases; ++t) {
      const int n = sample::uniform_int(rng, 2, 3);
      const int p = sample::uniform_int(rng, 1, n - 1);
      const TheorySpec theory = TheorySpec::pform(n, p, sample::uniform(rng, 0.5, 1.5), 8);
      const std::size_t k = static_cast<std::size_t>(sample::uniform_int(rng, 1, 3));
      std::vector<LinearObservable> gens;
      for (std::size_t i = 0; i < k; ++i) gens.push_back({sample::form(rng, n, p, 4, 8, 3), "O"});
      Polynomial<Complex> poly =
          sample::polynomial<Complex>(rng, k, 6, 3, [&] { return sample::complex_coefficient(rng); });
      const PolynomialObservable obs = canonicalise(PolynomialObservable(theory.field_space(), gens, poly));
      const DualResult d = fourier_dual(obs, theory);
      const DualResult back = inverse_fourier_dual(d.observable, d.theory);
      if (to_json(back.observable).dump() != to_json(obs).dump()) ++mismatches;
    }
    return std::pair{static_cast<double>(mismatches), std::to_string(cases) + " cases"};
  }));
  report.seconds = timer.seconds();
  return report;
}

/// expectation_diagrams against the generating-function oracle and Monte Carlo.
inline SuiteReport verify_oracle(const VerifyOptions& opt) {
  SuiteReport report{"oracle", {}, 0.0};
  detail::Timer timer;
  using GR = GaussianRational;
  sample::Rng rng(opt.seed ^ 0x0AC1E);
  const int trials = opt.trials > 0 ? opt.trials : 100;
  struct Case {
    Polynomial<GR> poly;
    DenseMatrix<GR> cov;
    GR exact;
  };
  std::vector<Case> cases;
  report.checks.push_back(detail::timed_check(
      "diagrams = isserlis exactly on " + std::to_string(trials) + " random zero-mean inputs", 0.0, [&] {
        int failures = 0;
        for (int t = 0; t < trials; ++t) {
          const std::size_t k = static_cast<std::size_t>(sample::uniform_int(rng, 1, 4));
          const auto gram = sample::exact_gram(rng, k);
          const Rational r2 = sample::positive_rational(rng);
          DenseMatrix<GR> cov(k, k);
          for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) cov(i, j) = gram(i, j) / GR(Rational(2) * r2);
          Polynomial<GR> poly = sample::polynomial<GR>(rng, k, 8, 3, [&] { return sample::gaussian_rational(rng, 9, 5, false); });
          const GR diagrams = wick_expectation(poly, cov);
          const GR isserlis = moments_isserlis(poly, Gaussian<GR>::centered(cov));
          if (diagrams != isserlis) ++failures;
          cases.push_back({std::move(poly), std::move(cov), diagrams});
        }
        return std::pair{static_cast<double>(failures), std::string("count of inexact matches")};
      }));
  const int mc_cases = std::min<int>(10, static_cast<int>(cases.size()));
  report.checks.push_back(detail::timed_check(
      "Monte Carlo within 4 standard errors, " + std::to_string(mc_cases) + " cases, " +
          std::to_string(opt.samples) + " samples",
      4.0, [&] {
        double worst = 0.0;
        for (int t = 0; t < mc_cases; ++t) {
          const Case& c = cases[static_cast<std::size_t>(t)];
          const auto poly = c.poly.mapped([](const GR& z) { return z.to_complex(); });
          const GaussianSpec g = GaussianSpec::centered(map_matrix(c.cov, [](const GR& z) { return z.to_complex(); }));
          const MonteCarloResult mc = moments_montecarlo(poly, g, opt.samples, opt.seed + static_cast<std::uint64_t>(t), opt.threads);
          const double err = std::abs(mc.estimate - c.exact.to_complex());
          worst = std::max(worst, mc.standard_error > 0.0 ? err / mc.standard_error : (err == 0.0 ? 0.0 : 1e300));
        }
        return std::pair{worst, std::string("largest |estimate - exact| in standard errors")};
      }));
  report.checks.push_back(detail::timed_check("theory level: p-form, closed (exact smearings), scalar", 1e-12, [&] {
    double worst = 0.0;
    for (int t = 0; t < 12; ++t) {
      TheorySpec theory;
      const int kind = t % 3;
      if (kind == 0) theory = TheorySpec::pform(3, 1, sample::uniform(rng, 0.6, 1.4), 8);
      if (kind == 1) theory = TheorySpec::closed_pform(3, 2, sample::uniform(rng, 0.6, 1.4), 8);
      if (kind == 2) theory = TheorySpec::scalar(2, sample::uniform(rng, 0.3, 2.0), 8, MassSign::kPlus);
      std::vector<LinearObservable> gens;
      for (int i = 0; i < 3; ++i) {
        SpectralForm f = sample::form(rng, theory.dimension(), theory.degree, 5, 8, 3);
        if (kind == 1) f = exact_part(f);
        gens.push_back({f, "O"});
      }
      const PolynomialObservable obs(theory.field_space(), gens,
                                     sample::polynomial<Complex>(rng, 3, 6, 3, [&] { return sample::complex_coefficient(rng); }));
      const Complex a = expectation_diagrams(obs, theory);
      const Complex b = moments_isserlis(obs, gaussian_sector(obs, theory));
      worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(a)));
    }
    return std::pair{worst, std::string("relative difference")};
  }));
  report.seconds = timer.seconds();
  return report;
}

/// E[(d_cl + D) W] = 0 for random degree -1 observables in the p-form theory.
inline SuiteReport verify_stokes(const VerifyOptions& opt) {
  SuiteReport report{"stokes", {}, 0.0};
  detail::Timer timer;
  sample::Rng rng(opt.seed ^ 0x570C);
  const int trials = opt.trials > 0 ? opt.trials : 25;
  report.checks.push_back(detail::timed_check(
      std::to_string(trials) + " random W of degree -1, |E[(d_cl + D) W]|", 1e-10, [&] {
        double worst = 0.0;
        for (int t = 0; t < trials; ++t) {
          const int n = sample::uniform_int(rng, 2, 3);
          const int p = sample::uniform_int(rng, 1, n - 1);
          const int cutoff = 8;
          const TheorySpec theory = TheorySpec::pform(n, p, sample::uniform(rng, 0.5, 1.5), cutoff);
          const std::size_t nf = static_cast<std::size_t>(sample::uniform_int(rng, 1, 3));
          const std::size_t na = static_cast<std::size_t>(sample::uniform_int(rng, 1, 2));
          std::vector<SpectralForm> fields;
          std::vector<SpectralForm> anti;
          for (std::size_t i = 0; i < nf; ++i) fields.push_back(sample::form(rng, n, p, 4, cutoff, 3));
          for (std::size_t i = 0; i < na; ++i) anti.push_back(sample::form(rng, n, p, 4, cutoff, 3));
          GradedPolynomial<Complex> w(nf, na);
          for (std::size_t b = 0; b < na; ++b) {
            const auto coef = sample::polynomial<Complex>(rng, nf, 4, 3, [&] { return sample::complex_coefficient(rng); });
            w += GradedPolynomial<Complex>::antifield(nf, na, b) * GradedPolynomial<Complex>::from_polynomial(coef, na);
          }
          const GradedObservable obs(theory.field_space(), fields, anti, w);
          const GradedObservable dw = total_quantum_differential(obs, theory);
          require(dw.polynomial().max_antifield_count() == 0, ErrorCode::kInvalidArgument,
                  "differential of a degree -1 observable kept an antifield");
          worst = std::max(worst, std::abs(expectation_diagrams(dw.degree_zero_part(), theory)));
        }
        return std::pair{worst, std::string("absolute")};
      }));
  report.seconds = timer.seconds();
  return report;
}

namespace detail {

/// Random BV data in which the classical images are the last na fields and P C^T is symmetric.
inline BvStructure<GaussianRational> random_bv_structure(sample::Rng& rng, std::size_t base_fields, std::size_t na) {
  using GR = GaussianRational;
  const std::size_t nf = base_fields + na;
  BvStructure<GR> bv{DenseMatrix<GR>(na, nf), DenseMatrix<GR>(na, nf)};
  for (std::size_t b = 0; b < na; ++b)
    for (std::size_t a = 0; a < base_fields; ++a) bv.pairing(b, a) = GR(sample::rational(rng, 4, 3));
  for (std::size_t b = 0; b < na; ++b) {
    for (std::size_t c = b; c < na; ++c) {
      const GR v(sample::rational(rng, 4, 3));
      bv.pairing(b, base_fields + c) = v;
      bv.pairing(c, base_fields + b) = v;
    }
    bv.classical(b, base_fields + b) = GR(-2L);
  }
  return bv;
}

inline GradedPolynomial<GaussianRational> random_graded(sample::Rng& rng, std::size_t nf, std::size_t na,
                                                        int max_total, int max_antifields, int terms) {
  using GR = GaussianRational;
  GradedPolynomial<GR> g(nf, na);
  for (int t = 0; t < terms; ++t) {
    AntifieldMask mask = 0;
    int count = 0;
    const int want = sample::uniform_int(rng, 0, max_antifields);
    for (int i = 0; i < want; ++i) {
      const auto b = static_cast<unsigned>(sample::uniform_int(rng, 0, static_cast<int>(na) - 1));
      if (!(mask & (1u << b))) {
        mask |= 1u << b;
        ++count;
      }
    }
    Exponents e = sample::exponents(rng, nf, std::max(0, max_total - count));
    g.add_term({e, mask}, sample::gaussian_rational(rng, 6, 4, true));
  }
  return g;
}

/// Keeps only the terms with exactly `antifields` antifields.
inline GradedPolynomial<GaussianRational> homogeneous_part(const GradedPolynomial<GaussianRational>& g, int antifields) {
  GradedPolynomial<GaussianRational> out(g.num_fields(), g.num_antifields());
  for (const auto& [m, c] : g.terms())
    if (-m.degree() == antifields) out.add_term(m, c);
  return out;
}

}  // namespace detail

/// D^2 = 0, (d_cl + D)^2 = 0 and the BD identity, exactly.
inline SuiteReport verify_bd(const VerifyOptions& opt) {
  SuiteReport report{"bd", {}, 0.0};
  detail::Timer timer;
  using GR = GaussianRational;
  using G = GradedPolynomial<GR>;
  sample::Rng rng(opt.seed ^ 0xBD);
  const int trials = opt.trials > 0 ? opt.trials : 60;
  int d2 = 0;
  int total2 = 0;
  int classical2 = 0;
  int bd = 0;
  int symmetry = 0;
  int checked_pairs = 0;
  detail::Timer body;
  for (int t = 0; t < trials; ++t) {
    const std::size_t base = static_cast<std::size_t>(sample::uniform_int(rng, 1, 3));
    const std::size_t na = static_cast<std::size_t>(sample::uniform_int(rng, 1, 3));
    const auto bv = detail::random_bv_structure(rng, base, na);
    const std::size_t nf = base + na;
    const G g = detail::random_graded(rng, nf, na, 6, static_cast<int>(na), 5);
    if (!quantum_bv(quantum_bv(g, bv), bv).is_zero()) ++d2;
    if (!classical_differential(classical_differential(g, bv), bv).is_zero()) ++classical2;
    if (!total_quantum_differential(total_quantum_differential(g, bv), bv).is_zero()) ++total2;
    for (int pair = 0; pair < 4; ++pair) {
      const int da = sample::uniform_int(rng, 0, 1);
      const int db = sample::uniform_int(rng, 0, 1);
      const G phi = detail::homogeneous_part(detail::random_graded(rng, nf, na, 3, 1, 4), da);
      const G psi = detail::homogeneous_part(detail::random_graded(rng, nf, na, 3, 1, 4), db);
      const GR sign = da % 2 == 0 ? GR(1L) : GR(-1L);
      const G lhs = quantum_bv(phi * psi, bv);
      const G rhs = quantum_bv(phi, bv) * psi + phi * quantum_bv(psi, bv) * sign + poisson_bracket(phi, psi, bv);
      if (!(lhs == rhs)) ++bd;
      // {phi, psi} = (-1)^{|phi||psi|} {psi, phi}
      const GR swap = (da * db) % 2 == 0 ? GR(1L) : GR(-1L);
      if (!(poisson_bracket(phi, psi, bv) == poisson_bracket(psi, phi, bv) * swap)) ++symmetry;
      ++checked_pairs;
    }
  }
  const double elapsed = body.seconds();
  const std::string inputs = std::to_string(trials) + " random observables, total degree <= 6";
  report.checks.push_back({"D^2 = 0, " + inputs, d2 == 0, static_cast<double>(d2), 0.0, "failures", elapsed});
  report.checks.push_back(
      {"d_cl^2 = 0, " + inputs, classical2 == 0, static_cast<double>(classical2), 0.0, "failures", 0.0});
  report.checks.push_back(
      {"(d_cl + D)^2 = 0, " + inputs, total2 == 0, static_cast<double>(total2), 0.0, "failures", 0.0});
  report.checks.push_back({"BD identity on " + std::to_string(checked_pairs) + " random pairs", bd == 0,
                           static_cast<double>(bd), 0.0, "failures", 0.0});
  report.checks.push_back({"bracket graded symmetry on " + std::to_string(checked_pairs) + " random pairs",
                           symmetry == 0, static_cast<double>(symmetry), 0.0, "failures", 0.0});
  report.checks.push_back(detail::timed_check("D(v(b) O(b)) = <b, b> for a unit smearing", 1e-15, [&] {
    SpectralForm b(2, 1, 2);
    b.set({Wavevector{1, 0}, Phase::kCos, 2}, 1.0);
    const TheorySpec theory = TheorySpec::pform(2, 1, 1.0, 2);
    using GC = GradedPolynomial<Complex>;
    const GradedObservable w(theory.field_space(), {b}, {b}, GC::antifield(1, 1, 0) * GC::field(1, 1, 0));
    const Complex c = quantum_bv(w, theory).degree_zero_part().polynomial().constant_term();
    return std::pair{std::abs(c - 1.0), std::string()};
  }));
  report.seconds = timer.seconds();
  return report;
}

namespace detail {

/// Random smearing with a nonzero harmonic component.
inline SpectralForm smearing_with_harmonic(sample::Rng& rng, int n, int p, int cutoff) {
  SpectralForm f = sample::form(rng, n, p, 2, cutoff, 3);
  const std::vector<IndexMask> masks = HarmonicLattice(n, p, 1.0, cutoff).index_sets();
  const IndexMask mask = masks[static_cast<std::size_t>(sample::uniform_int(rng, 0, static_cast<int>(masks.size()) - 1))];
  f.add({Wavevector{}, Phase::kCos, mask}, sample::uniform(rng, 0.2, 1.0));
  return f;
}

}  // namespace detail

/// <r(O)>_R = <r(dual O)>_{1/(2R)} in the closed theories, by lattice summation.
inline SuiteReport verify_plancherel(const VerifyOptions& opt) {
  SuiteReport report{"plancherel", {}, 0.0};
  detail::Timer timer;
  sample::Rng rng(opt.seed ^ 0x9A11);
  const int cutoff = opt.mode_cutoff;
  const int pairs = opt.trials > 0 ? opt.trials : 5;
  const double cut = opt.lattice_cutoff;
  const std::vector<double> ladder{cut / 4.0, cut / 2.0, cut};
  for (const auto& [n, p] : {std::pair{2, 1}, std::pair{3, 1}}) {
    for (double r : {0.7, 1.0, 1.3}) {
      const TheorySpec lift = TheorySpec::pform(n, p, r, cutoff);
      const TheorySpec closed = TheorySpec::closed_pform(n, p, r, cutoff);
      const TheorySpec dual_closed = closed.dual();
      std::vector<std::pair<PolynomialObservable, PolynomialObservable>> cases;
      for (int i = 0; i < pairs; ++i) {
        const std::size_t k = static_cast<std::size_t>(sample::uniform_int(rng, 1, 2));
        std::vector<LinearObservable> gens;
        for (std::size_t j = 0; j < k; ++j) gens.push_back({detail::smearing_with_harmonic(rng, n, p, cutoff), "O"});
        const auto poly = sample::polynomial<Complex>(rng, k, 4, 3, [&] { return sample::complex_coefficient(rng); });
        const PolynomialObservable obs = canonicalise(PolynomialObservable(lift.field_space(), gens, poly));
        const PolynomialObservable dual = fourier_dual(obs, lift).observable;
        cases.emplace_back(restrict_to_closed(obs), restrict_to_closed(dual));
      }
      std::ostringstream tag;
      tag << "T" << n << " p=" << p << " R=" << r;
      report.checks.push_back(detail::timed_check(
          tag.str() + ": " + std::to_string(pairs) + " lifted observables, lattice cutoff " + detail::fmt(cut), 1e-6,
          [&] {
            double worst = 0.0;
            double worst_tail = 0.0;
            for (const auto& [a, b] : cases) {
              const LatticeExpectation lhs = maxwell_expectation(a, closed, cut);
              const LatticeExpectation rhs = maxwell_expectation(b, dual_closed, cut);
              worst = std::max(worst, std::abs(lhs.value - rhs.value) / std::max(1.0, std::abs(lhs.value)));
              worst_tail = std::max({worst_tail, lhs.tail_bound, rhs.tail_bound});
            }
            return std::pair{worst, "relative; largest tail bound " + detail::fmt(worst_tail)};
          }));
      report.checks.push_back(detail::timed_check(
          tag.str() + ": discrepancy shrinks across lattice cutoffs within tail bounds", 0.0, [&] {
            double violation = 0.0;
            for (const auto& [a, b] : cases) {
              double prev_gap = 0.0;
              double prev_tail = 0.0;
              for (std::size_t c = 0; c < ladder.size(); ++c) {
                const LatticeExpectation lhs = maxwell_expectation(a, closed, ladder[c]);
                const LatticeExpectation rhs = maxwell_expectation(b, dual_closed, ladder[c]);
                const double gap = std::abs(lhs.value - rhs.value);
                const double tail = lhs.tail_bound + rhs.tail_bound;
                const double slack = 1e-12 * (1.0 + std::abs(lhs.value));
                if (c > 0) violation = std::max(violation, gap - (prev_gap + prev_tail + tail + slack));
                prev_gap = gap;
                prev_tail = tail;
              }
            }
            return std::pair{std::max(0.0, violation), std::string("largest excess over the allowed growth")};
          }));
    }
  }
  report.seconds = timer.seconds();
  return report;
}

/// <W(beta_eps)>_R = prefactor * <T(*beta_eps)>_{1/(2R)} for smeared coordinate cycles.
inline SuiteReport verify_wilson_thooft(const VerifyOptions& opt) {
  SuiteReport report{"wilson-thooft", {}, 0.0};
  detail::Timer timer;
  const int cutoff = opt.mode_cutoff;
  const double cut = opt.lattice_cutoff;
  struct Setup {
    CoordinateCycle cycle;
    double coupling;
    double charge;
  };
  const std::vector<Setup> setups{{{1, {0.0, 0.7}}, 1.0, 1.0}, {{2, {1.3, 0.0}}, 1.3, 0.8}, {{1, {0.0, 2.1}}, 0.5, 1.7}};
  for (const auto& setup : setups) {
    const TheorySpec lift = TheorySpec::pform(2, 1, setup.coupling, cutoff);
    const TheorySpec closed = TheorySpec::closed_pform(2, 1, setup.coupling, cutoff);
    std::ostringstream tag;
    tag << "T2 cycle along x" << (setup.cycle.indices == 1 ? 1 : 2) << " R=" << setup.coupling << " r=" << setup.charge;
    std::vector<Complex> dual_sides;
    for (double eps : {0.1, 0.05}) {
      report.checks.push_back(detail::timed_check(tag.str() + " eps=" + detail::fmt(eps), 1e-6, [&] {
        const SmearedChain chain = smear_chain(setup.cycle, 2, eps, cutoff);
        const ExponentialObservable w = ExponentialObservable::wilson(chain.smearing, setup.charge);
        const LatticeExpectation lhs = expectation_exponential(w, closed, cut);
        const ExponentialDual d = dual_exponential(w, lift);
        const LatticeExpectation t = expectation_exponential(d.observable, closed.dual(), cut);
        const Complex rhs = d.prefactor * t.value;
        dual_sides.push_back(t.value);
        return std::pair{std::abs(lhs.value - rhs) / std::max(1.0, std::abs(lhs.value)),
                         "<W> = " + detail::fmt(lhs.value.real()) + ", <T> = " + detail::fmt(t.value.real())};
      }));
    }
    CheckResult varies;
    varies.name = tag.str() + ": the 't Hooft expectation depends on eps";
    varies.measured = dual_sides.size() == 2 ? std::abs(dual_sides[0] - dual_sides[1]) : 0.0;
    varies.passed = varies.measured > 1e-9;
    varies.detail = "|<T>(0.1) - <T>(0.05)|, must exceed 1e-9";
    report.checks.push_back(varies);
  }
  report.seconds = timer.seconds();
  return report;
}

/// dual(P Q) = dual(P) dual(Q) for support-orthogonal P and Q.
inline SuiteReport verify_factorisation(const VerifyOptions& opt) {
  SuiteReport report{"factorisation", {}, 0.0};
  detail::Timer timer;
  using GR = GaussianRational;
  sample::Rng rng(opt.seed ^ 0xFAC7);
  const int trials = opt.trials > 0 ? opt.trials : 30;
  report.checks.push_back(detail::timed_check(
      std::to_string(trials) + " exact block-diagonal Grams", 0.0, [&] {
        double worst = 0.0;
        for (int t = 0; t < trials; ++t) {
          const std::size_t k1 = static_cast<std::size_t>(sample::uniform_int(rng, 1, 2));
          const std::size_t k2 = static_cast<std::size_t>(sample::uniform_int(rng, 1, 2));
          const auto g1 = sample::exact_gram(rng, k1);
          const auto g2 = sample::exact_gram(rng, k2);
          DenseMatrix<GR> g(k1 + k2, k1 + k2);
          for (std::size_t i = 0; i < k1; ++i)
            for (std::size_t j = 0; j < k1; ++j) g(i, j) = g1(i, j);
          for (std::size_t i = 0; i < k2; ++i)
            for (std::size_t j = 0; j < k2; ++j) g(k1 + i, k1 + j) = g2(i, j);
          const auto rules = DiagramRules<GR>::forward(GR(sample::positive_rational(rng)));
          auto coef = [&] { return sample::gaussian_rational(rng, 5, 3, true); };
          const Polynomial<GR> p = sample::polynomial<GR>(rng, k1, 5, 2, coef);
          const Polynomial<GR> q = sample::polynomial<GR>(rng, k2, 5, 2, coef);
          const Polynomial<GR> pe = p.embedded(k1 + k2, 0);
          const Polynomial<GR> qe = q.embedded(k1 + k2, k1);
          const Polynomial<GR> joint = wick_transform(pe * qe, g, rules);
          const Polynomial<GR> split = wick_transform(pe, g, rules) * wick_transform(qe, g, rules);
          worst = std::max(worst, detail::max_coefficient_difference(joint, split));
        }
        return std::pair{worst, std::string()};
      }));

  auto dual_gap = [](const PolynomialObservable& p, const PolynomialObservable& q, const TheorySpec& t, bool exact) {
    const PolynomialObservable pq = multiply(p, q);
    auto [pe, qe] = on_common_generators(p, q);
    const DenseMatrix<Complex> g = pairing_matrix(pq);
    const double r2 = t.coupling * t.coupling;
    if (exact) {
      const auto ge = detail::exact_matrix(g);
      const auto rules = DiagramRules<GR>::forward(exact_from(Complex(r2)));
      const auto pe_exact = detail::exact_polynomial(pe.polynomial());
      const auto qe_exact = detail::exact_polynomial(qe.polynomial());
      const auto joint = wick_transform(pe_exact * qe_exact, ge, rules);
      const auto split = wick_transform(pe_exact, ge, rules) * wick_transform(qe_exact, ge, rules);
      return detail::max_coefficient_difference(joint, split);
    }
    const auto rules = DiagramRules<Complex>::forward(r2);
    const auto joint = wick_transform(pq.polynomial(), g, rules);
    const auto split = wick_transform(pe.polynomial(), g, rules) * wick_transform(qe.polynomial(), g, rules);
    double scale = 0.0;
    for (const auto& [e, c] : joint.terms()) scale = std::max(scale, std::abs(c));
    return detail::max_coefficient_difference(joint, split) / std::max(scale, 1e-300);
  };

  report.checks.push_back(detail::timed_check("disjoint mode supports on T2, exact arithmetic", 0.0, [&] {
    const int cutoff = 8;
    const TheorySpec t = TheorySpec::pform(2, 1, 0.9, cutoff);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      auto on_modes = [&](std::vector<Wavevector> ks) {
        SpectralForm f(2, 1, cutoff);
        for (const auto& k : ks)
          for (Phase ph : {Phase::kCos, Phase::kSin})
            for (IndexMask m : {IndexMask{1}, IndexMask{2}}) f.set({k, ph, m}, sample::uniform(rng, -1.0, 1.0));
        return f;
      };
      std::vector<LinearObservable> pg{{on_modes({Wavevector{1, 0}}), "P"}, {on_modes({Wavevector{1, 1}}), "P"}};
      std::vector<LinearObservable> qg{{on_modes({Wavevector{0, 1}, Wavevector{0, 2}}), "Q"}};
      auto coef = [&] { return sample::complex_coefficient(rng); };
      const PolynomialObservable p(t.field_space(), pg, sample::polynomial<Complex>(rng, 2, 4, 2, coef));
      const PolynomialObservable q(t.field_space(), qg, sample::polynomial<Complex>(rng, 1, 4, 2, coef));
      worst = std::max(worst, dual_gap(p, q, t, true));
    }
    return std::pair{worst, std::string("10 random pairs")};
  }));

  report.checks.push_back(detail::timed_check(
      "heat bumps at antipodal centres on T2, t=0.15, cutoff " + std::to_string(opt.mode_cutoff), 1e-6, [&] {
        const int cutoff = opt.mode_cutoff;
        const TheorySpec t = TheorySpec::pform(2, 1, 1.0, cutoff);
        const double pi = std::numbers::pi;
        const std::vector<double> c1{1.0, 1.0};
        const std::vector<double> c2{1.0 + pi, 1.0 + pi};
        std::vector<LinearObservable> pg{{heat_bump(2, cutoff, 1, c1, 0.15), "P"}, {heat_bump(2, cutoff, 2, c1, 0.15), "P"}};
        std::vector<LinearObservable> qg{{heat_bump(2, cutoff, 1, c2, 0.15), "Q"}, {heat_bump(2, cutoff, 2, c2, 0.15), "Q"}};
        auto coef = [&] { return sample::complex_coefficient(rng); };
        const PolynomialObservable p(t.field_space(), pg, sample::polynomial<Complex>(rng, 2, 4, 3, coef));
        const PolynomialObservable q(t.field_space(), qg, sample::polynomial<Complex>(rng, 2, 4, 3, coef));
        require(are_support_orthogonal(p, q, 1e-6), ErrorCode::kInvalidArgument, "bumps are not support-orthogonal");
        return std::pair{dual_gap(p, q, t, false), std::string("relative coefficient difference")};
      }));
  report.seconds = timer.seconds();
  return report;
}

inline SuiteReport run_suite(std::string_view name, const VerifyOptions& opt = {}) {
  if (name == "geometry") return verify_geometry(opt);
  if (name == "bd") return verify_bd(opt);
  if (name == "double-dual") return verify_double_dual(opt);
  if (name == "hermite") return verify_hermite(opt);
  if (name == "stokes") return verify_stokes(opt);
  if (name == "plancherel") return verify_plancherel(opt);
  if (name == "wilson-thooft") return verify_wilson_thooft(opt);
  if (name == "factorisation") return verify_factorisation(opt);
  if (name == "oracle") return verify_oracle(opt);
  throw Error(ErrorCode::kInvalidArgument, "unknown verification suite \"" + std::string(name) + "\"");
}

inline Json to_json(const SuiteReport& r, bool timings) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json j{{"name", c.name}, {"passed", c.passed}, {"measured", snap(c.measured)}, {"tolerance", snap(c.tolerance)}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    if (timings) j["seconds"] = snap(c.seconds);
    checks.push_back(std::move(j));
  }
  Json j{{"suite", r.suite}, {"passed", r.passed()}, {"checks", checks}};
  if (timings) j["seconds"] = snap(r.seconds);
  return j;
}

}  // namespace abdual
