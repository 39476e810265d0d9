#pragma once

/**
 * @file gaussian_oracle.hpp
 * @brief Independent evaluation of Gaussian integrals of polynomial observables.
 *
 * Nothing here reuses the pairing recursion of wick_engine. Centered moments come
 * from the moment generating function: for |j| = 2q,
 *
 *   E[g^j] = (prod_i j_i!) [t^j] (t^T C t / 2)^q / q!,
 *
 * and shifted moments from the binomial expansion over the means. On top of that
 * sit a Monte-Carlo sampler and the lattice-sector (Maxwell) expectation.
 */

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "abdual/errors.hpp"
#include "abdual/exact.hpp"
#include "abdual/observable_algebra.hpp"
#include "abdual/polynomial.hpp"
#include "abdual/rng.hpp"
#include "abdual/spectral_geometry.hpp"
#include "abdual/theory.hpp"
#include "abdual/wick_engine.hpp"

namespace abdual {

/// S(a) = <a, Q a>; R^2 |a|^2 for the form theories.
inline double action(const SpectralForm& a, const TheorySpec& t) {
  if (t.variant == TheoryVariant::kPForm) {
    t.check_field(a);
    const double n = norm(a);
    return t.coupling * t.coupling * n * n;
  }
  return inner(a, t.apply_operator(a)).real();
}

/// Joint law of the generator values: mean[i] + centered Gaussian with E[g_i g_j] = covariance(i, j).
template <class S>
struct Gaussian {
  DenseMatrix<S> covariance;
  std::vector<S> mean;

  std::size_t size() const { return mean.size(); }

  static Gaussian centered(DenseMatrix<S> cov) {
    std::vector<S> mu(cov.rows(), ScalarTraits<S>::zero());
    return {std::move(cov), std::move(mu)};
  }
};

using GaussianSpec = Gaussian<Complex>;

/// The Gaussian sector of T seen through P's generators (zero mean).
inline GaussianSpec gaussian_sector(const PolynomialObservable& p, const TheorySpec& t) {
  return GaussianSpec::centered(propagator_matrix(p, t));
}

inline std::int64_t binomial(int n, int r) {
  std::int64_t b = 1;
  for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
  return b;
}

/// Centered moments E[prod g_i^{j_i}] via the generating function, cached by multi-index.
template <class S>
class CenteredMoments {
 public:
  explicit CenteredMoments(const DenseMatrix<S>& covariance) : k_(covariance.rows()) {
    half_form_ = Polynomial<S>(k_);
    const S half = ScalarTraits<S>::one() / ScalarTraits<S>::from_int(2);
    Exponents e(k_, 0);
    for (std::size_t a = 0; a < k_; ++a) {
      for (std::size_t b = 0; b < k_; ++b) {
        ++e[a];
        ++e[b];
        half_form_.add_term(e, half * covariance(a, b));
        --e[a];
        --e[b];
      }
    }
    powers_.push_back(Polynomial<S>::constant(k_, ScalarTraits<S>::one()));
  }

  const S& operator()(const Exponents& j) {
    if (auto it = cache_.find(j); it != cache_.end()) return it->second;
    const int total = total_degree(j);
    S value = ScalarTraits<S>::zero();
    if (total % 2 == 0) {
      const int q = total / 2;
      while (static_cast<int>(powers_.size()) <= q) powers_.push_back(powers_.back() * half_form_);
      value = powers_[static_cast<std::size_t>(q)].coefficient(j);
      if (!ScalarTraits<S>::is_zero(value)) {
        for (int ji : j)
          for (int f = 2; f <= ji; ++f) value *= ScalarTraits<S>::from_int(f);
        for (int f = 2; f <= q; ++f) value /= ScalarTraits<S>::from_int(f);
      }
    }
    return cache_.emplace(j, std::move(value)).first->second;
  }

 private:
  std::size_t k_;
  Polynomial<S> half_form_;
  std::vector<Polynomial<S>> powers_;
  std::map<Exponents, S> cache_;
};

/// E[P(mu + g)] as a polynomial in the means mu: sum over j <= e of binom(e, j) mu^{e-j} E[g^j].
template <class S>
Polynomial<S> mean_polynomial(const Polynomial<S>& poly, CenteredMoments<S>& moments) {
  const std::size_t k = poly.num_vars();
  Polynomial<S> out(k);
  for (const auto& [e, c] : poly.terms()) {
    check_half_edge_guard(e);
    Exponents j(k, 0);
    while (true) {
      const S& m = moments(j);
      if (!ScalarTraits<S>::is_zero(m)) {
        std::int64_t binom = 1;
        Exponents rest(k);
        for (std::size_t i = 0; i < k; ++i) {
          binom *= binomial(e[i], j[i]);
          rest[i] = e[i] - j[i];
        }
        out.add_term(rest, c * ScalarTraits<S>::from_int(binom) * m);
      }
      std::size_t axis = 0;
      while (axis < k && j[axis] == e[axis]) j[axis++] = 0;
      if (axis == k) break;
      ++j[axis];
    }
  }
  return out;
}

template <class S>
S moments_isserlis(const Polynomial<S>& poly, const Gaussian<S>& g) {
  require(g.covariance.rows() == poly.num_vars() && g.mean.size() == poly.num_vars(), ErrorCode::kInvalidArgument,
          "Gaussian does not match the variable count");
  CenteredMoments<S> moments(g.covariance);
  return mean_polynomial(poly, moments).template evaluate<S>(g.mean);
}

inline Complex moments_isserlis(const PolynomialObservable& p, const GaussianSpec& g) {
  return moments_isserlis(p.polynomial(), g);
}

// ---------------------------------------------------------------------------
// Monte Carlo

struct MonteCarloResult {
  Complex estimate;
  double standard_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string rng = kRngAlgorithm;
};

inline constexpr std::size_t kMonteCarloBatch = 8192;

inline MonteCarloResult moments_montecarlo(const Polynomial<Complex>& poly, const GaussianSpec& g,
                                           std::size_t samples, std::uint64_t seed, unsigned threads = 1) {
  require(samples >= 1000, ErrorCode::kInvalidArgument, "Monte Carlo needs at least 1000 samples");
  const std::size_t k = poly.num_vars();
  require(g.covariance.rows() == k && g.mean.size() == k, ErrorCode::kInvalidArgument,
          "Gaussian does not match the variable count");

  Eigen::MatrixXd cov(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  double scale = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) scale = std::max(scale, std::abs(g.covariance(i, j)));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const Complex c = g.covariance(i, j);
      require(std::abs(c.imag()) <= 1e-12 * std::max(scale, 1e-300), ErrorCode::kNotPositive,
              "sampling needs a real covariance");
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c.real();
    }
  }
  Eigen::MatrixXd factor = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  if (k > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const Eigen::VectorXd ev = eig.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      require(ev(i) >= -1e-12 * std::max(scale, 1e-300), ErrorCode::kNotPositive,
              "covariance has a negative eigenvalue " + std::to_string(ev(i)));
      factor.col(i) = eig.eigenvectors().col(i) * std::sqrt(std::max(ev(i), 0.0));
    }
  }

  const std::size_t batches = (samples + kMonteCarloBatch - 1) / kMonteCarloBatch;
  std::vector<Complex> sums(batches);
  std::vector<double> squares(batches, 0.0);
  auto run_batch = [&](std::size_t b) {
    Philox4x32 engine(seed, b);
    std::normal_distribution<double> normal;
    const std::size_t count = std::min(kMonteCarloBatch, samples - b * kMonteCarloBatch);
    Eigen::VectorXd z(static_cast<Eigen::Index>(k));
    std::vector<Complex> x(k);
    Complex sum{};
    double sq = 0.0;
    for (std::size_t s = 0; s < count; ++s) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(engine);
      const Eigen::VectorXd y = factor * z;
      for (std::size_t i = 0; i < k; ++i) x[i] = g.mean[i] + y(static_cast<Eigen::Index>(i));
      const Complex v = poly.evaluate<Complex>(x);
      sum += v;
      sq += std::norm(v);
    }
    sums[b] = sum;
    squares[b] = sq;
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(batches)));
  if (workers == 1) {
    for (std::size_t b = 0; b < batches; ++b) run_batch(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t b = w; b < batches; b += workers) run_batch(b);
      });
    }
    for (auto& th : pool) th.join();
  }
  Complex total{};
  double total_sq = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    total += sums[b];
    total_sq += squares[b];
  }
  const double n = static_cast<double>(samples);
  const Complex mean = total / n;
  const double var = std::max(0.0, (total_sq - n * std::norm(mean)) / (n - 1.0));
  return {mean, std::sqrt(var / n), samples, seed};
}

inline MonteCarloResult moments_montecarlo(const PolynomialObservable& p, const GaussianSpec& g,
                                           std::size_t samples, std::uint64_t seed, unsigned threads = 1) {
  return moments_montecarlo(p.polynomial(), g, samples, seed, threads);
}

// ---------------------------------------------------------------------------
// Lattice sectors

struct LatticeExpectation {
  Complex value;
  double tail_bound = 0.0;
  double lattice_cutoff = 0.0;
  int mode_cutoff = 0;
  std::size_t sectors = 0;
  bool warning = false;  ///< no nonzero lattice point below the cutoff
};

/// Per-sector sums for the closed theory: harmonic lattice x Gaussian on exact forms.
class LatticeSectorSum {
 public:
  LatticeSectorSum(const TheorySpec& t, std::size_t num_generators)
      : lattice_(t.dimension(), t.degree, t.coupling, t.cutoff()), shift_(num_generators, lattice_.rank()) {
    require(t.variant == TheoryVariant::kClosedPForm, ErrorCode::kVariantMismatch,
            "lattice sectors belong to the closed p-form theory");
  }

  const HarmonicLattice& lattice() const { return lattice_; }

  /// mean_i(m) = <lambda(m), beta_i> = sum_I shift(i, I) m_I.
  void set_smearings(const std::vector<SpectralForm>& smearings) {
    for (std::size_t i = 0; i < smearings.size(); ++i) {
      for (std::size_t a = 0; a < lattice_.rank(); ++a) {
        shift_(i, a) = lattice_.generator_mode_coefficient() *
                       smearings[i].coefficient({Wavevector{}, Phase::kCos, lattice_.index_sets()[a]});
      }
    }
  }

  /// sum_lambda w(lambda) f(mean(lambda)) / sum_lambda w(lambda), with a tail estimate from the next shell.
  template <class F>
  LatticeExpectation average(double cutoff, F&& f) const {
    require(cutoff >= 0.0, ErrorCode::kInvalidArgument, "lattice cutoff must be nonnegative");
    const double outer = 2.0 * cutoff + 8.0;
    const auto points = lattice_points(lattice_, outer);
    std::vector<Complex> mean(shift_.rows());
    Complex num{};
    double den = 0.0;
    Complex shell_num{};
    double shell_abs = 0.0;
    double shell_den = 0.0;
    std::size_t inside = 0;
    bool neighbour = false;
    for (const auto& pt : points) {
      for (std::size_t i = 0; i < shift_.rows(); ++i) {
        Complex s{};
        for (std::size_t a = 0; a < shift_.cols(); ++a) s += shift_(i, a) * static_cast<double>(pt.multiplicities[a]);
        mean[i] = s;
      }
      const double w = std::exp(-pt.action);
      const Complex v = w * f(mean);
      if (pt.action <= cutoff) {
        num += v;
        den += w;
        ++inside;
        if (pt.action > 0.0) neighbour = true;
      } else {
        shell_num += v;
        shell_abs += std::abs(v);
        shell_den += w;
      }
    }
    LatticeExpectation out;
    out.value = num / den;
    out.tail_bound = 2.0 * (shell_abs + std::abs(out.value) * shell_den) / den;
    out.lattice_cutoff = cutoff;
    out.mode_cutoff = lattice_.cutoff();
    out.sectors = inside;
    out.warning = !neighbour;
    return out;
  }

 private:
  HarmonicLattice lattice_;
  DenseMatrix<Complex> shift_;
};

/// <P>_R in the closed p-form theory: harmonic lattice sectors, Gaussian exact part.
inline LatticeExpectation maxwell_expectation(const PolynomialObservable& p, const TheorySpec& t,
                                              double lattice_cutoff) {
  require(t.variant == TheoryVariant::kClosedPForm, ErrorCode::kVariantMismatch,
          "maxwell_expectation needs the closed p-form theory");
  require(p.dimension() == t.dimension() && p.degree() == t.degree, ErrorCode::kDegreeMismatch,
          "observable degree does not match the theory");
  // closed fields do not see the coexact part of a smearing
  std::vector<SpectralForm> beta;
  for (const auto& g : p.generators()) beta.push_back(coexact_free_part(g.smearing));
  const std::size_t k = beta.size();

  DenseMatrix<Complex> cov(k, k);
  std::vector<SpectralForm> q_inv;
  for (const auto& b : beta) q_inv.push_back(t.apply_inverse_operator(b));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) cov(i, j) = 0.5 * pairing(beta[i], q_inv[j]);
  CenteredMoments<Complex> moments(cov);
  const Polynomial<Complex> in_means = mean_polynomial(p.polynomial(), moments);

  LatticeSectorSum sectors(t, k);
  sectors.set_smearings(beta);
  return sectors.average(lattice_cutoff,
                         [&](const std::vector<Complex>& mu) { return in_means.evaluate<Complex>(mu); });
}

/**
 * Pointwise value of the dual observable by completing the square:
 * the integral of O(a) e^{-S_R(a)} against the plane wave in a~ is a Gaussian
 * expectation with means (i / 2R^2) <a~, *beta_i> and covariance G / 2R^2.
 */
inline Complex fourier_dual_integral(const PolynomialObservable& p, const TheorySpec& t, const SpectralForm& dual_point) {
  require(t.variant == TheoryVariant::kPForm, ErrorCode::kVariantMismatch, "the transform integral needs the p-form theory");
  require(p.degree() == t.degree && dual_point.degree() == t.dimension() - t.degree, ErrorCode::kDegreeMismatch,
          "dual point must be an (n-p)-form");
  const double r2 = t.coupling * t.coupling;
  GaussianSpec g;
  g.covariance = pairing_matrix(p);
  for (std::size_t i = 0; i < g.covariance.rows(); ++i)
    for (std::size_t j = 0; j < g.covariance.cols(); ++j) g.covariance(i, j) /= 2.0 * r2;
  for (const auto& gen : p.generators()) {
    g.mean.push_back(Complex(0.0, 1.0 / (2.0 * r2)) * pairing(dual_point, hodge_star(gen.smearing)));
  }
  return moments_isserlis(p.polynomial(), g);
}

}  // namespace abdual
