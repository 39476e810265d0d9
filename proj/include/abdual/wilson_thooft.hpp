#pragma once

/**
 * @file wilson_thooft.hpp
 * @brief Plane-wave observables e^{i r <a, beta>}, chain smearing and their duality.
 *
 * Both kinds store the form they pair the field with, so evaluation is a single
 * L^2 pairing. For a 't Hooft operator on a q-chain C, T(a) = e^{i r int_C *a}
 * = e^{i r <a, *^{-1} delta_C>}; the chain-side form is kept alongside for reporting.
 */

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "abdual/errors.hpp"
#include "abdual/gaussian_oracle.hpp"
#include "abdual/observable_algebra.hpp"
#include "abdual/spectral_geometry.hpp"
#include "abdual/theory.hpp"
#include "abdual/wick_engine.hpp"

namespace abdual {

enum class ExponentialKind { kWilson, kThooft };

inline std::string_view to_string(ExponentialKind k) { return k == ExponentialKind::kWilson ? "wilson" : "thooft"; }

struct ExponentialObservable {
  ExponentialKind kind = ExponentialKind::kWilson;
  SpectralForm smearing;        ///< paired with the field
  SpectralForm chain_smearing;  ///< the chain's own form (equal to smearing for Wilson)
  Complex charge;

  static ExponentialObservable wilson(const SpectralForm& beta, Complex r) {
    return {ExponentialKind::kWilson, beta, beta, r};
  }

  /// 't Hooft operator of a chain with smearing beta_chain, acting on (n - q)-forms.
  static ExponentialObservable thooft(const SpectralForm& beta_chain, Complex r) {
    return {ExponentialKind::kThooft, inverse_hodge_star(beta_chain), beta_chain, r};
  }

  int degree() const { return smearing.degree(); }

  Complex evaluate(const SpectralForm& a) const {
    require(a.dimension() == smearing.dimension() && a.degree() == smearing.degree(), ErrorCode::kDegreeMismatch,
            "field degree does not match the exponential observable");
    return std::exp(Complex(0.0, 1.0) * charge * pairing(a, smearing));
  }
};

// ---------------------------------------------------------------------------
// Chains

struct CoordinateCycle {
  IndexMask indices = 0;       ///< coordinate directions spanned by the cycle
  std::vector<double> offset;  ///< position in the transverse directions (all n components given)
};

/// Union of oriented linear p-simplices; each simplex lists p + 1 vertices in R^n.
struct ParametricChain {
  int degree = 1;
  std::vector<std::vector<std::vector<double>>> simplices;
};

using ChainSpec = std::variant<CoordinateCycle, ParametricChain>;

struct SmearedChain {
  ChainSpec chain;
  double epsilon = 0.0;
  SpectralForm smearing;
  double quadrature_error = 0.0;
};

inline constexpr double kQuadratureTolerance = 1e-8;

namespace detail {

inline double coordinate_cycle_coefficient(const FormMode& mode, const CoordinateCycle& c, int n) {
  if (mode.indices != c.indices) return 0.0;
  for (int j = 0; j < n; ++j)
    if ((c.indices & (1u << j)) && mode.k[j] != 0) return 0.0;
  // the integrand is constant along the cycle: (2pi)^p times its value at the offset
  const int p = degree_of(c.indices);
  return std::pow(2.0 * std::numbers::pi, p) * mode_value(mode, n, c.offset);
}

/// Integral over the unit p-simplex of f via collapsed coordinates and adaptive Gauss-Kronrod.
inline double simplex_integral(int p, const std::function<double(std::span<const double>)>& f, double& error) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  std::array<double, 4> u{};
  std::function<double(int, double)> level = [&](int axis, double remaining) -> double {
    if (axis == p) return f(std::span<const double>(u.data(), static_cast<std::size_t>(p)));
    double err = 0.0;
    auto g = [&](double t) {
      u[static_cast<std::size_t>(axis)] = t * remaining;
      return remaining * level(axis + 1, remaining * (1.0 - t));
    };
    const double v = GK::integrate(g, 0.0, 1.0, 12, 1e-13, &err);
    error += err;
    return v;
  };
  return level(0, 1.0);
}

/// Integral over an oriented linear simplex of the mode function times dx_I pulled back.
inline double simplex_mode_integral(const FormMode& mode, const std::vector<std::vector<double>>& vertices, int n,
                                    double& error) {
  const int p = static_cast<int>(vertices.size()) - 1;
  // pullback of dx_I is det of the I-rows of the edge matrix times du_1...du_p
  std::vector<int> rows;
  for (int j = 0; j < n; ++j)
    if (mode.indices & (1u << j)) rows.push_back(j);
  Eigen::MatrixXd minor(p, p);
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < p; ++c)
      minor(r, c) = vertices[static_cast<std::size_t>(c + 1)][static_cast<std::size_t>(rows[r])] -
                    vertices[0][static_cast<std::size_t>(rows[r])];
  const double jac = p == 0 ? 1.0 : minor.determinant();
  if (jac == 0.0) return 0.0;
  std::vector<double> x(static_cast<std::size_t>(n));
  auto integrand = [&](std::span<const double> u) {
    for (int j = 0; j < n; ++j) {
      double v = vertices[0][static_cast<std::size_t>(j)];
      for (int a = 0; a < p; ++a)
        v += u[static_cast<std::size_t>(a)] *
             (vertices[static_cast<std::size_t>(a + 1)][static_cast<std::size_t>(j)] - vertices[0][static_cast<std::size_t>(j)]);
      x[static_cast<std::size_t>(j)] = v;
    }
    return mode_value(mode, n, x);
  };
  double err = 0.0;
  const double value = simplex_integral(p, integrand, err);
  error += std::abs(jac) * err;
  return jac * value;
}

}  // namespace detail

/// Heat-smoothed Poincare dual of a chain: mode coefficients int_C mode, damped by e^{-eps |k|^2}.
inline SmearedChain smear_chain(const ChainSpec& chain, int dimension, double epsilon, int cutoff) {
  require(epsilon > 0.0, ErrorCode::kInvalidArgument, "smoothing width must be positive");
  GeometrySpec{dimension}.validate();
  SmearedChain out{chain, epsilon, {}, 0.0};
  if (const auto* cycle = std::get_if<CoordinateCycle>(&chain)) {
    require(static_cast<int>(cycle->offset.size()) == dimension, ErrorCode::kInvalidArgument,
            "cycle offset needs one coordinate per dimension");
    require((cycle->indices & ~full_mask(dimension)) == 0, ErrorCode::kInvalidArgument, "cycle index outside dimension");
    const int p = degree_of(cycle->indices);
    out.smearing = SpectralForm(dimension, p, cutoff);
    for (const FormMode& mode : ModeBasis::get(dimension, p, cutoff)->modes()) {
      const double c = detail::coordinate_cycle_coefficient(mode, *cycle, dimension);
      if (c != 0.0) out.smearing.set(mode, c * std::exp(-epsilon * squared_norm(mode.k)));
    }
    return out;
  }
  const auto& cells = std::get<ParametricChain>(chain);
  const int p = cells.degree;
  require(p >= 1 && p < dimension && p <= 3, ErrorCode::kDegreeOutOfRange, "parametric chains need 1 <= p < n");
  for (const auto& s : cells.simplices) {
    require(static_cast<int>(s.size()) == p + 1, ErrorCode::kInvalidArgument, "each simplex needs p + 1 vertices");
    for (const auto& v : s)
      require(static_cast<int>(v.size()) == dimension, ErrorCode::kInvalidArgument, "vertex has wrong dimension");
  }
  out.smearing = SpectralForm(dimension, p, cutoff);
  double error = 0.0;
  for (const FormMode& mode : ModeBasis::get(dimension, p, cutoff)->modes()) {
    double c = 0.0;
    double mode_error = 0.0;
    for (const auto& s : cells.simplices) c += detail::simplex_mode_integral(mode, s, dimension, mode_error);
    error = std::max(error, mode_error);
    if (c != 0.0) out.smearing.set(mode, c * std::exp(-epsilon * squared_norm(mode.k)));
  }
  require(error <= kQuadratureTolerance, ErrorCode::kQuadratureFail,
          "estimated quadrature error " + std::to_string(error) + " exceeds " + std::to_string(kQuadratureTolerance));
  out.quadrature_error = error;
  return out;
}

// ---------------------------------------------------------------------------
// Duality and expectations

struct ExponentialDual {
  Complex prefactor;
  ExponentialObservable observable;
  TheorySpec theory;
};

/**
 * Dual of e^{i s X} under the diagram rules (propagator w, source u):
 * e^{-s^2 w g / 2} e^{i s u X~}, with g = <beta, beta>.
 */
inline ExponentialDual dual_exponential(const ExponentialObservable& e, const TheorySpec& t) {
  require(t.variant == TheoryVariant::kPForm, ErrorCode::kVariantMismatch, "duality acts on the p-form theory");
  require(e.kind == ExponentialKind::kWilson, ErrorCode::kInvalidArgument, "the forward transform takes a Wilson operator");
  require(e.degree() == t.degree, ErrorCode::kDegreeMismatch, "observable degree does not match the theory");
  const auto rules = DiagramRules<Complex>::forward(t.coupling * t.coupling);
  const Complex g = pairing(e.smearing, e.smearing);
  const Complex pref = std::exp(-e.charge * e.charge * rules.propagator * g / 2.0);
  const Complex charge = e.charge * rules.source;
  ExponentialObservable dual{ExponentialKind::kThooft, hodge_star(e.smearing), SpectralForm{}, charge};
  dual.chain_smearing = hodge_star(dual.smearing);  // ** beta = (-1)^{p(n-p)} beta
  return {pref, std::move(dual), t.dual()};
}

/// Inverse transform from the dual side: weights 1/(2 rho^2) and -i/(2 rho^2), inverse star.
inline ExponentialDual inverse_dual_exponential(const ExponentialObservable& e, const TheorySpec& t_dual) {
  require(t_dual.variant == TheoryVariant::kPForm, ErrorCode::kVariantMismatch, "duality acts on the p-form theory");
  require(e.degree() == t_dual.degree, ErrorCode::kDegreeMismatch, "observable degree does not match the theory");
  const auto rules = DiagramRules<Complex>::inverse(t_dual.coupling * t_dual.coupling);
  const Complex g = pairing(e.smearing, e.smearing);
  const Complex pref = std::exp(-e.charge * e.charge * rules.propagator * g / 2.0);
  SpectralForm beta = inverse_hodge_star(e.smearing);
  return {pref, ExponentialObservable::wilson(beta, e.charge * rules.source), t_dual.dual()};
}

/// Expectation of an exponential observable; the closed theory adds the harmonic lattice factor.
inline LatticeExpectation expectation_exponential(const ExponentialObservable& e, const TheorySpec& t,
                                                  double lattice_cutoff) {
  require(e.degree() == t.degree && e.smearing.dimension() == t.dimension(), ErrorCode::kDegreeMismatch,
          "observable degree does not match the theory");
  const SpectralForm beta =
      t.variant == TheoryVariant::kClosedPForm ? coexact_free_part(e.smearing) : e.smearing;
  const Complex variance = 0.5 * pairing(beta, t.apply_inverse_operator(beta));
  const Complex gaussian = std::exp(-e.charge * e.charge * variance / 2.0);
  if (t.variant != TheoryVariant::kClosedPForm) {
    LatticeExpectation out;
    out.value = gaussian;
    out.mode_cutoff = t.cutoff();
    out.sectors = 1;
    return out;
  }
  LatticeSectorSum sectors(t, 1);
  sectors.set_smearings({beta});
  const Complex r = e.charge;
  LatticeExpectation lat = sectors.average(lattice_cutoff, [&](const std::vector<Complex>& mu) {
    return std::exp(Complex(0.0, 1.0) * r * mu[0]);
  });
  lat.value *= gaussian;
  lat.tail_bound *= std::abs(gaussian);
  return lat;
}

/// sum_{j <= N} (i r)^j O^j / j! over the single generator of E.
inline PolynomialObservable taylor_truncate(const ExponentialObservable& e, int max_degree) {
  require(max_degree >= 0, ErrorCode::kInvalidArgument, "Taylor degree must be nonnegative");
  Polynomial<Complex> poly(1);
  Complex c = 1.0;
  for (int j = 0; j <= max_degree; ++j) {
    poly.add_term({j}, c);
    c *= Complex(0.0, 1.0) * e.charge / static_cast<double>(j + 1);
  }
  return {field_space_of(e.smearing), {{e.smearing, "O"}}, std::move(poly)};
}

}  // namespace abdual
