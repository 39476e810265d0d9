#pragma once

/**
 * @file wick_engine.hpp
 * @brief Feynman-diagram sums over labelled half-edge pairings.
 *
 * A monomial X_1^{n_1}...X_k^{n_k} is a vertex set with n_i half-edges of colour i.
 * Expectation values pair every half-edge (perfect matchings, edge {i,j} weighted
 * by the propagator); the duality transform may also leave half-edges unpaired,
 * each becoming a source X~_i with the source weight. Both recursions pair the
 * lowest-index free half-edge and memoise on the residual count vector.
 *
 * The core templates run over any scalar with ScalarTraits (Complex or the exact
 * GaussianRational); the theory-level wrappers at the bottom use Complex.
 */

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "abdual/errors.hpp"
#include "abdual/exact.hpp"
#include "abdual/observable_algebra.hpp"
#include "abdual/polynomial.hpp"
#include "abdual/theory.hpp"

namespace abdual {

inline constexpr int kMaxHalfEdges = 24;

inline void check_half_edge_guard(const Exponents& n) {
  require(total_degree(n) <= kMaxHalfEdges, ErrorCode::kTooLarge,
          "monomial has " + std::to_string(total_degree(n)) + " half-edges; the limit is " +
              std::to_string(kMaxHalfEdges));
}

template <class S>
struct DiagramRules {
  S propagator;  ///< multiplies Gram entries on propagator edges
  S source;      ///< weight of one source (unpaired half-edge)
  bool inverse_star = false;

  /// Forward transform at coupling R (given as R^2): 1/(2R^2) and i/(2R^2).
  static DiagramRules forward(const S& coupling_sq) {
    const S w = ScalarTraits<S>::one() / (ScalarTraits<S>::from_int(2) * coupling_sq);
    return {w, ScalarTraits<S>::imag_unit() * w, false};
  }

  /// Inverse transform from the dual side at coupling rho: 1/(2 rho^2) and -i/(2 rho^2).
  static DiagramRules inverse(const S& dual_coupling_sq) {
    const S w = ScalarTraits<S>::one() / (ScalarTraits<S>::from_int(2) * dual_coupling_sq);
    return {w, -(ScalarTraits<S>::imag_unit() * w), true};
  }
};

namespace detail {

inline int lowest_occupied(const Exponents& n) {
  for (std::size_t i = 0; i < n.size(); ++i)
    if (n[i] > 0) return static_cast<int>(i);
  return -1;
}

template <class S>
S perfect_matching_sum(Exponents& n, const DenseMatrix<S>& edge, std::map<Exponents, S>& memo) {
  const int i = lowest_occupied(n);
  if (i < 0) return ScalarTraits<S>::one();
  if (auto it = memo.find(n); it != memo.end()) return it->second;
  const Exponents key = n;
  S total = ScalarTraits<S>::zero();
  --n[i];
  for (std::size_t j = 0; j < n.size(); ++j) {
    if (n[j] == 0 || ScalarTraits<S>::is_zero(edge(i, j))) continue;
    const int mult = n[j];
    --n[j];
    total += ScalarTraits<S>::from_int(mult) * edge(i, j) * perfect_matching_sum(n, edge, memo);
    ++n[j];
  }
  ++n[i];
  memo.emplace(key, total);
  return total;
}

template <class S>
const Polynomial<S>& partial_matching_sum(Exponents& n, const DenseMatrix<S>& edge, const S& source,
                                          std::map<Exponents, Polynomial<S>>& memo) {
  if (auto it = memo.find(n); it != memo.end()) return it->second;
  const std::size_t k = n.size();
  const Exponents key = n;
  const int i = lowest_occupied(n);
  Polynomial<S> total(k);
  if (i < 0) {
    total = Polynomial<S>::constant(k, ScalarTraits<S>::one());
  } else {
    --n[i];
    // the half-edge stays unpaired: one source of colour i
    {
      const Polynomial<S>& rest = partial_matching_sum(n, edge, source, memo);
      for (const auto& [e, c] : rest.terms()) {
        Exponents shifted = e;
        ++shifted[static_cast<std::size_t>(i)];
        total.add_term(shifted, source * c);
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (n[j] == 0 || ScalarTraits<S>::is_zero(edge(i, j))) continue;
      const S w = ScalarTraits<S>::from_int(n[j]) * edge(i, j);
      --n[j];
      total += partial_matching_sum(n, edge, source, memo) * w;
      ++n[j];
    }
    ++n[i];
  }
  return memo.emplace(key, std::move(total)).first->second;
}

}  // namespace detail

/// Sum over perfect matchings of each monomial, edges weighted by `edge`.
template <class S>
S wick_expectation(const Polynomial<S>& poly, const DenseMatrix<S>& edge) {
  require(edge.rows() == poly.num_vars() && edge.cols() == poly.num_vars(), ErrorCode::kInvalidArgument,
          "edge-weight matrix does not match the variable count");
  std::map<Exponents, S> memo;
  S total = ScalarTraits<S>::zero();
  for (const auto& [e, c] : poly.terms()) {
    check_half_edge_guard(e);
    if (total_degree(e) % 2 != 0) continue;
    Exponents n = e;
    total += c * detail::perfect_matching_sum(n, edge, memo);
  }
  return total;
}

/// Duality transform: sum over partial matchings; propagator edges weigh rules.propagator * gram(i,j).
template <class S>
Polynomial<S> wick_transform(const Polynomial<S>& poly, const DenseMatrix<S>& gram, const DiagramRules<S>& rules) {
  const std::size_t k = poly.num_vars();
  require(gram.rows() == k && gram.cols() == k, ErrorCode::kInvalidArgument, "Gram matrix does not match");
  DenseMatrix<S> edge(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) edge(i, j) = rules.propagator * gram(i, j);
  std::map<Exponents, Polynomial<S>> memo;
  Polynomial<S> out(k);
  for (const auto& [e, c] : poly.terms()) {
    check_half_edge_guard(e);
    Exponents n = e;
    out += detail::partial_matching_sum(n, edge, rules.source, memo) * c;
  }
  return out;
}

/// Number of labelled half-edge pairings (perfect, or partial when sources are allowed).
inline std::uint64_t count_matchings(const Exponents& half_edges, bool sources_allowed) {
  for (int v : half_edges) require(v >= 0, ErrorCode::kInvalidArgument, "negative half-edge count");
  check_half_edge_guard(half_edges);
  // Colours do not matter for the count: N half-edges give (N-1)!! perfect
  // matchings, and the partial count obeys T(N) = T(N-1) + (N-1) T(N-2).
  const int total = total_degree(half_edges);
  std::vector<std::uint64_t> t(static_cast<std::size_t>(total) + 1, 0);
  t[0] = 1;
  for (int m = 1; m <= total; ++m) {
    const std::uint64_t pair = m >= 2 ? static_cast<std::uint64_t>(m - 1) * t[static_cast<std::size_t>(m - 2)] : 0;
    t[static_cast<std::size_t>(m)] = (sources_allowed ? t[static_cast<std::size_t>(m - 1)] : 0) + pair;
  }
  return t[static_cast<std::size_t>(total)];
}

// ---------------------------------------------------------------------------
// Theory-level wrappers

/// Edge weights 1/2 <beta_i, Q^{-1} beta_j> for the Gaussian sector of T.
inline DenseMatrix<Complex> propagator_matrix(const PolynomialObservable& p, const TheorySpec& t) {
  require(p.dimension() == t.dimension() && p.degree() == t.degree, ErrorCode::kDegreeMismatch,
          "observable degree " + std::to_string(p.degree()) + " does not match the theory degree " +
              std::to_string(t.degree));
  const auto& gens = p.generators();
  if (t.variant == TheoryVariant::kClosedPForm) {
    for (const auto& g : gens) {
      require(harmonic_part(g.smearing).max_abs() <= 1e-12 * std::max(1.0, g.smearing.max_abs()),
              ErrorCode::kMasslessSector,
              "smearing has a harmonic component; use maxwell_expectation for the lattice sectors");
    }
  }
  std::vector<SpectralForm> q_inv;
  for (const auto& g : gens) q_inv.push_back(t.apply_inverse_operator(g.smearing));
  DenseMatrix<Complex> edge(gens.size(), gens.size());
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = 0; j < gens.size(); ++j) edge(i, j) = 0.5 * pairing(gens[i].smearing, q_inv[j]);
  return edge;
}

inline Complex expectation_diagrams(const PolynomialObservable& p, const TheorySpec& t) {
  return wick_expectation(p.polynomial(), propagator_matrix(p, t));
}

struct DualResult {
  PolynomialObservable observable;
  TheorySpec theory;
};

inline DualResult fourier_dual(const PolynomialObservable& p, const TheorySpec& t) {
  require(t.variant == TheoryVariant::kPForm, ErrorCode::kVariantMismatch,
          "the duality transform is defined on the p-form theory; lift the observable first");
  require(p.dimension() == t.dimension() && p.degree() == t.degree, ErrorCode::kDegreeMismatch,
          "observable degree does not match the theory");
  const auto rules = DiagramRules<Complex>::forward(t.coupling * t.coupling);
  Polynomial<Complex> dual = wick_transform(p.polynomial(), pairing_matrix(p), rules);
  PolynomialObservable transported = star_transport(p);
  return {canonicalise(PolynomialObservable(transported.space(), transported.generators(), std::move(dual))),
          t.dual()};
}

/// Inverse transform from the dual side (t_dual has coupling rho); returns the original theory.
inline DualResult inverse_fourier_dual(const PolynomialObservable& p, const TheorySpec& t_dual) {
  require(t_dual.variant == TheoryVariant::kPForm, ErrorCode::kVariantMismatch,
          "the inverse transform is defined on the p-form theory");
  require(p.dimension() == t_dual.dimension() && p.degree() == t_dual.degree, ErrorCode::kDegreeMismatch,
          "observable degree does not match the theory");
  const auto rules = DiagramRules<Complex>::inverse(t_dual.coupling * t_dual.coupling);
  Polynomial<Complex> dual = wick_transform(p.polynomial(), pairing_matrix(p), rules);
  PolynomialObservable transported = inverse_star_transport(p);
  return {canonicalise(PolynomialObservable(transported.space(), transported.generators(), std::move(dual))),
          t_dual.dual()};
}

}  // namespace abdual
