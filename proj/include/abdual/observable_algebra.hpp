#pragma once

// Smeared observables: O(a) = <a, beta> and polynomials in finitely many of them.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "abdual/errors.hpp"
#include "abdual/exact.hpp"
#include "abdual/polynomial.hpp"
#include "abdual/spectral_geometry.hpp"
#include "abdual/theory.hpp"

namespace abdual {

struct LinearObservable {
  SpectralForm smearing;
  std::string label;

  Complex operator()(const SpectralForm& a) const {
    require(a.dimension() == smearing.dimension() && a.degree() == smearing.degree(), ErrorCode::kDegreeMismatch,
            "field degree " + std::to_string(a.degree()) + " vs smearing degree " +
                std::to_string(smearing.degree()));
    return pairing(a, smearing);
  }
};

inline FieldSpace field_space_of(const SpectralForm& f) { return {f.dimension(), f.degree(), f.cutoff()}; }

/// Polynomial in the linear observables generators()[i], acting on fields of one degree.
class PolynomialObservable {
 public:
  PolynomialObservable() = default;

  PolynomialObservable(FieldSpace space, std::vector<LinearObservable> generators, Polynomial<Complex> poly)
      : space_(space), generators_(std::move(generators)), poly_(std::move(poly)) {
    require(poly_.num_vars() == generators_.size(), ErrorCode::kInvalidArgument,
            "polynomial variable count differs from generator count");
    for (const auto& g : generators_) {
      require(g.smearing.dimension() == space_.dimension && g.smearing.degree() == space_.degree,
              ErrorCode::kDegreeMismatch, "generator smearing outside the observable's field space");
    }
  }

  static PolynomialObservable constant(FieldSpace space, Complex c) {
    return {space, {}, Polynomial<Complex>::constant(0, c)};
  }

  /// c * O_beta^power.
  static PolynomialObservable power(const SpectralForm& beta, int exponent, Complex c = 1.0,
                                    std::string label = "O") {
    return {field_space_of(beta), {{beta, std::move(label)}}, Polynomial<Complex>::monomial({exponent}, c)};
  }

  const FieldSpace& space() const { return space_; }
  int degree() const { return space_.degree; }
  int dimension() const { return space_.dimension; }
  const std::vector<LinearObservable>& generators() const { return generators_; }
  std::size_t num_generators() const { return generators_.size(); }
  const Polynomial<Complex>& polynomial() const { return poly_; }

  std::vector<SpectralForm> smearings() const {
    std::vector<SpectralForm> out;
    out.reserve(generators_.size());
    for (const auto& g : generators_) out.push_back(g.smearing);
    return out;
  }

  friend bool operator==(const PolynomialObservable& a, const PolynomialObservable& b) {
    if (!(a.space_ == b.space_) || a.generators_.size() != b.generators_.size() || a.poly_ != b.poly_) return false;
    for (std::size_t i = 0; i < a.generators_.size(); ++i) {
      if (!(a.generators_[i].smearing == b.generators_[i].smearing)) return false;
    }
    return true;
  }

 private:
  FieldSpace space_{};
  std::vector<LinearObservable> generators_;
  Polynomial<Complex> poly_;
};

/// Hermitian Gram matrix <beta_i, beta_j>.
inline DenseMatrix<Complex> hermitian_gram(const std::vector<SpectralForm>& forms) {
  DenseMatrix<Complex> g(forms.size(), forms.size());
  for (std::size_t i = 0; i < forms.size(); ++i)
    for (std::size_t j = 0; j < forms.size(); ++j) g(i, j) = inner(forms[i], forms[j]);
  return g;
}

/// Bilinear Gram matrix sum_m beta_i[m] beta_j[m]; this is what the diagram rules contract.
inline DenseMatrix<Complex> pairing_matrix(const std::vector<SpectralForm>& forms) {
  DenseMatrix<Complex> g(forms.size(), forms.size());
  for (std::size_t i = 0; i < forms.size(); ++i)
    for (std::size_t j = 0; j < forms.size(); ++j) g(i, j) = pairing(forms[i], forms[j]);
  return g;
}

inline DenseMatrix<Complex> hermitian_gram(const PolynomialObservable& p) { return hermitian_gram(p.smearings()); }
inline DenseMatrix<Complex> pairing_matrix(const PolynomialObservable& p) { return pairing_matrix(p.smearings()); }

/// Relative pivot threshold below which a generator counts as dependent on earlier ones.
inline constexpr double kDependenceThreshold = 1e-10;

/**
 * Rewrites P over a linearly independent generator list.
 *
 * Generators are visited in order; each one is kept if its residual against the
 * span of the kept ones (the Cholesky pivot) exceeds kDependenceThreshold times
 * its squared norm, and is otherwise replaced in the polynomial by its least-squares
 * combination of the kept generators. Zero smearings map to 0. Inputs that are
 * already independent come back unchanged, so the operation is idempotent.
 */
inline PolynomialObservable canonicalise(const PolynomialObservable& p) {
  const auto& gens = p.generators();
  const std::size_t k = gens.size();
  const DenseMatrix<Complex> h = hermitian_gram(p);

  std::vector<std::size_t> kept;
  // images[i] = coefficients of generator i over the kept list (filled once all are known)
  std::vector<std::vector<std::pair<std::size_t, Complex>>> combos(k);
  std::vector<bool> is_kept(k, false);
  for (std::size_t j = 0; j < k; ++j) {
    const double hjj = h(j, j).real();
    if (hjj <= 0.0) continue;  // zero smearing
    if (kept.empty()) {
      kept.push_back(j);
      is_kept[j] = true;
      continue;
    }
    const Eigen::Index m = static_cast<Eigen::Index>(kept.size());
    Eigen::MatrixXcd hk(m, m);
    Eigen::VectorXcd rhs(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) hk(a, b) = h(kept[a], kept[b]);
      rhs(a) = h(kept[a], j);
    }
    const Eigen::VectorXcd c = hk.ldlt().solve(rhs);
    const double residual = hjj - (rhs.adjoint() * c)(0).real();
    if (residual > kDependenceThreshold * hjj) {
      kept.push_back(j);
      is_kept[j] = true;
    } else {
      for (Eigen::Index a = 0; a < m; ++a) combos[j].emplace_back(static_cast<std::size_t>(a), c(a));
    }
  }

  if (kept.size() == k) return p;

  const std::size_t m = kept.size();
  std::vector<Polynomial<Complex>> images;
  images.reserve(k);
  std::size_t next = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if (is_kept[j]) {
      images.push_back(Polynomial<Complex>::variable(m, next++));
      continue;
    }
    Polynomial<Complex> img(m);
    Exponents e(m, 0);
    for (const auto& [a, c] : combos[j]) {
      e[a] = 1;
      img.add_term(e, c);
      e[a] = 0;
    }
    images.push_back(std::move(img));
  }
  std::vector<LinearObservable> new_gens;
  for (std::size_t j : kept) new_gens.push_back(gens[j]);
  return {p.space(), std::move(new_gens), p.polynomial().substitute(images, m)};
}

/// Builds c * prod O_i^{n_i} from raw (generator, exponent) factors and canonicalises.
inline PolynomialObservable canonicalise(FieldSpace space, const std::vector<std::pair<LinearObservable, int>>& factors,
                                         Complex c = 1.0) {
  std::vector<LinearObservable> gens;
  Exponents e;
  for (const auto& [g, n] : factors) {
    require(n >= 0, ErrorCode::kInvalidArgument, "negative exponent");
    gens.push_back(g);
    e.push_back(n);
  }
  return canonicalise(PolynomialObservable(space, std::move(gens), Polynomial<Complex>::monomial(e, c)));
}

inline Complex evaluate(const PolynomialObservable& p, const SpectralForm& a) {
  require(a.dimension() == p.dimension() && a.degree() == p.degree(), ErrorCode::kDegreeMismatch,
          "observable acts on " + std::to_string(p.degree()) + "-forms, got a " + std::to_string(a.degree()) +
              "-form");
  std::vector<Complex> values;
  values.reserve(p.num_generators());
  for (const auto& g : p.generators()) values.push_back(g(a));
  return p.polynomial().evaluate<Complex>(values);
}

/// Same polynomial over transformed smearings, acting on `space`.
template <class F>
PolynomialObservable map_generators(const PolynomialObservable& p, FieldSpace space, F&& f) {
  std::vector<LinearObservable> gens;
  gens.reserve(p.num_generators());
  for (const auto& g : p.generators()) gens.push_back({f(g.smearing), g.label});
  return {space, std::move(gens), p.polynomial()};
}

/// Drops the coexact part of each smearing; the result agrees with P on closed forms.
inline PolynomialObservable restrict_to_closed(const PolynomialObservable& p) {
  return canonicalise(map_generators(p, p.space(), [](const SpectralForm& b) { return coexact_free_part(b); }));
}

inline PolynomialObservable star_transport(const PolynomialObservable& p) {
  FieldSpace s = p.space();
  s.degree = s.dimension - s.degree;
  return map_generators(p, s, [](const SpectralForm& b) { return hodge_star(b); });
}

inline PolynomialObservable inverse_star_transport(const PolynomialObservable& p) {
  FieldSpace s = p.space();
  s.degree = s.dimension - s.degree;
  return map_generators(p, s, [](const SpectralForm& b) { return inverse_hodge_star(b); });
}

/// Concatenates generator lists; P's variables come first.
inline std::pair<PolynomialObservable, PolynomialObservable> on_common_generators(const PolynomialObservable& p,
                                                                                  const PolynomialObservable& q) {
  require(p.space() == q.space(), ErrorCode::kDegreeMismatch, "observables act on different field spaces");
  std::vector<LinearObservable> gens = p.generators();
  gens.insert(gens.end(), q.generators().begin(), q.generators().end());
  const std::size_t total = gens.size();
  return {PolynomialObservable(p.space(), gens, p.polynomial().embedded(total, 0)),
          PolynomialObservable(p.space(), gens, q.polynomial().embedded(total, p.num_generators()))};
}

/// Product observable, not canonicalised (so disjoint generator blocks stay intact).
inline PolynomialObservable multiply(const PolynomialObservable& p, const PolynomialObservable& q) {
  auto [a, b] = on_common_generators(p, q);
  return {a.space(), a.generators(), a.polynomial() * b.polynomial()};
}

inline PolynomialObservable add(const PolynomialObservable& p, const PolynomialObservable& q) {
  auto [a, b] = on_common_generators(p, q);
  return {a.space(), a.generators(), a.polynomial() + b.polynomial()};
}

inline bool are_support_orthogonal(const PolynomialObservable& p, const PolynomialObservable& q, double tol) {
  require(p.degree() == q.degree() && p.dimension() == q.dimension(), ErrorCode::kDegreeMismatch,
          "observables act on different degrees");
  for (const auto& a : p.generators())
    for (const auto& b : q.generators())
      if (std::abs(inner(a.smearing, b.smearing)) > tol) return false;
  return true;
}

}  // namespace abdual
