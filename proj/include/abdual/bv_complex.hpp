#pragma once

/**
 * @file bv_complex.hpp
 * @brief Free BV complex of smeared observables.
 *
 * A graded observable is a polynomial in even field generators X_a = O(beta_a)
 * (degree 0) and odd antifield generators v_b = v(chi_b) (degree -1). Terms are
 * stored in normal form: antifields sorted by index, each at most once.
 *
 * With P(b, a) = <chi_b, beta_a> and C(b, a) the field image of an antifield,
 *
 *   d_cl = sum_{a,b} C(b, a) X_a d/dv_b,      D = sum_{a,b} P(b, a) d/dX_a d/dv_b,
 *
 * where d/dv_b is the left derivative. For a theory with operator Q the
 * classical image of v(chi) is -O(2 Q chi), i.e. the contraction with -dS;
 * with this sign E[(d_cl + D) W] = 0 for every W (Stokes).
 */

#include <bit>
#include <compare>
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

using AntifieldMask = std::uint32_t;

inline constexpr std::size_t kMaxAntifields = 32;

struct GradedMonomial {
  Exponents fields;
  AntifieldMask antifields = 0;

  auto operator<=>(const GradedMonomial&) const = default;
  int degree() const { return -std::popcount(antifields); }
};

/// Sign of v_A * v_B after sorting into normal form (0 if they share a generator).
inline int koszul_product_sign(AntifieldMask a, AntifieldMask b) {
  if (a & b) return 0;
  int swaps = 0;
  for (unsigned i = 0; i < kMaxAntifields; ++i) {
    if (a & (1u << i)) swaps += std::popcount(b & ((1u << i) - 1u));
  }
  return swaps % 2 == 0 ? 1 : -1;
}

template <class S>
class GradedPolynomial {
 public:
  using Terms = std::map<GradedMonomial, S>;

  GradedPolynomial() = default;
  GradedPolynomial(std::size_t num_fields, std::size_t num_antifields)
      : num_fields_(num_fields), num_antifields_(num_antifields) {
    require(num_antifields <= kMaxAntifields, ErrorCode::kTooLarge, "too many antifield generators");
  }

  static GradedPolynomial constant(std::size_t nf, std::size_t na, const S& c) {
    GradedPolynomial g(nf, na);
    g.add_term({Exponents(nf, 0), 0}, c);
    return g;
  }
  static GradedPolynomial field(std::size_t nf, std::size_t na, std::size_t a) {
    GradedPolynomial g(nf, na);
    Exponents e(nf, 0);
    e.at(a) = 1;
    g.add_term({e, 0}, ScalarTraits<S>::one());
    return g;
  }
  static GradedPolynomial antifield(std::size_t nf, std::size_t na, std::size_t b) {
    require(b < na, ErrorCode::kInvalidArgument, "antifield index out of range");
    GradedPolynomial g(nf, na);
    g.add_term({Exponents(nf, 0), static_cast<AntifieldMask>(1u << b)}, ScalarTraits<S>::one());
    return g;
  }
  /// Embeds a degree-0 polynomial.
  static GradedPolynomial from_polynomial(const Polynomial<S>& p, std::size_t na) {
    GradedPolynomial g(p.num_vars(), na);
    for (const auto& [e, c] : p.terms()) g.add_term({e, 0}, c);
    return g;
  }

  std::size_t num_fields() const { return num_fields_; }
  std::size_t num_antifields() const { return num_antifields_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  S coefficient(const GradedMonomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? ScalarTraits<S>::zero() : it->second;
  }

  void add_term(const GradedMonomial& m, const S& c) {
    require(m.fields.size() == num_fields_, ErrorCode::kInvalidArgument, "field exponent vector has wrong length");
    require(num_antifields_ == kMaxAntifields || (m.antifields >> num_antifields_) == 0,
            ErrorCode::kInvalidArgument, "antifield outside generator list");
    if (ScalarTraits<S>::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (ScalarTraits<S>::is_zero(it->second)) terms_.erase(it);
    }
  }

  /// Cohomological degree; throws unless every term has the same degree.
  int degree() const {
    if (terms_.empty()) return 0;
    const int d = terms_.begin()->first.degree();
    for (const auto& [m, c] : terms_)
      require(m.degree() == d, ErrorCode::kInvalidArgument, "observable is not homogeneous");
    return d;
  }

  int max_antifield_count() const {
    int n = 0;
    for (const auto& [m, c] : terms_) n = std::max(n, -m.degree());
    return n;
  }

  /// Highest total number of generators (fields plus antifields) in one term.
  int total_degree_bound() const {
    int n = 0;
    for (const auto& [m, c] : terms_) n = std::max(n, total_degree(m.fields) - m.degree());
    return n;
  }

  GradedPolynomial& operator+=(const GradedPolynomial& o) {
    check(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  GradedPolynomial& operator-=(const GradedPolynomial& o) {
    check(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  GradedPolynomial& operator*=(const S& s) {
    if (ScalarTraits<S>::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend GradedPolynomial operator+(GradedPolynomial a, const GradedPolynomial& b) { return a += b; }
  friend GradedPolynomial operator-(GradedPolynomial a, const GradedPolynomial& b) { return a -= b; }
  friend GradedPolynomial operator*(GradedPolynomial a, const S& s) { return a *= s; }
  friend GradedPolynomial operator*(const S& s, GradedPolynomial a) { return a *= s; }

  friend GradedPolynomial operator*(const GradedPolynomial& a, const GradedPolynomial& b) {
    a.check(b);
    GradedPolynomial out(a.num_fields_, a.num_antifields_);
    Exponents e(a.num_fields_);
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        const int sign = koszul_product_sign(ma.antifields, mb.antifields);
        if (sign == 0) continue;
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ma.fields[i] + mb.fields[i];
        S c = ca * cb;
        if (sign < 0) c = -c;
        out.add_term({e, ma.antifields | mb.antifields}, c);
      }
    }
    return out;
  }

  friend bool operator==(const GradedPolynomial& a, const GradedPolynomial& b) {
    return a.num_fields_ == b.num_fields_ && a.num_antifields_ == b.num_antifields_ && a.terms_ == b.terms_;
  }

  /// Re-embeds into larger generator lists at the given offsets.
  GradedPolynomial embedded(std::size_t nf, std::size_t field_offset, std::size_t na,
                            std::size_t antifield_offset) const {
    require(field_offset + num_fields_ <= nf && antifield_offset + num_antifields_ <= na,
            ErrorCode::kInvalidArgument, "embedding does not fit");
    GradedPolynomial out(nf, na);
    for (const auto& [m, c] : terms_) {
      Exponents e(nf, 0);
      std::copy(m.fields.begin(), m.fields.end(), e.begin() + static_cast<std::ptrdiff_t>(field_offset));
      out.add_term({e, static_cast<AntifieldMask>(m.antifields << antifield_offset)}, c);
    }
    return out;
  }

  /// Terms without antifields, as an ordinary polynomial in the fields.
  Polynomial<S> degree_zero_part() const {
    Polynomial<S> out(num_fields_);
    for (const auto& [m, c] : terms_)
      if (m.antifields == 0) out.add_term(m.fields, c);
    return out;
  }

 private:
  void check(const GradedPolynomial& o) const {
    require(num_fields_ == o.num_fields_ && num_antifields_ == o.num_antifields_, ErrorCode::kInvalidArgument,
            "graded observables over different generator lists");
  }

  std::size_t num_fields_ = 0;
  std::size_t num_antifields_ = 0;
  Terms terms_;
};

/// d/dX_a.
template <class S>
GradedPolynomial<S> field_derivative(const GradedPolynomial<S>& g, std::size_t a) {
  GradedPolynomial<S> out(g.num_fields(), g.num_antifields());
  for (const auto& [m, c] : g.terms()) {
    const int n = m.fields[a];
    if (n == 0) continue;
    GradedMonomial r = m;
    --r.fields[a];
    out.add_term(r, c * ScalarTraits<S>::from_int(n));
  }
  return out;
}

/// Left derivative d/dv_b: moves v_b to the front, then deletes it.
template <class S>
GradedPolynomial<S> antifield_derivative(const GradedPolynomial<S>& g, std::size_t b) {
  const AntifieldMask bit = static_cast<AntifieldMask>(1u << b);
  GradedPolynomial<S> out(g.num_fields(), g.num_antifields());
  for (const auto& [m, c] : g.terms()) {
    if (!(m.antifields & bit)) continue;
    const bool odd = std::popcount(m.antifields & (bit - 1u)) % 2 != 0;
    out.add_term({m.fields, static_cast<AntifieldMask>(m.antifields & ~bit)}, odd ? -c : c);
  }
  return out;
}

/// Pairing and classical-image matrices, both indexed (antifield b, field a).
template <class S>
struct BvStructure {
  DenseMatrix<S> pairing;
  DenseMatrix<S> classical;
};

template <class S>
GradedPolynomial<S> classical_differential(const GradedPolynomial<S>& g, const BvStructure<S>& bv) {
  const std::size_t nf = g.num_fields();
  const std::size_t na = g.num_antifields();
  GradedPolynomial<S> out(nf, na);
  for (std::size_t b = 0; b < na; ++b) {
    const GradedPolynomial<S> db = antifield_derivative(g, b);
    if (db.is_zero()) continue;
    for (std::size_t a = 0; a < nf; ++a) {
      const S& c = bv.classical(b, a);
      if (ScalarTraits<S>::is_zero(c)) continue;
      out += GradedPolynomial<S>::field(nf, na, a) * db * c;
    }
  }
  return out;
}

template <class S>
GradedPolynomial<S> quantum_bv(const GradedPolynomial<S>& g, const BvStructure<S>& bv) {
  const std::size_t nf = g.num_fields();
  const std::size_t na = g.num_antifields();
  GradedPolynomial<S> out(nf, na);
  for (std::size_t b = 0; b < na; ++b) {
    const GradedPolynomial<S> db = antifield_derivative(g, b);
    if (db.is_zero()) continue;
    for (std::size_t a = 0; a < nf; ++a) {
      const S& p = bv.pairing(b, a);
      if (ScalarTraits<S>::is_zero(p)) continue;
      out += field_derivative(db, a) * p;
    }
  }
  return out;
}

template <class S>
GradedPolynomial<S> total_quantum_differential(const GradedPolynomial<S>& g, const BvStructure<S>& bv) {
  return classical_differential(g, bv) + quantum_bv(g, bv);
}

/**
 * The bracket determined by D(fg) = D(f) g + (-1)^{|f|} f D(g) + {f, g}:
 *
 *   {f, g} = sum P(b, a) [ (d/dv_b f)(d/dX_a g) + (-1)^{|f|} (d/dX_a f)(d/dv_b g) ].
 *
 * Only arguments with at most one antifield per term are accepted.
 */
template <class S>
GradedPolynomial<S> poisson_bracket(const GradedPolynomial<S>& f, const GradedPolynomial<S>& g,
                                    const BvStructure<S>& bv) {
  require(f.max_antifield_count() <= 1 && g.max_antifield_count() <= 1, ErrorCode::kNotImplemented,
          "the bracket is implemented for at most one antifield per term");
  const std::size_t nf = f.num_fields();
  const std::size_t na = f.num_antifields();
  GradedPolynomial<S> out(nf, na);
  // split f by degree so the sign (-1)^{|f|} is well defined term by term
  GradedPolynomial<S> f_even(nf, na);
  GradedPolynomial<S> f_odd(nf, na);
  for (const auto& [m, c] : f.terms()) (m.antifields ? f_odd : f_even).add_term(m, c);
  for (std::size_t b = 0; b < na; ++b) {
    const GradedPolynomial<S> df = antifield_derivative(f, b);
    const GradedPolynomial<S> dg = antifield_derivative(g, b);
    for (std::size_t a = 0; a < nf; ++a) {
      const S& p = bv.pairing(b, a);
      if (ScalarTraits<S>::is_zero(p)) continue;
      if (!df.is_zero()) out += df * field_derivative(g, a) * p;
      if (!dg.is_zero()) {
        out += field_derivative(f_even, a) * dg * p;
        out -= field_derivative(f_odd, a) * dg * p;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Smeared graded observables

/// A graded observable over explicit smearings for fields and antifields.
class GradedObservable {
 public:
  GradedObservable() = default;
  GradedObservable(FieldSpace space, std::vector<SpectralForm> fields, std::vector<SpectralForm> antifields,
                   GradedPolynomial<Complex> poly)
      : space_(space), fields_(std::move(fields)), antifields_(std::move(antifields)), poly_(std::move(poly)) {
    require(poly_.num_fields() == fields_.size() && poly_.num_antifields() == antifields_.size(),
            ErrorCode::kInvalidArgument, "graded polynomial does not match the generator lists");
    for (const auto* list : {&fields_, &antifields_}) {
      for (const auto& f : *list) {
        require(f.dimension() == space_.dimension && f.degree() == space_.degree, ErrorCode::kDegreeMismatch,
                "generator smearing outside the field space");
      }
    }
  }

  static GradedObservable from_polynomial(const PolynomialObservable& p) {
    return {p.space(), p.smearings(), {}, GradedPolynomial<Complex>::from_polynomial(p.polynomial(), 0)};
  }

  const FieldSpace& space() const { return space_; }
  const std::vector<SpectralForm>& fields() const { return fields_; }
  const std::vector<SpectralForm>& antifields() const { return antifields_; }
  const GradedPolynomial<Complex>& polynomial() const { return poly_; }

  /// The antifield-free part as an ordinary observable.
  PolynomialObservable degree_zero_part() const {
    std::vector<LinearObservable> gens;
    for (std::size_t i = 0; i < fields_.size(); ++i) gens.push_back({fields_[i], "X" + std::to_string(i)});
    return {space_, std::move(gens), poly_.degree_zero_part()};
  }

 private:
  FieldSpace space_{};
  std::vector<SpectralForm> fields_;
  std::vector<SpectralForm> antifields_;
  GradedPolynomial<Complex> poly_;
};

/// Puts two graded observables on concatenated generator lists (A's first).
inline std::pair<GradedObservable, GradedObservable> on_common_generators(const GradedObservable& x,
                                                                          const GradedObservable& y) {
  require(x.space() == y.space(), ErrorCode::kDegreeMismatch, "graded observables on different field spaces");
  std::vector<SpectralForm> fields = x.fields();
  fields.insert(fields.end(), y.fields().begin(), y.fields().end());
  std::vector<SpectralForm> anti = x.antifields();
  anti.insert(anti.end(), y.antifields().begin(), y.antifields().end());
  const std::size_t nf = fields.size();
  const std::size_t na = anti.size();
  return {GradedObservable(x.space(), fields, anti, x.polynomial().embedded(nf, 0, na, 0)),
          GradedObservable(x.space(), fields, anti,
                           y.polynomial().embedded(nf, x.fields().size(), na, x.antifields().size()))};
}

/**
 * Appends the field generators O(Q chi_b) so the classical differential stays
 * inside the generator list, and returns the matching BV structure.
 */
inline std::pair<GradedObservable, BvStructure<Complex>> with_classical_images(const GradedObservable& g,
                                                                               const TheorySpec& t) {
  require(g.space().dimension == t.dimension() && g.space().degree == t.degree, ErrorCode::kDegreeMismatch,
          "graded observable does not live on the theory's fields");
  const std::size_t k = g.fields().size();
  const std::size_t na = g.antifields().size();
  std::vector<SpectralForm> fields = g.fields();
  for (const auto& chi : g.antifields()) fields.push_back(t.apply_operator(chi));
  const std::size_t nf = fields.size();
  GradedObservable extended(g.space(), fields, g.antifields(), g.polynomial().embedded(nf, 0, na, 0));
  BvStructure<Complex> bv{DenseMatrix<Complex>(na, nf), DenseMatrix<Complex>(na, nf)};
  for (std::size_t b = 0; b < na; ++b) {
    for (std::size_t a = 0; a < nf; ++a) bv.pairing(b, a) = pairing(g.antifields()[b], fields[a]);
    bv.classical(b, k + b) = -2.0;
  }
  return {std::move(extended), std::move(bv)};
}

inline GradedObservable classical_differential(const GradedObservable& g, const TheorySpec& t) {
  auto [ext, bv] = with_classical_images(g, t);
  return {ext.space(), ext.fields(), ext.antifields(), classical_differential(ext.polynomial(), bv)};
}

inline GradedObservable quantum_bv(const GradedObservable& g, const TheorySpec& t) {
  auto [ext, bv] = with_classical_images(g, t);
  return {ext.space(), ext.fields(), ext.antifields(), quantum_bv(ext.polynomial(), bv)};
}

inline GradedObservable total_quantum_differential(const GradedObservable& g, const TheorySpec& t) {
  auto [ext, bv] = with_classical_images(g, t);
  return {ext.space(), ext.fields(), ext.antifields(), total_quantum_differential(ext.polynomial(), bv)};
}

inline GradedObservable poisson_bracket(const GradedObservable& x, const GradedObservable& y, const TheorySpec& t) {
  auto [a, b] = on_common_generators(x, y);
  auto [ea, bv] = with_classical_images(a, t);
  auto [eb, unused] = with_classical_images(b, t);
  return {ea.space(), ea.fields(), ea.antifields(), poisson_bracket(ea.polynomial(), eb.polynomial(), bv)};
}

/// Gauge invariance in the closed theory: no smearing has a coexact component.
inline bool is_gauge_invariant(const PolynomialObservable& p, const TheorySpec& t) {
  require(t.variant == TheoryVariant::kClosedPForm, ErrorCode::kVariantMismatch,
          "gauge invariance is defined for the closed p-form theory");
  for (const auto& g : p.generators()) {
    if (coexact_part(g.smearing).max_abs() > 1e-12) return false;
  }
  return true;
}

}  // namespace abdual
