#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "abdual/errors.hpp"
#include "abdual/spectral_geometry.hpp"

namespace abdual {

enum class TheoryVariant { kPForm, kClosedPForm, kScalar };

/// Sign of the mass term in the scalar operator Q = Delta -+ m^2.
enum class MassSign {
  kMinus,  ///< Q = Delta - m^2, as written for the free scalar example
  kPlus,   ///< Q = Delta + m^2, positive definite for every m > 0
};

inline std::string_view to_string(TheoryVariant v) {
  switch (v) {
    case TheoryVariant::kPForm: return "pform";
    case TheoryVariant::kClosedPForm: return "closed_pform";
    case TheoryVariant::kScalar: return "scalar";
  }
  return "?";
}

/// Degree and dimension of the fields an observable is a function of.
struct FieldSpace {
  int dimension = 2;
  int degree = 1;
  int cutoff = 0;

  friend bool operator==(const FieldSpace&, const FieldSpace&) = default;
};

/// A free theory on the flat torus. The action is S(a) = <a, Q a>.
struct TheorySpec {
  TheoryVariant variant = TheoryVariant::kPForm;
  GeometrySpec geometry{};
  int degree = 1;          ///< form degree (0 for the scalar theory)
  double coupling = 1.0;   ///< R; unused by the scalar theory
  double mass = 0.0;       ///< scalar theory only
  MassSign mass_sign = MassSign::kMinus;
  ModeTruncation truncation{};

  static TheorySpec pform(int dimension, int degree, double coupling, int cutoff) {
    TheorySpec t{TheoryVariant::kPForm, {dimension}, degree, coupling, 0.0, MassSign::kMinus, {cutoff}};
    t.validate();
    return t;
  }

  static TheorySpec closed_pform(int dimension, int degree, double coupling, int cutoff) {
    TheorySpec t{TheoryVariant::kClosedPForm, {dimension}, degree, coupling, 0.0, MassSign::kMinus, {cutoff}};
    t.validate();
    return t;
  }

  static TheorySpec scalar(int dimension, double mass, int cutoff, MassSign sign = MassSign::kMinus) {
    TheorySpec t{TheoryVariant::kScalar, {dimension}, 0, 1.0, mass, sign, {cutoff}};
    t.validate();
    return t;
  }

  int dimension() const { return geometry.dimension; }
  int cutoff() const { return truncation.cutoff; }
  FieldSpace field_space() const { return {geometry.dimension, degree, truncation.cutoff}; }

  void validate() const {
    geometry.validate();
    require(truncation.cutoff >= 0, ErrorCode::kInvalidArgument, "cutoff must be nonnegative");
    if (variant == TheoryVariant::kScalar) {
      require(degree == 0, ErrorCode::kInvalidArgument, "scalar fields are 0-forms");
      require(mass > 0.0, ErrorCode::kMasslessMode, "scalar theory needs m > 0 (m = 0 has a massless mode)");
      if (mass_sign == MassSign::kMinus) {
        const double m2 = mass * mass;
        for (int ev = 0; ev <= truncation.cutoff; ++ev) {
          require(!(is_laplacian_eigenvalue(ev) && std::abs(m2 - ev) <= 1e-12 * std::max(1.0, m2)),
                  ErrorCode::kMasslessMode,
                  "m^2 coincides with the Laplacian eigenvalue " + std::to_string(ev));
        }
      }
      return;
    }
    require(degree > 0 && degree < geometry.dimension, ErrorCode::kDegreeOutOfRange,
            "form theories need 0 < p < n");
    require(coupling > 0.0, ErrorCode::kInvalidArgument, "coupling must be positive");
  }

  /// Whether some k in Z^n has |k|^2 = ev.
  bool is_laplacian_eigenvalue(int ev) const {
    const int n = geometry.dimension;
    const int box = static_cast<int>(std::floor(std::sqrt(static_cast<double>(ev))));
    auto rec = [&](auto&& self, int axis, int remaining) -> bool {
      if (axis == n) return remaining == 0;
      for (int v = 0; v <= box; ++v) {
        if (v * v > remaining) break;
        if (self(self, axis + 1, remaining - v * v)) return true;
      }
      return false;
    };
    return rec(rec, 0, ev);
  }

  /// Eigenvalue of Q on a mode with Laplacian eigenvalue |k|^2.
  double operator_eigenvalue(int k_squared) const {
    switch (variant) {
      case TheoryVariant::kPForm:
      case TheoryVariant::kClosedPForm: return coupling * coupling;
      case TheoryVariant::kScalar:
        return mass_sign == MassSign::kMinus ? k_squared - mass * mass : k_squared + mass * mass;
    }
    return 0.0;
  }

  /// Q f. For the closed theory Q = R^2 pi with pi dropping the coexact part.
  SpectralForm apply_operator(const SpectralForm& f) const {
    check_field(f);
    SpectralForm src = variant == TheoryVariant::kClosedPForm ? coexact_free_part(f) : f;
    SpectralForm out(f.dimension(), f.degree(), f.cutoff());
    for (const auto& [mode, c] : src.coefficients()) out.set(mode, c * operator_eigenvalue(squared_norm(mode.k)));
    return out;
  }

  /// Q^{-1} f on the massive sector. The closed theory inverts on the exact part only.
  SpectralForm apply_inverse_operator(const SpectralForm& f) const {
    check_field(f);
    SpectralForm src = variant == TheoryVariant::kClosedPForm ? exact_part(f) : f;
    SpectralForm out(f.dimension(), f.degree(), f.cutoff());
    for (const auto& [mode, c] : src.coefficients()) out.set(mode, c / operator_eigenvalue(squared_norm(mode.k)));
    return out;
  }

  /// Dual p-form theory: degree n - p, coupling 1/(2R), same truncation.
  TheorySpec dual() const {
    require(variant != TheoryVariant::kScalar, ErrorCode::kVariantMismatch, "scalar theories have no dual here");
    TheorySpec t = *this;
    t.degree = geometry.dimension - degree;
    t.coupling = 1.0 / (2.0 * coupling);
    return t;
  }

  void check_field(const SpectralForm& f) const {
    require(f.dimension() == geometry.dimension && f.degree() == degree, ErrorCode::kDegreeMismatch,
            "form does not live in the theory's field space");
  }
};

}  // namespace abdual
