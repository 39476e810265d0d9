#pragma once

/**
 * @file spectral_geometry.hpp
 * @brief Exterior calculus on the flat torus T^n = [0, 2pi]^n in a truncated
 * orthonormal Fourier basis.
 *
 * A basis mode is N_k cos(k.x) dx_I or N_k sin(k.x) dx_I, with k on the
 * canonical half-lattice (first nonzero component positive, k = 0 carries only
 * the cosine) and N_k chosen so every mode has unit L^2 norm. All operators
 * below preserve |k|^2, so they act block-diagonally on the eigenspaces of the
 * Laplacian and commute with truncation by |k|^2 <= cutoff.
 *
 * With this normalisation d and d* have integer matrix entries (+-k_j), so
 * d o d = 0 holds exactly on every basis mode.
 */

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "abdual/errors.hpp"
#include "abdual/exact.hpp"

namespace abdual {

inline constexpr int kMaxDimension = 4;

using Wavevector = std::array<int, kMaxDimension>;
/// Bit j set <=> coordinate j+1 belongs to the index set.
using IndexMask = std::uint8_t;

enum class Phase : std::uint8_t { kCos = 0, kSin = 1 };

struct FormMode {
  Wavevector k{};
  Phase phase = Phase::kCos;
  IndexMask indices = 0;

  auto operator<=>(const FormMode&) const = default;
};

struct GeometrySpec {
  int dimension = 2;

  void validate() const {
    require(dimension >= 2 && dimension <= kMaxDimension, ErrorCode::kInvalidArgument,
            "torus dimension must lie in [2, 4], got " + std::to_string(dimension));
  }
};

struct ModeTruncation {
  int cutoff = 0;  ///< retain modes with |k|^2 <= cutoff

  auto operator<=>(const ModeTruncation&) const = default;
};

inline int degree_of(IndexMask mask) { return std::popcount(static_cast<unsigned>(mask)); }

inline IndexMask full_mask(int n) { return static_cast<IndexMask>((1u << n) - 1u); }

inline int squared_norm(const Wavevector& k) {
  int s = 0;
  for (int v : k) s += v * v;
  return s;
}

inline bool is_zero_vector(const Wavevector& k) { return squared_norm(k) == 0; }

/// First nonzero component positive (or k = 0).
inline bool is_canonical(const Wavevector& k) {
  for (int v : k) {
    if (v != 0) return v > 0;
  }
  return true;
}

inline double eigenvalue_of(const FormMode& mode) { return static_cast<double>(squared_norm(mode.k)); }

/// Coefficient making N_k cos(k.x) (or sin) unit-norm on [0, 2pi]^n.
inline double mode_normalisation(const Wavevector& k, int n) {
  const double vol = std::pow(2.0 * std::numbers::pi, n);
  return is_zero_vector(k) ? 1.0 / std::sqrt(vol) : std::sqrt(2.0 / vol);
}

/// dx_j ^ dx_I = wedge_sign(j, I) dx_{I u {j}}; zero when j is in I (not checked here).
inline int wedge_sign(int j, IndexMask mask) {
  const unsigned below = static_cast<unsigned>(mask) & ((1u << j) - 1u);
  return (std::popcount(below) % 2 == 0) ? 1 : -1;
}

/// Parity of the permutation (I, I^c) of (1..n), both blocks ascending.
inline int star_sign(IndexMask mask, int n) {
  int inversions = 0;
  for (int a = 0; a < n; ++a) {
    if (!(mask & (1u << a))) continue;
    for (int b = 0; b < a; ++b) {
      if (!(mask & (1u << b))) ++inversions;
    }
  }
  return inversions % 2 == 0 ? 1 : -1;
}

/// Scalar value of the basis function at x (the coefficient of dx_I).
inline double mode_value(const FormMode& mode, int n, std::span<const double> x) {
  double phase = 0.0;
  for (int j = 0; j < n; ++j) phase += mode.k[j] * x[j];
  const double norm = mode_normalisation(mode.k, n);
  return norm * (mode.phase == Phase::kCos ? std::cos(phase) : std::sin(phase));
}

/// Enumeration of all basis modes of one degree below a cutoff; sorted by FormMode order.
class ModeBasis {
 public:
  ModeBasis(int dimension, int degree, int cutoff)
      : dimension_(dimension), degree_(degree), cutoff_(cutoff) {
    GeometrySpec{dimension}.validate();
    require(degree >= 0 && degree <= dimension, ErrorCode::kDegreeOutOfRange,
            "form degree out of range");
    require(cutoff >= 0, ErrorCode::kInvalidArgument, "cutoff must be nonnegative");
    const int box = static_cast<int>(std::floor(std::sqrt(static_cast<double>(cutoff))));
    std::vector<IndexMask> masks;
    for (unsigned m = 0; m <= full_mask(dimension); ++m) {
      if (degree_of(static_cast<IndexMask>(m)) == degree) masks.push_back(static_cast<IndexMask>(m));
    }
    Wavevector k{};
    enumerate(0, box, k, masks);
    std::sort(modes_.begin(), modes_.end());
  }

  static std::shared_ptr<const ModeBasis> get(int dimension, int degree, int cutoff) {
    static std::mutex mutex;
    static std::map<std::tuple<int, int, int>, std::shared_ptr<const ModeBasis>> cache;
    std::lock_guard lock(mutex);
    auto key = std::make_tuple(dimension, degree, cutoff);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto basis = std::make_shared<const ModeBasis>(dimension, degree, cutoff);
    cache.emplace(key, basis);
    return basis;
  }

  int dimension() const { return dimension_; }
  int degree() const { return degree_; }
  int cutoff() const { return cutoff_; }
  std::size_t size() const { return modes_.size(); }
  const std::vector<FormMode>& modes() const { return modes_; }

 private:
  void enumerate(int axis, int box, Wavevector& k, const std::vector<IndexMask>& masks) {
    if (axis == dimension_) {
      if (squared_norm(k) > cutoff_ || !is_canonical(k)) return;
      for (IndexMask mask : masks) {
        modes_.push_back({k, Phase::kCos, mask});
        if (!is_zero_vector(k)) modes_.push_back({k, Phase::kSin, mask});
      }
      return;
    }
    for (int v = -box; v <= box; ++v) {
      k[axis] = v;
      enumerate(axis + 1, box, k, masks);
    }
    k[axis] = 0;
  }

  int dimension_;
  int degree_;
  int cutoff_;
  std::vector<FormMode> modes_;
};

/// A p-form on T^n as a finite coefficient map over the truncated mode basis.
class SpectralForm {
 public:
  using Coefficients = std::map<FormMode, Complex>;

  SpectralForm() = default;
  SpectralForm(int dimension, int degree, int cutoff)
      : dimension_(dimension), degree_(degree), cutoff_(cutoff) {
    GeometrySpec{dimension}.validate();
    require(degree >= 0 && degree <= dimension, ErrorCode::kDegreeOutOfRange,
            "form degree " + std::to_string(degree) + " outside [0, " + std::to_string(dimension) + "]");
    require(cutoff >= 0, ErrorCode::kInvalidArgument, "cutoff must be nonnegative");
  }

  /// Unit basis form.
  static SpectralForm basis(int dimension, int cutoff, const FormMode& mode) {
    SpectralForm f(dimension, degree_of(mode.indices), cutoff);
    f.set(mode, 1.0);
    return f;
  }

  int dimension() const { return dimension_; }
  int degree() const { return degree_; }
  int cutoff() const { return cutoff_; }
  const Coefficients& coefficients() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  bool is_zero() const { return coeffs_.empty(); }

  Complex coefficient(const FormMode& mode) const {
    auto it = coeffs_.find(mode);
    return it == coeffs_.end() ? Complex{} : it->second;
  }

  /// Sets one coefficient; exact zeros are not stored.
  SpectralForm& set(const FormMode& mode, Complex value) {
    check_mode(mode);
    if (value == Complex{}) {
      coeffs_.erase(mode);
    } else {
      coeffs_[mode] = value;
    }
    return *this;
  }

  SpectralForm& add(const FormMode& mode, Complex value) {
    check_mode(mode);
    auto [it, inserted] = coeffs_.try_emplace(mode, value);
    if (!inserted) {
      it->second += value;
      if (it->second == Complex{}) coeffs_.erase(it);
    }
    return *this;
  }

  SpectralForm& operator+=(const SpectralForm& o) {
    check_compatible(o);
    for (const auto& [m, c] : o.coeffs_) add(m, c);
    return *this;
  }
  SpectralForm& operator-=(const SpectralForm& o) {
    check_compatible(o);
    for (const auto& [m, c] : o.coeffs_) add(m, -c);
    return *this;
  }
  SpectralForm& operator*=(Complex s) {
    if (s == Complex{}) {
      coeffs_.clear();
      return *this;
    }
    for (auto& [m, c] : coeffs_) c *= s;
    return *this;
  }

  friend SpectralForm operator+(SpectralForm a, const SpectralForm& b) { return a += b; }
  friend SpectralForm operator-(SpectralForm a, const SpectralForm& b) { return a -= b; }
  friend SpectralForm operator*(Complex s, SpectralForm a) { return a *= s; }
  friend SpectralForm operator*(SpectralForm a, Complex s) { return a *= s; }
  friend SpectralForm operator-(SpectralForm a) { return a *= -1.0; }

  friend bool operator==(const SpectralForm&, const SpectralForm&) = default;

  /// Projection onto modes with |k|^2 <= cutoff.
  SpectralForm truncated(int cutoff) const {
    SpectralForm out(dimension_, degree_, std::min(cutoff, cutoff_));
    for (const auto& [m, c] : coeffs_) {
      if (squared_norm(m.k) <= cutoff) out.coeffs_.emplace(m, c);
    }
    return out;
  }

  /// Same coefficients, relabelled with a larger cutoff.
  SpectralForm with_cutoff(int cutoff) const {
    SpectralForm out = truncated(cutoff);
    out.cutoff_ = cutoff;
    return out;
  }

  /// Drops coefficients of magnitude <= tol.
  SpectralForm pruned(double tol) const {
    SpectralForm out(dimension_, degree_, cutoff_);
    for (const auto& [m, c] : coeffs_) {
      if (std::abs(c) > tol) out.coeffs_.emplace(m, c);
    }
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& [mode, c] : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  void check_compatible(const SpectralForm& o) const {
    require(dimension_ == o.dimension_, ErrorCode::kDegreeMismatch, "forms live on different tori");
    require(degree_ == o.degree_, ErrorCode::kDegreeMismatch,
            "degree " + std::to_string(degree_) + " vs " + std::to_string(o.degree_));
  }

 private:
  void check_mode(const FormMode& mode) const {
    require(degree_of(mode.indices) == degree_, ErrorCode::kDegreeMismatch, "mode degree differs from form degree");
    require((mode.indices & ~full_mask(dimension_)) == 0, ErrorCode::kInvalidArgument, "index outside dimension");
    for (int j = dimension_; j < kMaxDimension; ++j) {
      require(mode.k[j] == 0, ErrorCode::kInvalidArgument, "wavevector component outside dimension");
    }
    require(is_canonical(mode.k), ErrorCode::kInvalidArgument, "wavevector not on the canonical half-lattice");
    require(!(is_zero_vector(mode.k) && mode.phase == Phase::kSin), ErrorCode::kInvalidArgument,
            "k = 0 carries no sine mode");
    require(squared_norm(mode.k) <= cutoff_, ErrorCode::kInvalidArgument, "mode exceeds truncation");
  }

  int dimension_ = 2;
  int degree_ = 0;
  int cutoff_ = 0;
  Coefficients coeffs_;
};

/// Hermitian L^2 inner product, conjugate-linear in the first slot.
inline Complex inner(const SpectralForm& a, const SpectralForm& b) {
  a.check_compatible(b);
  Complex s{};
  auto ia = a.coefficients().begin();
  auto ib = b.coefficients().begin();
  while (ia != a.coefficients().end() && ib != b.coefficients().end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      s += std::conj(ia->second) * ib->second;
      ++ia;
      ++ib;
    }
  }
  return s;
}

/// Bilinear pairing \int a ^ *b; equals inner() for real forms.
inline Complex pairing(const SpectralForm& a, const SpectralForm& b) {
  a.check_compatible(b);
  Complex s{};
  auto ia = a.coefficients().begin();
  auto ib = b.coefficients().begin();
  while (ia != a.coefficients().end() && ib != b.coefficients().end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      s += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return s;
}

inline double norm(const SpectralForm& f) {
  double s = 0.0;
  for (const auto& [m, c] : f.coefficients()) s += std::norm(c);
  return std::sqrt(s);
}

inline SpectralForm exterior_derivative(const SpectralForm& f) {
  const int n = f.dimension();
  require(f.degree() < n, ErrorCode::kDegreeOutOfRange, "exterior derivative of a top-degree form");
  SpectralForm out(n, f.degree() + 1, f.cutoff());
  for (const auto& [mode, c] : f.coefficients()) {
    for (int j = 0; j < n; ++j) {
      if (mode.indices & (1u << j) || mode.k[j] == 0) continue;
      FormMode target{mode.k, mode.phase == Phase::kCos ? Phase::kSin : Phase::kCos,
                      static_cast<IndexMask>(mode.indices | (1u << j))};
      // d/dx_j cos(k.x) = -k_j sin(k.x); d/dx_j sin(k.x) = k_j cos(k.x)
      const double slope = mode.phase == Phase::kCos ? -mode.k[j] : mode.k[j];
      out.add(target, c * (slope * wedge_sign(j, mode.indices)));
    }
  }
  return out;
}

/// L^2 adjoint of exterior_derivative (the transpose of its integer matrix).
inline SpectralForm codifferential(const SpectralForm& f) {
  const int n = f.dimension();
  require(f.degree() > 0, ErrorCode::kDegreeOutOfRange, "codifferential of a 0-form");
  SpectralForm out(n, f.degree() - 1, f.cutoff());
  for (const auto& [mode, c] : f.coefficients()) {
    for (int j = 0; j < n; ++j) {
      if (!(mode.indices & (1u << j)) || mode.k[j] == 0) continue;
      const IndexMask source = static_cast<IndexMask>(mode.indices & ~(1u << j));
      // transpose of the entry (source, opposite phase) -> mode in exterior_derivative
      const Phase source_phase = mode.phase == Phase::kCos ? Phase::kSin : Phase::kCos;
      const double slope = source_phase == Phase::kCos ? -mode.k[j] : mode.k[j];
      out.add({mode.k, source_phase, source}, c * (slope * wedge_sign(j, source)));
    }
  }
  return out;
}

/// *(dx_I) = sign(I, I^c) dx_{I^c}; pointwise on the mode function.
inline SpectralForm hodge_star(const SpectralForm& f) {
  const int n = f.dimension();
  SpectralForm out(n, n - f.degree(), f.cutoff());
  for (const auto& [mode, c] : f.coefficients()) {
    const IndexMask complement = static_cast<IndexMask>(full_mask(n) & ~mode.indices);
    out.set({mode.k, mode.phase, complement}, c * static_cast<double>(star_sign(mode.indices, n)));
  }
  return out;
}

/// Inverse of hodge_star: (-1)^{p(n-p)} * on p-forms.
inline SpectralForm inverse_hodge_star(const SpectralForm& f) {
  const int p = f.degree();
  const int n = f.dimension();
  SpectralForm s = hodge_star(f);
  if ((p * (n - p)) % 2 != 0) s *= -1.0;
  return s;
}

inline SpectralForm laplacian(const SpectralForm& f) {
  SpectralForm out(f.dimension(), f.degree(), f.cutoff());
  for (const auto& [mode, c] : f.coefficients()) {
    const int ev = squared_norm(mode.k);
    if (ev != 0) out.set(mode, c * static_cast<double>(ev));
  }
  return out;
}

/// Divides every nonconstant mode by its eigenvalue and drops the constant modes.
inline SpectralForm inverse_laplacian_on_massive(const SpectralForm& f) {
  SpectralForm out(f.dimension(), f.degree(), f.cutoff());
  for (const auto& [mode, c] : f.coefficients()) {
    const int ev = squared_norm(mode.k);
    if (ev != 0) out.set(mode, c / static_cast<double>(ev));
  }
  return out;
}

struct HodgeSplit {
  SpectralForm exact;
  SpectralForm coexact;
  SpectralForm harmonic;

  SpectralForm recompose() const { return exact + coexact + harmonic; }
};

inline SpectralForm harmonic_part(const SpectralForm& f) {
  SpectralForm out(f.dimension(), f.degree(), f.cutoff());
  for (const auto& [mode, c] : f.coefficients()) {
    if (is_zero_vector(mode.k)) out.set(mode, c);
  }
  return out;
}

/// d d* Delta^{-1} f.
inline SpectralForm exact_part(const SpectralForm& f) {
  if (f.degree() == 0) return SpectralForm(f.dimension(), 0, f.cutoff());
  return exterior_derivative(inverse_laplacian_on_massive(codifferential(f)));
}

/// d* d Delta^{-1} f.
inline SpectralForm coexact_part(const SpectralForm& f) {
  if (f.degree() == f.dimension()) return SpectralForm(f.dimension(), f.degree(), f.cutoff());
  return codifferential(inverse_laplacian_on_massive(exterior_derivative(f)));
}

inline HodgeSplit hodge_decompose(const SpectralForm& f) {
  return {exact_part(f), coexact_part(f), harmonic_part(f)};
}

/// Exact plus harmonic part: the component seen by closed forms.
inline SpectralForm coexact_free_part(const SpectralForm& f) { return exact_part(f) + harmonic_part(f); }

/// Value of every dx_I component at the point x.
inline std::map<IndexMask, Complex> evaluate_at(const SpectralForm& f, std::span<const double> x) {
  std::map<IndexMask, Complex> out;
  for (const auto& [mode, c] : f.coefficients()) out[mode.indices] += c * mode_value(mode, f.dimension(), x);
  return out;
}

/// Heat-smoothed point delta times dx_I: coefficients phi(center) e^{-t|k|^2}.
inline SpectralForm heat_bump(int dimension, int cutoff, IndexMask indices, std::span<const double> center,
                              double time) {
  require(time > 0.0, ErrorCode::kInvalidArgument, "heat time must be positive");
  auto basis = ModeBasis::get(dimension, degree_of(indices), cutoff);
  SpectralForm f(dimension, degree_of(indices), cutoff);
  for (const FormMode& mode : basis->modes()) {
    if (mode.indices != indices) continue;
    const double v = mode_value(mode, dimension, center) * std::exp(-time * squared_norm(mode.k));
    if (v != 0.0) f.set(mode, v);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Harmonic lattice

/// Period spacing of the integral lattice is kPeriodScale * R. This value makes
/// the lattices at couplings R and 1/(2R) mutually dual under the pairing used
/// by the Fourier transform (product of spacings = 2 pi).
inline const double kPeriodScale = 2.0 * std::sqrt(std::numbers::pi);

struct LatticePoint {
  std::vector<int> multiplicities;  ///< one integer per generator
  double action = 0.0;
};

/// Harmonic p-forms whose periods over the coordinate p-cycles lie in kPeriodScale * R * Z.
class HarmonicLattice {
 public:
  HarmonicLattice(int dimension, int degree, double coupling, int cutoff)
      : dimension_(dimension), degree_(degree), coupling_(coupling), cutoff_(cutoff) {
    GeometrySpec{dimension}.validate();
    require(degree >= 0 && degree <= dimension, ErrorCode::kDegreeOutOfRange, "lattice degree out of range");
    require(coupling > 0.0, ErrorCode::kInvalidArgument, "coupling must be positive");
    for (unsigned m = 0; m <= full_mask(dimension); ++m) {
      if (degree_of(static_cast<IndexMask>(m)) == degree) masks_.push_back(static_cast<IndexMask>(m));
    }
  }

  int dimension() const { return dimension_; }
  int degree() const { return degree_; }
  double coupling() const { return coupling_; }
  int cutoff() const { return cutoff_; }
  std::size_t rank() const { return masks_.size(); }
  const std::vector<IndexMask>& index_sets() const { return masks_; }

  /// c in the generator c dx_I: its period over a coordinate p-cycle of volume (2pi)^p.
  double generator_coefficient() const {
    return kPeriodScale * coupling_ / std::pow(2.0 * std::numbers::pi, degree_);
  }

  /// Coefficient of the generator on the unit constant mode.
  double generator_mode_coefficient() const {
    return generator_coefficient() * std::pow(2.0 * std::numbers::pi, 0.5 * dimension_);
  }

  double generator_norm() const { return std::abs(generator_mode_coefficient()); }

  /// Period of each generator over its own coordinate cycle.
  double period() const { return generator_coefficient() * std::pow(2.0 * std::numbers::pi, degree_); }

  SpectralForm generator(std::size_t i) const {
    SpectralForm g(dimension_, degree_, cutoff_);
    g.set({Wavevector{}, Phase::kCos, masks_.at(i)}, generator_mode_coefficient());
    return g;
  }

  std::vector<SpectralForm> generators() const {
    std::vector<SpectralForm> out;
    for (std::size_t i = 0; i < rank(); ++i) out.push_back(generator(i));
    return out;
  }

  /// S_R = R^2 |lambda|^2 for lambda = sum m_i g_i (generators are orthogonal with equal norms).
  double action_of(std::span<const int> m) const {
    double s = 0.0;
    for (int v : m) s += static_cast<double>(v) * v;
    const double g = generator_norm();
    return coupling_ * coupling_ * g * g * s;
  }

  SpectralForm element(std::span<const int> m) const {
    SpectralForm out(dimension_, degree_, cutoff_);
    for (std::size_t i = 0; i < rank(); ++i) {
      if (m[i] != 0) out.set({Wavevector{}, Phase::kCos, masks_[i]}, m[i] * generator_mode_coefficient());
    }
    return out;
  }

 private:
  int dimension_;
  int degree_;
  double coupling_;
  int cutoff_;
  std::vector<IndexMask> masks_;
};

inline HarmonicLattice harmonic_lattice(const GeometrySpec& geometry, int degree, double coupling,
                                        ModeTruncation truncation = {}) {
  return HarmonicLattice(geometry.dimension, degree, coupling, truncation.cutoff);
}

/// All lattice points with action <= radius, ordered by (action, multiplicities).
inline std::vector<LatticePoint> lattice_points(const HarmonicLattice& lattice, double radius) {
  std::vector<LatticePoint> out;
  if (radius < 0.0) return out;
  const std::size_t r = lattice.rank();
  const double unit = lattice.coupling() * lattice.coupling() * lattice.generator_norm() * lattice.generator_norm();
  const int box = static_cast<int>(std::floor(std::sqrt(radius / unit)));
  std::vector<int> m(r, -box);
  while (true) {
    const double s = lattice.action_of(m);
    if (s <= radius) out.push_back({m, s});
    std::size_t axis = 0;
    while (axis < r && m[axis] == box) {
      m[axis] = -box;
      ++axis;
    }
    if (axis == r) break;
    ++m[axis];
  }
  std::sort(out.begin(), out.end(), [](const LatticePoint& a, const LatticePoint& b) {
    return std::tie(a.action, a.multiplicities) < std::tie(b.action, b.multiplicities);
  });
  return out;
}

inline std::vector<SpectralForm> lattice_elements(const HarmonicLattice& lattice, double radius) {
  std::vector<SpectralForm> out;
  for (const auto& pt : lattice_points(lattice, radius)) out.push_back(lattice.element(pt.multiplicities));
  return out;
}

}  // namespace abdual
