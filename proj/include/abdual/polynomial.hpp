#pragma once

// Sparse multivariate polynomials over an arbitrary scalar (Complex or
// GaussianRational). Monomials are exponent vectors of fixed length.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "abdual/errors.hpp"
#include "abdual/exact.hpp"

namespace abdual {

using Exponents = std::vector<int>;

inline int total_degree(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0); }

template <class S>
class Polynomial {
 public:
  using Terms = std::map<Exponents, S>;

  Polynomial() = default;
  explicit Polynomial(std::size_t num_vars) : num_vars_(num_vars) {}

  static Polynomial constant(std::size_t num_vars, const S& c) {
    Polynomial p(num_vars);
    p.add_term(Exponents(num_vars, 0), c);
    return p;
  }

  static Polynomial monomial(const Exponents& e, const S& c) {
    Polynomial p(e.size());
    p.add_term(e, c);
    return p;
  }

  static Polynomial variable(std::size_t num_vars, std::size_t i) {
    Exponents e(num_vars, 0);
    e.at(i) = 1;
    return monomial(e, ScalarTraits<S>::one());
  }

  std::size_t num_vars() const { return num_vars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  S coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? ScalarTraits<S>::zero() : it->second;
  }

  S constant_term() const { return coefficient(Exponents(num_vars_, 0)); }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
  }

  /// Adds c to the coefficient of e; exact zeros are removed.
  void add_term(const Exponents& e, const S& c) {
    require(e.size() == num_vars_, ErrorCode::kInvalidArgument, "exponent vector has wrong length");
    for (int v : e) require(v >= 0, ErrorCode::kInvalidArgument, "negative exponent");
    if (ScalarTraits<S>::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (ScalarTraits<S>::is_zero(it->second)) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_vars(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_vars(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Polynomial& operator*=(const S& s) {
    if (ScalarTraits<S>::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const S& s) { return a *= s; }
  friend Polynomial operator*(const S& s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_vars(b);
    Polynomial out(a.num_vars_);
    Exponents e(a.num_vars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    }
    return out;
  }

  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.num_vars_ == b.num_vars_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  /// Re-embeds into `num_vars` variables, variable i becoming variable offset + i.
  Polynomial embedded(std::size_t num_vars, std::size_t offset) const {
    require(offset + num_vars_ <= num_vars, ErrorCode::kInvalidArgument, "embedding does not fit");
    Polynomial out(num_vars);
    Exponents e(num_vars, 0);
    for (const auto& [src, c] : terms_) {
      std::fill(e.begin(), e.end(), 0);
      std::copy(src.begin(), src.end(), e.begin() + static_cast<std::ptrdiff_t>(offset));
      out.add_term(e, c);
    }
    return out;
  }

  /// Replaces variable i by images[i]; all images share one variable count.
  Polynomial substitute(const std::vector<Polynomial>& images, std::size_t target_vars) const {
    require(images.size() == num_vars_, ErrorCode::kInvalidArgument, "one image per variable required");
    for (const auto& im : images) {
      require(im.num_vars() == target_vars, ErrorCode::kInvalidArgument, "image has wrong variable count");
    }
    std::vector<std::vector<Polynomial>> powers(num_vars_);
    auto power = [&](std::size_t i, int k) -> const Polynomial& {
      auto& cache = powers[i];
      if (cache.empty()) cache.push_back(Polynomial::constant(target_vars, ScalarTraits<S>::one()));
      while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * images[i]);
      return cache[static_cast<std::size_t>(k)];
    };
    Polynomial out(target_vars);
    for (const auto& [e, c] : terms_) {
      Polynomial term = Polynomial::constant(target_vars, c);
      for (std::size_t i = 0; i < num_vars_; ++i) {
        if (e[i] > 0) term = term * power(i, e[i]);
      }
      out += term;
    }
    return out;
  }

  template <class T>
  T evaluate(std::span<const T> values) const {
    require(values.size() == num_vars_, ErrorCode::kInvalidArgument, "wrong number of variable values");
    T total{};
    for (const auto& [e, c] : terms_) {
      T term = static_cast<T>(c);
      for (std::size_t i = 0; i < num_vars_; ++i) {
        for (int k = 0; k < e[i]; ++k) term *= values[i];
      }
      total += term;
    }
    return total;
  }

  template <class Pred>
  Polynomial filtered(Pred keep) const {
    Polynomial out(num_vars_);
    for (const auto& [e, c] : terms_) {
      if (keep(e, c)) out.terms_.emplace(e, c);
    }
    return out;
  }

  template <class F>
  auto mapped(F&& f) const {
    using T = decltype(f(std::declval<S>()));
    Polynomial<T> out(num_vars_);
    for (const auto& [e, c] : terms_) out.add_term(e, f(c));
    return out;
  }

 private:
  void check_vars(const Polynomial& o) const {
    require(num_vars_ == o.num_vars_, ErrorCode::kInvalidArgument, "polynomials over different variable sets");
  }

  std::size_t num_vars_ = 0;
  Terms terms_;
};

}  // namespace abdual
