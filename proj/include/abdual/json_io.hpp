#pragma once

// JSON encoding of forms, observables, theories and results.
//
// Writers are canonical: doubles are snapped to 12 significant digits, form
// coefficients below 1e-15 and polynomial coefficients below 1e-12 of the
// largest one are dropped, and maps are emitted in a fixed order. Equal
// objects therefore serialise to identical bytes.

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "abdual/bv_complex.hpp"
#include "abdual/errors.hpp"
#include "abdual/gaussian_oracle.hpp"
#include "abdual/observable_algebra.hpp"
#include "abdual/spectral_geometry.hpp"
#include "abdual/theory.hpp"
#include "abdual/wilson_thooft.hpp"

namespace abdual {

using Json = nlohmann::ordered_json;

inline constexpr double kFormDropTolerance = 1e-15;
inline constexpr double kTermDropRelative = 1e-12;

inline double snap(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double v = std::strtod(buf, nullptr);
  return v == 0.0 ? 0.0 : v;
}

inline Json complex_json(Complex z) { return Json{{"re", snap(z.real())}, {"im", snap(z.imag())}}; }

namespace detail {

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::kParse, std::string("missing key \"") + key + "\"");
  return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad value for \"") + key + "\": " + e.what());
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.is_object() && j.contains(key) ? get<T>(j, key) : fallback;
}

}  // namespace detail

inline Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  return {detail::get_or<double>(j, "re", 0.0), detail::get_or<double>(j, "im", 0.0)};
}

// ---------------------------------------------------------------------------
// SpectralForm

inline Json to_json(const SpectralForm& f) {
  Json modes = Json::array();
  for (const auto& [mode, c] : f.coefficients()) {
    if (std::abs(c) < kFormDropTolerance) continue;
    Json k = Json::array();
    for (int j = 0; j < f.dimension(); ++j) k.push_back(mode.k[static_cast<std::size_t>(j)]);
    Json idx = Json::array();
    for (int j = 0; j < f.dimension(); ++j)
      if (mode.indices & (1u << j)) idx.push_back(j + 1);
    modes.push_back(Json{{"k", k},
                         {"phase", mode.phase == Phase::kCos ? "cos" : "sin"},
                         {"idx", idx},
                         {"re", snap(c.real())},
                         {"im", snap(c.imag())}});
  }
  return Json{{"dimension", f.dimension()}, {"degree", f.degree()}, {"cutoff", f.cutoff()}, {"modes", modes}};
}

inline SpectralForm form_from_json(const Json& j) {
  const int n = detail::get<int>(j, "dimension");
  const int p = detail::get<int>(j, "degree");
  const int cutoff = detail::get<int>(j, "cutoff");
  try {
    SpectralForm f(n, p, cutoff);
    for (const Json& m : detail::field(j, "modes")) {
      FormMode mode;
      const auto k = detail::get<std::vector<int>>(m, "k");
      require(static_cast<int>(k.size()) == n, ErrorCode::kParse, "wavevector length differs from dimension");
      for (int i = 0; i < n; ++i) mode.k[static_cast<std::size_t>(i)] = k[static_cast<std::size_t>(i)];
      const auto phase = detail::get<std::string>(m, "phase");
      require(phase == "cos" || phase == "sin", ErrorCode::kParse, "phase must be \"cos\" or \"sin\"");
      mode.phase = phase == "cos" ? Phase::kCos : Phase::kSin;
      for (int i : detail::get<std::vector<int>>(m, "idx")) {
        require(i >= 1 && i <= n, ErrorCode::kParse, "index out of range");
        require(!(mode.indices & (1u << (i - 1))), ErrorCode::kParse, "repeated index");
        mode.indices = static_cast<IndexMask>(mode.indices | (1u << (i - 1)));
      }
      f.add(mode, {detail::get_or<double>(m, "re", 0.0), detail::get_or<double>(m, "im", 0.0)});
    }
    return f;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    throw Error(ErrorCode::kParse, e.what());
  }
}

// ---------------------------------------------------------------------------
// Observables

inline Json terms_json(const Polynomial<Complex>& poly) {
  double largest = 0.0;
  for (const auto& [e, c] : poly.terms()) largest = std::max(largest, std::abs(c));
  Json terms = Json::array();
  for (const auto& [e, c] : poly.terms()) {
    if (std::abs(c) < kTermDropRelative * largest) continue;
    terms.push_back(Json{{"exps", e}, {"re", snap(c.real())}, {"im", snap(c.imag())}});
  }
  return terms;
}

inline Json to_json(const PolynomialObservable& p) {
  Json gens = Json::array();
  for (const auto& g : p.generators()) gens.push_back(to_json(g.smearing));
  return Json{{"kind", "polynomial"},
              {"dimension", p.dimension()},
              {"degree", p.degree()},
              {"cutoff", p.space().cutoff},
              {"generators", gens},
              {"terms", terms_json(p.polynomial())}};
}

inline PolynomialObservable polynomial_from_json(const Json& j) {
  const FieldSpace space{detail::get<int>(j, "dimension"), detail::get<int>(j, "degree"),
                         detail::get<int>(j, "cutoff")};
  std::vector<LinearObservable> gens;
  int i = 0;
  for (const Json& g : detail::field(j, "generators")) gens.push_back({form_from_json(g), "O" + std::to_string(i++)});
  Polynomial<Complex> poly(gens.size());
  for (const Json& t : detail::field(j, "terms")) {
    const auto e = detail::get<std::vector<int>>(t, "exps");
    require(e.size() == gens.size(), ErrorCode::kParse, "term exponent vector length differs from generator count");
    for (int v : e) require(v >= 0, ErrorCode::kParse, "negative exponent");
    poly.add_term(e, {detail::get_or<double>(t, "re", 0.0), detail::get_or<double>(t, "im", 0.0)});
  }
  try {
    return PolynomialObservable(space, std::move(gens), std::move(poly));
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

inline Json to_json(const ExponentialObservable& e, double epsilon = 0.0) {
  Json j{{"kind", std::string(to_string(e.kind))},
         {"smearing", to_json(e.smearing)},
         {"chain_smearing", to_json(e.chain_smearing)},
         {"charge", complex_json(e.charge)}};
  if (epsilon > 0.0) j["epsilon"] = snap(epsilon);
  return j;
}

inline ExponentialObservable exponential_from_json(const Json& j) {
  const auto kind = detail::get<std::string>(j, "kind");
  require(kind == "wilson" || kind == "thooft", ErrorCode::kParse, "unknown exponential kind \"" + kind + "\"");
  const Complex r = complex_from_json(detail::field(j, "charge"));
  if (kind == "wilson") return ExponentialObservable::wilson(form_from_json(detail::field(j, "smearing")), r);
  if (j.contains("chain_smearing")) return ExponentialObservable::thooft(form_from_json(j.at("chain_smearing")), r);
  // only the pairing side given
  SpectralForm s = form_from_json(detail::field(j, "smearing"));
  return {ExponentialKind::kThooft, s, hodge_star(s), r};
}

inline ChainSpec chain_from_json(const Json& j) {
  const auto type = detail::get<std::string>(j, "type");
  if (type == "coordinate_cycle") {
    CoordinateCycle c;
    for (int i : detail::get<std::vector<int>>(j, "indices")) {
      require(i >= 1 && i <= kMaxDimension, ErrorCode::kParse, "cycle index out of range");
      c.indices = static_cast<IndexMask>(c.indices | (1u << (i - 1)));
    }
    c.offset = detail::get<std::vector<double>>(j, "offset");
    return c;
  }
  if (type == "parametric") {
    ParametricChain c;
    c.degree = detail::get<int>(j, "degree");
    c.simplices = detail::get<std::vector<std::vector<std::vector<double>>>>(j, "samples");
    return c;
  }
  throw Error(ErrorCode::kParse, "unknown chain type \"" + type + "\"");
}

inline Json to_json(const GradedObservable& g) {
  Json fields = Json::array();
  for (const auto& f : g.fields()) fields.push_back(to_json(f));
  Json anti = Json::array();
  for (const auto& f : g.antifields()) anti.push_back(to_json(f));
  double largest = 0.0;
  for (const auto& [m, c] : g.polynomial().terms()) largest = std::max(largest, std::abs(c));
  Json terms = Json::array();
  for (const auto& [m, c] : g.polynomial().terms()) {
    if (std::abs(c) < kTermDropRelative * largest) continue;
    std::vector<int> ae;
    for (std::size_t b = 0; b < g.antifields().size(); ++b) ae.push_back((m.antifields >> b) & 1u);
    terms.push_back(Json{{"exps", m.fields}, {"antifield_exps", ae}, {"re", snap(c.real())}, {"im", snap(c.imag())}});
  }
  return Json{{"kind", "graded"},
              {"dimension", g.space().dimension},
              {"degree", g.space().degree},
              {"cutoff", g.space().cutoff},
              {"generators", fields},
              {"antifields", anti},
              {"terms", terms}};
}

// ---------------------------------------------------------------------------
// Theories and results

inline Json to_json(const TheorySpec& t) {
  Json j{{"variant", std::string(to_string(t.variant))}, {"dimension", t.dimension()}};
  if (t.variant == TheoryVariant::kScalar) {
    j["mass"] = t.mass;
    j["mass_sign"] = t.mass_sign == MassSign::kMinus ? "minus" : "plus";
  } else {
    j["degree"] = t.degree;
    j["coupling"] = t.coupling;
  }
  j["cutoff"] = t.cutoff();
  return j;
}

inline TheorySpec theory_from_json(const Json& j) {
  const auto variant = detail::get<std::string>(j, "variant");
  const int n = detail::get<int>(j, "dimension");
  const int cutoff = detail::get<int>(j, "cutoff");
  if (variant == "scalar") {
    const auto sign = detail::get_or<std::string>(j, "mass_sign", "minus");
    require(sign == "minus" || sign == "plus", ErrorCode::kParse, "mass_sign must be \"minus\" or \"plus\"");
    return TheorySpec::scalar(n, detail::get<double>(j, "mass"), cutoff,
                              sign == "minus" ? MassSign::kMinus : MassSign::kPlus);
  }
  const int p = detail::get<int>(j, "degree");
  const double r = detail::get<double>(j, "coupling");
  if (variant == "pform") return TheorySpec::pform(n, p, r, cutoff);
  if (variant == "closed_pform") return TheorySpec::closed_pform(n, p, r, cutoff);
  throw Error(ErrorCode::kParse, "unknown theory variant \"" + variant + "\"");
}

inline Json to_json(const LatticeExpectation& r) {
  Json j{{"value", complex_json(r.value)},
         {"tail_bound", snap(r.tail_bound)},
         {"lattice_cutoff", snap(r.lattice_cutoff)},
         {"mode_cutoff", r.mode_cutoff},
         {"sectors", r.sectors}};
  if (r.warning) j["warning"] = "lattice cutoff excludes every nonzero sector";
  return j;
}

}  // namespace abdual
