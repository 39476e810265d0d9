// abdual: expectation values, Fourier duals and verification suites from the command line.
//
//   abdual expect  --observable obs.json [--config run.toml] [--method diagrams|isserlis|montecarlo|lattice]
//   abdual dualize --observable obs.json [--config run.toml] [--inverse]
//   abdual verify  SUITE [--config run.toml] [--format json|csv]
//
// Exit codes: 0 success, 1 verification failure, 2 usage/parse/io, 3 semantic precondition,
// 4 numerical guard.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <toml.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "abdual/abdual.hpp"

namespace {

using abdual::Error;
using abdual::ErrorCode;
using abdual::Json;

struct Options {
  std::string config_path;
  std::string observable_path;
  std::string method;
  std::optional<int> lambda;
  std::optional<double> lattice_cutoff;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::size_t> samples;
  bool inverse = false;
  bool timings = false;
  std::string out_path;
  std::string suite;
  std::string format = "json";
};

// Settings after merging config file and flags (flags win).
struct RunConfig {
  std::optional<abdual::TheorySpec> theory;
  std::string method;
  double lattice_cutoff = 40.0;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::size_t samples = 100000;
  std::optional<int> lambda;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kIo: return 2;
    case ErrorCode::kTooLarge:
    case ErrorCode::kQuadratureFail:
    case ErrorCode::kNotPositive: return 4;
    default: return 3;
  }
}

int report_error(std::string_view code, const std::string& message, int exit_code) {
  Json j{{"error", {{"code", std::string(code)}, {"message", message}}}};
  std::cerr << j.dump() << "\n";
  return exit_code;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
}

Json read_toml_as_json(const std::string& path) {
  const std::string text = read_file(path);
  toml::table table;
  try {
    table = toml::parse(text, path);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << path << ": " << e.description() << " at line " << e.source().begin.line;
    throw Error(ErrorCode::kParse, os.str());
  }
  std::ostringstream os;
  os << toml::json_formatter{table};
  return Json::parse(os.str());
}

void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, where + " must be a table");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw Error(ErrorCode::kParse, "unknown key \"" + key + "\" in " + where);
}

RunConfig load_config(const Options& opt) {
  RunConfig rc;
  if (!opt.config_path.empty()) {
    const Json cfg = read_toml_as_json(opt.config_path);
    reject_unknown_keys(cfg, {"theory", "run"}, "config");
    if (cfg.contains("theory")) {
      reject_unknown_keys(cfg["theory"], {"variant", "dimension", "degree", "coupling", "mass", "mass_sign", "cutoff"},
                          "[theory]");
      rc.theory = abdual::theory_from_json(cfg["theory"]);
    }
    if (cfg.contains("run")) {
      const Json& run = cfg["run"];
      reject_unknown_keys(run, {"method", "lattice_cutoff", "seed", "threads", "samples", "lambda"}, "[run]");
      rc.method = abdual::detail::get_or<std::string>(run, "method", "");
      rc.lattice_cutoff = abdual::detail::get_or<double>(run, "lattice_cutoff", rc.lattice_cutoff);
      if (run.contains("seed")) rc.seed = abdual::detail::get<std::uint64_t>(run, "seed");
      rc.threads = abdual::detail::get_or<unsigned>(run, "threads", rc.threads);
      rc.samples = abdual::detail::get_or<std::size_t>(run, "samples", rc.samples);
      if (run.contains("lambda")) rc.lambda = abdual::detail::get<int>(run, "lambda");
    }
  }
  if (!opt.method.empty()) rc.method = opt.method;
  if (opt.lattice_cutoff) rc.lattice_cutoff = *opt.lattice_cutoff;
  if (opt.seed) rc.seed = *opt.seed;
  if (opt.threads) rc.threads = *opt.threads;
  if (opt.samples) rc.samples = *opt.samples;
  if (opt.lambda) rc.lambda = opt.lambda;
  if (rc.lambda && *rc.lambda < 0) throw Error(ErrorCode::kParse, "--lambda must be nonnegative");
  if (rc.lattice_cutoff < 0.0) throw Error(ErrorCode::kParse, "lattice cutoff must be nonnegative");
  if (rc.threads == 0) throw Error(ErrorCode::kParse, "--threads must be at least 1");
  if (rc.lambda && rc.theory) rc.theory->truncation.cutoff = *rc.lambda;
  return rc;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write \"" + path + "\"");
  out << text;
}

// An observable document is either a bare observable or {observable, theory}.
struct ObservableDocument {
  Json observable;
  std::optional<abdual::TheorySpec> theory;
};

ObservableDocument load_observable(const std::string& path) {
  if (path.empty()) throw Error(ErrorCode::kParse, "--observable is required");
  const Json j = read_json(path);
  if (j.is_object() && j.contains("observable")) {
    ObservableDocument doc{j["observable"], std::nullopt};
    if (j.contains("theory")) doc.theory = abdual::theory_from_json(j["theory"]);
    return doc;
  }
  return {j, std::nullopt};
}

abdual::TheorySpec resolve_theory(const RunConfig& rc, const ObservableDocument& doc) {
  abdual::TheorySpec t;
  if (rc.theory) {
    t = *rc.theory;
  } else if (doc.theory) {
    t = *doc.theory;
    if (rc.lambda) t.truncation.cutoff = *rc.lambda;
  } else {
    throw Error(ErrorCode::kParse, "no theory given: add a [theory] table to --config or a \"theory\" key to the observable");
  }
  return t;
}

bool is_exponential(const Json& obs) {
  const std::string kind = abdual::detail::get_or<std::string>(obs, "kind", "polynomial");
  if (kind == "polynomial") return false;
  if (kind == "wilson" || kind == "thooft") return true;
  throw Error(ErrorCode::kParse, "unknown observable kind \"" + kind + "\"");
}

abdual::PolynomialObservable polynomial_at(const Json& obs, const abdual::TheorySpec& t) {
  abdual::PolynomialObservable p = abdual::polynomial_from_json(obs);
  if (p.space() != t.field_space()) {
    abdual::require(p.dimension() == t.dimension() && p.degree() == t.degree, ErrorCode::kDegreeMismatch,
                    "observable degree does not match the theory");
    p = abdual::map_generators(p, t.field_space(), [&](const abdual::SpectralForm& b) { return b.with_cutoff(t.cutoff()); });
  }
  return p;
}

// Exponential observables may give a chain instead of a smearing form.
std::pair<abdual::ExponentialObservable, double> exponential_at(const Json& obs, const abdual::TheorySpec& t) {
  double epsilon = abdual::detail::get_or<double>(obs, "epsilon", 0.0);
  abdual::ExponentialObservable e;
  if (obs.contains("chain")) {
    abdual::require(epsilon > 0.0, ErrorCode::kParse, "a chain observable needs \"epsilon\" > 0");
    const abdual::SmearedChain c =
        abdual::smear_chain(abdual::chain_from_json(obs["chain"]), t.dimension(), epsilon, t.cutoff());
    spdlog::debug("smeared chain, quadrature error {}", c.quadrature_error);
    const abdual::Complex r = abdual::complex_from_json(abdual::detail::field(obs, "charge"));
    const std::string kind = abdual::detail::get<std::string>(obs, "kind");
    e = kind == "wilson" ? abdual::ExponentialObservable::wilson(c.smearing, r)
                         : abdual::ExponentialObservable::thooft(c.smearing, r);
  } else {
    e = abdual::exponential_from_json(obs);
    e.smearing = e.smearing.with_cutoff(t.cutoff());
    e.chain_smearing = e.chain_smearing.with_cutoff(t.cutoff());
  }
  return {e, epsilon};
}

Json expect_polynomial(const abdual::PolynomialObservable& p, const abdual::TheorySpec& t, const RunConfig& rc,
                       std::string method) {
  const bool closed = t.variant == abdual::TheoryVariant::kClosedPForm;
  if (method.empty()) method = closed ? "lattice" : "diagrams";
  Json out{{"method", method}};
  if (method == "lattice") {
    abdual::require(closed, ErrorCode::kVariantMismatch, "the lattice method needs the closed p-form theory");
    const abdual::LatticeExpectation r = abdual::maxwell_expectation(p, t, rc.lattice_cutoff);
    const Json lattice = abdual::to_json(r);
    for (const auto& [k, v] : lattice.items()) out[k] = v;
    return out;
  }
  abdual::Complex value;
  if (method == "diagrams") {
    value = abdual::expectation_diagrams(p, t);
  } else if (method == "isserlis") {
    value = abdual::moments_isserlis(p, abdual::gaussian_sector(p, t));
  } else if (method == "montecarlo") {
    const abdual::MonteCarloResult mc =
        abdual::moments_montecarlo(p, abdual::gaussian_sector(p, t), rc.samples, rc.seed.value_or(1), rc.threads);
    out["value"] = abdual::complex_json(mc.estimate);
    out["standard_error"] = abdual::snap(mc.standard_error);
    out["samples"] = mc.samples;
    out["seed"] = mc.seed;
    out["rng"] = mc.rng;
    out["mode_cutoff"] = t.cutoff();
    return out;
  } else {
    throw Error(ErrorCode::kParse, "unknown method \"" + method + "\" (diagrams, isserlis, montecarlo, lattice)");
  }
  out["value"] = abdual::complex_json(value);
  out["tail_bound"] = 0.0;
  out["mode_cutoff"] = t.cutoff();
  return out;
}

Json expect_exponential(const abdual::ExponentialObservable& e, double epsilon, const abdual::TheorySpec& t,
                        const RunConfig& rc) {
  const bool closed = t.variant == abdual::TheoryVariant::kClosedPForm;
  const std::string method = rc.method.empty() ? (closed ? "lattice" : "analytic") : rc.method;
  abdual::require(method == (closed ? "lattice" : "analytic"), ErrorCode::kParse,
                  "exponential observables use method \"" + std::string(closed ? "lattice" : "analytic") + "\"");
  Json out{{"method", method}};
  const Json result = abdual::to_json(abdual::expectation_exponential(e, t, rc.lattice_cutoff));
  for (const auto& [k, v] : result.items()) out[k] = v;
  if (!closed) {
    out.erase("lattice_cutoff");
    out.erase("sectors");
  }
  if (epsilon > 0.0) out["epsilon"] = abdual::snap(epsilon);
  return out;
}

int cmd_expect(const Options& opt) {
  const RunConfig rc = load_config(opt);
  const ObservableDocument doc = load_observable(opt.observable_path);
  const abdual::TheorySpec t = resolve_theory(rc, doc);
  const auto start = std::chrono::steady_clock::now();
  Json result;
  if (is_exponential(doc.observable)) {
    const auto [e, epsilon] = exponential_at(doc.observable, t);
    result = expect_exponential(e, epsilon, t, rc);
  } else {
    result = expect_polynomial(polynomial_at(doc.observable, t), t, rc, rc.method);
  }
  result["theory"] = abdual::to_json(t);
  if (opt.timings)
    result["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_output(result.dump(2) + "\n", opt.out_path);
  return 0;
}

int cmd_dualize(const Options& opt) {
  const RunConfig rc = load_config(opt);
  const ObservableDocument doc = load_observable(opt.observable_path);
  const abdual::TheorySpec t = resolve_theory(rc, doc);
  if (t.variant == abdual::TheoryVariant::kClosedPForm)
    throw Error(ErrorCode::kNeedsLift,
                "the closed theory does not determine a dual; give the observable in the p-form theory (variant \"pform\")");
  abdual::require(t.variant == abdual::TheoryVariant::kPForm, ErrorCode::kVariantMismatch,
                  "duality is defined for the p-form theory only");
  Json out;
  if (is_exponential(doc.observable)) {
    const auto [e, epsilon] = exponential_at(doc.observable, t);
    const abdual::ExponentialDual d = opt.inverse ? abdual::inverse_dual_exponential(e, t) : abdual::dual_exponential(e, t);
    out = Json{{"observable", abdual::to_json(d.observable, epsilon)},
               {"theory", abdual::to_json(d.theory)},
               {"prefactor", abdual::complex_json(d.prefactor)}};
  } else {
    const abdual::PolynomialObservable p = polynomial_at(doc.observable, t);
    const abdual::DualResult d = opt.inverse ? abdual::inverse_fourier_dual(p, t) : abdual::fourier_dual(p, t);
    out = Json{{"observable", abdual::to_json(d.observable)}, {"theory", abdual::to_json(d.theory)}};
  }
  write_output(out.dump(2) + "\n", opt.out_path);
  return 0;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

int cmd_verify(const Options& opt) {
  const auto& names = abdual::suite_names();
  if (std::find(names.begin(), names.end(), opt.suite) == names.end())
    return report_error("E_USAGE", "unknown suite \"" + opt.suite + "\"", 2);
  if (opt.format != "json" && opt.format != "csv") return report_error("E_USAGE", "--format must be json or csv", 2);
  const RunConfig rc = load_config(opt);
  abdual::VerifyOptions vo;
  vo.seed = rc.seed.value_or(vo.seed);
  if (rc.lambda) vo.mode_cutoff = *rc.lambda;
  if (opt.lattice_cutoff) vo.lattice_cutoff = *opt.lattice_cutoff;
  vo.threads = rc.threads;
  vo.samples = rc.samples;
  spdlog::info("running suite {} with seed {}", opt.suite, vo.seed);
  const abdual::SuiteReport report = abdual::run_suite(opt.suite, vo);
  std::string text;
  if (opt.format == "json") {
    text = abdual::to_json(report, opt.timings).dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << "suite,check,passed,measured,tolerance,detail" << (opt.timings ? ",seconds" : "") << "\n";
    for (const auto& c : report.checks) {
      os << report.suite << "," << csv_field(c.name) << "," << (c.passed ? "true" : "false") << ","
         << Json(abdual::snap(c.measured)).dump() << "," << Json(abdual::snap(c.tolerance)).dump() << ","
         << csv_field(c.detail);
      if (opt.timings) os << "," << Json(abdual::snap(c.seconds)).dump();
      os << "\n";
    }
    text = os.str();
  }
  write_output(text, opt.out_path);
  for (const auto& c : report.checks)
    if (!c.passed) spdlog::warn("{}: {} (measured {}, tolerance {})", report.suite, c.name, c.measured, c.tolerance);
  return report.passed() ? 0 : 1;
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("abdual");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("ADL_LOG")) spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  Options opt;
  CLI::App app{"Abelian duality observables on flat tori"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "TOML run configuration");
    sub->add_option("--lambda", opt.lambda, "mode cutoff |k|^2 <= lambda");
    sub->add_option("--lattice-cutoff", opt.lattice_cutoff, "action cutoff for harmonic lattice sums");
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--threads", opt.threads, "worker threads");
    sub->add_option("--out", opt.out_path, "output file (default stdout)");
    sub->add_flag("--timings", opt.timings, "include wall-clock times in the output");
  };

  CLI::App* expect = app.add_subcommand("expect", "expectation value of an observable");
  add_common(expect);
  expect->add_option("--observable", opt.observable_path, "observable JSON")->required();
  expect->add_option("--method", opt.method, "diagrams, isserlis, montecarlo or lattice");
  expect->add_option("--samples", opt.samples, "Monte Carlo sample count");

  CLI::App* dualize = app.add_subcommand("dualize", "Fourier dual of an observable");
  add_common(dualize);
  dualize->add_option("--observable", opt.observable_path, "observable JSON")->required();
  dualize->add_flag("--inverse", opt.inverse, "apply the inverse transform");

  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  add_common(verify);
  verify->add_option("suite", opt.suite, "suite name")->required();
  verify->add_option("--format", opt.format, "json or csv");
  verify->add_option("--samples", opt.samples, "Monte Carlo sample count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("E_USAGE", e.what(), 2);
  }

  try {
    if (expect->parsed()) return cmd_expect(opt);
    if (dualize->parsed()) return cmd_dualize(opt);
    return cmd_verify(opt);
  } catch (const Error& e) {
    // what() carries a "CODE: " prefix; the JSON has its own code field
    const std::string code(abdual::to_string(e.code()));
    std::string message = e.what();
    if (message.rfind(code + ": ", 0) == 0) message.erase(0, code.size() + 2);
    return report_error(code, message, exit_code_for(e.code()));
  } catch (const std::exception& e) {
    return report_error("E_INTERNAL", e.what(), 3);
  }
}
