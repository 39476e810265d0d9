// Runs every verification suite once and prints one line per acceptance criterion.
#include <cstdio>
#include <exception>

#include "abdual/verification.hpp"

namespace {

struct Criterion {
  int number;
  const char* title;
  const char* suite;
  double time_limit;  // seconds
};

constexpr Criterion kCriteria[] = {
    {1, "Hermite reproduction", "hermite", 1.0},
    {2, "double-dual identity", "double-dual", 10.0},
    {3, "oracle equivalence", "oracle", 60.0},
    {4, "Stokes vanishing", "stokes", 10.0},
    {5, "BV algebra", "bd", 10.0},
    {6, "duality of restricted expectations", "plancherel", 600.0},
    {7, "Wilson and 't Hooft", "wilson-thooft", 120.0},
    {8, "factorisation", "factorisation", 30.0},
    {9, "geometry", "geometry", 30.0},
};

}  // namespace

int main() {
  int failures = 0;
  for (const Criterion& c : kCriteria) {
    bool ok = false;
    std::string detail;
    try {
      const abdual::SuiteReport r = abdual::run_suite(c.suite);
      ok = r.passed() && r.seconds < c.time_limit;
      std::size_t failed = 0;
      for (const auto& check : r.checks) failed += !check.passed;
      char buf[160];
      std::snprintf(buf, sizeof buf, "%zu/%zu checks, %.2f s (limit %.0f s)", r.checks.size() - failed,
                    r.checks.size(), r.seconds, c.time_limit);
      detail = buf;
      for (const auto& check : r.checks)
        if (!check.passed) detail += "\n    failed: " + check.name + " " + check.detail;
    } catch (const std::exception& e) {
      detail = e.what();
    }
    std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", c.number, c.title, detail.c_str());
    failures += !ok;
  }
  return failures == 0 ? 0 : 1;
}
