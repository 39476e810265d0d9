#include <gtest/gtest.h>

#include "abdual/json_io.hpp"

using namespace abdual;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(Json, FormRoundTrip) {
  SpectralForm f(3, 2, 4);
  f.set({Wavevector{1, 0, -1}, Phase::kSin, 0b101}, 0.25);
  f.set({Wavevector{}, Phase::kCos, 0b011}, -2.0);
  EXPECT_EQ(form_from_json(to_json(f)), f);
}

TEST(Json, ObservableRoundTripIsByteStable) {
  SpectralForm b(2, 1, 4);
  b.set({Wavevector{1, 1}, Phase::kCos, 1}, 0.5);
  Polynomial<Complex> poly(1);
  poly.add_term({3}, Complex(1.0, -2.0));
  poly.add_term({0}, 4.0);
  const PolynomialObservable p({2, 1, 4}, {{b, "O"}}, poly);
  const Json once = to_json(p);
  const Json twice = to_json(polynomial_from_json(Json::parse(once.dump())));
  EXPECT_EQ(once.dump(), twice.dump());
}

TEST(Json, TheoryRoundTrip) {
  for (const TheorySpec& t : {TheorySpec::pform(3, 1, 0.7071067811865476, 6), TheorySpec::closed_pform(2, 1, 0.8, 4),
                              TheorySpec::scalar(2, 0.7, 4, MassSign::kPlus)}) {
    const TheorySpec back = theory_from_json(Json::parse(to_json(t).dump()));
    EXPECT_EQ(to_json(back).dump(), to_json(t).dump());
    EXPECT_EQ(back.coupling, t.coupling);
    EXPECT_EQ(back.mass, t.mass);
  }
}

TEST(Json, MalformedInputIsAParseError) {
  EXPECT_EQ(code_of([] { theory_from_json(Json::parse(R"({"variant":"maxwell","dimension":2,"cutoff":4,"degree":1,"coupling":1})")); }),
            ErrorCode::kParse);
  EXPECT_EQ(code_of([] { theory_from_json(Json::parse(R"({"variant":"scalar","dimension":2,"cutoff":4,"mass":1,"mass_sign":"up"})")); }),
            ErrorCode::kParse);
  EXPECT_EQ(code_of([] { theory_from_json(Json::parse(R"({"variant":"pform","dimension":2})")); }), ErrorCode::kParse);
  const char* form = R"({"degree":1,"dimension":2,"cutoff":4,"modes":[]})";
  const std::string base = std::string(R"({"dimension":2,"degree":1,"cutoff":4,"generators":[)") + form + "],";
  EXPECT_EQ(code_of([&] { polynomial_from_json(Json::parse(base + R"("terms":[{"exps":[1,1],"re":1}]})")); }),
            ErrorCode::kParse);
  EXPECT_EQ(code_of([&] { polynomial_from_json(Json::parse(base + R"("terms":[{"exps":[-1],"re":1}]})")); }),
            ErrorCode::kParse);
  EXPECT_EQ(code_of([] { chain_from_json(Json::parse(R"({"type":"knot"})")); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { exponential_from_json(Json::parse(R"({"kind":"polyakov"})")); }), ErrorCode::kParse);
}
