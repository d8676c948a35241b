#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <stdexcept>

#include "artifact/axioms.hpp"
#include "artifact/formfactors.hpp"
#include "json.hpp"

using namespace sgff;

namespace {

FFConfig config_for(double xi, double aob) {
  FFConfig cfg;
  cfg.xi = xi;
  cfg.a_over_beta = aob;
  return cfg;
}

int count_axiom(const std::vector<AxiomReport>& reps, const std::string& id) {
  return static_cast<int>(std::count_if(
      reps.begin(), reps.end(), [&](const AxiomReport& r) { return r.axiom == id; }));
}

}  // namespace

TEST_CASE("check_axiom grades by relative error, absolute near zero") {
  const auto ok = check_axiom("lorentz", "probe", cplx{1.0, 0.0}, cplx{1.0, 1e-7}, 1e-5);
  CHECK(ok.passed);
  CHECK(ok.abs_err == doctest::Approx(1e-7));
  CHECK(ok.rel_err == doctest::Approx(1e-7).epsilon(1e-3));

  const auto bad = check_axiom("lorentz", "probe", cplx{1.0, 0.0}, cplx{1.001, 0.0}, 1e-5);
  CHECK_FALSE(bad.passed);

  // A vanishing reference would make the relative error blow up; the grade
  // falls back to the absolute one there.
  const auto zero = check_axiom("free-fermion", "probe", cplx{5e-11, 0.0}, cplx{0.0, 0.0}, 1e-10);
  CHECK(zero.passed);
  CHECK(zero.rel_err == doctest::Approx(zero.abs_err));
}

TEST_CASE("every level of the suite passes at library defaults") {
  const FFConfig cfg;
  for (int level : {2, 4, 6}) {
    CAPTURE(level);
    const auto reps = run_axiom_suite(level, cfg);
    for (const auto& r : reps) {
      CAPTURE(r.axiom);
      CAPTURE(r.detail);
      CHECK(r.passed);
    }
  }
}

TEST_CASE("the four-particle suite covers the full relation set") {
  const auto reps = run_axiom_suite(4, config_for(1.17, 1.25));
  CHECK(reps.size() == 5);
  CHECK(count_axiom(reps, "lorentz") == 1);
  CHECK(count_axiom(reps, "watson-exchange") == 1);
  CHECK(count_axiom(reps, "cyclic") == 1);
  CHECK(count_axiom(reps, "kinematic-residue") == 1);
  CHECK(count_axiom(reps, "free-fermion") == 1);
  for (const auto& r : reps) {
    CAPTURE(r.axiom);
    CHECK(r.passed);
  }
}

TEST_CASE("the suite holds at the extreme couplings") {
  // The cyclic bound of 1e-9 is the tight one here; it is what forced the
  // default regularization order up to 4.
  for (double xi : {0.34, 2.23}) {
    CAPTURE(xi);
    const auto reps = run_axiom_suite(4, config_for(xi, 1.25));
    for (const auto& r : reps) {
      CAPTURE(r.axiom);
      CAPTURE(r.rel_err);
      CHECK(r.passed);
    }
  }
}

TEST_CASE("tolerance overrides reach the named check only") {
  const auto reps = run_axiom_suite(2, FFConfig{}, {{"lorentz", 1e-2}});
  for (const auto& r : reps) {
    if (r.axiom == "lorentz") {
      CHECK(r.tolerance == doctest::Approx(1e-2));
    } else {
      CHECK(r.tolerance == doctest::Approx(1e-8));
    }
  }
}

TEST_CASE("reports render as a scoreboard and serialize to JSON") {
  auto reps = run_axiom_suite(2, FFConfig{});
  reps.push_back(check_axiom("lorentz", "doomed", cplx{1.0, 0.0}, cplx{2.0, 0.0}, 1e-9));

  const std::string text = render_reports(reps);
  CHECK(text.find("[PASS] closed-form-2pt") != std::string::npos);
  CHECK(text.find("[FAIL] lorentz (doomed)") != std::string::npos);
  CHECK(text.find("3/4 checks passed") != std::string::npos);

  const auto arr = nlohmann::json::parse(reports_to_json(reps));
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == reps.size());
  CHECK(arr[0]["axiom"] == "closed-form-2pt");
  CHECK(arr[0]["passed"] == true);
  CHECK(arr[0]["lhs"].contains("re"));
  CHECK(arr.back()["passed"] == false);
  CHECK(arr.back()["rel_err"].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("unsupported particle counts are rejected") {
  CHECK_THROWS_AS((void)run_axiom_suite(3, FFConfig{}), std::invalid_argument);
  CHECK_THROWS_AS((void)run_axiom_suite(0, FFConfig{}), std::invalid_argument);
  CHECK_THROWS_AS((void)run_axiom_suite(8, FFConfig{}), std::invalid_argument);
}
