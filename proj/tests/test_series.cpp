#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <vector>

#include "artifact/kernel.hpp"
#include "artifact/series.hpp"
#include "doctest.h"
#include "reference_values.hpp"

using sgff::AsymSeries;
using sgff::cplx;
using sgff::Direction;
using sgff::Kernel;
using sgff::SeriesTerm;
using sgff::WSeries;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double rel(cplx got, cplx want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

AsymSeries random_series(std::mt19937& rng, Direction dir) {
  std::uniform_int_distribution<int> nterms(1, 4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<SeriesTerm> terms;
  const int n = nterms(rng);
  for (int i = 0; i < n; ++i) {
    terms.push_back({cplx(u(rng), u(rng)), cplx(2.0 * u(rng), 2.0 * u(rng))});
  }
  return AsymSeries(dir, std::numeric_limits<double>::infinity(), std::move(terms));
}

}  // namespace

TEST_CASE("expansion coefficients match their closed forms and overrides") {
  // 2k/xi = 1 (odd): the removable-singularity override.
  CHECK(rel(sgff::w_coeff_a(1, 2.0, +1), cplx(0, -1)) < 1e-15);
  CHECK(rel(sgff::w_coeff_a(1, 2.0, -1), cplx(0, 1)) < 1e-15);
  // Generic point: a_2 at xi=8 evaluates to -i*sqrt(2)/4.
  CHECK(rel(sgff::w_coeff_a(2, 8.0, +1), cplx(0, -std::sqrt(2.0) / 4)) < 1e-14);
  // Even-k b-coefficients alternate -i^k/k; odd k=1 at xi=2 hits the zero rule.
  CHECK(rel(sgff::w_coeff_b(2, 0.7), cplx(0.5, 0)) < 1e-15);
  CHECK(rel(sgff::w_coeff_b(4, 0.7), cplx(-0.25, 0)) < 1e-15);
  CHECK(sgff::w_coeff_b(1, 2.0) == cplx(0.0, 0.0));
  CHECK(rel(sgff::w_coeff_b(1, 0.34), 1.0 / std::tan(kPi * 0.34 / 2)) < 1e-14);
}

TEST_CASE("expansion of W reproduces the frozen reference terms") {
  // The reference generator accumulated exponents in floating point, so a
  // single exact exponent can be split across two buckets 1e-9 apart.  Merge
  // both sides on an 8-decimal key before comparing; genuine neighbours in
  // these heads are >= 0.1 apart.
  const auto bucket = [](double rho) { return std::round(rho * 1e8) / 1e8; };
  for (const auto& ref : sgff::testref::kernel_refs()) {
    CAPTURE(ref.xi);
    WSeries ws(ref.xi, ref.c2.real(), 10.0);
    CHECK(std::abs(ws.cutoff() - ref.w_series_cutoff) < 1e-9);
    std::map<double, cplx> mine;
    for (const auto& t : ws.terms()) {
      mine[bucket(ws.rho(t.k))] += t.coeff;
    }
    std::map<double, cplx> want;
    for (const auto& [coeff, rho] : ref.w_series_head) {
      want[bucket(rho)] += coeff;
    }
    for (const auto& [rho, coeff] : want) {
      CAPTURE(rho);
      auto it = mine.find(rho);
      if (it == mine.end()) {
        auto lo = mine.lower_bound(rho - 1e-7);
        REQUIRE(lo != mine.end());
        REQUIRE(std::abs(lo->first - rho) < 1e-7);
        it = lo;
      }
      CHECK(rel(it->second, coeff) < 1e-10);
    }
  }
}

TEST_CASE("series tail agrees with W itself in both directions") {
  for (double xi : {0.34, 1.17, 2.23}) {
    CAPTURE(xi);
    Kernel k(xi);
    WSeries ws(k, 12.0);
    for (double im : {0.0, 0.8}) {
      const cplx xp(6.0, im);
      CHECK(rel(ws.eval(xp, +1), k.W(xp)) < 1e-6);
      CHECK(rel(ws.eval(-xp, -1), k.W(-xp)) < 1e-6);
    }
  }
}

TEST_CASE("free fermion series collapses to the elementary expansion") {
  WSeries ws(1.0, 1.0, 10.0);
  // Leading term must be -4 e^{-x}: the global sign fixes the root branch.
  REQUIRE(!ws.terms().empty());
  CHECK(ws.rho(ws.terms().front().k) == doctest::Approx(1.0));
  cplx lead = 0.0;
  for (const auto& t : ws.terms()) {
    if (std::abs(ws.rho(t.k) - 1.0) < 1e-12) lead += t.coeff;
  }
  CHECK(rel(lead, cplx(-4.0, 0.0)) < 1e-14);
  CHECK(rel(ws.eval(10.0, +1), -2.0 / std::cosh(10.0)) < 1e-7);
  CHECK(rel(ws.eval(6.0, +1), -2.0 / std::cosh(6.0)) < 1e-7);
}

TEST_CASE("deeper truncation is never less accurate") {
  for (double xi : {0.34, 2.23}) {
    CAPTURE(xi);
    Kernel k(xi);
    const cplx w6 = k.W(6.0);
    double prev = 1e300;
    for (double depth : {2.0, 4.0, 8.0}) {
      WSeries ws(k, depth);
      const double err = rel(ws.eval(6.0, +1), w6);
      CHECK(err <= prev * (1.0 + 1e-12));
      prev = err;
    }
  }
}

TEST_CASE("series values are continuous across a rational xi") {
  const double xi0 = 2.0 / 3.0;
  Kernel k0(xi0);
  WSeries base(k0, 10.0);
  const cplx v0 = base.eval(6.0, +1);
  for (double sgn : {1.0, -1.0}) {
    const double xi = xi0 * (1.0 + sgn * 1e-6);
    Kernel k(xi);
    WSeries ws(k, 10.0);
    CHECK(rel(ws.eval(6.0, +1), v0) < 1e-4);
  }
}

TEST_CASE("product, shift, and continuation laws hold on random series") {
  std::mt19937 rng(20240816);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Direction dir =
        (trial % 2 == 0) ? Direction::to_plus_infinity : Direction::to_minus_infinity;
    AsymSeries a = random_series(rng, dir);
    AsymSeries b = random_series(rng, dir);
    AsymSeries c = random_series(rng, dir);
    const cplx x(u(rng), u(rng));

    const cplx pab = series_product(a, b).eval(x);
    CHECK(rel(pab, a.eval(x) * b.eval(x)) < 1e-12);
    CHECK(rel(pab, series_product(b, a).eval(x)) < 1e-12);
    CHECK(rel(series_product(series_product(a, b), c).eval(x),
              series_product(a, series_product(b, c)).eval(x)) < 1e-12);

    const cplx sh(u(rng), u(rng));
    CHECK(rel(series_shift(a, sh).eval(x), a.eval(x + sh)) < 1e-12);
    CHECK(rel(series_shift(a, 0.0).eval(x), a.eval(x)) < 1e-15);

    AsymSeries id = series_product(a, AsymSeries::one(dir));
    CHECK(id.cutoff() == a.cutoff());
    CHECK(rel(id.eval(x), a.eval(x)) < 1e-13);
  }
}

TEST_CASE("continuation rules on half-lines") {
  const auto inf = std::numeric_limits<double>::infinity();
  AsymSeries single(Direction::to_minus_infinity, inf, {{cplx(2, 0), cplx(-3, 0)}});
  auto t = integrate_neg_halfline(single);
  CHECK(rel(t.value, cplx(-2.0 / 3.0, 0)) < 1e-15);
  CHECK(t.dropped_zero_modes == 0);

  AsymSeries empty(Direction::to_minus_infinity, inf, {});
  CHECK(integrate_neg_halfline(empty).value == cplx(0, 0));

  AsymSeries withzero(Direction::to_minus_infinity, inf,
                      {{cplx(1, 0), cplx(0, 0)}, {cplx(1, 0), cplx(-1, 0)}});
  t = integrate_neg_halfline(withzero);
  CHECK(rel(t.value, cplx(-1, 0)) < 1e-15);
  CHECK(t.dropped_zero_modes == 1);

  // Mirrored rule from an arbitrary split point: -a e^{alpha*from}/alpha.
  AsymSeries pos(Direction::to_plus_infinity, inf, {{cplx(1, 0), cplx(0.25, 0)}});
  t = integrate_pos_halfline(pos, 2.0);
  CHECK(rel(t.value, cplx(-4.0 * std::exp(0.5), 0)) < 1e-14);

  CHECK_THROWS_AS((void)integrate_neg_halfline(pos), std::invalid_argument);
  CHECK_THROWS_AS((void)integrate_pos_halfline(single, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)series_product(single, pos), std::invalid_argument);
}

TEST_CASE("construction merges equal exponents and enforces the cutoff") {
  AsymSeries merged(Direction::to_plus_infinity, 5.0,
                    {{cplx(1, 0), cplx(-2, 1)}, {cplx(2, 0), cplx(-2, 1)}, {cplx(1, 0), cplx(-9, 0)}});
  REQUIRE(merged.terms().size() == 1);
  CHECK(merged.terms()[0].coeff == cplx(3, 0));

  // Worked product example: cutoffs 2 + slowest decay 1 give cutoff 3, so the
  // e^{-4x} cross term is dropped while e^{-2x} and e^{-3x} survive.
  AsymSeries a(Direction::to_plus_infinity, 2.0,
               {{cplx(1, 0), cplx(-1, 0)}, {cplx(1, 0), cplx(-2, 0)}});
  AsymSeries p = series_product(a, a);
  CHECK(p.cutoff() == doctest::Approx(3.0));
  REQUIRE(p.terms().size() == 2);
  CHECK(p.terms()[0].coeff == cplx(1, 0));
  CHECK(p.terms()[0].exponent == cplx(-2, 0));
  CHECK(p.terms()[1].coeff == cplx(2, 0));
  CHECK(p.terms()[1].exponent == cplx(-3, 0));
}
