#pragma once

#include <vector>

#include "artifact/kernel.hpp"

namespace sgff {

enum class Direction { to_plus_infinity, to_minus_infinity };

// One term coeff * exp(exponent * x) of a truncated asymptotic series.
struct SeriesTerm {
  cplx coeff;
  cplx exponent;
};

// Truncated asymptotic series in exponentials, valid as Re x runs to the
// direction's infinity. `cutoff` bounds the decay rates the series resolves:
// terms decaying faster than the cutoff are unknown and never stored.
class AsymSeries {
 public:
  AsymSeries(Direction dir, double cutoff, std::vector<SeriesTerm> terms);

  // Exact multiplicative identity (single constant term, infinite cutoff).
  static AsymSeries one(Direction dir);

  Direction direction() const { return dir_; }
  double cutoff() const { return cutoff_; }
  const std::vector<SeriesTerm>& terms() const { return terms_; }

  // How fast a term decays toward this series' infinity (negative = growth).
  double decay_rate(const SeriesTerm& t) const;
  // Decay rate of the slowest-decaying term; +infinity for an empty series.
  double slowest_decay() const;

  cplx eval(cplx x) const;

 private:
  Direction dir_;
  double cutoff_;
  std::vector<SeriesTerm> terms_;
};

// Product series with the conservative cutoff
// min(cutoff_a + slowest_decay(b), cutoff_b + slowest_decay(a)).
AsymSeries series_product(const AsymSeries& a, const AsymSeries& b);

// Series of x -> f(x + shift): coefficients pick up exp(exponent * shift).
AsymSeries series_shift(const AsymSeries& a, cplx shift);

struct HalfLineTail {
  cplx value{0.0, 0.0};
  int dropped_zero_modes = 0;
};

// Analytic continuation of the integral over (-inf, 0]: every exponential
// contributes coeff/exponent; |exponent| < 1e-10 terms are dropped and counted.
HalfLineTail integrate_neg_halfline(const AsymSeries& a);
// Mirrored rule on [from, +inf): each term contributes -coeff*e^(exponent*from)/exponent.
HalfLineTail integrate_pos_halfline(const AsymSeries& a, double from);

// Expansion coefficients of W. The closed forms have genuine poles at rational
// xi; within 1e-9 of a collision the finite limit value is substituted.
cplx w_coeff_a(int k, double xi, int s);
cplx w_coeff_b(int k, double xi);

// Exponent (p + q/xi)/2 kept as an exact integer pair so that merging and
// zero-mode detection never depend on accumulated floating-point noise.
struct LatticeExponent {
  int p = 0;
  int q = 0;
  friend bool operator==(LatticeExponent a, LatticeExponent b) {
    return a.p == b.p && a.q == b.q;
  }
};

struct LatticeTerm {
  LatticeExponent k;
  cplx coeff;
};

// Asymptotic expansion of W on the exact exponent lattice:
//   W(x) ~ sum_j c_j exp(-rho_j x)          for Re x -> +infinity,
//   W(x) ~ sum_j conj(c_j) exp(+rho_j x)    for Re x -> -infinity,
// with every rho_j = (p + q/xi)/2 for integer (p, q). Terms are exact up to
// decay rate cutoff() = rho0 + depth.
class WSeries {
 public:
  WSeries(double xi, double c2, double depth);
  WSeries(const Kernel& kernel, double depth);

  double xi() const { return xi_; }
  double depth() const { return depth_; }
  double rho0() const { return rho0_; }
  double cutoff() const { return cutoff_; }
  double rho(LatticeExponent k) const { return 0.5 * (k.p + k.q / xi_); }
  const std::vector<LatticeTerm>& terms() const { return terms_; }

  cplx eval(cplx x, int s) const;
  AsymSeries to_asym(int s) const;

 private:
  double xi_;
  double depth_;
  double rho0_;
  double cutoff_;
  std::vector<LatticeTerm> terms_;
};

}  // namespace sgff
