#include "artifact/kernel.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_result.h>
#include <gsl/gsl_sf_gamma.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "artifact/gauss_legendre.hpp"

namespace sgff {

namespace {

constexpr double kPi = 3.14159265358979323846;

// GSL must not abort the process on domain errors; statuses are checked at
// the call sites.
const int kGslHandlerOff = [] {
  gsl_set_error_handler_off();
  return 0;
}();

// Shared t-grid for all kernel integrals. The upper end is generous; damped
// variants stop early via a per-call cutoff index.
const QuadGrid& t_grid() {
  static const QuadGrid g = composite_gauss(1e-14, 80.0, 0.5);
  return g;
}

double log_sinh(double u) { return u + std::log1p(-std::exp(-2 * u)) - std::log(2.0); }
double log_cosh(double u) { return u + std::log1p(std::exp(-2 * u)) - std::log(2.0); }

cplx log_gamma(cplx z) {
  gsl_sf_result lnr, arg;
  const int status = gsl_sf_lngamma_complex_e(z.real(), z.imag(), &lnr, &arg);
  if (status != 0) {
    throw KernelDomainError("log-gamma failed at (" + std::to_string(z.real()) + ", " +
                            std::to_string(z.imag()) + ")");
  }
  return {lnr.val, arg.val};
}

}  // namespace

Kernel::Kernel(double xi, int reg_order) : xi_(xi), reg_order_(reg_order) {
  if (!(xi > 0.0)) {
    throw KernelDomainError("xi must be positive");
  }
  if (reg_order < 1) {
    throw KernelDomainError("regularization order must be >= 1");
  }
  free_fermion_ = std::abs(xi - 1.0) < 1e-11;
  if (!free_fermion_) {
    const auto& g = t_grid();
    const std::size_t n = g.nodes.size();
    log_ratio_w_.resize(n);
    log_ratio_g_.resize(n);
    ratio_sign_ = xi > 1.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = g.nodes[i];
      const double base =
          log_sinh(std::abs(xi - 1.0) * t) - std::log(t) - log_sinh(2 * t) - log_sinh(xi * t);
      log_ratio_w_[i] = base;
      log_ratio_g_[i] = base - log_cosh(t);
    }
  }
  // The core integral at theta = -i*pi/2 (z = 1/2) fixes both constants.
  const cplx half = cplx(0.0, -kPi / 2);
  c1_ = std::exp(-core_integral(half, 1, 0.0).real());
  c2_ = std::exp(4.0 * core_integral(half, 0, 0.0).real());
}

cplx Kernel::core_integral(cplx theta, int variant, double extra_damp) const {
  if (free_fermion_) {
    return 0.0;
  }
  const auto& g = t_grid();
  const std::vector<double>& lg = variant == 1 ? log_ratio_g_ : log_ratio_w_;
  // Integrand magnitude decays at least like exp(-decay*t); truncate where the
  // tail is below double precision.
  const double band = 2.0 * std::abs(1.0 + theta.imag() / kPi);
  const double decay =
      (variant == 1 ? 3.0 : 2.0) + xi_ - std::abs(xi_ - 1.0) + extra_damp - band;
  if (decay < 0.25) {
    throw KernelDomainError("kernel integral outside its strip (decay margin " +
                            std::to_string(decay) + ")");
  }
  const double t_max = std::min(80.0, 50.0 / decay);
  const cplx two_z = 2.0 - cplx(0.0, 2.0) * theta / kPi;
  cplx acc = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double t = g.nodes[i];
    if (t > t_max) {
      break;
    }
    const double lgi = lg[i] - extra_damp * t;
    const cplx e_plus = two_z * t + lgi;
    const cplx e_minus = -two_z * t + lgi;
    if (e_plus.real() > 600.0 || e_minus.real() > 600.0) {
      throw KernelDomainError("kernel integral overflow (argument too deep in the divergent band)");
    }
    const cplx f = 0.25 * ratio_sign_ *
                   (std::exp(e_plus) + std::exp(e_minus) - 2.0 * std::exp(lgi));
    acc += g.weights[i] * f;
  }
  return acc;
}

cplx Kernel::w_gamma_product(cplx theta, bool skip_first_pole_gamma) const {
  // Bump the product order when the argument sits too deep for the configured
  // one, keeping the damped integral's decay margin at >= 2.
  const double band = 2.0 * std::abs(1.0 + theta.imag() / kPi);
  const double bare = 2.0 + xi_ - std::abs(xi_ - 1.0);
  int order = reg_order_;
  if (band + 2.0 > bare + 4.0 * order) {
    order = static_cast<int>(std::ceil((band + 2.0 - bare) / 4.0));
  }
  const cplx ci = core_integral(theta, 0, 4.0 * order);
  const cplx ix = cplx(0.0, 1.0) * theta / kPi;
  cplx lg = 0.0;
  for (int k = 1; k <= order; ++k) {
    if (!(k == 1 && skip_first_pole_gamma)) {
      lg += log_gamma(1.0 + (2.0 * k - 2.5 + ix) / xi_);
    }
    lg += log_gamma(1.0 + (2.0 * k - 0.5 - ix) / xi_);
    lg += 2.0 * log_gamma(cplx(2.0 * k - 0.5) / xi_);
    lg -= 2.0 * log_gamma(1.0 + (2.0 * k - 1.5) / xi_);
    lg -= log_gamma((2.0 * k + 0.5 - ix) / xi_);
    lg -= log_gamma((2.0 * k - 1.5 + ix) / xi_);
  }
  return -2.0 / std::cosh(theta) * std::exp(lg - 2.0 * ci);
}

cplx Kernel::W(cplx theta) const {
  // The isfinite check below misses near-exact pole hits: cosh(-i*pi/2) rounds to
  // ~6e-17 instead of 0, producing a huge finite value. Guard the poles explicitly:
  // the cosh zeros at -i*pi/2 and -3i*pi/2, and the gamma poles x_n = i*pi*(n*xi-1/2).
  // (+i*pi/2 is removable for xi != 1 and coincides with x_1 at xi = 1.)
  //
  // The radius only rejects arguments where rounding noise would dominate: at
  // distance d the value is ~residue/d with relative error ~1e-16/d, and
  // kinematic-pole probes legitimately evaluate W at d ~ 1e-8.
  const auto near = [&](cplx pole) { return std::abs(theta - pole) < 1e-12; };
  if (near(cplx(0.0, -kPi / 2)) || near(cplx(0.0, -3 * kPi / 2))) {
    throw KernelDomainError("W evaluated at a cosh zero (" + std::to_string(theta.real()) +
                            ", " + std::to_string(theta.imag()) + ")");
  }
  if (theta.real() * theta.real() < 1e-12) {
    const int n_max = static_cast<int>((theta.imag() / kPi + 0.5) / xi_) + 1;
    for (int n = 1; n <= n_max; ++n) {
      if (near(xi_pole(n))) {
        throw KernelDomainError("W evaluated at pole " + std::to_string(n) +
                                " of the gamma family");
      }
    }
  }
  const cplx v = w_gamma_product(theta, false);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw KernelDomainError("W evaluated at or beyond a pole (" + std::to_string(theta.real()) +
                            ", " + std::to_string(theta.imag()) + ")");
  }
  return v;
}

cplx Kernel::W_direct(cplx theta) const {
  const cplx ci = core_integral(theta, 0, 0.0);
  return -2.0 / std::cosh(theta) * std::exp(-2.0 * ci);
}

cplx Kernel::W_at_half_ipi() const {
  const double d = 1e-5;
  const cplx base(0.0, kPi / 2);
  const cplx w1 = W(base + d);
  const cplx w2 = W(base + d / 2);
  const cplx w4 = W(base + d / 4);
  const cplx r1 = 2.0 * w2 - w1;
  const cplx r2 = 2.0 * w4 - w2;
  return (4.0 * r2 - r1) / 3.0;
}

cplx Kernel::G(cplx theta) const {
  const double half_band = 0.85 * (1.0 + std::min(xi_, 1.0));
  if (theta.imag() > (-1.0 + half_band) * kPi) {
    return 1.0 / (W(theta - cplx(0.0, kPi / 2)) * G(theta - cplx(0.0, kPi)));
  }
  if (theta.imag() < (-1.0 - half_band) * kPi) {
    return 1.0 / (W(theta + cplx(0.0, kPi / 2)) * G(theta + cplx(0.0, kPi)));
  }
  const cplx ci = core_integral(theta, 1, 0.0);
  return cplx(0.0, 1.0) * c1_ * std::sinh(theta / 2.0) * std::exp(ci);
}

cplx Kernel::Gbar(cplx theta) const {
  return -c2_ / 4.0 * xi_ * std::sinh((theta + cplx(0.0, kPi)) / xi_) * std::sinh(theta);
}

cplx Kernel::xi_pole(int n) const { return cplx(0.0, kPi * (n * xi_ - 0.5)); }

cplx Kernel::residue_W(int n) const {
  if (n < 1) {
    throw KernelDomainError("pole index must be >= 1");
  }
  // The k=1 leading-gamma factor carries every xi-family pole; its residue in
  // the gamma argument is (-1)^(n-1)/(n-1)!, and d(arg)/d(theta) = i/(pi*xi).
  double inv_fact = 1.0;
  for (int m = 2; m < n; ++m) {
    inv_fact /= m;
  }
  const double sign = (n % 2 == 1) ? 1.0 : -1.0;
  const cplx rest = w_gamma_product(xi_pole(n), true);
  return sign * inv_fact * kPi * xi_ / cplx(0.0, 1.0) * rest;
}

cplx Kernel::residue_W_richardson(int n, double eps0) const {
  const cplx xn = xi_pole(n);
  const cplx r0 = eps0 * W(xn + eps0);
  const cplx r1 = (eps0 / 2) * W(xn + eps0 / 2);
  const cplx r2 = (eps0 / 4) * W(xn + eps0 / 4);
  const cplx a = 2.0 * r1 - r0;
  const cplx b = 2.0 * r2 - r1;
  return (4.0 * b - a) / 3.0;
}

cplx Kernel::S(cplx theta, int order) const {
  cplx blocks = 1.0;
  for (int k = 1; k <= order; ++k) {
    blocks *= (cplx(0.0, k * kPi * xi_) + theta) / (cplx(0.0, k * kPi * xi_) - theta);
  }
  const auto& g = t_grid();
  // The damped part of the integrand decays like exp(-(order+1/2)*pi*xi*t), but the
  // undamped piece only falls off like exp(-pi*t) regardless of xi and order; both
  // fight the exp(|Im theta|*t) growth of sin(theta*t).
  const double decay =
      std::min(kPi, kPi * xi_ * (order + 0.5)) - std::abs(theta.imag());
  if (decay < 0.25) {
    // Outside the strip, continue through the exchange relation of the pair
    // kernel, G(theta) = S(theta) G(-theta): G reaches any rapidity via its
    // own strip reduction, and in the overlap the two routes agree to ~1e-13.
    return G(-theta) / G(theta);
  }
  const double t_max = std::min(80.0, 50.0 / decay);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double t = g.nodes[i];
    if (t > t_max) {
      break;
    }
    const double damp = std::exp(-order * kPi * xi_ * t);
    const double num = 2.0 * std::sinh(kPi * (1.0 - xi_) * t / 2.0) * damp +
                       (damp - 1.0) * (std::exp(kPi * (xi_ - 1.0) * t / 2.0) +
                                       std::exp(-kPi * (xi_ + 1.0) * t / 2.0));
    const double den = 2.0 * std::sinh(kPi * xi_ * t / 2.0) * std::cosh(kPi * t / 2.0);
    acc += g.weights[i] * std::sin(theta * t) / t * (num / den);
  }
  return -blocks * std::exp(cplx(0.0, -1.0) * acc);
}

cplx Kernel::ST(cplx theta, int order) const {
  return S(theta, order) * std::sinh(theta / xi_) / std::sinh((cplx(0.0, kPi) - theta) / xi_);
}

cplx Kernel::SR(cplx theta, int order) const {
  return S(theta, order) * std::sinh(cplx(0.0, kPi) / xi_) /
         std::sinh((cplx(0.0, kPi) - theta) / xi_);
}

}  // namespace sgff
