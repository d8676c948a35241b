#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace sgff {

using cplx = std::complex<double>;

// Thrown when an integral representation is evaluated outside its convergence
// strip (or would overflow), and for evaluations that land on a pole.
class KernelDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Minimal kernel functions of the soliton form factor integrands.
//
// W is served by its gamma-product representation (convergent on a band that
// widens with the regularization order), G by its direct integral inside the
// strip plus exact +-i*pi ladder recursion outside, Gbar in closed form.
// All evaluations are const and thread-safe; nothing is memoized here.
class Kernel {
 public:
  explicit Kernel(double xi, int reg_order = 3);

  double xi() const { return xi_; }
  int reg_order() const { return reg_order_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }

  // Pair kernel, gamma-product representation of order reg_order().
  cplx W(cplx theta) const;
  // Pair kernel from the bare integral representation; throws outside its strip.
  cplx W_direct(cplx theta) const;
  // Removable point theta = +i*pi/2, by Richardson extrapolation along +delta.
  cplx W_at_half_ipi() const;

  // Mixed kernel; recurses by exact i*pi steps outside the direct strip.
  cplx G(cplx theta) const;
  // Like-charge kernel (closed form).
  cplx Gbar(cplx theta) const;

  // Location of the n-th xi-family pole of W on the imaginary axis (n >= 1).
  cplx xi_pole(int n) const;
  // Residue of W at xi_pole(n): exact formula via the pole-bearing gamma factor.
  cplx residue_W(int n) const;
  // Same residue by Richardson-extrapolated limit eps*W(x_n + eps); test oracle.
  cplx residue_W_richardson(int n, double eps0 = 1e-3) const;

  // Soliton-soliton scattering amplitude (regularized representation of the
  // given order; the result is order-independent) and its transmission /
  // reflection variants. Far from the real axis, where the integral
  // representation stops converging, the amplitude continues through the
  // pair-kernel ratio G(-theta)/G(theta).
  cplx S(cplx theta, int order = 1) const;
  cplx ST(cplx theta, int order = 1) const;
  cplx SR(cplx theta, int order = 1) const;

 private:
  // exp(core integral) building blocks shared by W/G/C1/C2.
  // variant: 0 = W-type (no cosh), 1 = G-type (cosh in denominator).
  cplx core_integral(cplx theta, int variant, double extra_damp) const;
  cplx w_gamma_product(cplx theta, bool skip_first_pole_gamma) const;

  double xi_ = 1.0;
  int reg_order_ = 3;
  double c1_ = 1.0;
  double c2_ = 1.0;
  // Precomputed log of the t-integrand ratio on the shared t-grid, by variant.
  std::vector<double> log_ratio_w_;  // no cosh
  std::vector<double> log_ratio_g_;  // with cosh
  double ratio_sign_ = 1.0;
  bool free_fermion_ = false;
};

}  // namespace sgff
