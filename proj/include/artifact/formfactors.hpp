// Assembly of 2n-soliton matrix elements of the exponential operator from
// regularized one-dimensional integrals, plus the S-matrix exchange moves
// that relate different charge orders.
#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "artifact/kernel.hpp"
#include "artifact/regint.hpp"
#include "artifact/wgrid.hpp"

namespace sgff {

// Knobs of the evaluation pipeline. The defaults reproduce the frozen
// regression values; reg_order 4 keeps the cyclic consistency of assembled
// form factors at 1e-9 even for small xi, where order 3 falls just short.
struct FFConfig {
  double xi = 1.17;
  double a_over_beta = 1.0;
  int reg_order = 4;           // kernel gamma-product truncation order
  double series_depth = 10.0;  // decay depth kept in the asymptotic tails
  int grid_points = 0;         // samples per kernel line; 0 = direct kernel
  double kinematic_epsilon = 1e-8;  // rapidity offset for residue checks
  double split = 0.0;          // boundary between left series and quadrature
  double right_margin = 3.5;   // quadrature edge beyond max Re theta
  double shift_floor = 5.0;    // boost rapidities until min Re reaches this
};

// Exponent of the operator insertion, fixed by the coupling and the charge
// ratio of the operator.
inline double operator_exponent(const FFConfig& config) {
  return -(1.0 / config.xi + 2.0 * config.a_over_beta);
}

struct FormFactorResult {
  cplx value;
  std::vector<int> signature;
  std::vector<cplx> rapidities;  // after the boost shift
  double applied_shift = 0.0;
  // Diagnostics accumulated over the distinct one-dimensional integrals.
  int dropped_zero_modes = 0;
  int pole_terms = 0;
  std::size_t integrals_evaluated = 0;
};

// One S-weighted evaluation request produced by exchange moves.
struct ExchangeTerm {
  cplx weight;
  std::vector<int> signature;
  std::vector<cplx> rapidities;
};

// "-+-+" or "-,-,+,+" to {-1,+1,-1,+1}; throws on anything unbalanced.
std::vector<int> parse_signature(const std::string& text);

// Expands F at adjacent positions (pos, pos+1) through the two-particle
// S-matrix: equal charges scatter diagonally, opposite charges split into a
// transmission term (each charge keeps its rapidity) and a reflection term
// (the rapidities trade places).
std::vector<ExchangeTerm> exchange_adjacent(const Kernel& kernel,
                                            const std::vector<int>& signature,
                                            const std::vector<cplx>& rapidities,
                                            std::size_t pos);

// Rewrites an arbitrary balanced signature as a weighted sum of evaluations
// in the canonical (antisolitons first) signature by inverting exchange
// moves until no +- adjacency remains.
std::vector<ExchangeTerm> reorder_to_canonical(const Kernel& kernel,
                                               const std::vector<int>& signature,
                                               const std::vector<cplx>& rapidities);

// Evaluates form factors for one coupling/operator choice. Owns the kernel
// and the integrator; single-threaded, so use one instance per thread.
class FormFactorEvaluator {
 public:
  explicit FormFactorEvaluator(const FFConfig& config);

  const FFConfig& config() const { return config_; }
  const Kernel& kernel() const { return kernel_; }

  // Installs (or clears) a sampled-kernel table serving the quadrature rows.
  void set_w_grid(std::shared_ptr<const WLineCache> grid);

  // The 2n-soliton matrix element for any balanced signature.
  FormFactorResult evaluate(const std::vector<int>& signature,
                            std::vector<cplx> rapidities);

  // Arity-checked conveniences over evaluate().
  cplx ff2(cplx theta1, cplx theta2,
           const std::vector<int>& signature = {-1, +1});
  cplx ff4(const std::vector<cplx>& rapidities,
           const std::vector<int>& signature = {-1, -1, +1, +1});
  cplx ff6(const std::vector<cplx>& rapidities,
           const std::vector<int>& signature = {-1, -1, -1, +1, +1, +1});

  // Sum of S-weighted evaluations after one exchange at `pos`; equals the
  // direct evaluation exactly when the exchange relation holds.
  cplx evaluate_exchanged(const std::vector<int>& signature,
                          const std::vector<cplx>& rapidities, std::size_t pos);

  // Evaluation routed through reorder_to_canonical.
  cplx evaluate_canonicalized(const std::vector<int>& signature,
                              const std::vector<cplx>& rapidities);

 private:
  cplx one_dim_integral(cplx B, const std::vector<int>& signs,
                        FormFactorResult& diag);

  FFConfig config_;
  Kernel kernel_;
  RegulatedIntegral integral_;
  std::shared_ptr<const WLineCache> grid_;
  // Distinct integrals per evaluation, keyed by the exponent (rounded to
  // 10 decimals so algebraically equal exponent sums coincide) and the
  // orientation pattern.
  std::map<std::tuple<double, double, std::vector<int>>, cplx> cache_;
};

// Geometry of a sampled-kernel table: the distinct Im(arg) lines a batch of
// rapidity tuples will hit (sorted, merged within 1e-9) and the half-width
// covering the quadrature window plus 25 decay lengths of headroom. Two
// batches needing the same table produce identical plans, which is what the
// on-disk cache key compares.
struct WGridPlan {
  std::vector<double> lines;
  double half_width = 0.0;
};

WGridPlan plan_w_line_cache(const FFConfig& config,
                            const std::vector<std::vector<cplx>>& batch);

// Samples the planned table; one kernel evaluation per line and node.
WLineCache build_w_line_cache(const Kernel& kernel, const FFConfig& config,
                              const std::vector<std::vector<cplx>>& batch,
                              int points);

}  // namespace sgff
