#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "artifact/gauss_legendre.hpp"
#include "artifact/kernel.hpp"
#include "artifact/series.hpp"

namespace sgff {

// Thrown when the integrand stops matching its asymptotic series at the right
// quadrature edge, i.e. swapping the tail for the series would lose accuracy.
class TailMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One integrand A(x) = e^{Bx} prod_j W(s_j (x - theta_j)).
struct IntegrandSpec {
  cplx B;
  std::vector<cplx> thetas;
  std::vector<int> signs;  // +-1 orientation per kernel factor
};

struct RegIntResult {
  cplx value;
  cplx tail_value;  // analytically continued series pieces on both ends
  cplx quad_value;  // quadrature between the split point and the right edge
  cplx pole_value;  // residue corrections for poles crossed by the contour
  int pole_terms = 0;  // how many residue/principal corrections contributed
  int dropped_zero_modes = 0;
};

// Integrates A(x) over the real line by analytic continuation: the divergent
// far ends are swapped for asymptotic series and integrated term by term with
// the 1/alpha continuation rules, the middle is quadrature, and residues of
// kernel poles passed while straightening the contour are added back.
//
// An instance caches kernel rows for one rapidity set; reuse it freely across
// B and sign choices, but keep each instance on a single thread.
class RegulatedIntegral {
 public:
  RegulatedIntegral(const Kernel& kernel, double series_depth = 10.0);

  // Fixes the rapidity set, the right quadrature edge (max Re theta +
  // right_margin), and the kernel rows on the quadrature grid. `split` moves
  // the boundary between the left series piece and the quadrature away from 0.
  void set_rapidities(std::vector<cplx> thetas, double split = 0.0,
                      double right_margin = 3.5);

  const std::vector<cplx>& rapidities() const { return thetas_; }
  double right_edge() const { return bb_; }
  const WSeries& w_series() const { return wseries_; }

  // Validates the spec and adopts its rapidity set, then integrates.
  RegIntResult evaluate(const IntegrandSpec& spec);
  // Integrates against the current rapidity set.
  RegIntResult evaluate(cplx B, const std::vector<int>& signs) const;

  // Asymptotic series of A(x) toward the requested infinity.
  AsymSeries integrand_series(cplx B, const std::vector<int>& signs,
                              Direction side) const;

  // A(x) at one point, straight from the kernel (memoized per rapidity set).
  cplx integrand(cplx x, cplx B, const std::vector<int>& signs) const;

  // The same continuation along Im x = offset. While the shifted line crosses
  // no kernel pole beyond those already accounted, the value is independent
  // of the offset; the residue census adapts as poles change sides.
  cplx value_on_line(cplx B, const std::vector<int>& signs, double offset) const;

  // Direct quadrature along a contour bulging around each rapidity; only
  // converges for damping B but needs no continuation, so it serves as the
  // independent oracle for the regularized path.
  cplx direct_contour(const IntegrandSpec& spec, double margin = 24.0) const;

  // Swaps in a faster row evaluator (e.g. an interpolating grid) used for the
  // quadrature rows only; pointwise residue work stays on the kernel. Call
  // before set_rapidities.
  void set_row_lookup(std::function<cplx(cplx)> lookup);

 private:
  cplx kernel_at(cplx arg) const;
  cplx product_at(cplx x, cplx B, const std::vector<cplx>& thetas,
                  const std::vector<int>& signs) const;
  std::pair<cplx, int> crossing_corrections(cplx B, const std::vector<int>& signs,
                                            double line_offset) const;
  void check_tail(const AsymSeries& right_series, cplx B,
                  const std::vector<int>& signs) const;

  const Kernel& kernel_;
  WSeries wseries_;
  std::function<cplx(cplx)> row_lookup_;

  std::vector<cplx> thetas_;
  bool initialized_ = false;
  double split_ = 0.0;
  double right_margin_ = 3.5;
  double bb_ = 3.5;
  QuadGrid grid_;
  // Kernel values over the grid per (factor, sign): rows_[j][0] holds s=+1.
  std::vector<std::array<std::vector<cplx>, 2>> rows_;

  struct ArgHash {
    size_t operator()(const std::pair<double, double>& a) const {
      return std::hash<double>()(a.first) ^ (std::hash<double>()(a.second) << 1);
    }
  };
  mutable std::unordered_map<std::pair<double, double>, cplx, ArgHash> w_memo_;
};

}  // namespace sgff
