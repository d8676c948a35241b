// Precomputed kernel samples along horizontal lines, for batch evaluation
// where the same handful of Im(arg) lines is hit thousands of times.
#pragma once

#include <complex>
#include <vector>

#include "artifact/kernel.hpp"

namespace sgff {

// One sampled line, exposed so callers can persist and restore a cache.
struct WLineSamples {
  double im;
  std::vector<cplx> values;
};

// Uniform samples of W on one or more lines Im(arg) = const, queried through
// 6-point polynomial interpolation in Re(arg). Arguments off the covered
// lines or outside [-half_width, half_width] fall back to direct kernel
// evaluation, so a lookup is always well defined.
class WLineCache {
 public:
  // Samples `points` nodes on [-half_width, half_width] for every distinct
  // entry of `im_lines` (duplicates within 1e-9 are merged). Requires
  // points >= 8 and half_width > 0.
  WLineCache(const Kernel& kernel, const std::vector<double>& im_lines,
             double half_width, int points);

  // Restores a cache from previously exported samples; every line must carry
  // exactly `points` values. The kernel still serves uncovered arguments.
  WLineCache(const Kernel& kernel, std::vector<WLineSamples> samples,
             double half_width, int points);

  cplx operator()(cplx arg) const;

  // True when the argument would be served from a table rather than the
  // kernel itself.
  bool covers(cplx arg) const;

  double half_width() const { return half_width_; }
  int points() const { return points_; }
  std::vector<double> lines() const;
  // Full sampled data, for persistence.
  std::vector<WLineSamples> samples() const;

 private:
  using Line = WLineSamples;

  const Line* find_line(double im) const;

  Kernel kernel_;
  double half_width_;
  int points_;
  double step_;
  std::vector<Line> lines_;
};

}  // namespace sgff
