#include "artifact/wgrid.hpp"

#include <cmath>
#include <stdexcept>

namespace sgff {

namespace {
constexpr double kLineTol = 1e-9;
}

WLineCache::WLineCache(const Kernel& kernel, const std::vector<double>& im_lines,
                       double half_width, int points)
    : kernel_(kernel), half_width_(half_width), points_(points) {
  if (points_ < 8) {
    throw std::invalid_argument("WLineCache: need at least 8 sample points");
  }
  if (!(half_width_ > 0.0)) {
    throw std::invalid_argument("WLineCache: half_width must be positive");
  }
  step_ = 2.0 * half_width_ / (points_ - 1);
  for (double im : im_lines) {
    if (find_line(im) != nullptr) {
      continue;
    }
    Line line;
    line.im = im;
    line.values.resize(points_);
    for (int i = 0; i < points_; ++i) {
      line.values[i] = kernel_.W(cplx{-half_width_ + i * step_, im});
    }
    lines_.push_back(std::move(line));
  }
}

WLineCache::WLineCache(const Kernel& kernel, std::vector<WLineSamples> samples,
                       double half_width, int points)
    : kernel_(kernel), half_width_(half_width), points_(points) {
  if (points_ < 8) {
    throw std::invalid_argument("WLineCache: need at least 8 sample points");
  }
  if (!(half_width_ > 0.0)) {
    throw std::invalid_argument("WLineCache: half_width must be positive");
  }
  step_ = 2.0 * half_width_ / (points_ - 1);
  for (const WLineSamples& s : samples) {
    if (static_cast<int>(s.values.size()) != points_) {
      throw std::invalid_argument("WLineCache: sample row length does not match points");
    }
  }
  lines_ = std::move(samples);
}

std::vector<WLineSamples> WLineCache::samples() const { return lines_; }

const WLineCache::Line* WLineCache::find_line(double im) const {
  for (const Line& line : lines_) {
    if (std::abs(line.im - im) <= kLineTol) {
      return &line;
    }
  }
  return nullptr;
}

bool WLineCache::covers(cplx arg) const {
  return std::abs(arg.real()) <= half_width_ && find_line(arg.imag()) != nullptr;
}

std::vector<double> WLineCache::lines() const {
  std::vector<double> ims;
  ims.reserve(lines_.size());
  for (const Line& line : lines_) {
    ims.push_back(line.im);
  }
  return ims;
}

cplx WLineCache::operator()(cplx arg) const {
  const Line* line = find_line(arg.imag());
  if (line == nullptr || std::abs(arg.real()) > half_width_) {
    return kernel_.W(arg);
  }
  // Fractional node index, then a 6-node stencil clamped to the table.
  const double t = (arg.real() + half_width_) / step_;
  int base = static_cast<int>(std::floor(t)) - 2;
  if (base < 0) {
    base = 0;
  }
  if (base > points_ - 6) {
    base = points_ - 6;
  }
  cplx acc = 0.0;
  for (int k = 0; k < 6; ++k) {
    double weight = 1.0;
    for (int m = 0; m < 6; ++m) {
      if (m != k) {
        weight *= (t - (base + m)) / (k - m);
      }
    }
    acc += weight * line->values[base + k];
  }
  return acc;
}

}  // namespace sgff
