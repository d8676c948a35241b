#include "artifact/regint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace sgff {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::uint64_t pack(int p, int q) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p)) << 32) |
         static_cast<std::uint32_t>(q);
}

void validate(const std::vector<cplx>& thetas, const std::vector<int>& signs) {
  if (thetas.size() != signs.size()) {
    throw std::invalid_argument("integrand spec: thetas and signs differ in length");
  }
  for (cplx th : thetas) {
    if (std::abs(th.imag()) > kPi + 1e-12) {
      throw std::invalid_argument("integrand spec: |Im theta| exceeds pi");
    }
  }
  for (int s : signs) {
    if (s != 1 && s != -1) {
      throw std::invalid_argument("integrand spec: signs must be +-1");
    }
  }
}

}  // namespace

RegulatedIntegral::RegulatedIntegral(const Kernel& kernel, double series_depth)
    : kernel_(kernel), wseries_(kernel, series_depth) {}

void RegulatedIntegral::set_row_lookup(std::function<cplx(cplx)> lookup) {
  row_lookup_ = std::move(lookup);
  initialized_ = false;  // force a row rebuild on the next rapidity set
}

void RegulatedIntegral::set_rapidities(std::vector<cplx> thetas, double split,
                                       double right_margin) {
  double rmax = 0.0;
  for (cplx th : thetas) {
    rmax = std::max(rmax, th.real());
  }
  const double bb = rmax + right_margin;
  if (initialized_ && thetas == thetas_ && split == split_ && bb == bb_) {
    return;
  }
  initialized_ = true;
  thetas_ = std::move(thetas);
  split_ = split;
  right_margin_ = right_margin;
  bb_ = bb;
  grid_ = composite_gauss(split_, bb_, 0.25);
  rows_.assign(thetas_.size(), {});
  for (size_t j = 0; j < thetas_.size(); ++j) {
    for (int si = 0; si < 2; ++si) {
      const double s = si == 0 ? 1.0 : -1.0;
      auto& row = rows_[j][si];
      row.resize(grid_.nodes.size());
      for (size_t i = 0; i < grid_.nodes.size(); ++i) {
        const cplx arg = s * (grid_.nodes[i] - thetas_[j]);
        row[i] = row_lookup_ ? row_lookup_(arg) : kernel_.W(arg);
      }
    }
  }
  w_memo_.clear();
}

cplx RegulatedIntegral::kernel_at(cplx arg) const {
  const std::pair<double, double> key{arg.real(), arg.imag()};
  auto it = w_memo_.find(key);
  if (it != w_memo_.end()) {
    return it->second;
  }
  const cplx v = kernel_.W(arg);
  w_memo_.emplace(key, v);
  return v;
}

cplx RegulatedIntegral::product_at(cplx x, cplx B, const std::vector<cplx>& thetas,
                                   const std::vector<int>& signs) const {
  cplx out = std::exp(B * x);
  for (size_t j = 0; j < thetas.size(); ++j) {
    out *= kernel_at(double(signs[j]) * (x - thetas[j]));
  }
  return out;
}

cplx RegulatedIntegral::integrand(cplx x, cplx B, const std::vector<int>& signs) const {
  return product_at(x, B, thetas_, signs);
}

AsymSeries RegulatedIntegral::integrand_series(cplx B, const std::vector<int>& signs,
                                               Direction side) const {
  const size_t n = thetas_.size();
  const double cutmax =
      wseries_.cutoff() + (n > 0 ? (double(n) - 1.0) * wseries_.rho0() : 0.0);
  const bool minus = side == Direction::to_minus_infinity;

  // Exact-lattice product of the per-factor expansions: each factor's decay
  // exponent lives on the (p, q) lattice, so the product merges on summed
  // integer keys and never on accumulated floats.
  std::unordered_map<std::uint64_t, cplx> cur;
  cur[pack(0, 0)] = cplx(1.0, 0.0);
  for (size_t j = 0; j < n; ++j) {
    const cplx th = thetas_[j];
    const int s = signs[j];
    std::unordered_map<std::uint64_t, cplx> next;
    next.reserve(cur.size() * 4);
    for (const auto& [key, c1] : cur) {
      const int p1 = static_cast<int>(key >> 32);
      const int q1 = static_cast<int>(key & 0xffffffffu);
      const double r1 = 0.5 * (p1 + q1 / wseries_.xi());
      for (const auto& t : wseries_.terms()) {
        const double r2 = wseries_.rho(t.k);
        if (r1 + r2 > cutmax + 1e-12) {
          break;  // factor terms are sorted by decay rate
        }
        cplx cc;
        if (minus) {
          cc = (s > 0 ? std::conj(t.coeff) : t.coeff) * std::exp(-r2 * th);
        } else {
          cc = (s > 0 ? t.coeff : std::conj(t.coeff)) * std::exp(r2 * th);
        }
        next[pack(p1 + t.k.p, q1 + t.k.q)] += c1 * cc;
      }
    }
    cur = std::move(next);
  }

  std::vector<SeriesTerm> terms;
  terms.reserve(cur.size());
  for (const auto& [key, c] : cur) {
    const int p = static_cast<int>(key >> 32);
    const int q = static_cast<int>(key & 0xffffffffu);
    const double r = 0.5 * (p + q / wseries_.xi());
    terms.push_back({c, minus ? B + r : B - r});
  }
  const double cutoff = minus ? B.real() + cutmax : cutmax - B.real();
  return AsymSeries(minus ? Direction::to_minus_infinity : Direction::to_plus_infinity,
                    cutoff, std::move(terms));
}

void RegulatedIntegral::check_tail(const AsymSeries& right_series, cplx B,
                                   const std::vector<int>& signs) const {
  const cplx by_series = right_series.eval(bb_);
  const cplx direct = integrand(bb_, B, signs);
  if (std::abs(direct) > 1e-250 &&
      std::abs(by_series - direct) > 3e-4 * std::abs(direct)) {
    throw TailMismatchError(
        "integrand does not match its series at the right edge x = " +
        std::to_string(bb_) + " (relative error " +
        std::to_string(std::abs(by_series - direct) / std::abs(direct)) + ")");
  }
}

std::pair<cplx, int> RegulatedIntegral::crossing_corrections(
    cplx B, const std::vector<int>& signs, double line_offset) const {
  // Straightening the contour onto the horizontal line drags it past the
  // first kernel singularity at distance pi/2 below each rapidity (simple
  // pole of the half-period family) and past however many xi-family poles
  // fit between the line and the rapidity.
  const cplx half_step(0.0, kPi / 2);
  const double coef = 4.0 * kPi / std::sqrt(kernel_.c2());
  cplx total = 0.0;
  int terms = 0;
  for (size_t i = 0; i < thetas_.size(); ++i) {
    const cplx ti = thetas_[i];
    const double si = signs[i];
    if (-si * (ti.imag() - line_offset) + kPi / 2 > 1e-12) {
      const cplx arg = ti - si * half_step;
      cplx prod = coef * std::exp(B * arg);
      for (size_t j = 0; j < thetas_.size(); ++j) {
        if (j != i) {
          prod *= kernel_at(double(signs[j]) * (arg - thetas_[j]));
        }
      }
      total += prod;
      ++terms;
    }
    const int crossed = static_cast<int>(
        std::floor((0.5 - si * (ti.imag() - line_offset) / kPi) / kernel_.xi()));
    for (int n = 1; n <= crossed; ++n) {
      const cplx arg = ti + si * kernel_.xi_pole(n);
      cplx prod = cplx(0.0, 2.0 * kPi) * kernel_.residue_W(n) * std::exp(B * arg);
      for (size_t j = 0; j < thetas_.size(); ++j) {
        if (j != i) {
          prod *= kernel_at(double(signs[j]) * (arg - thetas_[j]));
        }
      }
      total += prod;
      ++terms;
    }
  }
  return {total, terms};
}

RegIntResult RegulatedIntegral::evaluate(const IntegrandSpec& spec) {
  validate(spec.thetas, spec.signs);
  set_rapidities(spec.thetas, split_, right_margin_);
  return evaluate(spec.B, spec.signs);
}

RegIntResult RegulatedIntegral::evaluate(cplx B, const std::vector<int>& signs) const {
  if (signs.size() != thetas_.size()) {
    throw std::invalid_argument("signs do not match the current rapidity set");
  }
  RegIntResult out;

  const AsymSeries left = integrand_series(B, signs, Direction::to_minus_infinity);
  const HalfLineTail lt = integrate_neg_halfline(series_shift(left, split_));
  out.dropped_zero_modes += lt.dropped_zero_modes;

  cplx quad = 0.0;
  for (size_t i = 0; i < grid_.nodes.size(); ++i) {
    cplx a = std::exp(B * grid_.nodes[i]);
    for (size_t j = 0; j < thetas_.size(); ++j) {
      a *= rows_[j][signs[j] > 0 ? 0 : 1][i];
    }
    quad += grid_.weights[i] * a;
  }

  const AsymSeries right = integrand_series(B, signs, Direction::to_plus_infinity);
  check_tail(right, B, signs);
  const HalfLineTail rt = integrate_pos_halfline(right, bb_);
  out.dropped_zero_modes += rt.dropped_zero_modes;

  out.tail_value = lt.value + rt.value;
  out.quad_value = quad;
  const auto [pole, terms] = crossing_corrections(B, signs, 0.0);
  out.pole_value = pole;
  out.pole_terms = terms;
  out.value = out.tail_value + out.quad_value + out.pole_value;
  return out;
}

cplx RegulatedIntegral::value_on_line(cplx B, const std::vector<int>& signs,
                                      double offset) const {
  const cplx lift(0.0, offset);
  const AsymSeries left = series_shift(
      integrand_series(B, signs, Direction::to_minus_infinity), split_ + lift);
  cplx total = integrate_neg_halfline(left).value;
  for (size_t i = 0; i < grid_.nodes.size(); ++i) {
    total += grid_.weights[i] * integrand(grid_.nodes[i] + lift, B, signs);
  }
  const AsymSeries right = series_shift(
      integrand_series(B, signs, Direction::to_plus_infinity), lift);
  total += integrate_pos_halfline(right, bb_).value;
  return total + crossing_corrections(B, signs, offset).first;
}

cplx RegulatedIntegral::direct_contour(const IntegrandSpec& spec, double margin) const {
  validate(spec.thetas, spec.signs);
  std::vector<std::pair<cplx, int>> order;
  for (size_t j = 0; j < spec.thetas.size(); ++j) {
    order.emplace_back(spec.thetas[j], spec.signs[j]);
  }
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) { return a.first.real() < b.first.real(); });

  double rmin = order.empty() ? 0.0 : order.front().first.real();
  double rmax = order.empty() ? 0.0 : order.back().first.real();
  std::vector<cplx> pts;
  pts.emplace_back(rmin - margin, 0.0);
  const double bulge = kPi / 2 + 0.8;
  const double w = 1.4;
  for (const auto& [th, s] : order) {
    const double c = th.real();
    const double d = -s * bulge;
    pts.emplace_back(c - w, 0.0);
    pts.emplace_back(c - w / 2, d);
    pts.emplace_back(c + w / 2, d);
    pts.emplace_back(c + w, 0.0);
  }
  pts.emplace_back(rmax + margin, 0.0);

  cplx total = 0.0;
  for (size_t k = 0; k + 1 < pts.size(); ++k) {
    const cplx dz = pts[k + 1] - pts[k];
    if (std::abs(dz) < 1e-12) {
      continue;
    }
    const QuadGrid seg = composite_gauss(0.0, 1.0, 0.25 / std::abs(dz));
    cplx acc = 0.0;
    for (size_t i = 0; i < seg.nodes.size(); ++i) {
      acc += seg.weights[i] *
             product_at(pts[k] + dz * seg.nodes[i], spec.B, spec.thetas, spec.signs);
    }
    total += dz * acc;
  }
  return total;
}

}  // namespace sgff
