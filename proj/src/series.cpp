#include "artifact/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace sgff {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kMergeTol = 1e-12;
constexpr double kZeroModeTol = 1e-10;
constexpr double kRationalTol = 1e-9;

double direction_sign(Direction d) {
  return d == Direction::to_plus_infinity ? 1.0 : -1.0;
}

}  // namespace

AsymSeries::AsymSeries(Direction dir, double cutoff, std::vector<SeriesTerm> terms)
    : dir_(dir), cutoff_(cutoff) {
  // Sort by exponent so equal-up-to-tolerance exponents become adjacent, then
  // merge chains and discard terms beyond the accuracy cutoff.
  std::sort(terms.begin(), terms.end(), [](const SeriesTerm& a, const SeriesTerm& b) {
    if (a.exponent.real() != b.exponent.real()) return a.exponent.real() < b.exponent.real();
    return a.exponent.imag() < b.exponent.imag();
  });
  terms_.reserve(terms.size());
  for (const auto& t : terms) {
    if (!terms_.empty() && std::abs(t.exponent - terms_.back().exponent) <= kMergeTol) {
      terms_.back().coeff += t.coeff;
      continue;
    }
    terms_.push_back(t);
  }
  std::erase_if(terms_, [this](const SeriesTerm& t) {
    return decay_rate(t) > cutoff_ + kMergeTol || t.coeff == cplx(0.0, 0.0);
  });
  std::stable_sort(terms_.begin(), terms_.end(), [this](const SeriesTerm& a, const SeriesTerm& b) {
    return decay_rate(a) < decay_rate(b);
  });
}

AsymSeries AsymSeries::one(Direction dir) {
  return AsymSeries(dir, std::numeric_limits<double>::infinity(),
                    {SeriesTerm{cplx(1.0, 0.0), cplx(0.0, 0.0)}});
}

double AsymSeries::decay_rate(const SeriesTerm& t) const {
  return -direction_sign(dir_) * t.exponent.real();
}

double AsymSeries::slowest_decay() const {
  if (terms_.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  return decay_rate(terms_.front());
}

cplx AsymSeries::eval(cplx x) const {
  cplx acc = 0.0;
  for (const auto& t : terms_) {
    acc += t.coeff * std::exp(t.exponent * x);
  }
  return acc;
}

AsymSeries series_product(const AsymSeries& a, const AsymSeries& b) {
  if (a.direction() != b.direction()) {
    throw std::invalid_argument("series_product: mixed directions");
  }
  const double cutoff =
      std::min(a.cutoff() + b.slowest_decay(), b.cutoff() + a.slowest_decay());
  std::vector<SeriesTerm> terms;
  terms.reserve(a.terms().size() * b.terms().size());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      terms.push_back({ta.coeff * tb.coeff, ta.exponent + tb.exponent});
    }
  }
  return AsymSeries(a.direction(), cutoff, std::move(terms));
}

AsymSeries series_shift(const AsymSeries& a, cplx shift) {
  std::vector<SeriesTerm> terms = a.terms();
  for (auto& t : terms) {
    t.coeff *= std::exp(t.exponent * shift);
  }
  return AsymSeries(a.direction(), a.cutoff(), std::move(terms));
}

HalfLineTail integrate_neg_halfline(const AsymSeries& a) {
  if (a.direction() != Direction::to_minus_infinity) {
    throw std::invalid_argument("integrate_neg_halfline: series must describe x -> -infinity");
  }
  HalfLineTail out;
  for (const auto& t : a.terms()) {
    if (std::abs(t.exponent) < kZeroModeTol) {
      ++out.dropped_zero_modes;
      continue;
    }
    out.value += t.coeff / t.exponent;
  }
  return out;
}

HalfLineTail integrate_pos_halfline(const AsymSeries& a, double from) {
  if (a.direction() != Direction::to_plus_infinity) {
    throw std::invalid_argument("integrate_pos_halfline: series must describe x -> +infinity");
  }
  HalfLineTail out;
  for (const auto& t : a.terms()) {
    if (std::abs(t.exponent) < kZeroModeTol) {
      ++out.dropped_zero_modes;
      continue;
    }
    out.value += -t.coeff * std::exp(t.exponent * from) / t.exponent;
  }
  return out;
}

cplx w_coeff_a(int k, double xi, int s) {
  if (k < 1) {
    throw std::invalid_argument("w_coeff_a: k must be >= 1");
  }
  const double r = 2.0 * k / xi;
  const double nearest = std::round(r);
  if (std::abs(r - nearest) < kRationalTol && std::llround(nearest) % 2 != 0) {
    return cplx(0.0, -double(s)) / double(k);
  }
  return (std::cos(2.0 * kPi * k / xi) / (2.0 * std::cos(kPi * k / xi)) -
          cplx(0.0, double(s)) * std::sin(kPi * k / xi)) /
         double(k);
}

cplx w_coeff_b(int k, double xi) {
  if (k < 1) {
    throw std::invalid_argument("w_coeff_b: k must be >= 1");
  }
  if (k % 2 == 0) {
    // -i^k/k with even k: i^k = +1 for k = 0 mod 4, -1 for k = 2 mod 4.
    return cplx((k % 4 == 0 ? -1.0 : 1.0) / k, 0.0);
  }
  const double kxi = k * xi;
  if (std::abs(kxi - 2.0 * std::round(kxi / 2.0)) < kRationalTol) {
    return cplx(0.0, 0.0);
  }
  // -i^(k+1)/k cot(pi xi k/2) with odd k: i^(k+1) = -1 for k = 1 mod 4, +1 for k = 3 mod 4.
  const double sign = (k % 4 == 1) ? 1.0 : -1.0;
  return cplx(sign / std::tan(kPi * xi * k / 2.0) / k, 0.0);
}

namespace {

// Packed (p, q) key for exact merging during the exp-expansion.
std::uint64_t pack(LatticeExponent k) {
  return (std::uint64_t(std::uint32_t(k.p)) << 32) | std::uint64_t(std::uint32_t(k.q));
}

LatticeExponent unpack(std::uint64_t key) {
  return {int(std::uint32_t(key >> 32)), int(std::uint32_t(key & 0xffffffffu))};
}

}  // namespace

WSeries::WSeries(double xi, double c2, double depth) : xi_(xi), depth_(depth) {
  if (xi <= 0.0 || c2 <= 0.0 || depth < 1.0) {
    throw std::invalid_argument("WSeries: xi and c2 must be positive, depth >= 1");
  }
  rho0_ = (xi + 1.0) / (2.0 * xi);
  cutoff_ = rho0_ + depth;

  // Expansion generators (coefficient, lattice offset with rho = (p + q/xi)/2):
  // the alternating geometric factor, then the a- and b-coefficient exponentials.
  struct Generator {
    cplx coeff;
    LatticeExponent delta;
  };
  std::vector<Generator> gens;
  for (int m = 1; 2.0 * m <= depth; ++m) {
    gens.push_back({cplx((m % 2 == 0 ? 1.0 : -1.0) / m, 0.0), {4 * m, 0}});
  }
  for (int k = 1; 2.0 * k / xi <= depth + 1e-12; ++k) {
    gens.push_back({w_coeff_a(k, xi, +1), {0, 4 * k}});
  }
  for (int k = 1; double(k) <= depth + 1e-12; ++k) {
    gens.push_back({w_coeff_b(k, xi), {2 * k, 0}});
  }

  const cplx pref =
      cplx(0.0, -4.0) * std::exp(cplx(0.0, -kPi / (2.0 * xi))) / std::sqrt(c2 * xi);
  std::unordered_map<std::uint64_t, cplx> acc;
  acc[pack({1, 1})] = pref;
  for (const auto& g : gens) {
    if (g.coeff == cplx(0.0, 0.0)) {
      continue;
    }
    // exp-expand this generator against a snapshot of the series so far.
    const std::vector<std::pair<std::uint64_t, cplx>> snapshot(acc.begin(), acc.end());
    for (const auto& [key, coef] : snapshot) {
      LatticeExponent base = unpack(key);
      cplx pw = 1.0;
      for (int l = 1;; ++l) {
        LatticeExponent next{base.p + l * g.delta.p, base.q + l * g.delta.q};
        if (rho(next) > cutoff_ + 1e-12) {
          break;
        }
        pw *= g.coeff / double(l);
        acc[pack(next)] += coef * pw;
      }
    }
  }

  terms_.reserve(acc.size());
  for (const auto& [key, coef] : acc) {
    terms_.push_back({unpack(key), coef});
  }
  std::sort(terms_.begin(), terms_.end(), [this](const LatticeTerm& a, const LatticeTerm& b) {
    const double ra = rho(a.k);
    const double rb = rho(b.k);
    if (ra != rb) return ra < rb;
    if (a.k.p != b.k.p) return a.k.p < b.k.p;
    return a.k.q < b.k.q;
  });
}

WSeries::WSeries(const Kernel& kernel, double depth) : WSeries(kernel.xi(), kernel.c2(), depth) {}

cplx WSeries::eval(cplx x, int s) const {
  cplx acc = 0.0;
  if (s > 0) {
    for (const auto& t : terms_) {
      acc += t.coeff * std::exp(-rho(t.k) * x);
    }
  } else {
    for (const auto& t : terms_) {
      acc += std::conj(t.coeff) * std::exp(rho(t.k) * x);
    }
  }
  return acc;
}

AsymSeries WSeries::to_asym(int s) const {
  std::vector<SeriesTerm> terms;
  terms.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (s > 0) {
      terms.push_back({t.coeff, cplx(-rho(t.k), 0.0)});
    } else {
      terms.push_back({std::conj(t.coeff), cplx(rho(t.k), 0.0)});
    }
  }
  return AsymSeries(s > 0 ? Direction::to_plus_infinity : Direction::to_minus_infinity, cutoff_,
                    std::move(terms));
}

}  // namespace sgff
