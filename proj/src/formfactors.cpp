#include "artifact/formfactors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace sgff {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double round10(double x) { return std::round(x * 1e10) / 1e10; }

void validate_signature(const std::vector<int>& signature) {
  if (signature.empty() || signature.size() % 2 != 0) {
    throw std::invalid_argument("signature must have even, nonzero length");
  }
  int sum = 0;
  for (int s : signature) {
    if (s != 1 && s != -1) {
      throw std::invalid_argument("signature entries must be +1 or -1");
    }
    sum += s;
  }
  if (sum != 0) {
    throw std::invalid_argument("signature must balance charges");
  }
}

void validate_arguments(const std::vector<int>& signature,
                        const std::vector<cplx>& rapidities) {
  validate_signature(signature);
  if (rapidities.size() != signature.size()) {
    throw std::invalid_argument("rapidity count must match the signature");
  }
  for (cplx t : rapidities) {
    if (std::abs(t.imag()) > kPi + 1e-12) {
      throw std::invalid_argument("rapidities must satisfy |Im theta| <= pi");
    }
  }
}

// Exponent offsets and bracket weights of the four components every pair of
// gamma integrals contributes after expanding its two-gamma kernel factor.
std::array<double, 4> pair_exponents(double xi) {
  return {-1.0 - 1.0 / xi, 1.0 - 1.0 / xi, -1.0 + 1.0 / xi, 1.0 + 1.0 / xi};
}

std::array<cplx, 4> pair_phases(double xi) {
  const cplx e = std::exp(cplx{0.0, kPi / xi});
  return {1.0 / e, -1.0 / e, -e, e};
}

}  // namespace

std::vector<int> parse_signature(const std::string& text) {
  std::vector<int> signature;
  for (char c : text) {
    if (c == '+') {
      signature.push_back(1);
    } else if (c == '-') {
      signature.push_back(-1);
    } else if (c != ',' && c != ' ') {
      throw std::invalid_argument("signature characters must be + or -");
    }
  }
  validate_signature(signature);
  return signature;
}

std::vector<ExchangeTerm> exchange_adjacent(const Kernel& kernel,
                                            const std::vector<int>& signature,
                                            const std::vector<cplx>& rapidities,
                                            std::size_t pos) {
  validate_arguments(signature, rapidities);
  if (pos + 1 >= signature.size()) {
    throw std::invalid_argument("exchange position out of range");
  }
  const cplx diff = rapidities[pos + 1] - rapidities[pos];
  std::vector<cplx> swapped = rapidities;
  std::swap(swapped[pos], swapped[pos + 1]);

  std::vector<ExchangeTerm> terms;
  if (signature[pos] == signature[pos + 1]) {
    terms.push_back({kernel.S(diff), signature, std::move(swapped)});
    return terms;
  }
  std::vector<int> flipped = signature;
  std::swap(flipped[pos], flipped[pos + 1]);
  terms.push_back({kernel.ST(diff), std::move(flipped), swapped});
  terms.push_back({kernel.SR(diff), signature, std::move(swapped)});
  return terms;
}

std::vector<ExchangeTerm> reorder_to_canonical(const Kernel& kernel,
                                               const std::vector<int>& signature,
                                               const std::vector<cplx>& rapidities) {
  validate_arguments(signature, rapidities);
  std::vector<ExchangeTerm> pending{{1.0, signature, rapidities}};
  std::vector<ExchangeTerm> done;
  while (!pending.empty()) {
    ExchangeTerm term = std::move(pending.back());
    pending.pop_back();
    std::size_t pos = term.signature.size();
    for (std::size_t k = 0; k + 1 < term.signature.size(); ++k) {
      if (term.signature[k] == 1 && term.signature[k + 1] == -1) {
        pos = k;
        break;
      }
    }
    if (pos == term.signature.size()) {
      done.push_back(std::move(term));
      continue;
    }
    // Inverting the exchange move at pos: with (u, v) the local rapidities,
    //   F_{+-}(u, v) = [F_{-+}(v, u) - SR(u - v) F_{-+}(u, v)] / ST(u - v),
    // so both replacement terms carry one inversion less and the rewrite
    // terminates on the canonical order.
    const cplx u = term.rapidities[pos];
    const cplx v = term.rapidities[pos + 1];
    const cplx st = kernel.ST(u - v);
    const cplx sr = kernel.SR(u - v);
    std::vector<int> sig = term.signature;
    std::swap(sig[pos], sig[pos + 1]);
    std::vector<cplx> swapped = term.rapidities;
    std::swap(swapped[pos], swapped[pos + 1]);
    pending.push_back({term.weight / st, sig, std::move(swapped)});
    pending.push_back({-term.weight * sr / st, std::move(sig), term.rapidities});
  }
  return done;
}

FormFactorEvaluator::FormFactorEvaluator(const FFConfig& config)
    : config_(config),
      kernel_(config.xi, config.reg_order),
      integral_(kernel_, config.series_depth) {
  if (config_.series_depth <= 0.0 || config_.grid_points < 0 ||
      config_.right_margin <= 0.0 || config_.kinematic_epsilon <= 0.0) {
    throw std::invalid_argument("form factor solver parameters must be positive");
  }
}

void FormFactorEvaluator::set_w_grid(std::shared_ptr<const WLineCache> grid) {
  grid_ = std::move(grid);
}

cplx FormFactorEvaluator::one_dim_integral(cplx B, const std::vector<int>& signs,
                                           FormFactorResult& diag) {
  std::tuple<double, double, std::vector<int>> key{round10(B.real()),
                                                   round10(B.imag()), signs};
  const auto it = cache_.find(key);
  if (it != cache_.end()) {
    return it->second;
  }
  const RegIntResult part = integral_.evaluate(B, signs);
  diag.dropped_zero_modes += part.dropped_zero_modes;
  diag.pole_terms += part.pole_terms;
  ++diag.integrals_evaluated;
  cache_.emplace(std::move(key), part.value);
  return part.value;
}

FormFactorResult FormFactorEvaluator::evaluate(const std::vector<int>& signature,
                                               std::vector<cplx> rapidities) {
  validate_arguments(signature, rapidities);

  double min_re = rapidities.front().real();
  for (cplx t : rapidities) {
    min_re = std::min(min_re, t.real());
  }
  const double shift = std::max(0.0, config_.shift_floor - min_re);
  for (cplx& t : rapidities) {
    t += shift;
  }

  cache_.clear();
  if (grid_) {
    integral_.set_row_lookup([grid = grid_](cplx arg) { return (*grid)(arg); });
  } else {
    integral_.set_row_lookup({});
  }
  integral_.set_rapidities(rapidities, config_.split, config_.right_margin);

  const std::size_t n2 = signature.size();
  const std::size_t n = n2 / 2;
  std::vector<std::size_t> minus;
  for (std::size_t i = 0; i < n2; ++i) {
    if (signature[i] == -1) {
      minus.push_back(i);
    }
  }

  const double xi = config_.xi;
  const double beta_sq = xi / (1.0 + xi);
  const double exponent = operator_exponent(config_);
  const auto alpha = pair_exponents(xi);
  const auto phase = pair_phases(xi);

  // Operator normalization, boost factor, charge factor, and the pairwise
  // kernel product shared by every term of the expansion.
  cplx pref = 1.0;
  const cplx gamma_norm{0.0, kernel_.c2() / (8.0 * kPi * kernel_.c1())};
  for (std::size_t k = 0; k < n; ++k) {
    pref *= gamma_norm;
  }
  const double pair_norm = -kernel_.c2() * xi / 16.0;
  for (std::size_t k = 0; k < n * (n - 1) / 2; ++k) {
    pref *= pair_norm;
  }
  cplx boost_arg = 0.0;
  cplx charge_arg = 0.0;
  for (std::size_t i = 0; i < n2; ++i) {
    boost_arg += static_cast<double>(signature[i]) * rapidities[i];
  }
  for (std::size_t i : minus) {
    charge_arg += rapidities[i];
  }
  pref *= std::exp(config_.a_over_beta * boost_arg - exponent * charge_arg);
  for (std::size_t i = 0; i < n2; ++i) {
    for (std::size_t j = i + 1; j < n2; ++j) {
      pref *= kernel_.G(rapidities[i] - rapidities[j]);
    }
  }

  const cplx branch_plus = std::exp(cplx{0.0, kPi / (2.0 * beta_sq)});
  const cplx branch_minus = std::exp(cplx{0.0, -kPi / (2.0 * beta_sq)});

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      pairs.emplace_back(minus[a], minus[b]);
    }
  }

  FormFactorResult out;
  out.signature = signature;
  out.rapidities = rapidities;
  out.applied_shift = shift;

  std::size_t component_count = 1;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    component_count *= 4;
  }

  cplx total = 0.0;
  std::vector<int> signs(n2);
  for (std::size_t code = 0; code < component_count; ++code) {
    cplx weight = 1.0;
    std::vector<double> b_offset(n2, 0.0);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const int kk = static_cast<int>(code >> (2 * (pairs.size() - 1 - p))) & 3;
      weight *= phase[kk];
      b_offset[pairs[p].second] -= alpha[kk];
      b_offset[pairs[p].first] += alpha[kk];
    }
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      cplx branch_weight = 1.0;
      cplx prod = 1.0;
      for (std::size_t g = 0; g < n; ++g) {
        const std::size_t gi = minus[g];
        const int branch = (mask >> (n - 1 - g)) & 1 ? -1 : 1;
        branch_weight *= branch == 1 ? branch_plus : -branch_minus;
        for (std::size_t j = 0; j < n2; ++j) {
          signs[j] = j == gi ? -branch : (j > gi ? 1 : -1);
        }
        prod *= one_dim_integral(exponent + b_offset[gi], signs, out);
      }
      total += weight * branch_weight * prod;
    }
  }

  out.value = pref * total;
  return out;
}

cplx FormFactorEvaluator::ff2(cplx theta1, cplx theta2,
                              const std::vector<int>& signature) {
  if (signature.size() != 2) {
    throw std::invalid_argument("ff2 needs a two-charge signature");
  }
  return evaluate(signature, {theta1, theta2}).value;
}

cplx FormFactorEvaluator::ff4(const std::vector<cplx>& rapidities,
                              const std::vector<int>& signature) {
  if (signature.size() != 4 || rapidities.size() != 4) {
    throw std::invalid_argument("ff4 needs four rapidities and four charges");
  }
  return evaluate(signature, rapidities).value;
}

cplx FormFactorEvaluator::ff6(const std::vector<cplx>& rapidities,
                              const std::vector<int>& signature) {
  if (signature.size() != 6 || rapidities.size() != 6) {
    throw std::invalid_argument("ff6 needs six rapidities and six charges");
  }
  return evaluate(signature, rapidities).value;
}

cplx FormFactorEvaluator::evaluate_exchanged(const std::vector<int>& signature,
                                             const std::vector<cplx>& rapidities,
                                             std::size_t pos) {
  cplx total = 0.0;
  for (const ExchangeTerm& term : exchange_adjacent(kernel_, signature, rapidities, pos)) {
    total += term.weight * evaluate(term.signature, term.rapidities).value;
  }
  return total;
}

cplx FormFactorEvaluator::evaluate_canonicalized(const std::vector<int>& signature,
                                                 const std::vector<cplx>& rapidities) {
  cplx total = 0.0;
  for (const ExchangeTerm& term : reorder_to_canonical(kernel_, signature, rapidities)) {
    total += term.weight * evaluate(term.signature, term.rapidities).value;
  }
  return total;
}

WGridPlan plan_w_line_cache(const FFConfig& config,
                            const std::vector<std::vector<cplx>>& batch) {
  std::vector<double> lines{0.0};
  double extent = config.right_margin;
  for (const std::vector<cplx>& tuple : batch) {
    if (tuple.empty()) {
      continue;
    }
    double min_re = tuple.front().real();
    double max_re = tuple.front().real();
    for (cplx t : tuple) {
      min_re = std::min(min_re, t.real());
      max_re = std::max(max_re, t.real());
    }
    const double shift = std::max(0.0, config.shift_floor - min_re);
    const double edge = max_re + shift + config.right_margin;
    for (cplx t : tuple) {
      lines.push_back(t.imag());
      lines.push_back(-t.imag());
      const double re = t.real() + shift;
      extent = std::max({extent, std::abs(edge - re), std::abs(config.split - re)});
    }
  }
  std::sort(lines.begin(), lines.end());
  std::vector<double> merged;
  for (double im : lines) {
    if (merged.empty() || im - merged.back() > 1e-9) {
      merged.push_back(im);
    }
  }
  const double slowest_decay = (config.xi + 1.0) / (2.0 * config.xi);
  return WGridPlan{std::move(merged), extent + 25.0 / slowest_decay};
}

WLineCache build_w_line_cache(const Kernel& kernel, const FFConfig& config,
                              const std::vector<std::vector<cplx>>& batch,
                              int points) {
  const WGridPlan plan = plan_w_line_cache(config, batch);
  return WLineCache(kernel, plan.lines, plan.half_width, points);
}

}  // namespace sgff
