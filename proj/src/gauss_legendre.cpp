#include "artifact/gauss_legendre.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <cstddef>

namespace sgff {

namespace {

// Full 12-point rule on [-1, 1], unpacked from Boost's half-tables.
struct Rule12 {
  double x[12];
  double w[12];
  Rule12() {
    using G = boost::math::quadrature::gauss<double, 12>;
    const auto& ab = G::abscissa();  // 6 non-negative nodes, ascending
    const auto& ww = G::weights();
    for (int i = 0; i < 6; ++i) {
      x[5 - i] = -ab[i];
      x[6 + i] = ab[i];
      w[5 - i] = ww[i];
      w[6 + i] = ww[i];
    }
  }
};

}  // namespace

QuadGrid composite_gauss(double a, double b, double panel_width) {
  static const Rule12 rule;
  QuadGrid g;
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / panel_width)));
  const double h = (b - a) / panels;
  g.nodes.reserve(static_cast<std::size_t>(panels) * 12);
  g.weights.reserve(static_cast<std::size_t>(panels) * 12);
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    for (int i = 0; i < 12; ++i) {
      g.nodes.push_back(mid + 0.5 * h * rule.x[i]);
      g.weights.push_back(0.5 * h * rule.w[i]);
    }
  }
  return g;
}

}  // namespace sgff
