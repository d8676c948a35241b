#pragma once

#include <vector>

namespace sgff {

// Composite Gauss-Legendre grid: fixed-order panels tiled across [a, b].
struct QuadGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Tiles [a, b] with ceil((b-a)/panel_width) equal panels, 12-point rule each.
QuadGrid composite_gauss(double a, double b, double panel_width);

}  // namespace sgff
