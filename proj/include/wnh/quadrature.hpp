#pragma once

#include <vector>

namespace wnh {

// n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes by Newton iteration on the Legendre three-term recurrence. Rules are
// cached per order; the returned reference stays valid for the program's life.
const GaussLegendreRule& gauss_legendre(int n);

}  // namespace wnh
