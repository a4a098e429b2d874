#pragma once

#include <vector>

namespace cspi {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Hermite rule for E[f(Z)] with Z ~ N(0, 1): nodes are sqrt(2) x_i and
/// weights w_i / sqrt(pi), so the weights sum to one.
GaussRule gauss_hermite_normal(int n);

/// Gauss-Legendre rule on [lo, hi].
GaussRule gauss_legendre(int n, double lo, double hi);

}  // namespace cspi
