#pragma once

#include <Eigen/Dense>

namespace kacgc {

/// Gauss-Hermite rule for the unit-mass weight gamma(v) dv = exp(-pi v^2) dv,
/// built by Golub-Welsch. Exact for polynomials of degree <= 2n-1.
struct GaussHermite {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;  // sum to 1

  static GaussHermite rule(int n);

  template <typename F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (int i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

}  // namespace kacgc
