#include "kacgc/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace kacgc {

GaussHermite GaussHermite::rule(int n) {
  if (n < 1) throw std::invalid_argument("GaussHermite: need n >= 1 nodes");
  // Jacobi matrix of the physicists' Hermite weight exp(-x^2): off-diagonal
  // beta_k = sqrt(k/2); nodes/weights then rescaled to exp(-pi v^2) with v =
  // x/sqrt(pi) and unit total mass.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(0.5 * k);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  GaussHermite q;
  q.nodes = es.eigenvalues() / std::sqrt(M_PI);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    q.weights[i] = v0 * v0;  // already normalized: weights sum to 1
  }
  return q;
}

}  // namespace kacgc
