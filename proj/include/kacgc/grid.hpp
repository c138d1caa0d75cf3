#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace kacgc {

/// Uniform velocity grid, symmetric about 0 (so v -> -v is a grid symmetry).
struct VelocityGrid {
  double v_max = 4.0;
  double dv = 0.02;
  int n = 0;  // number of points, odd

  VelocityGrid() { init(); }
  VelocityGrid(double vmax, double spacing) : v_max(vmax), dv(spacing) { init(); }

  double v(int i) const { return -v_max + i * dv; }

  Eigen::VectorXd points() const {
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p[i] = v(i);
    return p;
  }

  /// Index of the cell [v_i - dv/2, v_i + dv/2) containing v, or -1 if
  /// outside the grid.
  int cell_of(double v_) const {
    const double x = (v_ + v_max) / dv + 0.5;
    if (x < 0.0 || x >= n) return -1;
    return static_cast<int>(x);
  }

 private:
  void init() {
    if (!(dv > 0.0) || !(v_max > 0.0))
      throw std::invalid_argument("VelocityGrid: v_max and dv must be > 0");
    const int half = static_cast<int>(std::llround(v_max / dv));
    v_max = half * dv;
    n = 2 * half + 1;
  }
};

}  // namespace kacgc
