#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kacgc/grid.hpp"
#include "kacgc/model.hpp"

namespace kacgc {

/// Gridded relative particle density F(v). The mass dv*sum(F) is a dynamical
/// quantity relaxing to 1; it is never renormalized.
struct DensityField {
  VelocityGrid grid;
  Eigen::VectorXd values;

  double mass() const { return grid.dv * values.sum(); }
  double second_moment() const;
};

DensityField maxwellian_field(const VelocityGrid& grid);

struct BkOptions {
  int n_theta = 64;
  double dt = 1e-3;
  int threads = 1;
  double negativity_tol = 1e-8;  ///< instability signal threshold per step
};

/// Collision gain integral int dw (1/2pi) int dtheta F(v cos + w sin) F(-v sin
/// + w cos), by angular trapezoid and grid summation with 4-point (cubic)
/// interpolation of the rotated arguments; off-grid values are 0 (the
/// boundary-tolerance contract).
Eigen::VectorXd bk_collision_gain(const DensityField& f, int n_theta, int threads = 1);

/// Full right-hand side -rho(F - gamma) + lambda (gain - m0 F).
Eigen::VectorXd bk_rhs(const DensityField& f, const ModelParams& params,
                       const BkOptions& options = {});

struct BkTrajectory {
  std::vector<double> times;
  std::vector<DensityField> fields;
  double max_clipped = 0.0;  ///< largest negative excursion removed by clipping
};

/// RK4 in time; fields reported at the requested checkpoints. Throws if a step
/// produces negativity beyond the tolerance.
BkTrajectory bk_solve(const DensityField& f0, const ModelParams& params,
                      const std::vector<double>& checkpoints, const BkOptions& options = {});

/// Scaled one-particle marginal (rho/mu_n) <sum_i delta_{v_i}> as a cell
/// histogram on the grid.
DensityField empirical_marginal1(std::span<const std::vector<double>> samples, double mu_n,
                                 double rho, const VelocityGrid& grid);

/// Scaled two-particle marginal over ordered distinct pairs, on a (coarser)
/// grid; entry (i,j) is a density w.r.t. dv^2.
Eigen::MatrixXd empirical_marginal2(std::span<const std::vector<double>> samples, double mu_n,
                                    double rho, const VelocityGrid& grid);

/// Average a fine-grid field over the cells of a coarser grid whose spacing
/// is an odd multiple of the fine spacing, so the fine cells tile the coarse
/// cells exactly.
Eigen::VectorXd coarse_cell_average(const DensityField& fine, const VelocityGrid& coarse);

/// Defects are evaluated per replica batch and reported as the batch mean
/// with its standard error, so "beyond k x SE" comparisons across mu are
/// exact statements about i.i.d. batch statistics.
struct ChaosRow {
  double mu = 0.0;
  double l1_pde = 0.0;        ///< L1(F_hat^(1), F_PDE), cell-averaged comparison
  double l1_pde_se = 0.0;
  double factor_defect = 0.0; ///< L1(F_hat^(2), F_hat^(1) x F_hat^(1)), pair grid
  double factor_defect_se = 0.0;
};

struct ChaosReport {
  double t = 0.0;
  double eta_scale = 0.0;
  int replicas = 0;
  std::vector<ChaosRow> rows;
};

/// Propagation-of-chaos scan: for each mu_n, draw a product state with mean
/// eta_scale*mu_n/rho and velocity density g0, run R replicas of the jump
/// process to time t with lambda_tilde = lambda rho/mu_n, and compare the
/// scaled marginals against the hydrodynamic solution started from
/// eta_scale*g0 (one PDE solve serves every mu_n). The one-particle defect is
/// measured on comparison_grid (odd spacing multiple of fine_grid) against
/// the cell-averaged PDE field.
ChaosReport chaos_experiment(const std::function<double(RngStream&)>& g0_sampler,
                             const Eigen::VectorXd& g0_grid_values, double eta_scale,
                             std::span<const double> mu_list, int replicas,
                             const ModelParams& base_params, double t, std::uint64_t seed,
                             const VelocityGrid& fine_grid, const VelocityGrid& comparison_grid,
                             const VelocityGrid& pair_grid, const BkOptions& options = {},
                             int batches = 8);

}  // namespace kacgc
