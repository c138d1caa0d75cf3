#pragma once

#include <vector>

#include <Eigen/Dense>

#include "kacgc/grid.hpp"
#include "kacgc/model.hpp"

namespace kacgc {

/// Truncated law of the particle number, p[0..n_max]. tail_deficit tracks
/// probability lost over the truncation boundary during evolution.
struct NumberDistribution {
  Eigen::VectorXd p;
  double tail_deficit = 0.0;

  int n_max() const { return static_cast<int>(p.size()) - 1; }
  double mass() const { return p.sum(); }

  static NumberDistribution delta(int n, int n_max);
  static NumberDistribution poisson(const ModelParams& params, int n_max);
};

/// Default truncation: mu/rho + 10 sqrt(mu/rho) + 20, where the Poisson tail
/// is far below 1e-12.
int default_number_truncation(const ModelParams& params);

/// Right-hand side of the birth-death chain:
///   dp_0 = -mu p_0 + rho p_1
///   dp_N = -(N rho + mu) p_N + mu p_{N-1} + rho (N+1) p_{N+1}
/// with the inflow from above the truncation dropped, so the total derivative
/// sums to -mu p_{n_max} (the boundary flux).
Eigen::VectorXd birth_death_rhs(const Eigen::VectorXd& p, const ModelParams& params);

/// Classical fixed-step RK4 on the truncated chain. dt <= 0 picks the default
/// 0.1/(mu + rho n_max). Throws if the tail deficit exceeds tail_tol.
NumberDistribution evolve_number_dist(const NumberDistribution& p0, const ModelParams& params,
                                      double t, double dt = 0.0, double tail_tol = 1e-9);

struct MomentTriple {
  double n;                ///< <N>(t)
  double energy;           ///< E(t) = sum <v_i^2>
  double energy_per_particle;  ///< e(t) = E/N
};

/// Closed forms: N(t) = e^{-rho t} N0 + (1-e^{-rho t}) mu/rho, same shape for
/// E(t) with limit mu/(2 pi rho); e(t) = E/N obeys the cooling law
/// de/dt = (mu/N)(1/(2 pi) - e). Throws if e is undefined (N(t) == 0).
MomentTriple closed_form_moments(double n0, double e0, const ModelParams& params, double t);

/// r-th falling factorial moment sum N!/(N-r)! p_N of a number law.
double factorial_moment(const NumberDistribution& dist, int r);

/// Evolve the factorial-moment cascade N_r(t) = e^{-rho r t} N_r(0)
/// + r mu int_0^t e^{-rho r (t-s)} N_{r-1}(s) ds exactly: each N_r(t) is a
/// finite sum of exponentials e^{-j rho t}, j = 0..r, and the integrals are
/// done in closed form. initial[r] = N_r(0); initial[0] must be 1.
std::vector<double> factorial_moment_flow(const std::vector<double>& initial,
                                          const ModelParams& params, double t);

/// Poissonized product state: N ~ Poisson(eta), velocities i.i.d. with
/// gridded density g.
struct ProductState {
  double eta = 1.0;
  VelocityGrid grid;
  Eigen::VectorXd g;  // density values on grid points

  double g_mass() const { return grid.dv * g.sum(); }
};

ProductState maxwellian_product_state(double eta, const VelocityGrid& grid);

/// Thermostat flow of a product state: eta(t) relaxes to mu/rho and
/// l(v,t) = (rho/mu) eta(t) g(v,t) relaxes to gamma; the product structure is
/// preserved exactly.
ProductState product_state_flow(const ProductState& ps0, const ModelParams& params, double t);

}  // namespace kacgc
