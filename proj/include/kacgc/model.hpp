#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "kacgc/rng.hpp"

namespace kacgc {

/// Rates of the open Kac system. The reservoir temperature is fixed at
/// beta = 2*pi throughout, so the reference one-particle density is
/// gamma(v) = exp(-pi v^2) with variance 1/(2*pi).
struct ModelParams {
  double mu = 1.0;      ///< in-rate (1/time)
  double rho = 1.0;     ///< per-particle out-rate (1/time)
  double lambda = 0.0;  ///< per-pair collision intensity (1/time)

  /// Per-pair rate lambda_tilde = lambda*rho/mu; exactly 0 when lambda=0,
  /// so pure-death setups (mu=0, lambda=0) stay valid.
  double lambda_tilde() const { return lambda == 0.0 ? 0.0 : lambda * rho / mu; }

  /// Steady-state mean particle number mu/rho.
  double mean_n() const { return mu / rho; }

  void validate() const {
    if (!(rho > 0.0)) throw std::invalid_argument("ModelParams: rho must be > 0");
    if (!(mu >= 0.0)) throw std::invalid_argument("ModelParams: mu must be >= 0");
    if (!(lambda >= 0.0)) throw std::invalid_argument("ModelParams: lambda must be >= 0");
    if (lambda > 0.0 && !(mu > 0.0))
      throw std::invalid_argument("ModelParams: lambda > 0 requires mu > 0");
  }
};

/// Velocity configuration of the open system at a given time.
struct ParticleState {
  std::vector<double> velocities;
  double time = 0.0;

  int n() const { return static_cast<int>(velocities.size()); }
};

/// gamma(v) = exp(-pi v^2), the unit-mass Maxwellian at beta = 2*pi.
double maxwellian_pdf(double v);

/// CDF of gamma, used by Kolmogorov-Smirnov checks.
double maxwellian_cdf(double v);

/// Draw from gamma (mean 0, variance 1/(2*pi)).
double sample_maxwellian(RngStream& rng);

/// Rotate the pair (v,w) by theta in its plane; kinetic energy v^2+w^2 is
/// preserved up to rounding.
std::pair<double, double> kac_collide(double v, double w, double theta);

/// Poisson(mu/rho) weight a_N, evaluated in log space; satisfies the
/// detailed-balance recursion rho*N*a_N = mu*a_{N-1}.
double gc_number_weight(long n, const ModelParams& params);

double log_gc_number_weight(long n, const ModelParams& params);

/// Shared grand-canonical reference: Poisson number weights plus Maxwellian
/// velocity density.
struct GrandCanonicalRef {
  ModelParams params;

  explicit GrandCanonicalRef(ModelParams p) : params(p) { params.validate(); }

  double number_weight(long n) const { return gc_number_weight(n, params); }
  double velocity_density(double v) const { return maxwellian_pdf(v); }
};

}  // namespace kacgc
