#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "kacgc/model.hpp"

namespace kacgc {

/// Normalized Hermite polynomial L_n(v) = H_n(sqrt(2 pi) v)/sqrt(n!)
/// (probabilists' H_n), orthonormal for the weight gamma(v) dv. Evaluated by
/// the normalized three-term recurrence.
double hermite_L(int n, double v);

/// tau_n = binom(2n,n)/4^n = (1/2pi) int cos^{2n}.
double tau(int n);

/// sigma_{n,k} = tau_n binom(n,k)/sqrt(binom(2n,2k)), 1 <= k <= n-1.
/// Throws if k is out of range.
double sigma(int n, int k);

/// sigma via the square-root form sqrt(tau_n tau_k tau_{n-k}); agrees with
/// sigma() to ~1e-15 (dual-formula check).
double sigma_sqrt_form(int n, int k);

/// A_{2n} = (1-2 tau_n)^2 + 2 sum_{k=1}^{n/2} sigma_{n,k}^2 (bounded by 2).
double a2n(int n);

/// Multi-index over Hermite modes labelling the eigenvectors built by the
/// creation ladder; alpha[mode] = multiplicity.
struct ExcitationIndex {
  std::map<int, int> alpha;

  int excitation() const;         ///< lambda(alpha) = sum of multiplicities
  int excited_particles() const;  ///< lambda_0(alpha) = sum over modes >= 1
  int degree() const;             ///< d(alpha) = sum mode * multiplicity
};

/// Dense symmetric operator on an ordered excitation basis.
struct TruncatedOperator {
  Eigen::MatrixXd matrix;
  std::vector<ExcitationIndex> labels;
  double gram_deviation = 0.0;      ///< max |<e_a,e_b> - delta| on the truncation
  double symmetry_deviation = 0.0;  ///< max |M - M^T| before symmetrization
};

/// Thermostat generator on an excitation basis: diagonal with entries
/// -rho * lambda(alpha).
TruncatedOperator build_thermostat_matrix(const std::vector<ExcitationIndex>& labels,
                                          const ModelParams& params);

/// Quadrature sizes for the pair-rotation matrix elements. Degree-8 exactness
/// is the contract: 2*gh_nodes-1 >= 8 per variable and enough angular nodes
/// for trigonometric degree 8.
struct RotationQuadrature {
  int gh_nodes = 24;
  int n_theta = 64;
};

/// <L_c x L_d, R_12 [L_a x L_b]> under gamma x gamma, by Gauss-Hermite x
/// angular trapezoid quadrature.
double rotation_matrix_element(int a, int b, int c, int d, const RotationQuadrature& quad = {});

/// Full generator (thermostat + scaled collision) on the even fourth-degree
/// block spanned by (R0+)^k R4+ e0 and (R0+)^k (R2+)^2 e0, truncated at total
/// excitation k_max. Collision elements come from the quadrature-measured
/// two-mode rotation coefficients plus Poisson-weighted sector sums.
TruncatedOperator build_collision_block_V4e(int k_max, const ModelParams& params,
                                            const RotationQuadrature& quad = {});

/// lambda_tilde (R_m+ e0, K R_m+ e0): -lambda for odd m, -lambda(1-2 tau_{m/2})
/// for even m. Used as the single-mode diagonal check.
double collision_diag_single_mode(int m, const ModelParams& params,
                                  const RotationQuadrature& quad = {});

struct SpectralGaps {
  double delta = 0.0;     ///< -rho (exact)
  double delta2 = 0.0;    ///< top of the V4e block below the -rho level
  double drift = 0.0;     ///< |delta2(k_max) - delta2(k_max-5)|
  double lower = 0.0;     ///< -rho - lambda/4
  double upper = 0.0;     ///< -rho - lambda/4 + 2 lambda sqrt(rho/mu)
  bool condition_ok = false;  ///< rho > lambda/4 + 2 lambda sqrt(rho/mu), mu/rho > 256
};

SpectralGaps spectral_gaps(const ModelParams& params, int k_max = 40);

/// Gershgorin-style lower bounds for the block infima: first = odd bound for
/// delta_{2n+1}, second = even bound for delta_{2n}.
std::pair<double, double> gershgorin_lower_bounds(int n, const ModelParams& params);

}  // namespace kacgc
