#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "kacgc/jump.hpp"
#include "kacgc/model.hpp"
#include "kacgc/number_chain.hpp"

namespace kacgc {

/// Finite velocity partition: K cells (two tails plus K-2 bounded intervals),
/// each carrying its Gaussian mass omega_k.
struct CellPartition {
  std::vector<double> edges;  // K-1 increasing interior edges
  Eigen::VectorXd gaussian_mass;

  int cells() const { return static_cast<int>(gaussian_mass.size()); }
  int cell_of(double v) const;

  /// K cells of equal Gaussian mass 1/K.
  static CellPartition equal_mass(int k);
  static CellPartition from_edges(std::vector<double> edges);
};

/// Occupation vector of a velocity configuration under a partition.
using OccupationVector = std::vector<std::uint16_t>;

OccupationVector occupation_of(std::span<const double> velocities, const CellPartition& partition);

struct OccupationVectorHash {
  std::size_t operator()(const OccupationVector& v) const;
};

/// Sparse nonnegative function on occupation vectors.
using OccupationFunction = std::unordered_map<OccupationVector, double, OccupationVectorHash>;

/// Relative entropy of a product state w.r.t. the grand-canonical reference:
/// mu/rho - eta + eta log(eta rho/mu) + eta * int g log(g/gamma). Returns
/// +infinity if g vanishes on cells where gamma is positive while eta > 0.
double product_state_entropy(const ProductState& ps, const ModelParams& params);

/// Entropy of the coarse-grained product state: sum over cells of
/// KL(Poisson(eta g_k) || Poisson(mu omega_k / rho)), exact for product states.
double product_state_entropy_coarse(const ProductState& ps, const ModelParams& params,
                                    const CellPartition& partition);

/// Plug-in coarse-grained relative entropy from replica occupation vectors:
/// sum_n Phat(n) log( Phat(n) / prod_k pi_{alpha_k}(n_k) ), alpha_k =
/// mu omega_k / rho. Zero-count vectors contribute zero.
double coarse_grained_entropy(std::span<const OccupationVector> samples,
                              const CellPartition& partition, const ModelParams& params);

/// Dirichlet-form sum Psi~ = sum_q alpha_q sum_n (F(n^q)-F(n))(log F(n^q) -
/// log F(n)) prod_k pi_{alpha_k}(n_k) over the box {0..n_max}^K on which F is
/// defined (F must be > 0 there). Terms whose raised vector leaves the box are
/// dropped; the neglected Poisson mass is below the tail tolerance by the
/// n_max contract. Returns +infinity if F <= 0 where a log is needed.
double dirichlet_psi(const OccupationFunction& f, const Eigen::VectorXd& alphas, int n_max);

struct IneqCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double slack() const { return rhs - lhs; }
};

/// Entropy inequality for the Poisson measure pi_alpha:
/// sum f log f pi <= (sum f pi) log(sum f pi) + alpha sum (f(n+1)-f(n))(log
/// f(n+1)-log f(n)) pi(n). f is given on {0..n_max}; the pi tail above n_max
/// must be below 1e-14 (throws otherwise).
IneqCheck check_poisson_lsi(std::span<const double> f, double alpha);

/// Two-point inequality with weights (mu0, 1-mu0).
IneqCheck check_two_point(double f0, double f1, double mu0);

/// Binomial(N, alpha/N) version; reduces to check_two_point at N = 1.
IneqCheck check_binomial_lsi(std::span<const double> f, double alpha, int n);

struct EntropyCheckpointReport {
  double t = 0.0;
  double bound = 0.0;        ///< e^{-rho t} S(0)
  double s_analytic = 0.0;   ///< entropy of the thermostat-flow product state
  double s_estimate = 0.0;   ///< plug-in coarse-grained estimate (MC channel)
  double s_se = 0.0;         ///< bootstrap SD of s_estimate
  double psi = 0.0;          ///< restricted empirical Dirichlet sum
  double lemma_ent_slack = 0.0;  ///< E log E + (mu/rho) psi - S (restricted)
};

struct EntropyDecayReport {
  double s0 = 0.0;
  std::vector<EntropyCheckpointReport> checkpoints;
  bool analytic_bound_holds = true;
  bool mc_bound_holds = true;  ///< within 3x bootstrap SD
};

/// Runs both decay channels from a Maxwellian-velocity product start with the
/// given mean eta: the exact thermostat-flow entropy, and the coarse-grained
/// Monte Carlo estimate along the jump process (any lambda; the bound is
/// lambda-independent).
EntropyDecayReport entropy_decay_experiment(double eta, const ModelParams& params,
                                            const std::vector<double>& checkpoints, int replicas,
                                            std::uint64_t seed, int cells = 8,
                                            int bootstrap_resamples = 200, int threads = 1);

}  // namespace kacgc
