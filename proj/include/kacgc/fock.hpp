#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "kacgc/model.hpp"
#include "kacgc/spectral.hpp"

namespace kacgc {

/// Finite truncation of the grand-canonical Hilbert space: symmetrized
/// Hermite products over a fixed mode set on all sectors N <= max_n, with the
/// Poisson-weighted inner product folded into the basis normalization.
struct SectorSpace {
  std::vector<int> modes;  // sorted distinct Hermite modes
  int max_n = 8;
  ModelParams params;
  std::vector<std::vector<int>> states;  // occupation per mode position

  static SectorSpace build(const std::vector<int>& modes, int max_n, const ModelParams& params);

  int dim() const { return static_cast<int>(states.size()); }
  int n_modes() const { return static_cast<int>(modes.size()); }
  int sector(int idx) const;
  int index_of(const std::vector<int>& occ) const;  // -1 if absent
  int position_of_mode(int mode) const;             // -1 if absent

  /// e0 (all-ones state) truncated to the retained sectors, expressed in the
  /// orthonormal basis: coefficient sqrt(a_N) on the pure mode-0 state.
  Eigen::VectorXd ground_vector() const;

 private:
  std::map<std::vector<int>, int> index_;
};

using SpMat = Eigen::SparseMatrix<double>;

/// Creation operator P+(g) from its defining sector action, with g expanded
/// over the retained Hermite modes (g_coeff[i] = (g, L_{modes[i]})).
SpMat build_p_plus(const SectorSpace& space, const Eigen::VectorXd& g_coeff);

/// Annihilation operator P-(g), built independently from its own definition
/// (not as an adjoint), so the relation rho P+(g)* = mu P-(g) is checkable.
SpMat build_p_minus(const SectorSpace& space, const Eigen::VectorXd& g_coeff);

SpMat build_number_operator(const SectorSpace& space);

/// R+(g) = sqrt(rho/mu) P+(g) - sqrt(mu/rho) (g,1) Id, and its adjoint
/// partner R-(g) = sqrt(mu/rho) P-(g) - sqrt(mu/rho) (g,1) Id.
SpMat build_r_plus(const SectorSpace& space, const Eigen::VectorXd& g_coeff);
SpMat build_r_minus(const SectorSpace& space, const Eigen::VectorXd& g_coeff);

/// Kac collision generator K = sum_{i<j} (R_ij - Id), assembled as a two-body
/// operator from the quadrature-measured pair matrix elements and projected
/// onto the retained mode set.
SpMat build_collision_operator(const SectorSpace& space, const RotationQuadrature& quad = {});

/// Full generator rho(P+ - N) + mu(P- - Id) + lambda_tilde K on the truncation.
SpMat build_generator_sparse(const SectorSpace& space, const RotationQuadrature& quad = {});

Eigen::MatrixXd build_full_generator(const SectorSpace& space, const RotationQuadrature& quad = {});

/// Max deviations of the ladder identities on the interior of the truncation
/// (columns with N <= max_n - 2, where products do not cross the boundary).
struct CommutatorReport {
  double pp_pm = 0.0;      ///< {P+(g1),P-(g2)} + (g1,g2) Id
  double pp_pp = 0.0;      ///< {P+(g1),P+(g2)}
  double pm_pm = 0.0;      ///< {P-(g1),P-(g2)}
  double n_pp = 0.0;       ///< {N,P+(g)} - P+(g)
  double n_pm = 0.0;       ///< {N,P-(g)} + P-(g)
  double adjoint = 0.0;    ///< rho P+(g)^T - mu P-(g)
  double r_vacuum = 0.0;   ///< R-(g) e0 on interior sectors
  bool pass(double tol) const;
};

CommutatorReport verify_commutators(const std::vector<int>& modes, const ModelParams& params,
                                    int n_cut);

}  // namespace kacgc
