#include "kacgc/fock.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace kacgc {

SectorSpace SectorSpace::build(const std::vector<int>& modes, int max_n,
                               const ModelParams& params) {
  params.validate();
  if (modes.empty() || max_n < 0) throw std::invalid_argument("SectorSpace: bad truncation");
  if (!std::is_sorted(modes.begin(), modes.end()) ||
      std::adjacent_find(modes.begin(), modes.end()) != modes.end() || modes.front() != 0)
    throw std::invalid_argument("SectorSpace: modes must be sorted, distinct, and contain 0");

  SectorSpace sp;
  sp.modes = modes;
  sp.max_n = max_n;
  sp.params = params;

  const int m = sp.n_modes();
  std::vector<int> occ(m, 0);
  // Enumerate occupation vectors sector by sector so indices group by N.
  for (int n = 0; n <= max_n; ++n) {
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == m - 1) {
        occ[pos] = left;
        sp.index_.emplace(occ, static_cast<int>(sp.states.size()));
        sp.states.push_back(occ);
        return;
      }
      for (int k = left; k >= 0; --k) {
        occ[pos] = k;
        rec(pos + 1, left - k);
      }
      occ[pos] = 0;
    };
    rec(0, n);
  }
  return sp;
}

int SectorSpace::sector(int idx) const {
  int acc = 0;
  for (int k : states[idx]) acc += k;
  return acc;
}

int SectorSpace::index_of(const std::vector<int>& occ) const {
  auto it = index_.find(occ);
  return it == index_.end() ? -1 : it->second;
}

int SectorSpace::position_of_mode(int mode) const {
  auto it = std::find(modes.begin(), modes.end(), mode);
  return it == modes.end() ? -1 : static_cast<int>(it - modes.begin());
}

Eigen::VectorXd SectorSpace::ground_vector() const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim());
  std::vector<int> occ(n_modes(), 0);
  for (int n = 0; n <= max_n; ++n) {
    occ[0] = n;
    v[index_of(occ)] = std::sqrt(gc_number_weight(n, params));
  }
  return v;
}

SpMat build_p_plus(const SectorSpace& space, const Eigen::VectorXd& g_coeff) {
  if (g_coeff.size() != space.n_modes())
    throw std::invalid_argument("build_p_plus: g expansion size mismatch");
  const double scale = std::sqrt(space.params.mu / space.params.rho);
  std::vector<Eigen::Triplet<double>> trips;
  for (int idx = 0; idx < space.dim(); ++idx) {
    const auto& occ = space.states[idx];
    if (space.sector(idx) + 1 > space.max_n) continue;
    for (int m = 0; m < space.n_modes(); ++m) {
      if (g_coeff[m] == 0.0) continue;
      auto target = occ;
      ++target[m];
      trips.emplace_back(space.index_of(target), idx,
                         scale * g_coeff[m] * std::sqrt(occ[m] + 1.0));
    }
  }
  SpMat mat(space.dim(), space.dim());
  mat.setFromTriplets(trips.begin(), trips.end());
  return mat;
}

SpMat build_p_minus(const SectorSpace& space, const Eigen::VectorXd& g_coeff) {
  if (g_coeff.size() != space.n_modes())
    throw std::invalid_argument("build_p_minus: g expansion size mismatch");
  const double scale = std::sqrt(space.params.rho / space.params.mu);
  std::vector<Eigen::Triplet<double>> trips;
  for (int idx = 0; idx < space.dim(); ++idx) {
    const auto& occ = space.states[idx];
    for (int m = 0; m < space.n_modes(); ++m) {
      if (occ[m] == 0 || g_coeff[m] == 0.0) continue;
      auto target = occ;
      --target[m];
      trips.emplace_back(space.index_of(target), idx,
                         scale * g_coeff[m] * std::sqrt(static_cast<double>(occ[m])));
    }
  }
  SpMat mat(space.dim(), space.dim());
  mat.setFromTriplets(trips.begin(), trips.end());
  return mat;
}

SpMat build_number_operator(const SectorSpace& space) {
  std::vector<Eigen::Triplet<double>> trips;
  for (int idx = 0; idx < space.dim(); ++idx)
    trips.emplace_back(idx, idx, static_cast<double>(space.sector(idx)));
  SpMat mat(space.dim(), space.dim());
  mat.setFromTriplets(trips.begin(), trips.end());
  return mat;
}

namespace {

SpMat sparse_identity(int n) {
  SpMat id(n, n);
  id.setIdentity();
  return id;
}

}  // namespace

SpMat build_r_plus(const SectorSpace& space, const Eigen::VectorXd& g_coeff) {
  const double r = std::sqrt(space.params.rho / space.params.mu);
  return SpMat(r * build_p_plus(space, g_coeff) -
               (g_coeff[0] / r) * sparse_identity(space.dim()));
}

SpMat build_r_minus(const SectorSpace& space, const Eigen::VectorXd& g_coeff) {
  const double r = std::sqrt(space.params.rho / space.params.mu);
  return SpMat((1.0 / r) * build_p_minus(space, g_coeff) -
               (g_coeff[0] / r) * sparse_identity(space.dim()));
}

SpMat build_collision_operator(const SectorSpace& space, const RotationQuadrature& quad) {
  const int nm = space.n_modes();
  // Pair matrix elements <L_c L_d, (R_12 - Id) L_a L_b>; the rotation
  // preserves total polynomial degree, so only (a+b == c+d) entries survive.
  std::vector<double> v(nm * nm * nm * nm, 0.0);
  auto vat = [&](int a, int b, int c, int d) -> double& {
    return v[((a * nm + b) * nm + c) * nm + d];
  };
  for (int a = 0; a < nm; ++a)
    for (int b = 0; b < nm; ++b)
      for (int c = 0; c < nm; ++c)
        for (int d = 0; d < nm; ++d) {
          if (space.modes[a] + space.modes[b] != space.modes[c] + space.modes[d]) continue;
          double e = rotation_matrix_element(space.modes[a], space.modes[b], space.modes[c],
                                             space.modes[d], quad);
          if (a == c && b == d) e -= 1.0;
          vat(a, b, c, d) = e;
        }

  std::vector<Eigen::Triplet<double>> trips;
  for (int idx = 0; idx < space.dim(); ++idx) {
    const auto& occ = space.states[idx];
    for (int a = 0; a < nm; ++a) {
      if (occ[a] == 0) continue;
      for (int b = 0; b < nm; ++b) {
        const int nb = occ[b] - (a == b ? 1 : 0);
        if (nb < 1) continue;
        const double amp_rm = std::sqrt(static_cast<double>(occ[a]) * nb);
        auto mid = occ;
        --mid[a];
        --mid[b];
        for (int c = 0; c < nm; ++c) {
          for (int d = 0; d < nm; ++d) {
            const double vel = vat(a, b, c, d);
            if (vel == 0.0) continue;
            const double amp_add = std::sqrt((mid[d] + 1.0) * (mid[c] + (c == d ? 2.0 : 1.0)));
            auto target = mid;
            ++target[d];
            ++target[c];
            trips.emplace_back(space.index_of(target), idx, 0.5 * vel * amp_rm * amp_add);
          }
        }
      }
    }
  }
  SpMat mat(space.dim(), space.dim());
  mat.setFromTriplets(trips.begin(), trips.end());
  return mat;
}

SpMat build_generator_sparse(const SectorSpace& space, const RotationQuadrature& quad) {
  Eigen::VectorXd one = Eigen::VectorXd::Zero(space.n_modes());
  one[0] = 1.0;  // L_0 = 1
  const SpMat pp = build_p_plus(space, one);
  const SpMat pm = build_p_minus(space, one);
  const SpMat num = build_number_operator(space);
  const SpMat id = sparse_identity(space.dim());
  SpMat gen = space.params.rho * (pp - num) + space.params.mu * (pm - id);
  if (space.params.lambda > 0.0)
    gen = gen + SpMat(space.params.lambda_tilde() * build_collision_operator(space, quad));
  return gen;
}

Eigen::MatrixXd build_full_generator(const SectorSpace& space, const RotationQuadrature& quad) {
  return Eigen::MatrixXd(build_generator_sparse(space, quad));
}

bool CommutatorReport::pass(double tol) const {
  return pp_pm < tol && pp_pp < tol && pm_pm < tol && n_pp < tol && n_pm < tol &&
         adjoint < tol && r_vacuum < tol;
}

CommutatorReport verify_commutators(const std::vector<int>& modes, const ModelParams& params,
                                    int n_cut) {
  std::vector<int> sorted = modes;
  std::sort(sorted.begin(), sorted.end());
  const auto space = SectorSpace::build(sorted, n_cut, params);
  const int dim = space.dim();

  // Interior columns: products of two ladder steps stay inside the truncation.
  Eigen::VectorXd interior = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < dim; ++i) interior[i] = space.sector(i) <= n_cut - 2 ? 1.0 : 0.0;
  auto interior_max = [&](const Eigen::MatrixXd& m) {
    return (m * interior.asDiagonal()).cwiseAbs().maxCoeff();
  };

  auto coeff = [&](int pos) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(space.n_modes());
    g[pos] = 1.0;
    return g;
  };

  const auto n_g = space.n_modes();
  std::vector<Eigen::MatrixXd> pp(n_g), pm(n_g);
  for (int i = 0; i < n_g; ++i) {
    pp[i] = Eigen::MatrixXd(build_p_plus(space, coeff(i)));
    pm[i] = Eigen::MatrixXd(build_p_minus(space, coeff(i)));
  }
  const Eigen::MatrixXd num = Eigen::MatrixXd(build_number_operator(space));
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);

  CommutatorReport rep;
  for (int i = 0; i < n_g; ++i) {
    for (int j = 0; j < n_g; ++j) {
      const double overlap = i == j ? 1.0 : 0.0;  // (L_i, L_j) orthonormal
      rep.pp_pm =
          std::max(rep.pp_pm, interior_max(pp[i] * pm[j] - pm[j] * pp[i] + overlap * id));
      rep.pp_pp = std::max(rep.pp_pp, interior_max(pp[i] * pp[j] - pp[j] * pp[i]));
      rep.pm_pm = std::max(rep.pm_pm, interior_max(pm[i] * pm[j] - pm[j] * pm[i]));
    }
    rep.n_pp = std::max(rep.n_pp, interior_max(num * pp[i] - pp[i] * num - pp[i]));
    rep.n_pm = std::max(rep.n_pm, interior_max(num * pm[i] - pm[i] * num + pm[i]));
    rep.adjoint = std::max(
        rep.adjoint, interior_max(params.rho * pp[i].transpose() - params.mu * pm[i]));
  }

  const Eigen::VectorXd e0 = space.ground_vector();
  for (int i = 0; i < n_g; ++i) {
    const Eigen::VectorXd rv = Eigen::MatrixXd(build_r_minus(space, coeff(i))) * e0;
    for (int idx = 0; idx < dim; ++idx)
      if (space.sector(idx) <= n_cut - 1) rep.r_vacuum = std::max(rep.r_vacuum, std::abs(rv[idx]));
  }
  return rep;
}

}  // namespace kacgc
