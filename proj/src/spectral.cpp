#include "kacgc/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "kacgc/quadrature.hpp"

namespace kacgc {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

double hermite_L(int n, double v) {
  if (n < 0) throw std::invalid_argument("hermite_L: n must be >= 0");
  const double x = std::sqrt(kTwoPi) * v;
  double lm1 = 0.0, l = 1.0;  // L_0 = 1
  for (int k = 0; k < n; ++k) {
    const double next = (x * l - std::sqrt(static_cast<double>(k)) * lm1) /
                        std::sqrt(static_cast<double>(k + 1));
    lm1 = l;
    l = next;
  }
  return l;
}

double tau(int n) {
  if (n < 0) throw std::invalid_argument("tau: n must be >= 0");
  // binom(2n,n)/4^n = prod_{i=1..n} (1 - 1/(2i)); decreasing, tau_0 = 1.
  double t = 1.0;
  for (int i = 1; i <= n; ++i) t *= 1.0 - 0.5 / i;
  return t;
}

double sigma(int n, int k) {
  if (k < 1 || k > n - 1) throw std::invalid_argument("sigma: need 1 <= k <= n-1");
  // tau_n * binom(n,k) / sqrt(binom(2n,2k)) via log-gamma.
  const double log_binom_nk = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  const double log_binom_2n2k =
      std::lgamma(2.0 * n + 1.0) - std::lgamma(2.0 * k + 1.0) - std::lgamma(2.0 * (n - k) + 1.0);
  return tau(n) * std::exp(log_binom_nk - 0.5 * log_binom_2n2k);
}

double sigma_sqrt_form(int n, int k) {
  if (k < 1 || k > n - 1) throw std::invalid_argument("sigma_sqrt_form: need 1 <= k <= n-1");
  return std::sqrt(tau(n) * tau(k) * tau(n - k));
}

double a2n(int n) {
  const double d = 1.0 - 2.0 * tau(n);
  double s = 0.0;
  for (int k = 1; 2 * k <= n; ++k) {
    const double sk = sigma(n, k);
    s += sk * sk;
  }
  return d * d + 2.0 * s;
}

int ExcitationIndex::excitation() const {
  int acc = 0;
  for (auto& [mode, mult] : alpha) acc += mult;
  return acc;
}

int ExcitationIndex::excited_particles() const {
  int acc = 0;
  for (auto& [mode, mult] : alpha)
    if (mode >= 1) acc += mult;
  return acc;
}

int ExcitationIndex::degree() const {
  int acc = 0;
  for (auto& [mode, mult] : alpha) acc += mode * mult;
  return acc;
}

TruncatedOperator build_thermostat_matrix(const std::vector<ExcitationIndex>& labels,
                                          const ModelParams& params) {
  params.validate();
  TruncatedOperator op;
  op.labels = labels;
  const auto n = static_cast<Eigen::Index>(labels.size());
  op.matrix = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    op.matrix(i, i) = -params.rho * labels[i].excitation();
  return op;
}

namespace {

void check_quadrature(const RotationQuadrature& quad) {
  if (2 * quad.gh_nodes - 1 < 8 || quad.n_theta < 10)
    throw std::invalid_argument(
        "RotationQuadrature: degree-8 exactness requires >= 5 Hermite nodes and >= 10 angles");
}

}  // namespace

double rotation_matrix_element(int a, int b, int c, int d, const RotationQuadrature& quad) {
  check_quadrature(quad);
  static thread_local int cached_n = -1;
  static thread_local GaussHermite gh;
  if (cached_n != quad.gh_nodes) {
    gh = GaussHermite::rule(quad.gh_nodes);
    cached_n = quad.gh_nodes;
  }
  double acc = 0.0;
  for (int i = 0; i < quad.gh_nodes; ++i) {
    const double vi = gh.nodes[i];
    for (int j = 0; j < quad.gh_nodes; ++j) {
      const double vj = gh.nodes[j];
      double rot = 0.0;
      for (int t = 0; t < quad.n_theta; ++t) {
        const double th = kTwoPi * t / quad.n_theta;
        const double x = vi * std::cos(th) - vj * std::sin(th);
        const double y = vi * std::sin(th) + vj * std::cos(th);
        rot += hermite_L(a, x) * hermite_L(b, y);
      }
      rot /= quad.n_theta;
      acc += gh.weights[i] * gh.weights[j] * hermite_L(c, vi) * hermite_L(d, vj) * rot;
    }
  }
  return acc;
}

namespace detail {

/// Sector-coefficient tables for the even fourth-degree block. Each u_k has
/// component s_k(N) * sum_i L_4(v_i) on sector N, each w_k has component
/// t_k(N) * sum_{i != j} L_2(v_i) L_2(v_j); the raising operator acts on the
/// coefficient tables exactly (see the recursions below), and all inner
/// products reduce to Poisson-weighted sums over N.
struct V4eTables {
  std::vector<Eigen::VectorXd> s;  // u_k tables, k = 0..k_max-1
  std::vector<Eigen::VectorXd> t;  // w_k tables, k = 0..k_max-2
  Eigen::VectorXd a;               // Poisson weights a_N, N = 0..N_cut
  double gram_deviation = 0.0;
};

V4eTables build_v4e_tables(int k_max, const ModelParams& params) {
  const double m = params.mean_n();
  const int n_cut =
      static_cast<int>(std::ceil(m + 2.0 * k_max + 12.0 * std::sqrt(m) + 50.0));

  V4eTables tb;
  tb.a.resize(n_cut + 1);
  for (int n = 0; n <= n_cut; ++n) tb.a[n] = gc_number_weight(n, params);

  // Repeated raising by R_0^+ acts on the sector tables as the Charlier
  // ladder: with c~_k the orthonormal Charlier polynomials for Poisson(m),
  //   s_k(N) = c~_k(N-1) / sqrt(m)          (one excited particle)
  //   t_k(N) = c~_k(N-2) / (m sqrt(2))      (two excited particles)
  // where the argument shift counts the slots taken by the excited modes.
  // c~ is evaluated by its stable three-term recurrence
  //   sqrt(m(k+1)) c~_{k+1}(x) = (x - k - m) c~_k(x) - sqrt(m k) c~_{k-1}(x).
  auto charlier_rows = [&](int rows, int shift, double scale) {
    std::vector<Eigen::VectorXd> out(rows, Eigen::VectorXd::Zero(n_cut + 1));
    for (int n = 0; n <= n_cut; ++n) {
      const double x = n - shift;
      double prev = 0.0, cur = 1.0;
      for (int k = 0; k < rows; ++k) {
        out[k][n] = scale * cur;
        const double next =
            ((x - k - m) * cur - std::sqrt(m * k) * prev) / std::sqrt(m * (k + 1.0));
        prev = cur;
        cur = next;
      }
    }
    return out;
  };

  tb.s = charlier_rows(k_max, 1, 1.0 / std::sqrt(m));
  tb.t = k_max >= 2 ? charlier_rows(k_max - 1, 2, 1.0 / (m * std::sqrt(2.0)))
                    : std::vector<Eigen::VectorXd>{};

  // Orthonormality of the tabulated basis doubles as the truncation check.
  double dev = 0.0;
  auto dot_b = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    double acc = 0.0;
    for (int n = 0; n <= n_cut; ++n) acc += tb.a[n] * x[n] * y[n] * n;
    return acc;
  };
  auto dot_c = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    double acc = 0.0;
    for (int n = 0; n <= n_cut; ++n) acc += tb.a[n] * x[n] * y[n] * 2.0 * n * (n - 1.0);
    return acc;
  };
  for (std::size_t i = 0; i < tb.s.size(); ++i)
    for (std::size_t j = i; j < tb.s.size(); ++j)
      dev = std::max(dev, std::abs(dot_b(tb.s[i], tb.s[j]) - (i == j ? 1.0 : 0.0)));
  for (std::size_t i = 0; i < tb.t.size(); ++i)
    for (std::size_t j = i; j < tb.t.size(); ++j)
      dev = std::max(dev, std::abs(dot_c(tb.t[i], tb.t[j]) - (i == j ? 1.0 : 0.0)));
  tb.gram_deviation = dev;
  return tb;
}

}  // namespace detail

TruncatedOperator build_collision_block_V4e(int k_max, const ModelParams& params,
                                            const RotationQuadrature& quad) {
  params.validate();
  check_quadrature(quad);
  if (k_max < 2) throw std::invalid_argument("build_collision_block_V4e: need k_max >= 2");
  if (!(params.mu > 0.0))
    throw std::invalid_argument("build_collision_block_V4e: needs mu > 0");

  const auto tb = detail::build_v4e_tables(k_max, params);
  const int nu = static_cast<int>(tb.s.size());
  const int nw = static_cast<int>(tb.t.size());
  const int dim = nu + nw;
  const int n_cut = static_cast<int>(tb.a.size()) - 1;

  // Per-pair rotation coefficients, measured by quadrature.
  const double d_self = rotation_matrix_element(4, 0, 4, 0, quad);
  const double d_other = rotation_matrix_element(4, 0, 0, 4, quad);
  const double d_pair = rotation_matrix_element(4, 0, 2, 2, quad);
  const double e_b = rotation_matrix_element(2, 2, 4, 0, quad);
  const double e_pair = rotation_matrix_element(2, 2, 2, 2, quad);
  const double f_self = rotation_matrix_element(2, 0, 2, 0, quad);
  const double f_other = rotation_matrix_element(2, 0, 0, 2, quad);

  const double cb_diag = d_self + d_other - 1.0;  // = 2 tau_2 - 1
  const double cb_pair = d_pair;                  // = sigma_{2,1}
  const double cc_b = 2.0 * e_b;
  const double cc_pair = e_pair - 1.0;
  const double cc_cross = f_self + f_other - 1.0;  // = 0 (energy level is rotation invariant)

  // K maps sector coefficients (s, t) to
  //   B part: cb_diag (N-1) s + cc_b (N-1) t
  //   C part: cb_pair s + (cc_pair + cc_cross (N-2)) t
  // and matrix elements contract against the sector Gram <B,B> = N,
  // <C,C> = 2N(N-1).
  auto s_of = [&](int idx, int n) { return idx < nu ? tb.s[idx][n] : 0.0; };
  auto t_of = [&](int idx, int n) { return idx >= nu ? tb.t[idx - nu][n] : 0.0; };

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      double acc = 0.0;
      for (int n = 2; n <= n_cut; ++n) {
        const double sj = s_of(j, n), tj = t_of(j, n);
        const double kb = cb_diag * (n - 1.0) * sj + cc_b * (n - 1.0) * tj;
        const double kc = cb_pair * sj + (cc_pair + cc_cross * (n - 2.0)) * tj;
        acc += tb.a[n] * (s_of(i, n) * kb * n + t_of(i, n) * kc * 2.0 * n * (n - 1.0));
      }
      K(i, j) = acc;
    }
  }
  TruncatedOperator op;
  op.gram_deviation = tb.gram_deviation;
  op.symmetry_deviation = (K - K.transpose()).cwiseAbs().maxCoeff();
  op.labels.resize(dim);
  for (int k = 0; k < nu; ++k) op.labels[k].alpha = {{0, k}, {4, 1}};
  for (int k = 0; k < nw; ++k) op.labels[nu + k].alpha = {{0, k}, {2, 2}};

  Eigen::MatrixXd M = params.lambda_tilde() * 0.5 * (K + K.transpose());
  for (int i = 0; i < dim; ++i) M(i, i) += -params.rho * op.labels[i].excitation();
  op.matrix = std::move(M);
  return op;
}

double collision_diag_single_mode(int m, const ModelParams& params,
                                  const RotationQuadrature& quad) {
  params.validate();
  if (m < 1) throw std::invalid_argument("collision_diag_single_mode: m must be >= 1");
  const double c = rotation_matrix_element(m, 0, m, 0, quad) +
                   rotation_matrix_element(m, 0, 0, m, quad);
  return params.lambda * (c - 1.0);
}

namespace {

double top_eigenvalue_below_first_gap(const TruncatedOperator& op, const ModelParams& params) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
  // The -rho level is the first gap; at lambda = 0 the whole one-excitation
  // level sits there, so the second spectral point is the largest eigenvalue
  // strictly below it.
  const double cutoff = -params.rho * (1.0 + 1e-9);
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()[i];
    if (ev < cutoff && ev > best) best = ev;
  }
  if (!std::isfinite(best))
    throw std::runtime_error("spectral_gaps: no eigenvalue below the first gap");
  return best;
}

}  // namespace

SpectralGaps spectral_gaps(const ModelParams& params, int k_max) {
  params.validate();
  if (k_max < 7) throw std::invalid_argument("spectral_gaps: need k_max >= 7");
  SpectralGaps g;
  g.delta = -params.rho;
  const double sq = std::sqrt(params.rho / params.mu);
  g.lower = -params.rho - 0.25 * params.lambda;
  g.upper = g.lower + 2.0 * params.lambda * sq;
  g.condition_ok =
      params.rho > 0.25 * params.lambda + 2.0 * params.lambda * sq && params.mean_n() > 256.0;

  const auto block = build_collision_block_V4e(k_max, params);
  const auto block_coarse = build_collision_block_V4e(k_max - 5, params);
  g.delta2 = top_eigenvalue_below_first_gap(block, params);
  g.drift = std::abs(g.delta2 - top_eigenvalue_below_first_gap(block_coarse, params));
  return g;
}

std::pair<double, double> gershgorin_lower_bounds(int n, const ModelParams& params) {
  params.validate();
  if (n < 1) throw std::invalid_argument("gershgorin_lower_bounds: n must be >= 1");
  const double rho = params.rho, lam = params.lambda;
  const double sq = std::sqrt(params.rho / params.mu);
  const double odd = std::min(rho + lam - lam * sq, 2.0 * rho - lam * sq);
  const double even =
      std::min(rho + (1.0 - 2.0 * tau(n)) * lam - 2.0 * lam * sq, 2.0 * rho - 2.0 * lam * sq);
  return {odd, even};
}

}  // namespace kacgc
