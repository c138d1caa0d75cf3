#include "kacgc/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kacgc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inverse_maxwellian_cdf(double q) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (maxwellian_cdf(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double log_poisson_pmf(long n, double alpha) {
  if (alpha == 0.0) return n == 0 ? 0.0 : -kInf;
  return n * std::log(alpha) - alpha - std::lgamma(static_cast<double>(n) + 1.0);
}

double poisson_kl(double a, double b) {
  // KL(Poisson(a) || Poisson(b)) = a log(a/b) - a + b.
  if (a == 0.0) return b;
  return a * std::log(a / b) - a + b;
}

}  // namespace

int CellPartition::cell_of(double v) const {
  return static_cast<int>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
}

CellPartition CellPartition::from_edges(std::vector<double> e) {
  for (std::size_t i = 1; i < e.size(); ++i)
    if (!(e[i] > e[i - 1])) throw std::invalid_argument("CellPartition: edges must increase");
  CellPartition p;
  p.edges = std::move(e);
  const int k = static_cast<int>(p.edges.size()) + 1;
  p.gaussian_mass.resize(k);
  double prev = 0.0;
  for (int i = 0; i < k - 1; ++i) {
    const double c = maxwellian_cdf(p.edges[i]);
    p.gaussian_mass[i] = c - prev;
    prev = c;
  }
  p.gaussian_mass[k - 1] = 1.0 - prev;
  return p;
}

CellPartition CellPartition::equal_mass(int k) {
  if (k < 1) throw std::invalid_argument("CellPartition: need at least one cell");
  std::vector<double> edges;
  for (int i = 1; i < k; ++i)
    edges.push_back(inverse_maxwellian_cdf(static_cast<double>(i) / k));
  return from_edges(std::move(edges));
}

OccupationVector occupation_of(std::span<const double> velocities,
                               const CellPartition& partition) {
  OccupationVector occ(partition.cells(), 0);
  for (double v : velocities) ++occ[partition.cell_of(v)];
  return occ;
}

std::size_t OccupationVectorHash::operator()(const OccupationVector& v) const {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (auto x : v) {
    h ^= x;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double product_state_entropy(const ProductState& ps, const ModelParams& params) {
  params.validate();
  const double m = params.mean_n();
  if (!(ps.eta >= 0.0)) throw std::invalid_argument("product_state_entropy: eta must be >= 0");
  double kl = 0.0;
  bool has_zero = false;
  for (int i = 0; i < ps.grid.n; ++i) {
    const double g = ps.g[i];
    if (g < 0.0) throw std::invalid_argument("product_state_entropy: g must be >= 0");
    if (g == 0.0) {
      has_zero = true;
      continue;
    }
    kl += ps.grid.dv * g * std::log(g / maxwellian_pdf(ps.grid.v(i)));
  }
  if (has_zero && ps.eta > 0.0) return kInf;
  return m - ps.eta + ps.eta * std::log(ps.eta / m) + ps.eta * kl;
}

double product_state_entropy_coarse(const ProductState& ps, const ModelParams& params,
                                    const CellPartition& partition) {
  params.validate();
  // Poisson thinning: under the product state the cell counts are independent
  // Poisson(eta * g_k), so the coarse entropy is a sum of Poisson divergences.
  Eigen::VectorXd gk = Eigen::VectorXd::Zero(partition.cells());
  for (int i = 0; i < ps.grid.n; ++i)
    gk[partition.cell_of(ps.grid.v(i))] += ps.grid.dv * ps.g[i];
  double s = 0.0;
  for (int k = 0; k < partition.cells(); ++k)
    s += poisson_kl(ps.eta * gk[k], params.mean_n() * partition.gaussian_mass[k]);
  return s;
}

namespace {

double log_product_poisson(const OccupationVector& occ, const Eigen::VectorXd& alphas) {
  double acc = 0.0;
  for (int k = 0; k < alphas.size(); ++k) {
    if (alphas[k] == 0.0 && occ[k] > 0)
      throw std::invalid_argument("coarse graining: cell with alpha = 0 received samples");
    acc += log_poisson_pmf(occ[k], alphas[k]);
  }
  return acc;
}

using CountMap = std::unordered_map<OccupationVector, long, OccupationVectorHash>;

CountMap count_samples(std::span<const OccupationVector> samples) {
  CountMap counts;
  for (const auto& occ : samples) ++counts[occ];
  return counts;
}

double plugin_entropy(const CountMap& counts, long total, const Eigen::VectorXd& alphas) {
  double s = 0.0;
  for (const auto& [occ, c] : counts) {
    const double p = static_cast<double>(c) / total;
    s += p * (std::log(p) - log_product_poisson(occ, alphas));
  }
  return s;
}

}  // namespace

double coarse_grained_entropy(std::span<const OccupationVector> samples,
                              const CellPartition& partition, const ModelParams& params) {
  params.validate();
  if (samples.empty()) throw std::invalid_argument("coarse_grained_entropy: no samples");
  const Eigen::VectorXd alphas = params.mean_n() * partition.gaussian_mass;
  return plugin_entropy(count_samples(samples), static_cast<long>(samples.size()), alphas);
}

double dirichlet_psi(const OccupationFunction& f, const Eigen::VectorXd& alphas, int n_max) {
  double psi = 0.0;
  const int k = static_cast<int>(alphas.size());
  for (const auto& [occ, val] : f) {
    if (!(val > 0.0)) return kInf;
    const double q = std::exp(log_product_poisson(occ, alphas));
    for (int cell = 0; cell < k; ++cell) {
      if (occ[cell] + 1 > n_max) continue;
      auto raised = occ;
      ++raised[cell];
      const auto it = f.find(raised);
      if (it == f.end()) continue;
      if (!(it->second > 0.0)) return kInf;
      const double diff = it->second - val;
      const double ldiff = std::log(it->second) - std::log(val);
      psi += alphas[cell] * diff * ldiff * q;
    }
  }
  return psi;
}

IneqCheck check_poisson_lsi(std::span<const double> f, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("check_poisson_lsi: alpha must be > 0");
  const auto n_max = static_cast<long>(f.size()) - 1;
  double tail = 1.0;
  for (long n = 0; n <= n_max; ++n) tail -= std::exp(log_poisson_pmf(n, alpha));
  if (tail > 1e-14)
    throw std::invalid_argument("check_poisson_lsi: Poisson tail above 1e-14, widen n_max");

  IneqCheck c;
  double ef = 0.0, dirichlet = 0.0;
  for (long n = 0; n <= n_max; ++n) {
    if (!(f[n] > 0.0)) throw std::invalid_argument("check_poisson_lsi: f must be > 0");
    const double pi = std::exp(log_poisson_pmf(n, alpha));
    c.lhs += f[n] * std::log(f[n]) * pi;
    ef += f[n] * pi;
    if (n < n_max)
      dirichlet += (f[n + 1] - f[n]) * (std::log(f[n + 1]) - std::log(f[n])) * pi;
  }
  c.rhs = ef * std::log(ef) + alpha * dirichlet;
  c.holds = c.lhs <= c.rhs + 1e-12;
  return c;
}

IneqCheck check_two_point(double f0, double f1, double mu0) {
  if (!(f0 > 0.0 && f1 > 0.0)) throw std::invalid_argument("check_two_point: f must be > 0");
  if (mu0 < 0.0 || mu0 > 1.0) throw std::invalid_argument("check_two_point: mu0 in [0,1]");
  const double mu1 = 1.0 - mu0;
  IneqCheck c;
  c.lhs = mu0 * f0 * std::log(f0) + mu1 * f1 * std::log(f1);
  const double ef = mu0 * f0 + mu1 * f1;
  c.rhs = ef * std::log(ef) + mu0 * mu1 * (f1 - f0) * (std::log(f1) - std::log(f0));
  c.holds = c.lhs <= c.rhs + 1e-12;
  return c;
}

IneqCheck check_binomial_lsi(std::span<const double> f, double alpha, int n) {
  if (n < 1 || static_cast<int>(f.size()) != n + 1)
    throw std::invalid_argument("check_binomial_lsi: f must live on {0..N}");
  if (!(alpha > 0.0) || alpha > n)
    throw std::invalid_argument("check_binomial_lsi: need 0 < alpha <= N");
  const double p = alpha / n;
  std::vector<double> pmf(n + 1);
  for (int j = 0; j <= n; ++j)
    pmf[j] = std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) +
                      j * std::log(p) + (n - j) * std::log1p(-p));
  IneqCheck c;
  double ef = 0.0, dirichlet = 0.0;
  for (int j = 0; j <= n; ++j) {
    if (!(f[j] > 0.0)) throw std::invalid_argument("check_binomial_lsi: f must be > 0");
    c.lhs += f[j] * std::log(f[j]) * pmf[j];
    ef += f[j] * pmf[j];
    if (j >= 1)
      dirichlet += j * (f[j] - f[j - 1]) * (std::log(f[j]) - std::log(f[j - 1])) * pmf[j];
  }
  c.rhs = ef * std::log(ef) + dirichlet;
  c.holds = c.lhs <= c.rhs + 1e-12;
  return c;
}

namespace {

struct EmpiricalOccupation {
  CountMap counts;
  long total = 0;
};

/// Restricted Dirichlet sum of the plug-in occupation function over pairs
/// where both values are observed; dropped boundary terms are nonnegative, so
/// this lower-bounds the full Psi~.
double psi_restricted(const EmpiricalOccupation& emp, const Eigen::VectorXd& alphas) {
  double psi = 0.0;
  const int k = static_cast<int>(alphas.size());
  for (const auto& [occ, c] : emp.counts) {
    const double logq = log_product_poisson(occ, alphas);
    const double f = static_cast<double>(c) / emp.total / std::exp(logq);
    for (int cell = 0; cell < k; ++cell) {
      auto raised = occ;
      ++raised[cell];
      const auto it = emp.counts.find(raised);
      if (it == emp.counts.end()) continue;
      const double fq = static_cast<double>(it->second) / emp.total /
                        std::exp(log_product_poisson(raised, alphas));
      psi += alphas[cell] * (fq - f) * (std::log(fq) - std::log(f)) * std::exp(logq);
    }
  }
  return psi;
}

}  // namespace

EntropyDecayReport entropy_decay_experiment(double eta, const ModelParams& params,
                                            const std::vector<double>& checkpoints, int replicas,
                                            std::uint64_t seed, int cells,
                                            int bootstrap_resamples, int threads) {
  params.validate();
  const auto partition = CellPartition::equal_mass(cells);
  const auto ps0 = maxwellian_product_state(eta, VelocityGrid(6.0, 0.005));

  EntropyDecayReport report;
  report.s0 = product_state_entropy(ps0, params);

  SimulationOptions opts;
  opts.record_velocities = true;
  opts.threads = threads;
  const auto series = simulate_replicas(product_sampler(eta, sample_maxwellian), params,
                                        checkpoints, replicas, seed, opts);

  const Eigen::VectorXd alphas = params.mean_n() * partition.gaussian_mass;
  RngStream boot_rng(seed, 0);  // root stream: replica streams start at 1

  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    EntropyCheckpointReport row;
    row.t = checkpoints[c];
    row.bound = std::exp(-params.rho * row.t) * report.s0;
    row.s_analytic = product_state_entropy(product_state_flow(ps0, params, row.t), params);

    std::vector<OccupationVector> occs(replicas);
    for (int r = 0; r < replicas; ++r)
      occs[r] = occupation_of(series.snapshots[c][r], partition);

    EmpiricalOccupation emp{count_samples(occs), replicas};
    row.s_estimate = plugin_entropy(emp.counts, emp.total, alphas);
    row.psi = psi_restricted(emp, alphas);
    // E~ of the plug-in occupation function is exactly 1, so the inequality
    // reduces to S <= (mu/rho) Psi.
    row.lemma_ent_slack = params.mean_n() * row.psi - row.s_estimate;

    // Bootstrap over replicas, resampling integer ids against precomputed
    // reference log-weights.
    std::unordered_map<OccupationVector, int, OccupationVectorHash> ids;
    std::vector<double> logq;
    std::vector<int> id_of(replicas);
    for (int r = 0; r < replicas; ++r) {
      const auto [it, fresh] = ids.try_emplace(occs[r], static_cast<int>(logq.size()));
      if (fresh) logq.push_back(log_product_poisson(occs[r], alphas));
      id_of[r] = it->second;
    }
    std::vector<double> boot(bootstrap_resamples);
    std::vector<long> counts(logq.size());
    for (int b = 0; b < bootstrap_resamples; ++b) {
      std::fill(counts.begin(), counts.end(), 0L);
      for (int r = 0; r < replicas; ++r)
        ++counts[id_of[boot_rng.uniform_below(replicas)]];
      double s = 0.0;
      for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) continue;
        const double pr = static_cast<double>(counts[i]) / replicas;
        s += pr * (std::log(pr) - logq[i]);
      }
      boot[b] = s;
    }
    double bm = 0.0, bs = 0.0;
    for (double x : boot) bm += x;
    bm /= bootstrap_resamples;
    for (double x : boot) bs += (x - bm) * (x - bm);
    row.s_se = std::sqrt(bs / (bootstrap_resamples - 1));

    report.analytic_bound_holds &= row.s_analytic <= row.bound + 1e-12;
    report.mc_bound_holds &= row.s_estimate <= row.bound + 3.0 * row.s_se;
    report.checkpoints.push_back(row);
  }
  return report;
}

}  // namespace kacgc
