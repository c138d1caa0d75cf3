#include "kacgc/bk.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "kacgc/jump.hpp"

namespace kacgc {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

double DensityField::second_moment() const {
  double acc = 0.0;
  for (int i = 0; i < grid.n; ++i) acc += grid.v(i) * grid.v(i) * values[i];
  return grid.dv * acc;
}

DensityField maxwellian_field(const VelocityGrid& grid) {
  DensityField f;
  f.grid = grid;
  f.values.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) f.values[i] = maxwellian_pdf(grid.v(i));
  return f;
}

namespace {

/// 4-point Lagrange interpolation at fractional grid position p (in units of
/// dv from the left edge); out-of-grid reads are 0.
inline double interp4(const Eigen::VectorXd& f, int n, double p) {
  const int i = static_cast<int>(std::floor(p));
  if (i < 1 || i + 2 >= n) {
    if (p < -1.0 || p > n) return 0.0;
    // Fall back to linear at the outermost cells (values there are ~0 by the
    // boundary contract).
    if (i < 0 || i + 1 >= n) return 0.0;
    const double u = p - i;
    return (1.0 - u) * f[i] + u * f[i + 1];
  }
  const double u = p - i;
  const double um = u - 1.0, up = u + 1.0, u2 = u - 2.0;
  const double w0 = -u * um * u2 / 6.0;
  const double w1 = up * um * u2 / 2.0;
  const double w2 = -up * u * u2 / 2.0;
  const double w3 = up * u * um / 6.0;
  return w0 * f[i - 1] + w1 * f[i] + w2 * f[i + 1] + w3 * f[i + 2];
}

}  // namespace

Eigen::VectorXd bk_collision_gain(const DensityField& f, int n_theta, int threads) {
  const int n = f.grid.n;
  const double dv = f.grid.dv;
  Eigen::VectorXd gain = Eigen::VectorXd::Zero(n);

  auto work = [&](int begin, int end) {
    for (int jv = begin; jv < end; ++jv) {
      const double v = f.grid.v(jv);
      double acc = 0.0;
      for (int t = 0; t < n_theta; ++t) {
        const double th = kTwoPi * t / n_theta;
        const double c = std::cos(th), s = std::sin(th);
        // Rotated arguments are affine in the w index: positions in units of
        // dv advance by s and c per step.
        double px = (v * c + (-f.grid.v_max) * s + f.grid.v_max) / dv;
        double py = (-v * s + (-f.grid.v_max) * c + f.grid.v_max) / dv;
        double sum_w = 0.0;
        for (int l = 0; l < n; ++l, px += s, py += c) {
          const double a = interp4(f.values, n, px);
          if (a != 0.0) sum_w += a * interp4(f.values, n, py);
        }
        acc += sum_w;
      }
      gain[jv] = acc * dv / n_theta;
    }
  };

  if (threads <= 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back(work, std::min(n, t * chunk), std::min(n, (t + 1) * chunk));
    for (auto& th : pool) th.join();
  }
  return gain;
}

Eigen::VectorXd bk_rhs(const DensityField& f, const ModelParams& params,
                       const BkOptions& options) {
  params.validate();
  const int n = f.grid.n;
  Eigen::VectorXd rhs(n);
  const double m0 = f.mass();
  Eigen::VectorXd gain;
  if (params.lambda > 0.0) gain = bk_collision_gain(f, options.n_theta, options.threads);
  for (int i = 0; i < n; ++i) {
    double r = -params.rho * (f.values[i] - maxwellian_pdf(f.grid.v(i)));
    if (params.lambda > 0.0) r += params.lambda * (gain[i] - m0 * f.values[i]);
    rhs[i] = r;
  }
  return rhs;
}

BkTrajectory bk_solve(const DensityField& f0, const ModelParams& params,
                      const std::vector<double>& checkpoints, const BkOptions& options) {
  params.validate();
  if (checkpoints.empty()) throw std::invalid_argument("bk_solve: no checkpoints");
  for (std::size_t i = 1; i < checkpoints.size(); ++i)
    if (!(checkpoints[i] > checkpoints[i - 1]))
      throw std::invalid_argument("bk_solve: checkpoints must increase");
  const double dt_max = 0.1 / (params.rho + params.lambda * std::max(1.0, f0.mass()));
  if (options.dt > dt_max) throw std::invalid_argument("bk_solve: dt too large for stability");

  BkTrajectory traj;
  DensityField f = f0;
  double t = 0.0;
  auto rhs_at = [&](const Eigen::VectorXd& vals) {
    DensityField tmp{f.grid, vals};
    return bk_rhs(tmp, params, options);
  };
  for (double target : checkpoints) {
    while (t < target - 1e-12) {
      const double h = std::min(options.dt, target - t);
      const Eigen::VectorXd k1 = rhs_at(f.values);
      const Eigen::VectorXd k2 = rhs_at(f.values + 0.5 * h * k1);
      const Eigen::VectorXd k3 = rhs_at(f.values + 0.5 * h * k2);
      const Eigen::VectorXd k4 = rhs_at(f.values + h * k3);
      f.values += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += h;
      const double worst = f.values.minCoeff();
      if (worst < -options.negativity_tol)
        throw std::runtime_error("bk_solve: negativity beyond tolerance (instability)");
      if (worst < 0.0) {
        traj.max_clipped = std::max(traj.max_clipped, -worst);
        f.values = f.values.cwiseMax(0.0);
      }
    }
    traj.times.push_back(target);
    traj.fields.push_back(f);
  }
  return traj;
}

DensityField empirical_marginal1(std::span<const std::vector<double>> samples, double mu_n,
                                 double rho, const VelocityGrid& grid) {
  if (samples.empty()) throw std::invalid_argument("empirical_marginal1: no samples");
  DensityField f;
  f.grid = grid;
  f.values = Eigen::VectorXd::Zero(grid.n);
  for (const auto& vs : samples)
    for (double v : vs) {
      const int c = grid.cell_of(v);
      if (c >= 0) f.values[c] += 1.0;
    }
  f.values *= rho / (mu_n * static_cast<double>(samples.size()) * grid.dv);
  return f;
}

Eigen::MatrixXd empirical_marginal2(std::span<const std::vector<double>> samples, double mu_n,
                                    double rho, const VelocityGrid& grid) {
  if (samples.empty()) throw std::invalid_argument("empirical_marginal2: no samples");
  Eigen::MatrixXd f2 = Eigen::MatrixXd::Zero(grid.n, grid.n);
  for (const auto& vs : samples) {
    // Ordered distinct pairs, matching the N!/(N-2)! counting.
    std::vector<int> cells(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) cells[i] = grid.cell_of(vs[i]);
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (cells[i] < 0) continue;
      for (std::size_t j = 0; j < vs.size(); ++j) {
        if (i == j || cells[j] < 0) continue;
        f2(cells[i], cells[j]) += 1.0;
      }
    }
  }
  const double scale = (rho / mu_n) * (rho / mu_n) /
                       (static_cast<double>(samples.size()) * grid.dv * grid.dv);
  return f2 * scale;
}

namespace {

double l1_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double dv) {
  return dv * (a - b).cwiseAbs().sum();
}

struct BatchStats {
  double value = 0.0;
  double se = 0.0;
};

/// Mean and standard error of i.i.d. per-batch defect values; the defects are
/// reported at batch granularity so their sampling error is exactly the SE of
/// this mean.
BatchStats batch_stats(std::span<const double> batch_values) {
  const auto b = static_cast<double>(batch_values.size());
  double mean = 0.0;
  for (double x : batch_values) mean += x;
  mean /= b;
  double var = 0.0;
  for (double x : batch_values) var += (x - mean) * (x - mean);
  var /= (b - 1.0);
  return {mean, std::sqrt(var / b)};
}

}  // namespace

Eigen::VectorXd coarse_cell_average(const DensityField& fine, const VelocityGrid& coarse) {
  const long ratio = std::lround(coarse.dv / fine.grid.dv);
  if (ratio % 2 == 0 || std::abs(coarse.dv - ratio * fine.grid.dv) > 1e-12 * coarse.dv)
    throw std::invalid_argument(
        "coarse_cell_average: coarse spacing must be an odd multiple of the fine spacing");
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(coarse.n);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(coarse.n);
  for (int i = 0; i < fine.grid.n; ++i) {
    const int c = coarse.cell_of(fine.grid.v(i));
    if (c < 0) continue;
    avg[c] += fine.values[i];
    count[c] += 1.0;
  }
  for (int c = 0; c < coarse.n; ++c)
    if (count[c] > 0) avg[c] /= count[c];
  return avg;
}

ChaosReport chaos_experiment(const std::function<double(RngStream&)>& g0_sampler,
                             const Eigen::VectorXd& g0_grid_values, double eta_scale,
                             std::span<const double> mu_list, int replicas,
                             const ModelParams& base_params, double t, std::uint64_t seed,
                             const VelocityGrid& fine_grid, const VelocityGrid& comparison_grid,
                             const VelocityGrid& pair_grid, const BkOptions& options,
                             int batches) {
  if (mu_list.empty()) throw std::invalid_argument("chaos_experiment: empty mu_list");
  for (std::size_t i = 1; i < mu_list.size(); ++i)
    if (!(mu_list[i] > mu_list[i - 1]))
      throw std::invalid_argument("chaos_experiment: mu_list must increase");
  if (replicas < batches) throw std::invalid_argument("chaos_experiment: too few replicas");

  ChaosReport report;
  report.t = t;
  report.eta_scale = eta_scale;
  report.replicas = replicas;

  // One hydrodynamic solve serves every mu_n: the limit equation depends only
  // on (rho, lambda) and the initial relative density eta_scale * g0.
  DensityField f0{fine_grid, eta_scale * g0_grid_values};
  const auto pde = bk_solve(f0, ModelParams{1.0, base_params.rho, base_params.lambda},
                            {t}, options);
  const Eigen::VectorXd f_pde = coarse_cell_average(pde.fields.back(), comparison_grid);

  for (std::size_t i = 0; i < mu_list.size(); ++i) {
    const double mu_n = mu_list[i];
    ModelParams params{mu_n, base_params.rho, base_params.lambda};
    const double eta_n = eta_scale * mu_n / params.rho;

    SimulationOptions sim_opts;
    sim_opts.record_velocities = true;
    sim_opts.threads = options.threads;
    const auto series = simulate_replicas(product_sampler(eta_n, g0_sampler), params, {t},
                                          replicas, seed + i, sim_opts);
    const auto& snaps = series.snapshots[0];

    std::vector<double> l1_batches(batches), d2_batches(batches);
    const int per = replicas / batches;
    for (int b = 0; b < batches; ++b) {
      const std::span<const std::vector<double>> part(snaps.data() + b * per, per);
      const DensityField b1 = empirical_marginal1(part, mu_n, params.rho, comparison_grid);
      const DensityField b1c = empirical_marginal1(part, mu_n, params.rho, pair_grid);
      const Eigen::MatrixXd b2 = empirical_marginal2(part, mu_n, params.rho, pair_grid);
      l1_batches[b] = l1_distance(b1.values, f_pde, comparison_grid.dv);
      d2_batches[b] = pair_grid.dv * pair_grid.dv *
                      (b2 - b1c.values * b1c.values.transpose()).cwiseAbs().sum();
    }

    ChaosRow row;
    row.mu = mu_n;
    const auto l1 = batch_stats(l1_batches);
    const auto d2 = batch_stats(d2_batches);
    row.l1_pde = l1.value;
    row.l1_pde_se = l1.se;
    row.factor_defect = d2.value;
    row.factor_defect_se = d2.se;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace kacgc
