#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kacgc/bk.hpp"
#include "kacgc/jump.hpp"

using namespace kacgc;

namespace {

Eigen::VectorXd bimodal(const VelocityGrid& grid, double sd = 0.3) {
  Eigen::VectorXd g(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double v = grid.v(i);
    const double a = (v + 0.8) / sd, b = (v - 0.8) / sd;
    g[i] = 0.5 * (std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b)) /
           (sd * std::sqrt(2.0 * M_PI));
  }
  return g;
}

}  // namespace

TEST_CASE("equilibrium is a fixed point of the full right-hand side") {
  const VelocityGrid grid(4.0, 0.02);
  const auto gamma = maxwellian_field(grid);
  const ModelParams p{1.0, 1.0, 1.0};
  BkOptions opts;
  opts.threads = 2;
  const auto rhs = bk_rhs(gamma, p, opts);
  CHECK(rhs.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("thermostat-only right-hand side is exact") {
  const VelocityGrid grid(4.0, 0.02);
  DensityField f{grid, bimodal(grid)};
  const ModelParams p{1.0, 0.7, 0.0};
  const auto rhs = bk_rhs(f, p, {});
  for (int i = 0; i < grid.n; i += 17) {
    const double expect = -0.7 * (f.values[i] - maxwellian_pdf(grid.v(i)));
    CHECK(rhs[i] == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("collision term conserves mass and energy") {
  const VelocityGrid grid(4.0, 0.02);
  DensityField f{grid, bimodal(grid)};
  const auto gain = bk_collision_gain(f, 64, 2);
  const double m0 = f.mass();
  double mass = 0.0, energy = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double d = gain[i] - m0 * f.values[i];
    mass += grid.dv * d;
    energy += grid.dv * grid.v(i) * grid.v(i) * d;
  }
  CHECK(std::abs(mass) < 1e-6);
  CHECK(std::abs(energy) < 1e-6);

  // Full rhs mass balance: only the thermostat moves mass.
  const ModelParams p{1.0, 1.0, 1.0};
  BkOptions opts;
  opts.threads = 2;
  const auto rhs = bk_rhs(f, p, opts);
  CHECK(grid.dv * rhs.sum() == doctest::Approx(-p.rho * (m0 - 1.0)).epsilon(1e-6));
}

TEST_CASE("equilibrium residual shrinks under grid refinement") {
  const ModelParams p{1.0, 1.0, 1.0};
  const auto coarse = bk_rhs(maxwellian_field(VelocityGrid(4.0, 0.04)), p, {});
  const auto fine = bk_rhs(maxwellian_field(VelocityGrid(4.0, 0.02)), p, {});
  const double rc = coarse.cwiseAbs().maxCoeff();
  const double rf = fine.cwiseAbs().maxCoeff();
  CHECK(rf * 2.0 <= rc);  // at least first order; the scheme does better
}

TEST_CASE("thermostat-only solve matches the closed form") {
  const VelocityGrid grid(4.0, 0.02);
  DensityField f0{grid, bimodal(grid)};
  const ModelParams p{1.0, 1.0, 0.0};
  BkOptions topts;
  topts.dt = 5e-3;
  const auto traj = bk_solve(f0, p, {0.3, 1.0}, topts);
  for (std::size_t c = 0; c < traj.times.size(); ++c) {
    const double decay = std::exp(-traj.times[c]);
    double l1 = 0.0;
    for (int i = 0; i < grid.n; ++i) {
      const double exact =
          decay * f0.values[i] + (1.0 - decay) * maxwellian_pdf(grid.v(i));
      l1 += grid.dv * std::abs(traj.fields[c].values[i] - exact);
    }
    CHECK(l1 < 1e-6);
  }
}

TEST_CASE("gamma is stationary under the full solve, second moment relaxes") {
  const VelocityGrid grid(4.0, 0.02);
  const ModelParams p{1.0, 1.0, 1.0};
  BkOptions opts;
  opts.threads = 2;
  opts.dt = 5e-3;
  const auto still = bk_solve(maxwellian_field(grid), p, {0.25}, opts);
  double drift = 0.0;
  for (int i = 0; i < grid.n; ++i)
    drift = std::max(drift, std::abs(still.fields[0].values[i] - maxwellian_pdf(grid.v(i))));
  CHECK(drift < 1e-6);

  // Collisions conserve mass and energy, so both moments follow the pure
  // thermostat relaxation: m0 -> 1 and m2 -> 1/(2 pi) at rate rho.
  DensityField f0{grid, 0.8 * bimodal(grid, 0.25)};
  const double t = 1.0;
  const auto traj = bk_solve(f0, p, {t}, opts);
  const double m00 = f0.mass(), m20 = f0.second_moment();
  const double decay = std::exp(-p.rho * t);
  const double m0t = 1.0 + decay * (m00 - 1.0);
  const double m2t = decay * m20 + (1.0 - decay) / (2.0 * M_PI);
  CHECK(traj.fields[0].mass() == doctest::Approx(m0t).epsilon(1e-5));
  CHECK(traj.fields[0].second_moment() == doctest::Approx(m2t).epsilon(1e-4));

  // Symmetric data stays symmetric on the symmetric grid.
  const auto& ft = traj.fields[0].values;
  for (int i = 0; i < grid.n; ++i) CHECK(ft[i] == doctest::Approx(ft[grid.n - 1 - i]).epsilon(1e-12));
  CHECK(traj.max_clipped < 1e-8);
}

TEST_CASE("empirical marginals of an exact product state") {
  const VelocityGrid grid(4.0, 0.1);
  const double mu_n = 64.0, rho = 1.0, eta = 32.0;  // relative density 1/2
  RngStream rng(4, 9);
  std::vector<std::vector<double>> samples(20000);
  for (auto& vs : samples) {
    vs.resize(rng.poisson(eta));
    for (auto& v : vs) v = sample_maxwellian(rng);
  }
  const auto f1 = empirical_marginal1(samples, mu_n, rho, grid);
  CHECK(f1.mass() == doctest::Approx(eta / mu_n).epsilon(5e-3));
  for (int i = 0; i < grid.n; i += 7) {
    const double expect = 0.5 * maxwellian_pdf(grid.v(i));
    CHECK(std::abs(f1.values[i] - expect) < 6.0 * std::sqrt(0.5 / (mu_n * 20000 * grid.dv)) + 1e-3);
  }

  // Independence: the two-particle marginal factorizes within noise.
  const VelocityGrid coarse(4.0, 0.5);
  const auto f2 = empirical_marginal2(samples, mu_n, rho, coarse);
  const auto f1c = empirical_marginal1(samples, mu_n, rho, coarse);
  const Eigen::MatrixXd outer = f1c.values * f1c.values.transpose();
  const double defect = coarse.dv * coarse.dv * (f2 - outer).cwiseAbs().sum();
  CHECK(defect < 0.01);
}

TEST_CASE("chaos experiment matches the thermostat closed form at lambda=0") {
  const VelocityGrid fine(4.0, 0.05);
  const VelocityGrid comparison(4.0, 0.25);
  const VelocityGrid pair(4.0, 0.5);
  const ModelParams base{1.0, 1.0, 0.0};
  auto g0_sampler = [](RngStream& rng) {
    const double c = rng.uniform() < 0.5 ? -0.8 : 0.8;
    return c + 0.3 * rng.normal();
  };
  const std::vector<double> mus{64.0};
  const auto report = chaos_experiment(g0_sampler, bimodal(fine), 0.5, mus, 8000, base, 1.0,
                                       123, fine, comparison, pair, {}, 8);
  REQUIRE(report.rows.size() == 1);
  // The PDE solution at lambda=0 is the exact thermostat flow, so the L1
  // defect is pure sampling noise.
  CHECK(report.rows[0].l1_pde < 0.02);
  CHECK(report.rows[0].factor_defect < 0.1);
  CHECK(report.rows[0].l1_pde_se > 0.0);

  // Misaligned comparison grids are rejected.
  CHECK_THROWS(coarse_cell_average(maxwellian_field(fine), VelocityGrid(4.0, 0.1)));
  const auto avg = coarse_cell_average(maxwellian_field(fine), comparison);
  CHECK(comparison.dv * avg.sum() ==
        doctest::Approx(maxwellian_field(fine).mass()).epsilon(1e-6));
}

TEST_CASE("solver guards") {
  const VelocityGrid grid(4.0, 0.02);
  const ModelParams p{1.0, 1.0, 1.0};
  BkOptions big;
  big.dt = 1.0;
  CHECK_THROWS(bk_solve(maxwellian_field(grid), p, {0.5}, big));
  CHECK_THROWS(bk_solve(maxwellian_field(grid), p, {}, {}));
}
