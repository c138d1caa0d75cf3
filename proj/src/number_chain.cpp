#include "kacgc/number_chain.hpp"

#include <cmath>
#include <stdexcept>

namespace kacgc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

NumberDistribution NumberDistribution::delta(int n, int n_max) {
  if (n < 0 || n > n_max) throw std::invalid_argument("NumberDistribution::delta: n out of range");
  NumberDistribution d;
  d.p = Eigen::VectorXd::Zero(n_max + 1);
  d.p[n] = 1.0;
  return d;
}

NumberDistribution NumberDistribution::poisson(const ModelParams& params, int n_max) {
  NumberDistribution d;
  d.p.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) d.p[n] = gc_number_weight(n, params);
  d.tail_deficit = 1.0 - d.p.sum();
  return d;
}

int default_number_truncation(const ModelParams& params) {
  const double m = params.mean_n();
  return static_cast<int>(std::ceil(m + 10.0 * std::sqrt(m) + 20.0));
}

Eigen::VectorXd birth_death_rhs(const Eigen::VectorXd& p, const ModelParams& params) {
  const auto n_max = static_cast<int>(p.size()) - 1;
  const double mu = params.mu, rho = params.rho;
  Eigen::VectorXd d(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    double v = -(n * rho + mu) * p[n];
    if (n > 0) v += mu * p[n - 1];
    if (n < n_max) v += rho * (n + 1) * p[n + 1];
    d[n] = v;
  }
  return d;
}

NumberDistribution evolve_number_dist(const NumberDistribution& p0, const ModelParams& params,
                                      double t, double dt, double tail_tol) {
  params.validate();
  if (t < 0.0) throw std::invalid_argument("evolve_number_dist: t must be >= 0");
  const int n_max = p0.n_max();
  if (dt <= 0.0) dt = 0.1 / (params.mu + params.rho * n_max);
  if (dt * (params.mu + params.rho * n_max) >= 0.5)
    throw std::invalid_argument("evolve_number_dist: dt too large for the stiffest level");

  NumberDistribution out = p0;
  const double mass0 = p0.p.sum();
  double remaining = t;
  while (remaining > 0.0) {
    const double h = remaining < dt ? remaining : dt;
    const Eigen::VectorXd k1 = birth_death_rhs(out.p, params);
    const Eigen::VectorXd k2 = birth_death_rhs(out.p + 0.5 * h * k1, params);
    const Eigen::VectorXd k3 = birth_death_rhs(out.p + 0.5 * h * k2, params);
    const Eigen::VectorXd k4 = birth_death_rhs(out.p + h * k3, params);
    out.p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    remaining -= h;
  }
  out.tail_deficit = p0.tail_deficit + (mass0 - out.p.sum());
  if (std::abs(out.tail_deficit) > tail_tol)
    throw std::runtime_error("evolve_number_dist: truncation tail deficit above tolerance");
  return out;
}

MomentTriple closed_form_moments(double n0, double e0, const ModelParams& params, double t) {
  params.validate();
  const double decay = std::exp(-params.rho * t);
  MomentTriple m;
  m.n = decay * n0 + (1.0 - decay) * params.mean_n();
  m.energy = decay * e0 + (1.0 - decay) * params.mean_n() / (2.0 * kPi);
  if (m.n == 0.0)
    throw std::domain_error("closed_form_moments: e(t) undefined when N(t) = 0");
  m.energy_per_particle = m.energy / m.n;
  return m;
}

double factorial_moment(const NumberDistribution& dist, int r) {
  if (r < 0) throw std::invalid_argument("factorial_moment: r must be >= 0");
  double acc = 0.0;
  for (int n = r; n <= dist.n_max(); ++n) {
    double w = 1.0;
    for (int j = 0; j < r; ++j) w *= static_cast<double>(n - j);
    acc += w * dist.p[n];
  }
  return acc;
}

std::vector<double> factorial_moment_flow(const std::vector<double>& initial,
                                          const ModelParams& params, double t) {
  params.validate();
  if (initial.empty() || initial[0] != 1.0)
    throw std::invalid_argument("factorial_moment_flow: need N_0(0) = 1");
  const double rho = params.rho, mu = params.mu;
  const auto r_max = static_cast<int>(initial.size()) - 1;

  // coeff[r][j]: N_r(t) = sum_j coeff[r][j] e^{-j rho t}.
  std::vector<Eigen::VectorXd> coeff(r_max + 1);
  coeff[0] = Eigen::VectorXd::Zero(1);
  coeff[0][0] = 1.0;
  for (int r = 1; r <= r_max; ++r) {
    coeff[r] = Eigen::VectorXd::Zero(r + 1);
    coeff[r][r] = initial[r];
    // r mu int_0^t e^{-rho r (t-s)} e^{-j rho s} ds
    //   = (r mu / (rho (r - j))) (e^{-j rho t} - e^{-r rho t}),  j < r.
    for (int j = 0; j < r; ++j) {
      const double c = coeff[r - 1][j];
      if (c == 0.0) continue;
      const double f = r * mu * c / (rho * (r - j));
      coeff[r][j] += f;
      coeff[r][r] -= f;
    }
  }

  std::vector<double> out(r_max + 1);
  for (int r = 0; r <= r_max; ++r) {
    double acc = 0.0;
    for (int j = 0; j <= r; ++j) acc += coeff[r][j] * std::exp(-j * rho * t);
    out[r] = acc;
  }
  return out;
}

ProductState maxwellian_product_state(double eta, const VelocityGrid& grid) {
  ProductState ps;
  ps.eta = eta;
  ps.grid = grid;
  ps.g.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) ps.g[i] = maxwellian_pdf(grid.v(i));
  return ps;
}

ProductState product_state_flow(const ProductState& ps0, const ModelParams& params, double t) {
  params.validate();
  if (!(ps0.eta > 0.0)) throw std::invalid_argument("product_state_flow: eta must be > 0");
  const double decay = std::exp(-params.rho * t);
  const double m = params.mean_n();
  ProductState out;
  out.grid = ps0.grid;
  out.eta = decay * ps0.eta + (1.0 - decay) * m;
  // l(v,t) = e^{-rho t} l(v) + (1-e^{-rho t}) gamma(v), l = (rho/mu) eta g;
  // back out g = l * mu / (rho eta(t)) = l * m / eta(t).
  out.g.resize(out.grid.n);
  const double scale0 = ps0.eta / m;
  for (int i = 0; i < out.grid.n; ++i) {
    const double l = decay * scale0 * ps0.g[i] + (1.0 - decay) * maxwellian_pdf(out.grid.v(i));
    out.g[i] = l * m / out.eta;
  }
  return out;
}

}  // namespace kacgc
