#include "kacgc/jump.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "kacgc/spectral.hpp"

namespace kacgc {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

double total_rate(const ParticleState& state, const ModelParams& params) {
  const double n = state.n();
  return params.mu + params.rho * n + params.lambda_tilde() * 0.5 * n * (n - 1.0);
}

std::optional<std::pair<double, EventKind>> next_event(const ParticleState& state,
                                                       const ModelParams& params, RngStream& rng) {
  const int n = state.n();
  const double rate = total_rate(state, params);
  if (rate <= 0.0) return std::nullopt;  // absorbed: N = 0 and mu = 0

  const double dt = rng.exponential(rate);
  const double u = rng.uniform() * rate;
  if (u < params.mu) return {{dt, InEvent{}}};
  if (u < params.mu + params.rho * n) {
    return {{dt, OutEvent{static_cast<int>(rng.uniform_below(n))}}};
  }
  // Uniform unordered pair: i uniform in {0..n-1}, j uniform in the rest.
  const int i = static_cast<int>(rng.uniform_below(n));
  int j = static_cast<int>(rng.uniform_below(n - 1));
  if (j >= i) ++j;
  return {{dt, CollisionEvent{i, j, rng.uniform() * kTwoPi}}};
}

void apply_event(ParticleState& state, const EventKind& event, RngStream& rng) {
  if (std::holds_alternative<InEvent>(event)) {
    state.velocities.push_back(sample_maxwellian(rng));
    return;
  }
  if (const auto* out = std::get_if<OutEvent>(&event)) {
    const int n = state.n();
    if (out->index < 0 || out->index >= n)
      throw std::out_of_range("apply_event: Out index out of bounds");
    state.velocities[out->index] = state.velocities.back();
    state.velocities.pop_back();
    return;
  }
  const auto& col = std::get<CollisionEvent>(event);
  const int n = state.n();
  if (col.i == col.j || col.i < 0 || col.j < 0 || col.i >= n || col.j >= n)
    throw std::out_of_range("apply_event: Collision indices invalid");
  auto [vp, wp] = kac_collide(state.velocities[col.i], state.velocities[col.j], col.theta);
  state.velocities[col.i] = vp;
  state.velocities[col.j] = wp;
}

InitialSampler stationary_sampler(const ModelParams& params) {
  const double mean = params.mean_n();
  return [mean](RngStream& rng) {
    ParticleState s;
    const long n = rng.poisson(mean);
    s.velocities.reserve(n);
    for (long i = 0; i < n; ++i) s.velocities.push_back(sample_maxwellian(rng));
    return s;
  };
}

InitialSampler product_sampler(double eta, std::function<double(RngStream&)> draw_velocity) {
  return [eta, draw = std::move(draw_velocity)](RngStream& rng) {
    ParticleState s;
    const long n = rng.poisson(eta);
    s.velocities.reserve(n);
    for (long i = 0; i < n; ++i) s.velocities.push_back(draw(rng));
    return s;
  };
}

InitialSampler fixed_n_sampler(int n, std::function<double(RngStream&)> draw_velocity) {
  return [n, draw = std::move(draw_velocity)](RngStream& rng) {
    ParticleState s;
    s.velocities.reserve(n);
    for (int i = 0; i < n; ++i) s.velocities.push_back(draw(rng));
    return s;
  };
}

namespace {

ReplicaRecord record_state(const ParticleState& state, const std::vector<int>& modes) {
  ReplicaRecord r;
  r.n = state.n();
  for (double v : state.velocities) r.sum_v2 += v * v;
  r.hermite_sums.resize(modes.size(), 0.0);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    double acc = 0.0;
    for (double v : state.velocities) acc += hermite_L(modes[m], v);
    r.hermite_sums[m] = acc;
  }
  return r;
}

}  // namespace

ObservableSeries simulate_replicas(const InitialSampler& initial, const ModelParams& params,
                                   const std::vector<double>& checkpoints, int replicas,
                                   std::uint64_t seed, const SimulationOptions& options) {
  params.validate();
  if (replicas < 1) throw std::invalid_argument("simulate_replicas: need replicas >= 1");
  for (std::size_t i = 1; i < checkpoints.size(); ++i)
    if (!(checkpoints[i] > checkpoints[i - 1]))
      throw std::invalid_argument("simulate_replicas: checkpoints must be strictly increasing");

  const auto n_check = checkpoints.size();
  ObservableSeries series;
  series.times = checkpoints;
  series.seed = seed;
  series.replicas = replicas;
  series.records.assign(n_check, std::vector<ReplicaRecord>(replicas));
  if (options.record_velocities)
    series.snapshots.assign(n_check, std::vector<std::vector<double>>(replicas));

  const long cap = static_cast<long>(options.cap_factor * params.mean_n() + 100.0);

  auto run_replica = [&](int r) {
    RngStream rng(seed, static_cast<std::uint64_t>(r) + 1);
    ParticleState state = initial(rng);
    state.time = 0.0;
    for (std::size_t c = 0; c < n_check; ++c) {
      // Run events past the checkpoint; the recorded state is the value of the
      // right-continuous piecewise-constant path at the checkpoint time.
      while (true) {
        auto ev = next_event(state, params, rng);
        if (!ev) break;  // absorbed; state is constant from here on
        if (state.time + ev->first > checkpoints[c]) break;
        state.time += ev->first;
        apply_event(state, ev->second, rng);
        if (state.n() > cap)
          throw std::runtime_error("simulate_replicas: particle count exceeded the hard cap");
      }
      state.time = checkpoints[c];
      series.records[c][r] = record_state(state, options.hermite_modes);
      if (options.record_velocities) series.snapshots[c][r] = state.velocities;
    }
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    for (int r = 0; r < replicas; ++r) run_replica(r);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t]() {
        try {
          for (int r = t; r < replicas; r += threads) run_replica(r);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return series;
}

namespace {

std::size_t checkpoint_index(const ObservableSeries& series, double t) {
  for (std::size_t i = 0; i < series.times.size(); ++i)
    if (series.times[i] == t) return i;
  throw std::invalid_argument("ObservableSeries: t is not a checkpoint");
}

}  // namespace

const std::vector<ReplicaRecord>& ObservableSeries::at_time(double t) const {
  return records[checkpoint_index(*this, t)];
}

const std::vector<std::vector<double>>& ObservableSeries::snapshots_at(double t) const {
  if (snapshots.empty()) throw std::logic_error("ObservableSeries: velocities were not recorded");
  return snapshots[checkpoint_index(*this, t)];
}

NumberDistribution empirical_number_law(const ObservableSeries& series, double t) {
  return pooled_number_law(series, t, t);
}

NumberDistribution pooled_number_law(const ObservableSeries& series, double t_min, double t_max) {
  long count = 0;
  int max_n = 0;
  for (std::size_t c = 0; c < series.times.size(); ++c) {
    if (series.times[c] < t_min || series.times[c] > t_max) continue;
    for (const auto& rec : series.records[c]) max_n = std::max(max_n, rec.n);
    count += static_cast<long>(series.records[c].size());
  }
  if (count == 0) throw std::invalid_argument("pooled_number_law: no checkpoints in range");
  NumberDistribution d;
  d.p = Eigen::VectorXd::Zero(max_n + 1);
  for (std::size_t c = 0; c < series.times.size(); ++c) {
    if (series.times[c] < t_min || series.times[c] > t_max) continue;
    for (const auto& rec : series.records[c]) d.p[rec.n] += 1.0;
  }
  d.p /= static_cast<double>(count);
  return d;
}

}  // namespace kacgc
