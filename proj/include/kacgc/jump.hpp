#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "kacgc/model.hpp"
#include "kacgc/number_chain.hpp"

namespace kacgc {

/// One jump of the master-equation process.
struct InEvent {};
struct OutEvent {
  int index;
};
struct CollisionEvent {
  int i, j;
  double theta;
};
using EventKind = std::variant<InEvent, OutEvent, CollisionEvent>;

/// mu + rho N + lambda_tilde N(N-1)/2.
double total_rate(const ParticleState& state, const ModelParams& params);

/// Exponential waiting time plus the jump it resolves to. Returns nullopt in
/// the absorbed state (N = 0 and mu = 0).
std::optional<std::pair<double, EventKind>> next_event(const ParticleState& state,
                                                       const ModelParams& params, RngStream& rng);

/// Apply a jump in place. In appends a Maxwellian velocity, Out swap-removes
/// the given index, Collision rotates the pair. Time is advanced by the caller.
void apply_event(ParticleState& state, const EventKind& event, RngStream& rng);

struct ReplicaRecord {
  int n = 0;
  double sum_v2 = 0.0;
  std::vector<double> hermite_sums;  // sum_i L_m(v_i) for each configured mode
};

/// Per-checkpoint, per-replica observables from an ensemble run, plus optional
/// velocity snapshots for marginal/entropy estimators.
struct ObservableSeries {
  std::vector<double> times;
  std::vector<std::vector<ReplicaRecord>> records;  // [checkpoint][replica]
  std::vector<std::vector<std::vector<double>>> snapshots;  // [checkpoint][replica][particle]
  std::uint64_t seed = 0;
  int replicas = 0;

  const std::vector<ReplicaRecord>& at_time(double t) const;
  const std::vector<std::vector<double>>& snapshots_at(double t) const;
};

using InitialSampler = std::function<ParticleState(RngStream&)>;

/// Stationary start: N ~ Poisson(mu/rho), velocities i.i.d. gamma.
InitialSampler stationary_sampler(const ModelParams& params);
/// Product start: N ~ Poisson(eta), velocities i.i.d. from draw_velocity.
InitialSampler product_sampler(double eta, std::function<double(RngStream&)> draw_velocity);
/// Fixed particle count with i.i.d. velocities.
InitialSampler fixed_n_sampler(int n, std::function<double(RngStream&)> draw_velocity);

struct SimulationOptions {
  std::vector<int> hermite_modes;  ///< extra observables sum_i L_m(v_i)
  bool record_velocities = false;
  double cap_factor = 10.0;  ///< hard cap 10 mu/rho + 100 by default
  int threads = 1;
};

/// R independent trajectories recorded at the given checkpoints. Replica r
/// draws from the stream derived from (seed, r), so results are bit-identical
/// for a given seed regardless of thread count.
ObservableSeries simulate_replicas(const InitialSampler& initial, const ModelParams& params,
                                   const std::vector<double>& checkpoints, int replicas,
                                   std::uint64_t seed, const SimulationOptions& options = {});

/// Normalized histogram of N over replicas at a checkpoint.
NumberDistribution empirical_number_law(const ObservableSeries& series, double t);

/// Histogram of N pooled across a checkpoint range [t_min, t_max].
NumberDistribution pooled_number_law(const ObservableSeries& series, double t_min, double t_max);

}  // namespace kacgc
