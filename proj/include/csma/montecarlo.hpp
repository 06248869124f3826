#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "csma/generator.hpp"
#include "csma/hitting.hpp"
#include "csma/model.hpp"
#include "csma/network.hpp"
#include "csma/rng.hpp"

namespace csma::mc {

// Jump-chain realisation of the aggregated activity process: events are
// (jump time, entered state), the first entry being (0, init). Only jumps at
// or before `horizon` are recorded; the last state occupies the remainder.
struct Trajectory {
  std::vector<std::pair<double, AggState>> events;
  double horizon = 0.0;
  std::uint64_t seed = 0;
};

struct FullTrajectory {
  std::vector<std::pair<double, FullState>> events;
  double horizon = 0.0;
  std::uint64_t seed = 0;
};

struct SampleMeta {
  std::vector<int> sizes;
  double nu = 0.0;
  std::string query;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};

struct SampleSet {
  std::vector<double> values;
  SampleMeta meta;
};

// Competing-exponentials simulation of `gen` from `init` up to `horizon`.
// `stream` selects the RNG stream among those derived from `seed`.
[[nodiscard]] Trajectory simulate_trajectory(const Generator& gen, const AggState& init,
                                             std::uint64_t seed, double horizon,
                                             std::uint64_t stream = 0);

// Per-node-clock simulation of the full activity process (each active node
// deactivates at rate 1, each unblocked node activates at rate nu).
[[nodiscard]] FullTrajectory simulate_full_trajectory(const PartiteNetwork& net,
                                                      const FullState& init, std::uint64_t seed,
                                                      double horizon, std::uint64_t stream = 0);

// Fraction of time spent in each state up to the horizon.
[[nodiscard]] Distribution occupation_measure(const Trajectory& trajectory,
                                              const PartiteNetwork& net);

// Occupation of the full trajectory pushed through the aggregation map.
[[nodiscard]] Distribution aggregated_occupation(const FullTrajectory& trajectory,
                                                 const PartiteNetwork& net);

// Runs `runner` for sample indices 0..n-1, each on its own counter-based
// stream, split across `workers` threads. Results are identical for every
// worker count.
[[nodiscard]] SampleSet batch(const std::function<double(std::uint64_t, CounterRng&)>& runner,
                              std::uint64_t n, std::uint64_t seed, int workers = 1);

// n independent first-passage times from q.from to q.to.
[[nodiscard]] SampleSet sample_hitting_time(const Generator& gen, const HittingQuery& q,
                                            std::uint64_t n, std::uint64_t seed,
                                            int workers = 1);

// For n runs started at the center: how many departures the chain makes into
// each branch k != k2 before its first departure into branch k2. Row i holds
// the K counts of run i (entry k2-1 stays 0).
[[nodiscard]] std::vector<std::vector<int>> empirical_excursions(const PartiteNetwork& net,
                                                                 int k2, std::uint64_t n,
                                                                 std::uint64_t seed);

// n draws from the defining random sum of the limit law: M = Geo(p_star) +
// indicator phases of unit-mean exponentials, scaled by 1/E[M].
[[nodiscard]] SampleSet sample_limit_law(const LimitLaw& law, std::uint64_t n,
                                         std::uint64_t seed, int workers = 1);

// One-sample Kolmogorov-Smirnov statistic sup_x |F_n(x) - F(x)| against a
// continuous CDF. Needs at least 10 samples.
[[nodiscard]] double ks_statistic(std::vector<double> values,
                                  const std::function<double(double)>& cdf);

// Asymptotic critical value c(alpha)/sqrt(n) for alpha in {0.05, 0.01}.
[[nodiscard]] double ks_critical_value(std::uint64_t n, double alpha);

}  // namespace csma::mc
