#include "csma/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <exception>
#include <mutex>
#include <thread>

#include "csma/errors.hpp"

namespace csma::mc {

namespace {

constexpr std::uint64_t kEventBudget = 1'000'000'000ULL;
constexpr std::size_t kMinKsSamples = 10;

[[noreturn]] void budget_exceeded() {
  throw Error("simulation exceeded its event budget; transition effectively unreachable");
}

// One jump of the aggregated chain: samples the holding time and the next
// state by competing exponentials.
struct JumpSampler {
  const Generator& gen;

  std::pair<double, int> step(int state, CounterRng& rng) const {
    const double total = gen.total_outflow(state);
    const double hold = rng.next_exponential(total);
    double u = rng.next_unit() * total;
    const auto& out = gen.neighbors(state);
    for (const auto& [next, rate] : out) {
      u -= rate;
      if (u <= 0.0) return {hold, next};
    }
    return {hold, out.back().first};
  }
};

}  // namespace

Trajectory simulate_trajectory(const Generator& gen, const AggState& init, std::uint64_t seed,
                               double horizon, std::uint64_t stream) {
  if (!(horizon >= 0.0)) throw ValidationError("simulation horizon must be >= 0");
  CounterRng rng = CounterRng::stream(seed, stream);
  const JumpSampler sampler{gen};

  Trajectory trajectory;
  trajectory.horizon = horizon;
  trajectory.seed = seed;
  int state = gen.index_of(init);
  double t = 0.0;
  trajectory.events.emplace_back(t, gen.state(state));
  std::uint64_t events = 0;
  while (!gen.is_absorbing(state)) {
    const auto [hold, next] = sampler.step(state, rng);
    t += hold;
    if (t > horizon) break;
    state = next;
    trajectory.events.emplace_back(t, gen.state(state));
    if (++events > kEventBudget) budget_exceeded();
  }
  return trajectory;
}

FullTrajectory simulate_full_trajectory(const PartiteNetwork& net, const FullState& init,
                                        std::uint64_t seed, double horizon,
                                        std::uint64_t stream) {
  if (!(horizon >= 0.0)) throw ValidationError("simulation horizon must be >= 0");
  if (!init.is_empty()) {
    if (init.component < 1 || init.component > net.components())
      throw ValidationError("initial state component out of range");
    if (init.mask >> net.size(init.component))
      throw ValidationError("initial state mask exceeds component size");
  }
  CounterRng rng = CounterRng::stream(seed, stream);
  const double nu = net.nu();

  FullTrajectory trajectory;
  trajectory.horizon = horizon;
  trajectory.seed = seed;
  FullState state = init;
  double t = 0.0;
  trajectory.events.emplace_back(t, state);
  std::uint64_t events = 0;
  while (true) {
    // Active nodes tick at rate 1, unblocked inactive nodes at rate nu. When
    // idle every node of every component is unblocked.
    const int active = state.active_count();
    const int idle =
        state.is_empty() ? net.total_nodes() : net.size(state.component) - active;
    const double total = active + idle * nu;
    t += rng.next_exponential(total);
    if (t > horizon) break;

    double u = rng.next_unit() * total;
    if (u <= active * 1.0) {
      // Deactivate the ceil(u)-th active node.
      int pick = std::min(active - 1, static_cast<int>(u));
      std::uint32_t mask = state.mask;
      int bit = -1;
      for (int passed = -1; passed < pick;) {
        ++bit;
        if ((mask >> bit) & 1u) ++passed;
      }
      state.mask &= ~(std::uint32_t{1} << bit);
      if (state.mask == 0) state.component = 0;
    } else {
      u -= active;
      int pick = std::min(idle - 1, static_cast<int>(u / nu));
      if (state.is_empty()) {
        int k = 1;
        while (pick >= net.size(k)) {
          pick -= net.size(k);
          ++k;
        }
        state.component = k;
        state.mask = std::uint32_t{1} << pick;
      } else {
        int bit = -1;
        for (int passed = -1; passed < pick;) {
          ++bit;
          if (!((state.mask >> bit) & 1u)) ++passed;
        }
        state.mask |= std::uint32_t{1} << bit;
      }
    }
    trajectory.events.emplace_back(t, state);
    if (++events > kEventBudget) budget_exceeded();
  }
  return trajectory;
}

namespace {

template <class Traj, class StateMap>
Distribution occupation_impl(const Traj& trajectory, const PartiteNetwork& net,
                             const StateMap& to_index) {
  if (trajectory.events.empty()) throw ValidationError("trajectory has no events");
  if (!(trajectory.horizon > 0.0))
    throw ValidationError("occupation measure needs a positive horizon");
  std::vector<double> time(agg_states(net).size(), 0.0);
  for (std::size_t i = 0; i < trajectory.events.size(); ++i) {
    const double start = trajectory.events[i].first;
    const double end =
        i + 1 < trajectory.events.size() ? trajectory.events[i + 1].first : trajectory.horizon;
    time[to_index(trajectory.events[i].second)] += end - start;
  }
  for (double& v : time) v /= trajectory.horizon;
  return Distribution::from_probabilities(agg_states(net), time);
}

}  // namespace

Distribution occupation_measure(const Trajectory& trajectory, const PartiteNetwork& net) {
  return occupation_impl(trajectory, net,
                         [&](const AggState& s) { return agg_index(net, s); });
}

Distribution aggregated_occupation(const FullTrajectory& trajectory, const PartiteNetwork& net) {
  return occupation_impl(trajectory, net, [&](const FullState& s) {
    return agg_index(net, aggregate_state(s));
  });
}

SampleSet batch(const std::function<double(std::uint64_t, CounterRng&)>& runner, std::uint64_t n,
                std::uint64_t seed, int workers) {
  if (n == 0) throw ValidationError("batch needs at least one sample");
  if (workers < 1) throw ValidationError("batch needs at least one worker");

  SampleSet out;
  out.values.resize(n);
  out.meta.n = n;
  out.meta.seed = seed;

  const int used = static_cast<int>(std::min<std::uint64_t>(workers, n));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(used);
  for (int w = 0; w < used; ++w) {
    const std::uint64_t begin = n * w / used;
    const std::uint64_t end = n * (w + 1) / used;
    threads.emplace_back([&, begin, end] {
      try {
        for (std::uint64_t i = begin; i < end; ++i) {
          CounterRng rng = CounterRng::stream(seed, i);
          out.values[i] = runner(i, rng);
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

SampleSet sample_hitting_time(const Generator& gen, const HittingQuery& q, std::uint64_t n,
                              std::uint64_t seed, int workers) {
  const int target = gen.index_of(q.to);
  const int source = gen.index_of(q.from);
  if (gen.is_absorbing(source))
    throw ValidationError("cannot sample hitting times from an absorbing state");

  SampleSet out = batch(
      [&gen, target, source](std::uint64_t, CounterRng& rng) {
        const JumpSampler sampler{gen};
        int state = source;
        double t = 0.0;
        std::uint64_t events = 0;
        while (state != target) {
          if (gen.is_absorbing(state))
            throw ValidationError("chain absorbed before reaching the target");
          const auto [hold, next] = sampler.step(state, rng);
          t += hold;
          state = next;
          if (++events > kEventBudget) budget_exceeded();
        }
        return t;
      },
      n, seed, workers);
  out.meta.query = to_label(q.from) + "->" + to_label(q.to);
  return out;
}

std::vector<std::vector<int>> empirical_excursions(const PartiteNetwork& net, int k2,
                                                   std::uint64_t n, std::uint64_t seed) {
  if (net.components() < 2)
    throw ValidationError("excursion counting needs at least two components");
  if (k2 < 1 || k2 > net.components()) throw ValidationError("component index out of range");
  if (n == 0) throw ValidationError("needs at least one run");
  const Generator gen = build_generator(net);
  const JumpSampler sampler{gen};
  const int center = gen.index_of(AggState::center());

  std::vector<std::vector<int>> counts(n, std::vector<int>(net.components(), 0));
  for (std::uint64_t i = 0; i < n; ++i) {
    CounterRng rng = CounterRng::stream(seed, i);
    int state = center;
    std::uint64_t events = 0;
    while (true) {
      const auto [hold, next] = sampler.step(state, rng);
      const bool from_center = state == center;
      state = next;
      if (from_center) {
        const int k = gen.state(state).component;
        if (k == k2) break;
        ++counts[i][k - 1];
      }
      if (++events > kEventBudget) budget_exceeded();
    }
  }
  return counts;
}

SampleSet sample_limit_law(const LimitLaw& law, std::uint64_t n, std::uint64_t seed,
                           int workers) {
  if (!(law.p_star > 0.0 && law.p_star < 1.0))
    throw ValidationError("limit law needs p_star in (0,1)");
  const double log_p = std::log(law.p_star);
  const double mean_m = law.mean_m();

  SampleSet out = batch(
      [&law, log_p, mean_m](std::uint64_t, CounterRng& rng) {
        // Geometric on {0,1,...} by inversion: P(N >= k) = p_star^k.
        const auto geometric = static_cast<std::uint64_t>(std::log(rng.next_unit()) / log_p);
        std::uint64_t m = geometric + (law.indicator ? 1 : 0);
        double sum = 0.0;
        for (std::uint64_t i = 0; i < m; ++i) sum += rng.next_exponential(1.0);
        return sum / mean_m;
      },
      n, seed, workers);
  out.meta.query = std::string("limit-law p*=") + std::to_string(law.p_star) +
                   (law.indicator ? " dominant" : " non-dominant");
  return out;
}

double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf) {
  if (values.size() < kMinKsSamples)
    throw ValidationError("KS statistic needs at least 10 samples");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const auto check_range = [](double f) {
    if (f < -1e-12 || f > 1.0 + 1e-12)
      throw ValidationError("CDF returned a value outside [0,1]");
    return f;
  };
  // Tied samples are grouped so the empirical CDF jumps once per distinct
  // value; the reference CDF is evaluated both at the value and just below
  // it, which measures mixed laws (atoms) exactly and reduces to the
  // classical formula when the reference is continuous.
  double d = 0.0;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    const double v = values[i];
    const double f = check_range(cdf(v));
    const double f_left =
        check_range(cdf(std::nextafter(v, -std::numeric_limits<double>::infinity())));
    d = std::max(d, static_cast<double>(j) / n - f);
    d = std::max(d, f_left - static_cast<double>(i) / n);
    i = j;
  }
  return d;
}

double ks_critical_value(std::uint64_t n, double alpha) {
  if (n < kMinKsSamples) throw ValidationError("KS critical value needs n >= 10");
  // Asymptotic one-sample coefficients.
  double c = 0.0;
  if (alpha == 0.05) {
    c = 1.358;
  } else if (alpha == 0.01) {
    c = 1.628;
  } else {
    throw ValidationError("KS critical values tabulated for alpha = 0.05 and 0.01 only");
  }
  return c / std::sqrt(static_cast<double>(n));
}

}  // namespace csma::mc
