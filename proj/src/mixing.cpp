#include "csma/mixing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "csma/detail/numeric.hpp"
#include "csma/errors.hpp"
#include "csma/hitting.hpp"
#include "csma/spectral.hpp"

namespace csma {

namespace {

constexpr double kBracketTolerance = 1e-6;
constexpr int kMaxConductanceStates = 24;

double worst_case(const TransientPropagator& prop, double t) {
  double d = 0.0;
  for (int x = 0; x < prop.generator().size(); ++x)
    d = std::max(d, prop.tv_from_stationary(x, t));
  return d;
}

}  // namespace

double worst_case_distance(const PartiteNetwork& net, double t) {
  if (!(t >= 0.0)) throw ValidationError("distance to stationarity needs t >= 0");
  return worst_case(TransientPropagator(build_generator(net)), t);
}

double mixing_time(const PartiteNetwork& net, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("mixing time needs eps in (0,1)");
  const TransientPropagator prop(build_generator(net));
  if (worst_case(prop, 0.0) <= eps) return 0.0;

  double lo = 0.0;
  double hi = 1.0;
  int guard = 0;
  while (worst_case(prop, hi) > eps) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 2000) throw ConditioningError("mixing time bracket search did not terminate");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (worst_case(prop, mid) <= eps ? hi : lo) = mid;
    if (hi - lo < kBracketTolerance * hi &&
        std::abs(worst_case(prop, hi) - eps) <= kBracketTolerance)
      break;
  }
  // d(t) is nonincreasing for the reversible activity chain; a violation
  // means the spectral evaluation went bad.
  if (worst_case(prop, 2.0 * hi) > worst_case(prop, hi) + 1e-9)
    throw ConditioningError("distance to stationarity not monotone at the returned time");
  return hi;
}

double conductance(const PartiteNetwork& net, const std::vector<AggState>& set) {
  if (set.empty()) throw ValidationError("conductance needs a nonempty set");
  const Generator gen = build_generator(net);
  const Distribution pi = stationary_agg(net);
  std::vector<std::uint8_t> in_set(gen.size(), 0);
  for (const auto& s : set) {
    const int i = gen.index_of(s);
    if (in_set[i]) throw ValidationError("duplicate state " + to_label(s) + " in set");
    in_set[i] = 1;
  }
  if (static_cast<int>(set.size()) == gen.size())
    throw ValidationError("conductance needs a proper subset of the state space");

  double log_flow = detail::kNegInf;
  double log_mass = detail::kNegInf;
  for (int x = 0; x < gen.size(); ++x) {
    if (!in_set[x]) continue;
    log_mass = detail::log_add(log_mass, pi.log_weights()[x]);
    for (const auto& [y, rate] : gen.neighbors(x))
      if (!in_set[y])
        log_flow = detail::log_add(log_flow, pi.log_weights()[x] + std::log(rate));
  }
  if (log_flow == detail::kNegInf) return 0.0;
  return std::exp(log_flow - log_mass);
}

ConductanceStar conductance_star(const PartiteNetwork& net) {
  const Generator gen = build_generator(net);
  const int n = gen.size();
  if (n > kMaxConductanceStates)
    throw CapacityError("conductance enumeration limited to " +
                        std::to_string(kMaxConductanceStates) + " states, chain has " +
                        std::to_string(n));
  const Distribution pi = stationary_agg(net);
  const std::vector<double> p = pi.probabilities();

  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  const std::uint32_t top = (std::uint32_t{1} << n) - 1;
  for (std::uint32_t mask = 1; mask < top; ++mask) {
    double mass = 0.0;
    for (std::uint32_t bits = mask; bits; bits &= bits - 1)
      mass += p[std::countr_zero(bits)];
    if (mass > 0.5 + 1e-12) continue;
    double flow = 0.0;
    for (std::uint32_t bits = mask; bits; bits &= bits - 1) {
      const int x = std::countr_zero(bits);
      for (const auto& [y, rate] : gen.neighbors(x))
        if (!((mask >> y) & 1u)) flow += p[x] * rate;
    }
    const double phi = flow / mass;
    if (phi < best) {
      best = phi;
      best_mask = mask;
    }
  }
  if (!std::isfinite(best)) throw ConditioningError("no feasible conductance set found");

  ConductanceStar out;
  for (int i = 0; i < n; ++i)
    if ((best_mask >> i) & 1u) out.minimizing_set.push_back(gen.state(i));
  out.value = conductance(net, out.minimizing_set);
  return out;
}

std::vector<int> components_by_size(const PartiteNetwork& net) {
  std::vector<int> order(net.components());
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return net.size(a) > net.size(b); });
  return order;
}

MixingBounds mixing_bounds(const PartiteNetwork& net, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("mixing bounds need eps in (0,1)");
  if (net.components() < 2)
    throw ValidationError("mixing bounds need at least two components");
  const auto order = components_by_size(net);
  const int c1 = order[0];
  const int c2 = order[1];

  MixingBounds bounds;
  const Generator gen = build_generator(net);
  const HittingQuery cross{AggState::branch(c2, net.size(c2)),
                           AggState::branch(c1, net.size(c1))};
  bounds.upper = mean_hitting_time(gen, cross) / eps;

  if (eps < 0.25) {
    double phi = 0.0;
    if (gen.size() <= kMaxConductanceStates) {
      phi = conductance_star(net).value;
    } else {
      std::vector<AggState> branch;
      for (int l = 1; l <= net.size(c2); ++l) branch.push_back(AggState::branch(c2, l));
      double mass = 0.0;
      const Distribution pi = stationary_agg(net);
      for (const auto& s : branch) mass += pi.probability(agg_index(net, s));
      if (mass > 0.5) return bounds;  // bottleneck set infeasible, no lower bound
      phi = conductance(net, branch);
    }
    if (phi > 0.0) bounds.lower = (0.5 - 2.0 * eps) / phi;
  }
  return bounds;
}

MixingReport make_mixing_report(const PartiteNetwork& net, double eps) {
  MixingReport report;
  report.epsilon = eps;
  report.t_mix = mixing_time(net, eps);
  const MixingBounds bounds = mixing_bounds(net, eps);
  report.lower_bound = bounds.lower;
  report.upper_bound = bounds.upper;
  report.component_order = components_by_size(net);

  const int c2 = report.component_order[1];
  std::vector<AggState> branch;
  for (int l = 1; l <= net.size(c2); ++l) branch.push_back(AggState::branch(c2, l));
  report.conductance_c2 = conductance(net, branch);
  if (build_generator(net).size() <= kMaxConductanceStates)
    report.phi_star = conductance_star(net).value;
  return report;
}

}  // namespace csma
