#pragma once

#include <optional>
#include <vector>

#include "csma/model.hpp"
#include "csma/network.hpp"

namespace csma {

// Worst-case total variation distance to stationarity at time t:
// d(t) = max_x ||P_t(x, .) - pi||_TV, computed spectrally (exact at any t).
[[nodiscard]] double worst_case_distance(const PartiteNetwork& net, double t);

// t_mix(eps) = inf { t : d(t) <= eps }, located by doubling plus bisection.
// The returned t satisfies d(t) <= eps with |d(t) - eps| <= 1e-6 and a
// relative bracket width below 1e-6.
[[nodiscard]] double mixing_time(const PartiteNetwork& net, double eps);

// Conductance of a state set S: Q(S, S^c) / pi(S) with
// Q(S,S^c) = sum_{x in S, y not in S} pi(x) q(x,y), in log space.
[[nodiscard]] double conductance(const PartiteNetwork& net, const std::vector<AggState>& set);

struct ConductanceStar {
  double value = 0.0;
  std::vector<AggState> minimizing_set;
};

// Global conductance Phi* = min over S with pi(S) <= 1/2 of Phi(S), by
// exhaustive subset enumeration. Guarded to at most 24 aggregated states.
[[nodiscard]] ConductanceStar conductance_star(const PartiteNetwork& net);

struct MixingBounds {
  std::optional<double> lower;  // absent when eps >= 1/4
  double upper = 0.0;
};

// Sandwich around t_mix(eps): the coupling upper bound E[T leaf2 -> leaf1]/eps
// and the conductance lower bound (1/2 - 2 eps)/Phi (Phi* when enumerable,
// otherwise the second-branch bottleneck Phi(C2)). Components are ranked by
// size with ties broken by original index; needs K >= 2.
[[nodiscard]] MixingBounds mixing_bounds(const PartiteNetwork& net, double eps);

struct MixingReport {
  double epsilon = 0.0;
  double t_mix = 0.0;
  std::optional<double> lower_bound;
  double upper_bound = 0.0;
  double conductance_c2 = 0.0;
  std::optional<double> phi_star;      // present when exact enumeration ran
  std::vector<int> component_order;    // original 1-based indices, size-descending
};

[[nodiscard]] MixingReport make_mixing_report(const PartiteNetwork& net, double eps);

// Original 1-based component indices sorted by size descending, stable.
[[nodiscard]] std::vector<int> components_by_size(const PartiteNetwork& net);

}  // namespace csma
