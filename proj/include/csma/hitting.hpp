#pragma once

#include <optional>
#include <vector>

#include "csma/generator.hpp"
#include "csma/network.hpp"

namespace csma {

// First-passage question: time to first hit `to` starting from `from`.
struct HittingQuery {
  AggState from;
  AggState to;

  HittingQuery(AggState from_state, AggState to_state);
};

// Leading-order behaviour of a mean transition time: E[T] ~ coefficient *
// nu^exponent as nu grows.
struct AsymptoticLaw {
  double coefficient = 0.0;
  int exponent = 0;

  [[nodiscard]] double value_at(double nu) const;
};

// Escape parameters of the star around a target branch k2:
//   l_star: largest rival branch size, k_star: the branches attaining it,
//   p_star: probability that an excursion from the center enters a rival
//   dominant branch before branch k2, indicator: whether the start branch k1
//   is itself dominant, mean_m: expected number of deep-escape phases.
struct EscapeParams {
  int l_star = 0;
  std::vector<int> k_star;
  double p_star = 0.0;
  bool indicator = false;
  double mean_m = 0.0;
};

// Limit law of T / E[T] for a cross-branch transition: a geometric number
// M = Geo(p_star) + indicator of exponential phases, normalised to unit mean.
struct LimitLaw {
  double p_star = 0.0;
  bool indicator = false;

  [[nodiscard]] double mean_m() const { return (indicator ? 1.0 : 0.0) + p_star / (1.0 - p_star); }
};

// How a scaled transition time behaves as nu grows.
enum class LimitKind {
  exponential,    // T / E[T] -> Exp(1)  (downward transitions)
  geometric_sum,  // T / E[T] -> scaled geometric sum of exponentials
  degenerate,     // T / E[T] -> 0 in distribution (upward transitions)
};

struct QueryLimit {
  LimitKind kind = LimitKind::exponential;
  std::optional<LimitLaw> law;  // present for cross-branch queries
};

// Exact mean hitting time via first-step analysis: with T the generator
// restricted to the complement of `to`, solves (-T) h = 1 and returns
// h(from). Errors if the system is singular (target unreachable).
[[nodiscard]] double mean_hitting_time(const Generator& gen, const HittingQuery& q);

// Closed-form mean of a single step between adjacent states of a birth-death
// activity chain (K = 1, or the two-branch line of a bipartite network),
// computed from stationary ratios in log space. `from` and `to` must be
// neighbours.
[[nodiscard]] double bd_step_mean(const PartiteNetwork& net, const AggState& from,
                                  const AggState& to);

// Leading term of E[T] as nu -> infinity. Covered cases: same-branch
// downward (any K), same-branch upward and center-to-branch for K <= 2, and
// cross-branch for any K. Anything else raises UnsupportedCaseError.
[[nodiscard]] AsymptoticLaw asymptotic_mean(const PartiteNetwork& net, const HittingQuery& q);

// Escape parameters for start branch k1 and target branch k2 (1-based).
[[nodiscard]] EscapeParams escape_params(const PartiteNetwork& net, int k1, int k2);

// Probability that, before the first center departure into branch k2, the
// chain makes exactly counts[k-1] departures into each branch k != k2.
// counts must be zero at position k2-1.
[[nodiscard]] double excursion_pmf(const PartiteNetwork& net, int k2,
                                   const std::vector<int>& counts);

// CDF of the unit-mean limit law at x >= 0:
//   indicator = 1: 1 - exp(-x)
//   indicator = 0: (1 - p_star) + p_star * (1 - exp(-p_star * x))
[[nodiscard]] double limit_law_cdf(const LimitLaw& law, double x);

// Limit classification of a query (law attached for cross-branch queries).
[[nodiscard]] QueryLimit query_limit_law(const PartiteNetwork& net, const HittingQuery& q);

}  // namespace csma
