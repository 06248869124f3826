#pragma once

#include <Eigen/Dense>
#include <vector>

#include "csma/generator.hpp"
#include "csma/model.hpp"
#include "csma/network.hpp"

namespace csma {

// Distinct-rate hypoexponential law: absorption time distributed as the sum
// of independent Exp(rates[i]) variables.
class PhaseType {
 public:
  explicit PhaseType(std::vector<double> rates);

  [[nodiscard]] const std::vector<double>& rates() const { return rates_; }
  [[nodiscard]] int order() const { return static_cast<int>(rates_.size()); }
  [[nodiscard]] double mean() const;  // sum of 1/rates[i]

 private:
  std::vector<double> rates_;  // sorted ascending, all positive
};

// CDF of a hypoexponential law at t >= 0. Errors with ConditioningError when
// two rates are within relative distance 1e-9 (the partial-fraction weights
// blow up and the alternating sum loses all precision).
[[nodiscard]] double phase_type_cdf(const PhaseType& pt, double t);

// Symmetric similarity transform of a killed generator restricted to its
// transient states: matrix entries  g_xx = total outflow of x,
// g_xy = -sqrt(q(x,y) q(y,x)). `theta` holds the detailed-balance weights
// (anchored at 1 on the transient state farthest from absorption, per
// connected component), aligned with `transient_states`.
struct SymmetrizedChain {
  std::vector<AggState> transient_states;
  std::vector<double> theta;
  Eigen::MatrixXd matrix;
};

// Builds the symmetrized killed chain. `absorbing` must be the single
// absorbing state; its row is zeroed if the generator still carries one.
// Applies to any tree-shaped reversible chain (the aggregated star and its
// restrictions qualify). Errors if some transient state cannot reach
// absorption or if a transition lacks its reverse.
[[nodiscard]] SymmetrizedChain symmetrize(const Generator& gen, const AggState& absorbing);

// Detailed-balance weights along a killed chain whose transient states form
// a single path with the absorbing state attached at one end. Returned in
// path order from the far end (weight 1) toward absorption.
[[nodiscard]] std::vector<double> potential_coefficients(const Generator& gen);

// Eigenvalues of the symmetrized killed chain, sorted ascending. These are
// minus the eigenvalues of the killed generator; for birth-death chains they
// are the rates of the independent exponentials whose sum is the absorption
// time started from the far end. The smallest eigenvalue is refined by
// inverse iteration, since it can sit many orders of magnitude below the
// matrix norm.
[[nodiscard]] PhaseType absorption_spectrum(const Generator& gen, const AggState& absorbing);

struct GershgorinDisc {
  double center = 0.0;
  double radius = 0.0;
};

// One disc (diagonal entry, row off-diagonal sum) per transient state.
[[nodiscard]] std::vector<GershgorinDisc> gershgorin_discs(const SymmetrizedChain& sym);

// True when the discs are pairwise disjoint (eigenvalues then separate).
[[nodiscard]] bool discs_disjoint(const std::vector<GershgorinDisc>& discs);

// True when disc i avoids every other disc: the far-end disc separating from
// the bulk pins down the smallest eigenvalue's location.
[[nodiscard]] bool disc_separated(const std::vector<GershgorinDisc>& discs, std::size_t i);

// Exact transient law propagator built on one spectral decomposition of the
// detailed-balance symmetrization. Valid at arbitrarily large t (entries are
// sums of decaying exponentials, never a truncated series).
class TransientPropagator {
 public:
  explicit TransientPropagator(Generator gen);

  [[nodiscard]] const Generator& generator() const { return gen_; }

  // Law of X_t started from a point or from a distribution over the
  // generator's states (absorbing states accumulate their absorbed mass).
  [[nodiscard]] Distribution distribution_at(const AggState& init, double t) const;
  [[nodiscard]] Distribution distribution_at(const Distribution& init, double t) const;

  // Total variation distance between the time-t law started at state index x
  // and the stationary law. Only defined for chains with no absorbing state;
  // computed from the nonzero spectral terms alone, so the cancellation of
  // the stationary bulk costs no precision.
  [[nodiscard]] double tv_from_stationary(int state_index, double t) const;

 private:
  [[nodiscard]] std::vector<double> point_law(int x, double t) const;

  Generator gen_;
  std::vector<int> transient_;          // indices into gen_ states
  std::vector<int> absorbing_;          // indices into gen_ states
  std::vector<int> slot_;               // gen index -> position in transient_, or -1
  std::vector<double> log_theta_;       // per transient slot
  Eigen::MatrixXd vectors_;             // eigenvectors of the symmetrized part
  Eigen::VectorXd values_;              // eigenvalues (<= 0), ascending
};

// Law of X_t for the chain `gen` started at `init`.
[[nodiscard]] Distribution transient_distribution(const Generator& gen, const AggState& init,
                                                  double t);
[[nodiscard]] Distribution transient_distribution(const Generator& gen, const Distribution& init,
                                                  double t);

// Products alpha_i * E[T], where alpha_i is the absorption spectrum of the
// chain started at `from` and killed at `to` (restricted to the states
// reachable before absorption, which must form a path with `from` at its far
// end), and E[T] is the mean absorption time from `from`. The first product
// tends to 1 and the others diverge as nu grows.
[[nodiscard]] std::vector<double> eigen_time_products(const PartiteNetwork& net,
                                                      const AggState& from, const AggState& to);

}  // namespace csma
