#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "csma/network.hpp"

namespace csma {

// Conservative CTMC generator over a list of aggregated states. Rows of
// absorbing states are identically zero; every other row sums to zero with
// the diagonal carrying the negated total outflow.
class Generator {
 public:
  Generator(std::vector<AggState> states, Eigen::MatrixXd rates,
            std::vector<std::uint8_t> absorbing);

  [[nodiscard]] int size() const { return static_cast<int>(states_.size()); }
  [[nodiscard]] const std::vector<AggState>& states() const { return states_; }
  [[nodiscard]] const AggState& state(int i) const { return states_[i]; }
  [[nodiscard]] const Eigen::MatrixXd& rates() const { return rates_; }
  [[nodiscard]] double rate(int i, int j) const { return rates_(i, j); }
  [[nodiscard]] bool is_absorbing(int i) const { return absorbing_[i] != 0; }
  [[nodiscard]] int absorbing_count() const;

  // Index of `s` in the state list; throws ValidationError if absent.
  [[nodiscard]] int index_of(const AggState& s) const;
  [[nodiscard]] bool contains(const AggState& s) const;

  // Total departure rate from state i (zero for absorbing states).
  [[nodiscard]] double total_outflow(int i) const { return -rates_(i, i); }

  // Positive-rate neighbours of state i, as (state index, rate) pairs.
  [[nodiscard]] const std::vector<std::pair<int, double>>& neighbors(int i) const {
    return adjacency_[i];
  }

 private:
  std::vector<AggState> states_;
  Eigen::MatrixXd rates_;
  std::vector<std::uint8_t> absorbing_;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
};

// Generator of the aggregated activity chain of `net`, with the given states
// made absorbing (their rows zeroed). Transition rates:
//   center -> (k,1)   : L_k * nu
//   (k,l) -> (k,l+1)  : (L_k - l) * nu
//   (k,1) -> center   : 1
//   (k,l) -> (k,l-1)  : l
[[nodiscard]] Generator build_generator(const PartiteNetwork& net,
                                        const std::vector<AggState>& absorbing = {});

// Restriction of `gen` to the states reachable from `from` without passing
// through an absorbing state (absorbing states themselves are kept when they
// are directly reachable). State order is preserved.
[[nodiscard]] Generator restrict_reachable(const Generator& gen, const AggState& from);

}  // namespace csma
