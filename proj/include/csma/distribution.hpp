#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "csma/detail/numeric.hpp"
#include "csma/errors.hpp"

namespace csma {

// Probability distribution over an explicit state list, held as log weights
// so that weights like nu^60 at nu = 1e8 stay representable. Normalisation
// happens lazily through the stored log partition sum.
template <class State>
class BasicDistribution {
 public:
  BasicDistribution(std::vector<State> states, std::vector<double> log_weights)
      : states_(std::move(states)), logw_(std::move(log_weights)) {
    if (states_.empty()) throw ValidationError("distribution needs at least one state");
    if (states_.size() != logw_.size())
      throw ValidationError("distribution state/weight length mismatch");
    log_z_ = detail::log_sum_exp(logw_);
    if (!std::isfinite(log_z_)) throw ValidationError("distribution has zero total weight");
  }

  [[nodiscard]] static BasicDistribution from_probabilities(std::vector<State> states,
                                                            const std::vector<double>& probs) {
    std::vector<double> logw(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] < 0.0 || !std::isfinite(probs[i]))
        throw ValidationError("probabilities must be finite and nonnegative");
      logw[i] = probs[i] > 0.0 ? std::log(probs[i]) : detail::kNegInf;
    }
    return BasicDistribution(std::move(states), std::move(logw));
  }

  [[nodiscard]] std::size_t size() const { return states_.size(); }
  [[nodiscard]] const std::vector<State>& states() const { return states_; }
  [[nodiscard]] const State& state(std::size_t i) const { return states_[i]; }

  [[nodiscard]] double log_probability(std::size_t i) const { return logw_[i] - log_z_; }
  [[nodiscard]] double probability(std::size_t i) const {
    return std::exp(log_probability(i));
  }
  [[nodiscard]] std::vector<double> probabilities() const {
    std::vector<double> p(size());
    for (std::size_t i = 0; i < size(); ++i) p[i] = probability(i);
    return p;
  }
  [[nodiscard]] const std::vector<double>& log_weights() const { return logw_; }
  [[nodiscard]] double log_partition() const { return log_z_; }

 private:
  std::vector<State> states_;
  std::vector<double> logw_;
  double log_z_ = 0.0;
};

// Total variation distance (1/2) * sum |p_i - q_i|; the two distributions
// must live on identical state lists.
template <class State>
[[nodiscard]] double tv_distance(const BasicDistribution<State>& p,
                                 const BasicDistribution<State>& q) {
  if (p.states() != q.states())
    throw ValidationError("total variation distance needs matching supports");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p.probability(i) - q.probability(i));
  return 0.5 * s;
}

}  // namespace csma
