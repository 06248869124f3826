#include "csma/model.hpp"

#include <cmath>

#include "csma/detail/numeric.hpp"
#include "csma/errors.hpp"

namespace csma {

Distribution stationary_agg(const PartiteNetwork& net) {
  const auto states = agg_states(net);
  const double log_nu = std::log(net.nu());
  std::vector<double> logw(states.size());
  logw[0] = 0.0;
  for (std::size_t i = 1; i < states.size(); ++i) {
    const AggState& s = states[i];
    logw[i] = detail::log_binomial(net.size(s.component), s.level) + s.level * log_nu;
  }
  return Distribution(states, std::move(logw));
}

FullDistribution stationary_full(const PartiteNetwork& net) {
  const auto states = full_states(net);
  const double log_nu = std::log(net.nu());
  std::vector<double> logw(states.size());
  for (std::size_t i = 0; i < states.size(); ++i)
    logw[i] = states[i].active_count() * log_nu;
  return FullDistribution(states, std::move(logw));
}

Distribution aggregate(const FullDistribution& full, const PartiteNetwork& net) {
  if (full.states() != full_states(net))
    throw ValidationError("distribution support does not match the network's full state space");
  const auto states = agg_states(net);
  std::vector<double> logw(states.size(), detail::kNegInf);
  for (std::size_t i = 0; i < full.size(); ++i) {
    const int j = agg_index(net, aggregate_state(full.state(i)));
    logw[j] = detail::log_add(logw[j], full.log_weights()[i]);
  }
  return Distribution(states, std::move(logw));
}

}  // namespace csma
