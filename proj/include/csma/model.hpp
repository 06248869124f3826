#pragma once

#include "csma/distribution.hpp"
#include "csma/generator.hpp"
#include "csma/network.hpp"

namespace csma {

using Distribution = BasicDistribution<AggState>;
using FullDistribution = BasicDistribution<FullState>;

// Stationary law of the aggregated chain:
//   pi(center) = (1 + sum_k ((1+nu)^{L_k} - 1))^{-1}
//   pi(k,l)    = pi(center) * C(L_k, l) * nu^l
// computed entirely in log space.
[[nodiscard]] Distribution stationary_agg(const PartiteNetwork& net);

// Stationary law of the full activity process: weight nu^{|x|} per
// independent set x. Subject to the full-enumeration node cap.
[[nodiscard]] FullDistribution stationary_full(const PartiteNetwork& net);

// Pushforward of a full-state distribution through the aggregation map.
// The support must be exactly full_states(net).
[[nodiscard]] Distribution aggregate(const FullDistribution& full, const PartiteNetwork& net);

}  // namespace csma
