#include "csma/network.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "csma/errors.hpp"

namespace csma {

PartiteNetwork::PartiteNetwork(std::vector<int> sizes, double nu)
    : sizes_(std::move(sizes)), nu_(nu), total_(0) {
  if (sizes_.empty()) throw ValidationError("network needs at least one component");
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    if (sizes_[k] < 1)
      throw ValidationError("component " + std::to_string(k + 1) + " size must be >= 1");
    total_ += sizes_[k];
  }
  if (!(nu_ > 0.0) || !std::isfinite(nu_))
    throw ValidationError("activation rate nu must be positive and finite");
}

int PartiteNetwork::size(int k) const {
  if (k < 1 || k > components())
    throw ValidationError("component index " + std::to_string(k) + " out of range");
  return sizes_[k - 1];
}

int FullState::active_count() const { return std::popcount(mask); }

std::vector<AggState> agg_states(const PartiteNetwork& net) {
  std::vector<AggState> out;
  out.reserve(1 + static_cast<std::size_t>(net.total_nodes()));
  out.push_back(AggState::center());
  for (int k = 1; k <= net.components(); ++k)
    for (int l = 1; l <= net.size(k); ++l) out.push_back(AggState::branch(k, l));
  return out;
}

std::vector<FullState> full_states(const PartiteNetwork& net) {
  if (net.total_nodes() > kMaxFullNodes)
    throw CapacityError("full state enumeration limited to " + std::to_string(kMaxFullNodes) +
                        " nodes, network has " + std::to_string(net.total_nodes()));
  std::size_t count = 1;
  for (int k = 1; k <= net.components(); ++k)
    count += (std::size_t{1} << net.size(k)) - 1;
  std::vector<FullState> out;
  out.reserve(count);
  out.push_back(FullState::empty());
  for (int k = 1; k <= net.components(); ++k) {
    const std::uint32_t top = (std::uint32_t{1} << net.size(k)) - 1;
    for (std::uint32_t m = 1; m <= top; ++m) out.push_back(FullState{k, m});
  }
  return out;
}

int agg_index(const PartiteNetwork& net, const AggState& s) {
  if (s.is_center()) return 0;
  if (s.component < 1 || s.component > net.components() || s.level < 1 ||
      s.level > net.size(s.component))
    throw ValidationError("state " + to_label(s) + " not in the aggregated state space");
  int idx = 1;
  for (int k = 1; k < s.component; ++k) idx += net.size(k);
  return idx + s.level - 1;
}

AggState aggregate_state(const FullState& x) {
  if (x.is_empty()) return AggState::center();
  return AggState::branch(x.component, x.active_count());
}

std::string to_label(const AggState& s) {
  if (s.is_center()) return "0";
  return std::to_string(s.component) + ":" + std::to_string(s.level);
}

std::string to_label(const FullState& x) {
  if (x.is_empty()) return "0";
  std::string out = std::to_string(x.component) + ":";
  bool first = true;
  for (int i = 0; i < 32; ++i) {
    if ((x.mask >> i) & 1u) {
      if (!first) out += '+';
      out += std::to_string(i + 1);
      first = false;
    }
  }
  return out;
}

AggState agg_state_from_label(const std::string& text) {
  if (text == "0") return AggState::center();
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ValidationError("state label must be \"0\" or \"k:l\", got \"" + text + "\"");
  try {
    std::size_t used = 0;
    const int k = std::stoi(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("trailing characters");
    const std::string rest = text.substr(colon + 1);
    const int l = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("trailing characters");
    if (k < 1 || l < 1) throw std::invalid_argument("nonpositive index");
    return AggState::branch(k, l);
  } catch (const std::exception&) {
    throw ValidationError("state label must be \"0\" or \"k:l\", got \"" + text + "\"");
  }
}

}  // namespace csma
