#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace csma {

// Complete K-partite interference network: K node classes of sizes
// L_1..L_K, activation rate nu, deactivation rate 1. Nodes in distinct
// classes block each other; nodes within a class are independent.
class PartiteNetwork {
 public:
  PartiteNetwork(std::vector<int> sizes, double nu);

  [[nodiscard]] int components() const { return static_cast<int>(sizes_.size()); }
  [[nodiscard]] int size(int k) const;  // k is 1-based
  [[nodiscard]] const std::vector<int>& sizes() const { return sizes_; }
  [[nodiscard]] int total_nodes() const { return total_; }
  [[nodiscard]] double nu() const { return nu_; }

 private:
  std::vector<int> sizes_;
  double nu_;
  int total_;
};

// State of the aggregated activity chain: either the empty configuration
// (center of the star) or "l active nodes in component k", 1 <= l <= L_k.
struct AggState {
  int component = 0;  // 1-based; 0 means center
  int level = 0;      // number of active nodes; 0 means center

  [[nodiscard]] static AggState center() { return {0, 0}; }
  [[nodiscard]] static AggState branch(int k, int l) { return {k, l}; }
  [[nodiscard]] bool is_center() const { return component == 0; }

  friend bool operator==(const AggState& a, const AggState& b) {
    return a.component == b.component && a.level == b.level;
  }
  friend bool operator!=(const AggState& a, const AggState& b) { return !(a == b); }
  // Canonical order: center first, then branches in index order, levels ascending.
  friend bool operator<(const AggState& a, const AggState& b) {
    if (a.component != b.component) return a.component < b.component;
    return a.level < b.level;
  }
};

// Full activity state: the set of simultaneously active nodes. Feasibility
// forces all active nodes into one component, so a component index plus a
// bitmask over that component's nodes is a faithful encoding.
struct FullState {
  int component = 0;       // 1-based; 0 means no active nodes
  std::uint32_t mask = 0;  // bit i set <=> node i+1 of `component` active

  [[nodiscard]] static FullState empty() { return {0, 0}; }
  [[nodiscard]] bool is_empty() const { return mask == 0; }
  [[nodiscard]] int active_count() const;

  friend bool operator==(const FullState& a, const FullState& b) {
    return a.component == b.component && a.mask == b.mask;
  }
  friend bool operator!=(const FullState& a, const FullState& b) { return !(a == b); }
  friend bool operator<(const FullState& a, const FullState& b) {
    if (a.component != b.component) return a.component < b.component;
    return a.mask < b.mask;
  }
};

// All aggregated states in canonical order; |result| = 1 + sum L_k.
[[nodiscard]] std::vector<AggState> agg_states(const PartiteNetwork& net);

// All independent sets in canonical order (empty set first, then per
// component all nonempty masks ascending); |result| = 1 + sum (2^L_k - 1).
// Guarded: errors if the network has more than `kMaxFullNodes` nodes.
[[nodiscard]] std::vector<FullState> full_states(const PartiteNetwork& net);

inline constexpr int kMaxFullNodes = 24;

// Index of a state within agg_states(net), or an error if out of range.
[[nodiscard]] int agg_index(const PartiteNetwork& net, const AggState& s);

// Aggregation map: a full state with l active nodes in component k maps to
// branch state (k, l); the empty set maps to the center.
[[nodiscard]] AggState aggregate_state(const FullState& x);

// Text forms used by the CLI and CSV exports: center is "0", branch states
// are "k:l". Full states render as "0" or "k:i+j+..." (active node list).
[[nodiscard]] std::string to_label(const AggState& s);
[[nodiscard]] std::string to_label(const FullState& x);
[[nodiscard]] AggState agg_state_from_label(const std::string& text);

}  // namespace csma
