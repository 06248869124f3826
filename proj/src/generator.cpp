#include "csma/generator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "csma/errors.hpp"

namespace csma {

namespace {
constexpr double kRowSumTolerance = 1e-12;
}

Generator::Generator(std::vector<AggState> states, Eigen::MatrixXd rates,
                     std::vector<std::uint8_t> absorbing)
    : states_(std::move(states)), rates_(std::move(rates)), absorbing_(std::move(absorbing)) {
  const int n = static_cast<int>(states_.size());
  if (n == 0) throw ValidationError("generator needs at least one state");
  if (rates_.rows() != n || rates_.cols() != n || static_cast<int>(absorbing_.size()) != n)
    throw ValidationError("generator shape mismatch");
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (rates_(i, j) < 0.0) throw ValidationError("negative transition rate");
      off += rates_(i, j);
    }
    if (absorbing_[i]) {
      if (off != 0.0 || rates_(i, i) != 0.0)
        throw ValidationError("absorbing state row must be identically zero");
    } else if (std::abs(rates_(i, i) + off) > kRowSumTolerance * std::max(1.0, off)) {
      throw ValidationError("generator row does not sum to zero");
    }
  }
  adjacency_.resize(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && rates_(i, j) > 0.0) adjacency_[i].emplace_back(j, rates_(i, j));
}

int Generator::absorbing_count() const {
  return static_cast<int>(std::count(absorbing_.begin(), absorbing_.end(), std::uint8_t{1}));
}

int Generator::index_of(const AggState& s) const {
  const auto it = std::lower_bound(states_.begin(), states_.end(), s);
  if (it == states_.end() || *it != s)
    throw ValidationError("state " + to_label(s) + " not in generator");
  return static_cast<int>(it - states_.begin());
}

bool Generator::contains(const AggState& s) const {
  const auto it = std::lower_bound(states_.begin(), states_.end(), s);
  return it != states_.end() && *it == s;
}

Generator build_generator(const PartiteNetwork& net, const std::vector<AggState>& absorbing) {
  const auto states = agg_states(net);
  const int n = static_cast<int>(states.size());
  const double nu = net.nu();

  std::vector<std::uint8_t> absorbing_flag(n, 0);
  for (const auto& a : absorbing) absorbing_flag[agg_index(net, a)] = 1;

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (absorbing_flag[i]) continue;
    const AggState& s = states[i];
    if (s.is_center()) {
      for (int k = 1; k <= net.components(); ++k)
        q(i, agg_index(net, AggState::branch(k, 1))) = net.size(k) * nu;
    } else {
      const int L = net.size(s.component);
      if (s.level < L)
        q(i, agg_index(net, AggState::branch(s.component, s.level + 1))) = (L - s.level) * nu;
      const AggState down =
          s.level == 1 ? AggState::center() : AggState::branch(s.component, s.level - 1);
      q(i, agg_index(net, down)) = s.level;
    }
    q(i, i) = -q.row(i).sum();
  }
  return Generator(states, std::move(q), std::move(absorbing_flag));
}

Generator restrict_reachable(const Generator& gen, const AggState& from) {
  const int start = gen.index_of(from);
  const int n = gen.size();
  std::vector<std::uint8_t> seen(n, 0);
  std::deque<int> frontier{start};
  seen[start] = 1;
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop_front();
    if (gen.is_absorbing(i)) continue;
    for (const auto& [j, rate] : gen.neighbors(i)) {
      if (!seen[j]) {
        seen[j] = 1;
        frontier.push_back(j);
      }
    }
  }

  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (seen[i]) keep.push_back(i);

  const int m = static_cast<int>(keep.size());
  std::vector<AggState> states(m);
  std::vector<std::uint8_t> absorbing(m);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    states[a] = gen.state(keep[a]);
    absorbing[a] = gen.is_absorbing(keep[a]) ? 1 : 0;
    if (absorbing[a]) continue;
    for (int b = 0; b < m; ++b) q(a, b) = gen.rate(keep[a], keep[b]);
  }
  return Generator(std::move(states), std::move(q), std::move(absorbing));
}

}  // namespace csma
