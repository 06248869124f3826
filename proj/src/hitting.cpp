#include "csma/hitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "csma/detail/numeric.hpp"
#include "csma/errors.hpp"
#include "csma/model.hpp"

namespace csma {

namespace {

// Leading term (coefficient, exponent) of one upward step l -> l+1 on the
// two-branch line: the step mean is sum_{n <= l} pi_n / (q(l,l+1) pi_l), and
// the dominant summand is the heaviest state on or below l, which is the far
// leaf of the rival branch while it still outweighs level l.
struct StepTerm {
  double coefficient = 0.0;
  int exponent = 0;
};

StepTerm upward_step_term(int own, int rival, int l) {
  StepTerm t;
  if (l < rival) {
    t.coefficient = std::exp(detail::log_factorial(own - l - 1) + detail::log_factorial(l) -
                             detail::log_factorial(own));
    t.exponent = rival - l - 1;
  } else if (l == rival && rival > 0) {
    t.coefficient =
        (1.0 + std::exp(detail::log_factorial(rival) + detail::log_factorial(own - rival) -
                        detail::log_factorial(own))) /
        (own - rival);
    t.exponent = -1;
  } else {
    t.coefficient = 1.0 / (own - l);
    t.exponent = -1;
  }
  return t;
}

}  // namespace

HittingQuery::HittingQuery(AggState from_state, AggState to_state)
    : from(from_state), to(to_state) {
  if (from == to) throw ValidationError("hitting query needs from != to");
}

double AsymptoticLaw::value_at(double nu) const {
  return coefficient * std::pow(nu, exponent);
}

double mean_hitting_time(const Generator& gen, const HittingQuery& q) {
  const int target = gen.index_of(q.to);
  const int source = gen.index_of(q.from);
  const int n = gen.size();

  // The system (-T) h = 1 is nonsingular exactly when the target can be
  // reached from every transient state, which is a graph property; deciding
  // it structurally keeps ill conditioning from masquerading as
  // unreachability. Walk the transition graph backwards from the target.
  std::vector<char> reaches(static_cast<std::size_t>(n), 0);
  std::deque<int> frontier{target};
  reaches[static_cast<std::size_t>(target)] = 1;
  while (!frontier.empty()) {
    const int y = frontier.front();
    frontier.pop_front();
    for (int x = 0; x < n; ++x)
      if (!reaches[static_cast<std::size_t>(x)] && gen.rate(x, y) > 0.0) {
        reaches[static_cast<std::size_t>(x)] = 1;
        frontier.push_back(x);
      }
  }
  for (int i = 0; i < n; ++i)
    if (!reaches[static_cast<std::size_t>(i)])
      throw SingularSystemError("mean hitting time: system singular, target " + to_label(q.to) +
                                " unreachable from some state");

  std::vector<int> transient;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    if (i == target) continue;
    slot[i] = static_cast<int>(transient.size());
    transient.push_back(i);
  }
  const int m = static_cast<int>(transient.size());
  Eigen::MatrixXd neg_t(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) neg_t(a, b) = -gen.rate(transient[a], transient[b]);

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(neg_t);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
  Eigen::VectorXd h = lu.solve(ones);
  // Iterative refinement (reusing the factorization) recovers the digits the
  // plain solve loses on the ill-conditioned systems of large activation
  // rates.
  for (int round = 0; round < 2; ++round) h += lu.solve(ones - neg_t * h);
  const double mean = h[slot[source]];
  if (!std::isfinite(mean) || mean <= 0.0)
    throw ConditioningError("mean hitting time solve produced a non-positive value");
  return mean;
}

double bd_step_mean(const PartiteNetwork& net, const AggState& from, const AggState& to) {
  if (net.components() > 2)
    throw StructureError("step means need a birth-death chain (at most two components)");
  const Generator gen = build_generator(net);
  const int i = gen.index_of(from);
  const int j = gen.index_of(to);
  const double rate = gen.rate(i, j);
  if (rate <= 0.0)
    throw ValidationError("states " + to_label(from) + " and " + to_label(to) +
                          " are not adjacent");

  // Mean one-step passage time across an edge of a reversible tree chain:
  // pi(from's side of the edge) / (pi(from) * rate), in log space.
  const Distribution pi = stationary_agg(net);
  std::vector<std::uint8_t> side(gen.size(), 0);
  std::deque<int> frontier{i};
  side[i] = 1;
  while (!frontier.empty()) {
    const int x = frontier.front();
    frontier.pop_front();
    for (const auto& [y, r] : gen.neighbors(x)) {
      if (x == i && y == j) continue;
      if (!side[y]) {
        side[y] = 1;
        frontier.push_back(y);
      }
    }
  }
  double log_side = detail::kNegInf;
  for (int x = 0; x < gen.size(); ++x)
    if (side[x]) log_side = detail::log_add(log_side, pi.log_weights()[x]);
  return std::exp(log_side - pi.log_weights()[i] - std::log(rate));
}

AsymptoticLaw asymptotic_mean(const PartiteNetwork& net, const HittingQuery& q) {
  const int K = net.components();
  // agg_index validates membership.
  (void)agg_index(net, q.from);
  (void)agg_index(net, q.to);

  const bool from_center = q.from.is_center();
  const bool to_center = q.to.is_center();

  // Downward within one branch (the chain cannot leave the branch before
  // arrival): dominated by the last step l2+1 -> l2.
  if (!from_center && (to_center || q.to.component == q.from.component) &&
      (to_center ? 0 : q.to.level) < q.from.level) {
    const int L = net.size(q.from.component);
    const int l2 = to_center ? 0 : q.to.level;
    AsymptoticLaw law;
    law.coefficient = std::exp(detail::log_factorial(l2) + detail::log_factorial(L - l2 - 1) -
                               detail::log_factorial(L));
    law.exponent = L - l2 - 1;
    return law;
  }

  // Upward within one branch (or from the center), only on a birth-death
  // line: leading term of the step-mean sum.
  if (!to_center && (from_center || q.from.component == q.to.component) &&
      (from_center ? 0 : q.from.level) < q.to.level) {
    if (K > 2)
      throw UnsupportedCaseError(
          "same-branch upward asymptotics are only covered for one or two components");
    const int own = net.size(q.to.component);
    const int rival = K == 2 ? net.size(3 - q.to.component) : -1;
    const int l1 = from_center ? 0 : q.from.level;
    AsymptoticLaw law;
    law.exponent = std::numeric_limits<int>::min();
    for (int l = l1; l < q.to.level; ++l) {
      const StepTerm t = upward_step_term(own, rival, l);
      if (t.exponent > law.exponent) {
        law.exponent = t.exponent;
        law.coefficient = t.coefficient;
      } else if (t.exponent == law.exponent) {
        law.coefficient += t.coefficient;
      }
    }
    return law;
  }

  // Cross-branch: escape from the dominant rival branches governs the time;
  // the target level only enters at lower order.
  if (!from_center && !to_center && q.from.component != q.to.component) {
    const EscapeParams esc = escape_params(net, q.from.component, q.to.component);
    AsymptoticLaw law;
    law.coefficient = (esc.indicator ? 1.0 / esc.l_star : 0.0) +
                      static_cast<double>(esc.k_star.size()) / net.size(q.to.component);
    law.exponent = esc.l_star - 1;
    return law;
  }

  throw UnsupportedCaseError("no covered asymptotic case for query " + to_label(q.from) +
                             " -> " + to_label(q.to));
}

EscapeParams escape_params(const PartiteNetwork& net, int k1, int k2) {
  const int K = net.components();
  if (K < 2) throw ValidationError("escape parameters need at least two components");
  if (k1 < 1 || k1 > K || k2 < 1 || k2 > K)
    throw ValidationError("component index out of range");
  if (k1 == k2) throw ValidationError("escape parameters need k1 != k2");

  EscapeParams esc;
  for (int k = 1; k <= K; ++k) {
    if (k == k2) continue;
    esc.l_star = std::max(esc.l_star, net.size(k));
  }
  for (int k = 1; k <= K; ++k)
    if (k != k2 && net.size(k) == esc.l_star) esc.k_star.push_back(k);
  const double rivals = static_cast<double>(esc.k_star.size()) * esc.l_star;
  esc.p_star = rivals / (rivals + net.size(k2));
  esc.indicator = std::find(esc.k_star.begin(), esc.k_star.end(), k1) != esc.k_star.end();
  esc.mean_m = (esc.indicator ? 1.0 : 0.0) + esc.p_star / (1.0 - esc.p_star);
  return esc;
}

double excursion_pmf(const PartiteNetwork& net, int k2, const std::vector<int>& counts) {
  const int K = net.components();
  if (k2 < 1 || k2 > K) throw ValidationError("component index out of range");
  if (static_cast<int>(counts.size()) != K)
    throw ValidationError("excursion counts need one entry per component");
  if (counts[k2 - 1] != 0)
    throw ValidationError("excursion counts must be zero for the target branch");
  int total = 0;
  for (int c : counts) {
    if (c < 0) throw ValidationError("excursion counts must be nonnegative");
    total += c;
  }

  // Each visit to the center picks branch k with probability L_k / L; the
  // run ends on the first pick of k2.
  const double log_l = std::log(static_cast<double>(net.total_nodes()));
  double logp = std::log(static_cast<double>(net.size(k2))) - log_l +
                detail::log_factorial(total);
  for (int k = 1; k <= K; ++k) {
    if (k == k2) continue;
    const int c = counts[k - 1];
    logp += c * (std::log(static_cast<double>(net.size(k))) - log_l) -
            detail::log_factorial(c);
  }
  return std::exp(logp);
}

double limit_law_cdf(const LimitLaw& law, double x) {
  if (!(law.p_star > 0.0 && law.p_star < 1.0))
    throw ValidationError("limit law needs p_star in (0,1)");
  if (!(x >= 0.0)) throw ValidationError("limit law CDF needs x >= 0");
  if (law.indicator) return -std::expm1(-x);
  return (1.0 - law.p_star) + law.p_star * -std::expm1(-law.p_star * x);
}

QueryLimit query_limit_law(const PartiteNetwork& net, const HittingQuery& q) {
  (void)agg_index(net, q.from);
  (void)agg_index(net, q.to);
  QueryLimit out;
  const bool from_center = q.from.is_center();
  const bool to_center = q.to.is_center();
  if (!from_center && !to_center && q.from.component != q.to.component) {
    const EscapeParams esc = escape_params(net, q.from.component, q.to.component);
    out.kind = LimitKind::geometric_sum;
    out.law = LimitLaw{esc.p_star, esc.indicator};
    return out;
  }
  const int from_level = from_center ? 0 : q.from.level;
  const int to_level = to_center ? 0 : q.to.level;
  out.kind = from_level > to_level ? LimitKind::exponential : LimitKind::degenerate;
  return out;
}

}  // namespace csma
