#include "csma/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "csma/detail/numeric.hpp"
#include "csma/errors.hpp"

namespace csma {

namespace {

constexpr double kRateGapGuard = 1e-9;

// Undirected transient adjacency of a killed chain (edges with a positive
// rate in either direction between two transient states).
std::vector<std::vector<int>> transient_adjacency(const Generator& gen,
                                                  const std::vector<int>& transient,
                                                  const std::vector<int>& slot) {
  std::vector<std::vector<int>> adj(transient.size());
  for (std::size_t a = 0; a < transient.size(); ++a) {
    const int i = transient[a];
    for (int j = 0; j < gen.size(); ++j) {
      if (j == i || slot[j] < 0) continue;
      if (gen.rate(i, j) > 0.0 || gen.rate(j, i) > 0.0)
        adj[a].push_back(slot[j]);
    }
  }
  return adj;
}

// Hop distances from the absorbing state through transient states.
std::vector<int> distances_from(const Generator& gen, int source,
                                const std::vector<int>& slot) {
  std::vector<int> dist(gen.size(), -1);
  std::deque<int> frontier{source};
  dist[source] = 0;
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop_front();
    for (int j = 0; j < gen.size(); ++j) {
      if (j == i || dist[j] >= 0) continue;
      if (gen.rate(i, j) > 0.0 || gen.rate(j, i) > 0.0) {
        if (i != source && slot[i] < 0) continue;  // do not walk through other absorbing states
        dist[j] = dist[i] + 1;
        frontier.push_back(j);
      }
    }
  }
  return dist;
}

struct KilledParts {
  std::vector<int> transient;  // gen indices
  std::vector<int> slot;       // gen index -> transient slot or -1
  int absorbing_index = -1;
};

KilledParts split_killed(const Generator& gen, const AggState& absorbing) {
  const int a = gen.index_of(absorbing);
  for (int i = 0; i < gen.size(); ++i)
    if (gen.is_absorbing(i) && i != a)
      throw ValidationError("chain has an absorbing state other than " + to_label(absorbing));
  KilledParts parts;
  parts.absorbing_index = a;
  parts.slot.assign(gen.size(), -1);
  for (int i = 0; i < gen.size(); ++i) {
    if (i == a) continue;
    parts.slot[i] = static_cast<int>(parts.transient.size());
    parts.transient.push_back(i);
  }
  if (parts.transient.empty()) throw ValidationError("killed chain has no transient state");
  return parts;
}

// Detailed-balance log weights over the transient states, one connected
// component at a time, anchored (log weight 0) at the state farthest from
// absorption.
std::vector<double> transient_log_theta(const Generator& gen, const KilledParts& parts) {
  const auto adj = transient_adjacency(gen, parts.transient, parts.slot);
  const auto dist = distances_from(gen, parts.absorbing_index, parts.slot);
  for (int i : parts.transient)
    if (dist[i] < 0)
      throw ValidationError("state " + to_label(gen.state(i)) + " cannot reach absorption");

  const int m = static_cast<int>(parts.transient.size());
  std::vector<double> logw(m, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::uint8_t> seen(m, 0);
  for (int s = 0; s < m; ++s) {
    if (seen[s]) continue;
    // Collect the component, then anchor at its max-distance state.
    std::vector<int> comp;
    std::deque<int> frontier{s};
    seen[s] = 1;
    while (!frontier.empty()) {
      const int x = frontier.front();
      frontier.pop_front();
      comp.push_back(x);
      for (int y : adj[x])
        if (!seen[y]) {
          seen[y] = 1;
          frontier.push_back(y);
        }
    }
    int anchor = comp.front();
    for (int x : comp)
      if (dist[parts.transient[x]] > dist[parts.transient[anchor]]) anchor = x;
    logw[anchor] = 0.0;
    std::deque<int> walk{anchor};
    while (!walk.empty()) {
      const int x = walk.front();
      walk.pop_front();
      for (int y : adj[x]) {
        if (!std::isnan(logw[y])) continue;
        const double fwd = gen.rate(parts.transient[x], parts.transient[y]);
        const double rev = gen.rate(parts.transient[y], parts.transient[x]);
        if (fwd <= 0.0 || rev <= 0.0)
          throw StructureError("transition between " + to_label(gen.state(parts.transient[x])) +
                               " and " + to_label(gen.state(parts.transient[y])) +
                               " has no reverse rate");
        logw[y] = logw[x] + std::log(fwd) - std::log(rev);
        walk.push_back(y);
      }
    }
  }
  return logw;
}

Eigen::MatrixXd symmetric_killed_matrix(const Generator& gen, const KilledParts& parts) {
  const int m = static_cast<int>(parts.transient.size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    const int i = parts.transient[a];
    g(a, a) = gen.total_outflow(i);
    for (int b = a + 1; b < m; ++b) {
      const int j = parts.transient[b];
      const double fwd = gen.rate(i, j);
      const double rev = gen.rate(j, i);
      if (fwd > 0.0 && rev > 0.0) {
        const double off = -std::exp(0.5 * (std::log(fwd) + std::log(rev)));
        g(a, b) = off;
        g(b, a) = off;
      } else if (fwd > 0.0 || rev > 0.0) {
        throw StructureError("transition between " + to_label(gen.state(i)) + " and " +
                             to_label(gen.state(j)) + " has no reverse rate");
      }
    }
  }
  return g;
}

// One inverse-iteration pass per step: refines the smallest eigenvalue of an
// SPD matrix to the accuracy of the linear solve instead of eps * ||G||.
double refine_smallest(const Eigen::MatrixXd& g, Eigen::VectorXd v) {
  const Eigen::LDLT<Eigen::MatrixXd> solver(g);
  if (solver.info() != Eigen::Success) return -1.0;
  double mu = 0.0;
  for (int pass = 0; pass < 4; ++pass) {
    Eigen::VectorXd w = solver.solve(v);
    const double norm = w.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) return -1.0;
    mu = norm;
    v = w / norm;
  }
  return 1.0 / mu;
}

}  // namespace

PhaseType::PhaseType(std::vector<double> rates) : rates_(std::move(rates)) {
  if (rates_.empty()) throw ValidationError("phase-type law needs at least one rate");
  std::sort(rates_.begin(), rates_.end());
  if (!(rates_.front() > 0.0))
    throw ValidationError("phase-type rates must be strictly positive");
}

double PhaseType::mean() const {
  double m = 0.0;
  for (double r : rates_) m += 1.0 / r;
  return m;
}

double phase_type_cdf(const PhaseType& pt, double t) {
  if (!(t >= 0.0)) throw ValidationError("phase-type CDF needs t >= 0");
  const auto& a = pt.rates();
  const int d = pt.order();
  for (int i = 0; i + 1 < d; ++i)
    if (a[i + 1] - a[i] < kRateGapGuard * a[i + 1])
      throw ConditioningError("phase-type rates nearly coincident; CDF weights ill-conditioned");
  double f = 0.0;
  for (int i = 0; i < d; ++i) {
    double w = 1.0;
    for (int j = 0; j < d; ++j)
      if (j != i) w *= a[j] / (a[j] - a[i]);
    f += w * -std::expm1(-a[i] * t);
  }
  return std::clamp(f, 0.0, 1.0);
}

SymmetrizedChain symmetrize(const Generator& gen, const AggState& absorbing) {
  const KilledParts parts = split_killed(gen, absorbing);
  SymmetrizedChain sym;
  sym.matrix = symmetric_killed_matrix(gen, parts);
  const auto logw = transient_log_theta(gen, parts);
  sym.theta.resize(logw.size());
  for (std::size_t i = 0; i < logw.size(); ++i) sym.theta[i] = std::exp(logw[i]);
  sym.transient_states.reserve(parts.transient.size());
  for (int i : parts.transient) sym.transient_states.push_back(gen.state(i));
  return sym;
}

std::vector<double> potential_coefficients(const Generator& gen) {
  int absorbing_index = -1;
  for (int i = 0; i < gen.size(); ++i) {
    if (!gen.is_absorbing(i)) continue;
    if (absorbing_index >= 0)
      throw StructureError("potential coefficients need exactly one absorbing state");
    absorbing_index = i;
  }
  if (absorbing_index < 0)
    throw StructureError("potential coefficients need exactly one absorbing state");

  const KilledParts parts = split_killed(gen, gen.state(absorbing_index));
  const auto adj = transient_adjacency(gen, parts.transient, parts.slot);
  const int m = static_cast<int>(parts.transient.size());

  // The transient graph must be a single path with absorption at one end.
  int end_count = 0;
  for (const auto& nb : adj) {
    if (nb.size() > 2) throw StructureError("transient states do not form a single path");
    if (nb.size() <= 1) ++end_count;
  }
  if (m > 1 && end_count != 2)
    throw StructureError("transient states do not form a single path");

  const auto dist = distances_from(gen, absorbing_index, parts.slot);
  int far = 0;
  for (int x = 0; x < m; ++x)
    if (dist[parts.transient[x]] > dist[parts.transient[far]]) far = x;
  if (dist[parts.transient[far]] != m)
    throw StructureError("absorbing state is not attached at a path end");

  const auto logw = transient_log_theta(gen, parts);
  // Walk the path from the far end toward absorption.
  std::vector<double> theta;
  theta.reserve(m);
  std::vector<std::uint8_t> used(m, 0);
  int cur = far;
  for (int step = 0; step < m; ++step) {
    theta.push_back(std::exp(logw[cur]));
    used[cur] = 1;
    for (int y : adj[cur])
      if (!used[y]) {
        cur = y;
        break;
      }
  }
  return theta;
}

PhaseType absorption_spectrum(const Generator& gen, const AggState& absorbing) {
  const SymmetrizedChain sym = symmetrize(gen, absorbing);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym.matrix);
  if (solver.info() != Eigen::Success)
    throw ConditioningError("symmetric eigensolve failed to converge");
  Eigen::VectorXd values = solver.eigenvalues();
  const double refined = refine_smallest(sym.matrix, solver.eigenvectors().col(0));
  if (refined > 0.0 && (values.size() == 1 || refined < values[1])) values[0] = refined;
  std::vector<double> rates(values.data(), values.data() + values.size());
  if (!(rates.front() > 0.0))
    throw ConditioningError("absorption spectrum not strictly positive");
  return PhaseType(std::move(rates));
}

std::vector<GershgorinDisc> gershgorin_discs(const SymmetrizedChain& sym) {
  const int m = static_cast<int>(sym.transient_states.size());
  std::vector<GershgorinDisc> discs(m);
  for (int i = 0; i < m; ++i) {
    discs[i].center = sym.matrix(i, i);
    double r = 0.0;
    for (int j = 0; j < m; ++j)
      if (j != i) r += std::abs(sym.matrix(i, j));
    discs[i].radius = r;
  }
  return discs;
}

bool discs_disjoint(const std::vector<GershgorinDisc>& discs) {
  for (std::size_t i = 0; i < discs.size(); ++i)
    for (std::size_t j = i + 1; j < discs.size(); ++j)
      if (std::abs(discs[i].center - discs[j].center) <= discs[i].radius + discs[j].radius)
        return false;
  return true;
}

bool disc_separated(const std::vector<GershgorinDisc>& discs, std::size_t i) {
  if (i >= discs.size()) throw ValidationError("disc index out of range");
  for (std::size_t j = 0; j < discs.size(); ++j)
    if (j != i &&
        std::abs(discs[i].center - discs[j].center) <= discs[i].radius + discs[j].radius)
      return false;
  return true;
}

TransientPropagator::TransientPropagator(Generator gen) : gen_(std::move(gen)) {
  const int n = gen_.size();
  slot_.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (gen_.is_absorbing(i)) {
      absorbing_.push_back(i);
    } else {
      slot_[i] = static_cast<int>(transient_.size());
      transient_.push_back(i);
    }
  }
  if (transient_.empty()) throw ValidationError("chain has no transient state");

  const int m = static_cast<int>(transient_.size());
  // Detailed-balance weights anchored at the first transient state of each
  // connected component; only differences ever enter the propagation.
  log_theta_.assign(m, std::numeric_limits<double>::quiet_NaN());
  for (int s = 0; s < m; ++s) {
    if (!std::isnan(log_theta_[s])) continue;
    log_theta_[s] = 0.0;
    std::deque<int> walk{s};
    while (!walk.empty()) {
      const int x = walk.front();
      walk.pop_front();
      const int i = transient_[x];
      for (const auto& [j, fwd] : gen_.neighbors(i)) {
        const int y = slot_[j];
        if (y < 0 || !std::isnan(log_theta_[y])) continue;
        const double rev = gen_.rate(j, i);
        if (rev <= 0.0)
          throw StructureError("transition between " + to_label(gen_.state(i)) + " and " +
                               to_label(gen_.state(j)) + " has no reverse rate");
        log_theta_[y] = log_theta_[x] + std::log(fwd) - std::log(rev);
        walk.push_back(y);
      }
    }
  }

  Eigen::MatrixXd s_mat = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    const int i = transient_[a];
    s_mat(a, a) = -gen_.total_outflow(i);
    for (int b = a + 1; b < m; ++b) {
      const int j = transient_[b];
      const double fwd = gen_.rate(i, j);
      const double rev = gen_.rate(j, i);
      if (fwd > 0.0 && rev > 0.0) {
        const double off = std::exp(0.5 * (std::log(fwd) + std::log(rev)));
        s_mat(a, b) = off;
        s_mat(b, a) = off;
      } else if (fwd > 0.0 || rev > 0.0) {
        throw StructureError("transition between " + to_label(gen_.state(i)) + " and " +
                             to_label(gen_.state(j)) + " has no reverse rate");
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s_mat);
  if (solver.info() != Eigen::Success)
    throw ConditioningError("symmetric eigensolve failed to converge");
  vectors_ = solver.eigenvectors();
  values_ = solver.eigenvalues();
}

std::vector<double> TransientPropagator::point_law(int x, double t) const {
  const int n = gen_.size();
  const int m = static_cast<int>(transient_.size());
  const int xs = slot_[x];
  std::vector<double> law(n, 0.0);
  if (xs < 0) {  // started absorbed
    law[x] = 1.0;
    return law;
  }
  for (int b = 0; b < m; ++b) {
    const double half = 0.5 * (log_theta_[b] - log_theta_[xs]);
    double s = 0.0;
    for (int mm = 0; mm < m; ++mm)
      s += vectors_(xs, mm) * vectors_(b, mm) * std::exp(values_[mm] * t);
    law[transient_[b]] = std::clamp(std::exp(std::min(half, 700.0)) * s, 0.0, 1.0);
  }
  for (int a : absorbing_) {
    double mass = 0.0;
    for (int mm = 0; mm < m; ++mm) {
      const double lam = values_[mm];
      const double integral = lam < 0.0 ? -std::expm1(lam * t) / -lam : t;
      double flow = 0.0;
      for (int b = 0; b < m; ++b) {
        const double rate = gen_.rate(transient_[b], a);
        if (rate > 0.0)
          flow += vectors_(b, mm) * rate *
                  std::exp(std::min(0.5 * (log_theta_[b] - log_theta_[xs]), 700.0));
      }
      mass += vectors_(xs, mm) * integral * flow;
    }
    law[a] = std::clamp(mass, 0.0, 1.0);
  }
  return law;
}

Distribution TransientPropagator::distribution_at(const AggState& init, double t) const {
  if (!(t >= 0.0)) throw ValidationError("transient law needs t >= 0");
  return Distribution::from_probabilities(gen_.states(), point_law(gen_.index_of(init), t));
}

Distribution TransientPropagator::distribution_at(const Distribution& init, double t) const {
  if (!(t >= 0.0)) throw ValidationError("transient law needs t >= 0");
  if (init.states() != gen_.states())
    throw ValidationError("initial distribution support does not match the chain");
  std::vector<double> law(gen_.size(), 0.0);
  for (int x = 0; x < gen_.size(); ++x) {
    const double px = init.probability(static_cast<std::size_t>(x));
    if (px == 0.0) continue;
    const auto part = point_law(x, t);
    for (int y = 0; y < gen_.size(); ++y) law[y] += px * part[y];
  }
  return Distribution::from_probabilities(gen_.states(), law);
}

double TransientPropagator::tv_from_stationary(int state_index, double t) const {
  if (!absorbing_.empty())
    throw ValidationError("distance to stationarity undefined for killed chains");
  const int m = static_cast<int>(transient_.size());
  const int xs = slot_[state_index];
  // The top eigenvalue (~0) carries the stationary law; summing only the
  // decaying terms computes the deviation directly.
  double tv = 0.0;
  for (int b = 0; b < m; ++b) {
    const double half = 0.5 * (log_theta_[b] - log_theta_[xs]);
    double s = 0.0;
    for (int mm = 0; mm + 1 < m; ++mm)
      s += vectors_(xs, mm) * vectors_(b, mm) * std::exp(values_[mm] * t);
    tv += std::abs(std::exp(std::min(half, 700.0)) * s);
  }
  return std::min(0.5 * tv, 1.0);
}

Distribution transient_distribution(const Generator& gen, const AggState& init, double t) {
  return TransientPropagator(gen).distribution_at(init, t);
}

Distribution transient_distribution(const Generator& gen, const Distribution& init, double t) {
  return TransientPropagator(gen).distribution_at(init, t);
}

std::vector<double> eigen_time_products(const PartiteNetwork& net, const AggState& from,
                                        const AggState& to) {
  const Generator gen = restrict_reachable(build_generator(net, {to}), from);
  if (!gen.contains(to))
    throw ValidationError("target " + to_label(to) + " unreachable from " + to_label(from));
  const PhaseType pt = absorption_spectrum(gen, to);

  // The sum-of-independent-exponentials reading of the products only holds
  // when the journey starts at the far end of the path.
  const auto theta = potential_coefficients(gen);
  const KilledParts parts = split_killed(gen, to);
  const auto dist = distances_from(gen, gen.index_of(to), parts.slot);
  int far = -1;
  for (int i = 0; i < gen.size(); ++i)
    if (i != gen.index_of(to) && (far < 0 || dist[i] > dist[far])) far = i;
  if (gen.state(far) != from)
    throw StructureError("start state " + to_label(from) + " is not the far end of the path");

  const double mean = pt.mean();
  std::vector<double> products;
  products.reserve(pt.rates().size());
  for (double a : pt.rates()) products.push_back(a * mean);
  return products;
}

}  // namespace csma
