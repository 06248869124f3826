#include "csma/validation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "csma/generator.hpp"
#include "csma/hitting.hpp"
#include "csma/mixing.hpp"
#include "csma/model.hpp"
#include "csma/montecarlo.hpp"
#include "csma/network.hpp"
#include "csma/rng.hpp"
#include "csma/spectral.hpp"
#include "csma/stats.hpp"

namespace csma {

namespace {

struct CheckLog {
  std::ostream& os;
  int passed = 0;
  int total = 0;

  // Passes when lo <= value <= hi.
  void check(const char* name, double value, double lo, double hi) {
    const bool ok = value >= lo && value <= hi;
    ++total;
    passed += ok ? 1 : 0;
    char line[160];
    std::snprintf(line, sizeof(line), "[%s] %-28s value=%.12e range=[%.12e, %.12e]\n",
                  ok ? "ok  " : "FAIL", name, value, lo, hi);
    os << line;
  }
};

double excursion_gof_p_value() {
  const PartiteNetwork net({2, 3, 4}, 1.0);
  constexpr int k2 = 3;
  constexpr std::uint64_t n = 5000;
  const auto runs = mc::empirical_excursions(net, k2, n, 99);

  constexpr int cap = 3;  // joint bins over counts <= cap, remainder pooled
  std::vector<double> observed((cap + 1) * (cap + 1) + 1, 0.0);
  std::vector<double> expected(observed.size(), 0.0);
  for (const auto& run : runs) {
    if (run[0] <= cap && run[1] <= cap)
      observed[run[0] * (cap + 1) + run[1]] += 1.0;
    else
      observed.back() += 1.0;
  }
  double in_range = 0.0;
  for (int a = 0; a <= cap; ++a)
    for (int b = 0; b <= cap; ++b) {
      const double p = excursion_pmf(net, k2, {a, b, 0});
      expected[a * (cap + 1) + b] = static_cast<double>(n) * p;
      in_range += p;
    }
  expected.back() = static_cast<double>(n) * (1.0 - in_range);
  return chi_square_gof(observed, expected).p_value;
}

}  // namespace

bool run_validation_suite(std::ostream& os) {
  CheckLog log{os};

  {
    CounterRng a = CounterRng::stream(2024, 0);
    const double u0 = a.next_unit();
    log.check("rng-reference-stream-0", u0, 0.1960256341236975, 0.1960256341236975);
    CounterRng b = CounterRng::stream(2024, 1);
    const double u1 = b.next_unit();
    log.check("rng-reference-stream-1", u1, 0.26352809061999954, 0.26352809061999954);
  }

  {
    const PartiteNetwork net({2, 3}, 0.7);
    const Distribution pi = stationary_agg(net);
    double total = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) total += pi.probability(i);
    log.check("stationary-normalization", total, 1.0 - 1e-14, 1.0 + 1e-14);

    const double center_closed =
        1.0 / (1.0 + (std::pow(1.7, 2) - 1.0) + (std::pow(1.7, 3) - 1.0));
    const double center = pi.probability(static_cast<std::size_t>(agg_index(net, AggState::center())));
    log.check("stationary-center-value", center / center_closed - 1.0, -1e-13, 1e-13);
  }

  {
    const PartiteNetwork net({2, 2, 3}, 1.3);
    const double tv = tv_distance(aggregate(stationary_full(net), net), stationary_agg(net));
    log.check("aggregation-consistency", tv, 0.0, 1e-14);
  }

  {
    const PartiteNetwork net({3}, 2.0);
    const Generator killed = build_generator(net, {AggState::center()});
    const PhaseType pt = absorption_spectrum(killed, AggState::center());
    const double exact =
        mean_hitting_time(build_generator(net), HittingQuery(AggState::branch(1, 3), AggState::center()));
    log.check("spectrum-mean-identity", pt.mean() / exact - 1.0, -1e-9, 1e-9);
  }

  {
    const PartiteNetwork net({4}, 0.8);
    const Generator killed = build_generator(net, {AggState::center()});
    const PhaseType pt = absorption_spectrum(killed, AggState::center());
    std::vector<int> transient;
    for (int i = 0; i < killed.size(); ++i)
      if (!killed.is_absorbing(i)) transient.push_back(i);
    Eigen::MatrixXd block(transient.size(), transient.size());
    for (std::size_t a = 0; a < transient.size(); ++a)
      for (std::size_t b = 0; b < transient.size(); ++b)
        block(a, b) = killed.rate(transient[a], transient[b]);
    const Eigen::EigenSolver<Eigen::MatrixXd> es(block);
    std::vector<double> alpha(transient.size());
    for (std::size_t i = 0; i < transient.size(); ++i) alpha[i] = -es.eigenvalues()[i].real();
    std::sort(alpha.begin(), alpha.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i)
      worst = std::max(worst, std::abs(alpha[i] / pt.rates()[i] - 1.0));
    log.check("spectrum-vs-generator", worst, 0.0, 1e-8);
  }

  {
    const PhaseType pt({1.0, 2.0, 4.0});
    log.check("phase-type-cdf-at-mean", phase_type_cdf(pt, pt.mean()), 0.59, 0.61);
  }

  {
    const PartiteNetwork net({4}, 0.9);
    const double exact =
        mean_hitting_time(build_generator(net), HittingQuery(AggState::branch(1, 4), AggState::center()));
    double steps = 0.0;
    for (int l = 4; l >= 1; --l)
      steps += bd_step_mean(net, AggState::branch(1, l),
                            l == 1 ? AggState::center() : AggState::branch(1, l - 1));
    log.check("hitting-step-decomposition", steps / exact - 1.0, -1e-12, 1e-12);
  }

  {
    const PartiteNetwork net({2, 3}, 1e4);
    const HittingQuery q(AggState::branch(1, 2), AggState::branch(2, 3));
    const double exact = mean_hitting_time(build_generator(net), q);
    const double asym = asymptotic_mean(net, q).value_at(net.nu());
    log.check("asymptotic-ratio-cross", exact / asym, 0.99, 1.01);
  }

  {
    const EscapeParams esc = escape_params(PartiteNetwork({3, 3, 2}, 1.0), 1, 3);
    log.check("escape-p-star", esc.p_star - 0.75, -1e-15, 1e-15);
    log.check("escape-mean-m", esc.mean_m - 4.0, -1e-12, 1e-12);
    const LimitLaw law{esc.p_star, esc.indicator};
    log.check("limit-cdf-tail", limit_law_cdf(law, 60.0), 1.0 - 1e-12, 1.0);
  }

  {
    const PartiteNetwork net({2, 3}, 1.0);
    const MixingReport report = make_mixing_report(net, 0.05);
    log.check("mixing-sandwich", report.t_mix, report.lower_bound.value(), report.upper_bound);
  }

  {
    const PartiteNetwork net({2, 2}, 1.5);
    double worst = -1.0;
    for (const double t : {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0})
      worst = std::max(worst, worst_case_distance(net, 2.0 * t) - worst_case_distance(net, t));
    log.check("distance-monotone", worst, -1.0, 1e-9);
  }

  {
    const PartiteNetwork net({2, 3}, 2.0);
    const ConductanceStar star = conductance_star(net);
    log.check("conductance-consistency", conductance(net, star.minimizing_set) / star.value - 1.0,
              -1e-12, 1e-12);
  }

  {
    const PartiteNetwork net({2, 3}, 1.0);
    const HittingQuery q(AggState::branch(1, 2), AggState::branch(2, 3));
    const Generator gen = build_generator(net);
    const double exact = mean_hitting_time(gen, q);
    const mc::SampleSet samples = mc::sample_hitting_time(gen, q, 4000, 20240817);
    const SampleStats stats = sample_stats(samples.values);
    log.check("mc-hitting-z-score", (stats.mean - exact) / stats.std_error, -4.0, 4.0);

    const mc::SampleSet wide = mc::sample_hitting_time(gen, q, 500, 5, 4);
    const mc::SampleSet narrow = mc::sample_hitting_time(gen, q, 500, 5, 1);
    double diff = 0.0;
    for (std::size_t i = 0; i < wide.values.size(); ++i)
      diff = std::max(diff, std::abs(wide.values[i] - narrow.values[i]));
    log.check("mc-worker-invariance", diff, 0.0, 0.0);
  }

  {
    const EscapeParams esc = escape_params(PartiteNetwork({2, 3}, 1.0), 1, 2);
    const LimitLaw law{esc.p_star, esc.indicator};
    const mc::SampleSet samples = mc::sample_limit_law(law, 20000, 7);
    const double ks = mc::ks_statistic(
        samples.values, [&](double x) { return x < 0.0 ? 0.0 : limit_law_cdf(law, x); });
    log.check("mc-limit-law-ks", ks, 0.0, mc::ks_critical_value(20000, 0.01));
  }

  log.check("mc-excursion-gof", excursion_gof_p_value(), 1e-3, 1.0);

  char summary[64];
  std::snprintf(summary, sizeof(summary), "validation: %d/%d checks passed\n", log.passed,
                log.total);
  os << summary;
  return log.passed == log.total;
}

}  // namespace csma
