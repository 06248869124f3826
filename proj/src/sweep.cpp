#include "csma/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csma/errors.hpp"
#include "csma/hitting.hpp"
#include "csma/mixing.hpp"
#include "csma/spectral.hpp"

namespace csma {

namespace {

// Sup distance, over a scaled time grid, between the exact law of T / E[T]
// and its closed-form limit. The grid starts strictly after zero because the
// limit may carry an atom there.
double limit_law_distance(const PartiteNetwork& net, const HittingQuery& q) {
  const QueryLimit limit = query_limit_law(net, q);
  if (limit.kind == LimitKind::degenerate)
    throw UnsupportedCaseError(
        "scaled transition time concentrates at zero; no limit comparison available");

  const Generator restricted = restrict_reachable(build_generator(net, {q.to}), q.from);
  const TransientPropagator propagator(restricted);
  const int target = restricted.index_of(q.to);
  const double mean = mean_hitting_time(build_generator(net), q);

  double x_max = 20.0;
  if (limit.law) x_max = std::max(x_max, 20.0 / limit.law->p_star);
  constexpr int kGridPoints = 2000;
  double sup = 0.0;
  for (int j = 1; j <= kGridPoints; ++j) {
    const double x = x_max * j / kGridPoints;
    const double exact =
        propagator.distribution_at(q.from, x * mean).probability(static_cast<std::size_t>(target));
    const double limiting = limit.law ? limit_law_cdf(*limit.law, x) : -std::expm1(-x);
    sup = std::max(sup, std::abs(exact - limiting));
  }
  return sup;
}

void validate(const SweepSpec& spec) {
  if (spec.nus.size() < 2) throw ValidationError("sweep needs at least two nu values");
  for (std::size_t i = 0; i < spec.nus.size(); ++i) {
    if (!(spec.nus[i] > 0.0) || !std::isfinite(spec.nus[i]))
      throw ValidationError("sweep nu values must be positive and finite");
    if (i > 0 && !(spec.nus[i] > spec.nus[i - 1]))
      throw ValidationError("sweep nu values must be strictly increasing");
  }
  if (spec.kind == SweepKind::mixing && !(spec.epsilon > 0.0 && spec.epsilon < 0.25))
    throw ValidationError("mixing sweep needs epsilon in (0, 1/4)");
}

}  // namespace

SweepKind sweep_kind_from_name(const std::string& name) {
  if (name == "hitting") return SweepKind::hitting;
  if (name == "spectrum") return SweepKind::spectrum;
  if (name == "mixing") return SweepKind::mixing;
  if (name == "limit-law") return SweepKind::limit_law;
  throw ValidationError("unknown sweep kind: " + name);
}

std::string to_name(SweepKind kind) {
  switch (kind) {
    case SweepKind::hitting:
      return "hitting";
    case SweepKind::spectrum:
      return "spectrum";
    case SweepKind::mixing:
      return "mixing";
    case SweepKind::limit_law:
      return "limit-law";
  }
  throw ValidationError("unknown sweep kind");
}

SweepResult run_sweep(const SweepSpec& spec) {
  validate(spec);

  SweepResult result;
  result.spec = spec;
  switch (spec.kind) {
    case SweepKind::hitting:
      result.columns = {"nu", "mean_exact", "mean_asymptotic", "ratio"};
      result.fit_column = "mean_exact";
      break;
    case SweepKind::spectrum:
      result.columns = {"nu", "alpha_1", "mean_exact", "alpha_1_times_mean"};
      result.fit_column = "alpha_1";
      break;
    case SweepKind::mixing:
      result.columns = {"nu", "t_mix", "lower", "upper", "phi_C2", "phi_star"};
      result.fit_column = "t_mix";
      break;
    case SweepKind::limit_law:
      result.columns = {"nu", "mean_exact", "sup_distance"};
      result.fit_column = "sup_distance";
      break;
  }

  std::vector<std::pair<double, double>> fit_points;
  fit_points.reserve(spec.nus.size());
  const auto fit_slot = static_cast<std::size_t>(
      std::find(result.columns.begin(), result.columns.end(), result.fit_column) -
      result.columns.begin());

  for (const double nu : spec.nus) {
    const PartiteNetwork net(spec.sizes, nu);
    std::vector<double> row{nu};
    switch (spec.kind) {
      case SweepKind::hitting: {
        const HittingQuery q(spec.from, spec.to);
        const double exact = mean_hitting_time(build_generator(net), q);
        const double asym = asymptotic_mean(net, q).value_at(nu);
        row.insert(row.end(), {exact, asym, exact / asym});
        break;
      }
      case SweepKind::spectrum: {
        const std::vector<double> products = eigen_time_products(net, spec.from, spec.to);
        const PhaseType pt = absorption_spectrum(
            restrict_reachable(build_generator(net, {spec.to}), spec.from), spec.to);
        row.insert(row.end(), {pt.rates().front(), pt.mean(), products.front()});
        break;
      }
      case SweepKind::mixing: {
        const MixingReport report = make_mixing_report(net, spec.epsilon);
        // phi_star is NaN when the state space is too large to enumerate; it
        // serialises as an empty CSV cell / JSON null.
        row.insert(row.end(),
                   {report.t_mix, report.lower_bound.value(), report.upper_bound,
                    report.conductance_c2,
                    report.phi_star.value_or(std::numeric_limits<double>::quiet_NaN())});
        break;
      }
      case SweepKind::limit_law: {
        const HittingQuery q(spec.from, spec.to);
        const double exact = mean_hitting_time(build_generator(net), q);
        row.insert(row.end(), {exact, limit_law_distance(net, q)});
        break;
      }
    }
    fit_points.emplace_back(nu, row[fit_slot]);
    result.rows.push_back(std::move(row));
  }

  result.fit = fit_power_law(fit_points);
  return result;
}

}  // namespace csma
