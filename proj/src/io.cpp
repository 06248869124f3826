#include "csma/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "csma/errors.hpp"
#include "csma/stats.hpp"

namespace csma::io {

namespace {

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("invalid JSON in " + path + ": " + e.what());
  }
}

const nlohmann::json& require_field(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ValidationError(std::string("missing field: ") + key);
  return j.at(key);
}

std::vector<int> parse_int_array(const nlohmann::json& j, const char* key) {
  const nlohmann::json& arr = require_field(j, key);
  if (!arr.is_array() || arr.empty())
    throw ValidationError(std::string(key) + " must be a nonempty array");
  std::vector<int> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number_integer())
      throw ValidationError(std::string(key) + " entries must be integers");
    out.push_back(v.get<int>());
  }
  return out;
}

double parse_number(const nlohmann::json& j, const char* key) {
  const nlohmann::json& v = require_field(j, key);
  if (!v.is_number()) throw ValidationError(std::string(key) + " must be a number");
  return v.get<double>();
}

std::string parse_string(const nlohmann::json& j, const char* key) {
  const nlohmann::json& v = require_field(j, key);
  if (!v.is_string()) throw ValidationError(std::string(key) + " must be a string");
  return v.get<std::string>();
}

nlohmann::json report_header(const char* command, const PartiteNetwork& net) {
  return {{"schema_version", kSchemaVersion}, {"command", command}, {"network", network_json(net)}};
}

nlohmann::json simulation_json(const mc::SampleSet& samples) {
  const SampleStats stats = sample_stats(samples.values);
  return {{"n", samples.meta.n},
          {"seed", samples.meta.seed},
          {"mean", stats.mean},
          {"std_error", stats.std_error}};
}

}  // namespace

NetworkSpecFile parse_network_json(const nlohmann::json& j) {
  NetworkSpecFile spec;
  spec.sizes = parse_int_array(j, "sizes");
  spec.nu = parse_number(j, "nu");
  return spec;
}

NetworkSpecFile parse_network_file(const std::string& path) {
  return parse_network_json(load_json_file(path));
}

SweepSpec parse_sweep_json(const nlohmann::json& j) {
  SweepSpec spec;
  spec.sizes = parse_int_array(j, "sizes");
  spec.kind = sweep_kind_from_name(parse_string(j, "kind"));

  const nlohmann::json& nus = require_field(j, "nus");
  if (!nus.is_array()) throw ValidationError("nus must be an array");
  for (const auto& v : nus) {
    if (!v.is_number()) throw ValidationError("nus entries must be numbers");
    spec.nus.push_back(v.get<double>());
  }

  if (spec.kind == SweepKind::mixing) {
    if (j.contains("epsilon")) spec.epsilon = parse_number(j, "epsilon");
  } else {
    spec.from = agg_state_from_label(parse_string(j, "from"));
    spec.to = agg_state_from_label(parse_string(j, "to"));
  }
  return spec;
}

SweepSpec parse_sweep_file(const std::string& path) {
  return parse_sweep_json(load_json_file(path));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// log_weight is the normalised log probability, so probability =
// exp(log_weight) holds exactly row by row.
void write_distribution_csv(std::ostream& os, const Distribution& dist) {
  os << "state,log_weight,probability\n";
  for (std::size_t i = 0; i < dist.size(); ++i)
    os << to_label(dist.states()[i]) << ',' << format_double(dist.log_probability(i)) << ','
       << format_double(dist.probability(i)) << '\n';
}

// The product column stays empty when the killed chain is not a path from
// the queried start (no sum-of-exponentials reading of the spectrum).
void write_spectrum_csv(std::ostream& os, const PhaseType& pt,
                        const std::vector<double>& products) {
  if (!products.empty() && static_cast<int>(products.size()) != pt.order())
    throw ValidationError("spectrum CSV needs one product per eigenvalue");
  os << "index,eigenvalue,product_with_mean_hitting_time\n";
  for (int i = 0; i < pt.order(); ++i) {
    os << (i + 1) << ',' << format_double(pt.rates()[i]) << ',';
    if (!products.empty()) os << format_double(products[i]);
    os << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  for (std::size_t i = 0; i < result.columns.size(); ++i) {
    if (i) os << ',';
    os << result.columns[i];
  }
  os << '\n';
  for (const auto& row : result.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      if (!std::isnan(row[i])) os << format_double(row[i]);
    }
    os << '\n';
  }
}

void write_samples_csv(std::ostream& os, const std::vector<double>& values) {
  os << "index,value\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    os << i << ',' << format_double(values[i]) << '\n';
}

nlohmann::json network_json(const PartiteNetwork& net) {
  return {{"sizes", net.sizes()}, {"nu", net.nu()}};
}

namespace {

template <class State>
nlohmann::json distribution_json_impl(const BasicDistribution<State>& dist) {
  nlohmann::json states = nlohmann::json::array();
  nlohmann::json probs = nlohmann::json::array();
  for (std::size_t i = 0; i < dist.size(); ++i) {
    states.push_back(to_label(dist.states()[i]));
    probs.push_back(dist.probability(i));
  }
  return {{"states", states}, {"probabilities", probs}};
}

}  // namespace

nlohmann::json distribution_json(const Distribution& dist) {
  return distribution_json_impl(dist);
}

nlohmann::json distribution_json(const FullDistribution& dist) {
  return distribution_json_impl(dist);
}

nlohmann::json stationary_report(const PartiteNetwork& net, const Distribution& dist) {
  nlohmann::json j = report_header("stationary", net);
  j["distribution"] = distribution_json(dist);
  return j;
}

nlohmann::json hitting_report(const PartiteNetwork& net, const HittingQuery& q,
                              double mean_exact,
                              const std::optional<AsymptoticLaw>& asymptotic,
                              const std::optional<mc::SampleSet>& simulation) {
  nlohmann::json j = report_header("hitting", net);
  j["from"] = to_label(q.from);
  j["to"] = to_label(q.to);
  j["mean_exact"] = mean_exact;
  if (asymptotic) {
    const double value = asymptotic->value_at(net.nu());
    j["asymptotic"] = {{"coefficient", asymptotic->coefficient},
                       {"exponent", asymptotic->exponent},
                       {"value", value},
                       {"ratio", mean_exact / value}};
  } else {
    j["asymptotic"] = nullptr;
  }
  if (simulation) j["simulation"] = simulation_json(*simulation);
  return j;
}

nlohmann::json spectrum_report(const PartiteNetwork& net, const AggState& from,
                               const AggState& to, const PhaseType& pt,
                               const std::vector<double>& alpha_times_mean,
                               bool gershgorin_disjoint) {
  nlohmann::json j = report_header("spectrum", net);
  j["from"] = to_label(from);
  j["to"] = to_label(to);
  j["rates"] = pt.rates();
  j["mean"] = pt.mean();
  // Empty means the killed chain is not a path from `from`, so the
  // sum-of-exponentials reading (and these products) does not apply.
  j["alpha_times_mean"] =
      alpha_times_mean.empty() ? nlohmann::json() : nlohmann::json(alpha_times_mean);
  j["gershgorin_disjoint"] = gershgorin_disjoint;
  return j;
}

nlohmann::json mixing_report_json(const PartiteNetwork& net, const MixingReport& report) {
  nlohmann::json j = report_header("mixing", net);
  j["epsilon"] = report.epsilon;
  j["t_mix"] = report.t_mix;
  j["upper_bound"] = report.upper_bound;
  j["lower_bound"] = report.lower_bound ? nlohmann::json(*report.lower_bound) : nullptr;
  j["conductance_c2"] = report.conductance_c2;
  j["phi_star"] = report.phi_star ? nlohmann::json(*report.phi_star) : nullptr;
  j["component_order"] = report.component_order;
  return j;
}

nlohmann::json sweep_report(const SweepResult& result) {
  nlohmann::json j{{"schema_version", kSchemaVersion},
                   {"command", "sweep"},
                   {"kind", to_name(result.spec.kind)},
                   {"sizes", result.spec.sizes},
                   {"columns", result.columns},
                   {"rows", result.rows},
                   {"fit",
                    {{"column", result.fit_column},
                     {"exponent", result.fit.exponent},
                     {"coefficient", result.fit.coefficient},
                     {"r_squared", result.fit.r_squared}}}};
  if (result.spec.kind == SweepKind::mixing) {
    j["epsilon"] = result.spec.epsilon;
  } else {
    j["from"] = to_label(result.spec.from);
    j["to"] = to_label(result.spec.to);
  }
  return j;
}

nlohmann::json limit_law_report(const PartiteNetwork& net, const HittingQuery& q,
                                const QueryLimit& limit,
                                const std::optional<mc::SampleSet>& simulation,
                                std::optional<double> ks) {
  nlohmann::json j = report_header("limit-law", net);
  j["from"] = to_label(q.from);
  j["to"] = to_label(q.to);
  switch (limit.kind) {
    case LimitKind::exponential:
      j["kind"] = "exponential";
      break;
    case LimitKind::geometric_sum:
      j["kind"] = "geometric-sum";
      break;
    case LimitKind::degenerate:
      j["kind"] = "degenerate";
      break;
  }
  if (limit.law) {
    j["law"] = {{"p_star", limit.law->p_star},
                {"indicator", limit.law->indicator},
                {"mean_m", limit.law->mean_m()}};
  } else {
    j["law"] = nullptr;
  }
  if (simulation) {
    j["simulation"] = simulation_json(*simulation);
    if (ks) {
      j["simulation"]["ks"] = *ks;
      j["simulation"]["ks_critical_5pct"] = mc::ks_critical_value(simulation->meta.n, 0.05);
    }
  }
  return j;
}

}  // namespace csma::io
