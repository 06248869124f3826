#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "csma/hitting.hpp"
#include "csma/mixing.hpp"
#include "csma/model.hpp"
#include "csma/montecarlo.hpp"
#include "csma/network.hpp"
#include "csma/spectral.hpp"
#include "csma/sweep.hpp"

namespace csma::io {

// Version tag stamped into every JSON report.
inline constexpr const char* kSchemaVersion = "1";

struct NetworkSpecFile {
  std::vector<int> sizes;
  double nu = 0.0;
};

// Network spec files: {"sizes": [2, 3], "nu": 1.5}.
[[nodiscard]] NetworkSpecFile parse_network_json(const nlohmann::json& j);
[[nodiscard]] NetworkSpecFile parse_network_file(const std::string& path);

// Sweep spec files: {"sizes": [...], "nus": [...], "kind": "hitting",
// "from": "1:2", "to": "2:3", "epsilon": 0.01}. `from`/`to` are required for
// every kind except mixing; `epsilon` applies to mixing only.
[[nodiscard]] SweepSpec parse_sweep_json(const nlohmann::json& j);
[[nodiscard]] SweepSpec parse_sweep_file(const std::string& path);

// Doubles rendered with enough digits to round-trip exactly.
[[nodiscard]] std::string format_double(double v);

void write_distribution_csv(std::ostream& os, const Distribution& dist);
void write_spectrum_csv(std::ostream& os, const PhaseType& pt,
                        const std::vector<double>& products);
void write_sweep_csv(std::ostream& os, const SweepResult& result);
void write_samples_csv(std::ostream& os, const std::vector<double>& values);

[[nodiscard]] nlohmann::json network_json(const PartiteNetwork& net);
[[nodiscard]] nlohmann::json distribution_json(const Distribution& dist);
[[nodiscard]] nlohmann::json distribution_json(const FullDistribution& dist);

[[nodiscard]] nlohmann::json stationary_report(const PartiteNetwork& net,
                                               const Distribution& dist);

// `asymptotic` is absent when no leading-order form is available for the
// query; `simulation` is attached when the caller sampled the time as well.
[[nodiscard]] nlohmann::json hitting_report(const PartiteNetwork& net, const HittingQuery& q,
                                            double mean_exact,
                                            const std::optional<AsymptoticLaw>& asymptotic,
                                            const std::optional<mc::SampleSet>& simulation);

[[nodiscard]] nlohmann::json spectrum_report(const PartiteNetwork& net, const AggState& from,
                                             const AggState& to, const PhaseType& pt,
                                             const std::vector<double>& alpha_times_mean,
                                             bool gershgorin_disjoint);

[[nodiscard]] nlohmann::json mixing_report_json(const PartiteNetwork& net,
                                                const MixingReport& report);

[[nodiscard]] nlohmann::json sweep_report(const SweepResult& result);

// `ks` is the sample KS distance against the closed-form CDF, present only
// when a simulation ran.
[[nodiscard]] nlohmann::json limit_law_report(const PartiteNetwork& net, const HittingQuery& q,
                                              const QueryLimit& limit,
                                              const std::optional<mc::SampleSet>& simulation,
                                              std::optional<double> ks);

}  // namespace csma::io
