#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "csma/errors.hpp"
#include "csma/generator.hpp"
#include "csma/hitting.hpp"
#include "csma/io.hpp"
#include "csma/mixing.hpp"
#include "csma/model.hpp"
#include "csma/montecarlo.hpp"
#include "csma/network.hpp"
#include "csma/spectral.hpp"
#include "csma/sweep.hpp"
#include "csma/validation.hpp"

namespace {

// Options shared by every subcommand that analyses one fixed network.
struct NetworkArgs {
  std::vector<int> sizes;
  std::optional<double> nu;
  std::string file;
};

// `nu_required` is false for commands whose answer does not depend on the
// activation rate (it then defaults to 1).
void add_network_options(CLI::App& cmd, NetworkArgs& args, bool nu_required = true) {
  auto* sizes = cmd.add_option("--sizes", args.sizes, "Component sizes, e.g. 2,3")
                    ->delimiter(',');
  auto* nu = cmd.add_option("--nu", args.nu, "Activation rate");
  auto* file = cmd.add_option("--network", args.file, "Network spec JSON file");
  file->excludes(sizes)->excludes(nu);
  if (nu_required) {
    nu->needs(sizes);
    sizes->needs(nu);
  }
}

csma::PartiteNetwork resolve_network(const NetworkArgs& args, bool nu_required = true) {
  if (!args.file.empty()) {
    const csma::io::NetworkSpecFile spec = csma::io::parse_network_file(args.file);
    return csma::PartiteNetwork(spec.sizes, spec.nu);
  }
  if (args.sizes.empty() || (nu_required && !args.nu))
    throw csma::ValidationError("provide either --network or both --sizes and --nu");
  return csma::PartiteNetwork(args.sizes, args.nu.value_or(1.0));
}

// Transient state at maximal graph distance from `to` (ties resolved toward
// the canonical order), the natural start for an escape spectrum.
csma::AggState farthest_state(const csma::PartiteNetwork& net, const csma::AggState& to) {
  const csma::Generator gen = csma::build_generator(net);
  std::vector<int> dist(gen.size(), -1);
  std::vector<int> queue{gen.index_of(to)};
  dist[queue.front()] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int x = queue[head];
    for (const auto& [y, rate] : gen.neighbors(x))
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
  }
  int best = gen.index_of(to);
  for (int i = 0; i < gen.size(); ++i)
    if (dist[i] > dist[best]) best = i;
  return gen.state(best);
}

void emit(const nlohmann::json& report) { std::cout << report.dump(2) << '\n'; }

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw csma::ValidationError("cannot open output file: " + path);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact analysis and simulation of hard-core activity dynamics on complete "
               "partite interference networks"};
  app.require_subcommand(1);
  int exit_code = 0;

  // --- stationary ---
  auto* stationary = app.add_subcommand("stationary", "Stationary law of the activity process");
  NetworkArgs stationary_net;
  add_network_options(*stationary, stationary_net);
  bool stationary_full_space = false;
  std::string stationary_csv;
  stationary->add_flag("--full", stationary_full_space,
                       "Also report the law over full activity states");
  stationary->add_option("--csv", stationary_csv, "Write the aggregated law as CSV");
  stationary->callback([&] {
    const csma::PartiteNetwork net = resolve_network(stationary_net);
    const csma::Distribution pi = csma::stationary_agg(net);
    nlohmann::json report = csma::io::stationary_report(net, pi);
    if (stationary_full_space)
      report["full_distribution"] = csma::io::distribution_json(csma::stationary_full(net));
    if (!stationary_csv.empty()) {
      auto out = open_output(stationary_csv);
      csma::io::write_distribution_csv(out, pi);
    }
    emit(report);
  });

  // --- hitting ---
  auto* hitting = app.add_subcommand("hitting", "Mean transition time between activity states");
  NetworkArgs hitting_net;
  add_network_options(*hitting, hitting_net);
  std::string hitting_from, hitting_to, hitting_sample_csv;
  std::uint64_t hitting_samples = 0, hitting_seed = 0;
  std::vector<std::uint64_t> hitting_simulate;
  int hitting_workers = 1;
  bool hitting_exact_only = false, hitting_asymptotic_only = false;
  hitting->add_option("--from", hitting_from, "Start state label, e.g. 1:2 or 0")->required();
  hitting->add_option("--to", hitting_to, "Target state label")->required();
  auto* hex = hitting->add_flag("--exact", hitting_exact_only, "Report the exact mean only");
  auto* hasym =
      hitting->add_flag("--asymptotic", hitting_asymptotic_only, "Report the leading term only");
  hex->excludes(hasym);
  auto* hs = hitting->add_option("--samples", hitting_samples, "Also simulate this many times");
  auto* hseed = hitting->add_option("--seed", hitting_seed, "Simulation seed");
  auto* hsim = hitting->add_option("--simulate", hitting_simulate, "Sample count and seed")
                   ->expected(2);
  hs->needs(hseed);
  hseed->needs(hs);
  hsim->excludes(hs)->excludes(hseed)->excludes(hex)->excludes(hasym);
  hs->excludes(hex)->excludes(hasym);
  hitting->add_option("--workers", hitting_workers, "Simulation worker threads");
  hitting->add_option("--sample-csv", hitting_sample_csv, "Write simulated times as CSV");
  hitting->callback([&] {
    const csma::PartiteNetwork net = resolve_network(hitting_net);
    const csma::HittingQuery q(csma::agg_state_from_label(hitting_from),
                               csma::agg_state_from_label(hitting_to));
    const csma::Generator gen = csma::build_generator(net);
    const double mean = csma::mean_hitting_time(gen, q);
    std::optional<csma::AsymptoticLaw> asymptotic;
    if (!hitting_exact_only) {
      try {
        asymptotic = csma::asymptotic_mean(net, q);
      } catch (const csma::UnsupportedCaseError&) {
        // Best-effort unless the leading term was explicitly requested.
        if (hitting_asymptotic_only) throw;
      }
    }
    if (!hitting_simulate.empty()) {
      hitting_samples = hitting_simulate[0];
      hitting_seed = hitting_simulate[1];
    }
    std::optional<csma::mc::SampleSet> simulation;
    if (hitting_samples > 0) {
      simulation = csma::mc::sample_hitting_time(gen, q, hitting_samples, hitting_seed,
                                                 hitting_workers);
      if (!hitting_sample_csv.empty()) {
        auto out = open_output(hitting_sample_csv);
        csma::io::write_samples_csv(out, simulation->values);
      }
    }
    emit(csma::io::hitting_report(net, q, mean, asymptotic, simulation));
  });

  // --- spectrum ---
  auto* spectrum = app.add_subcommand("spectrum", "Absorption spectrum of a killed transition");
  NetworkArgs spectrum_net;
  add_network_options(*spectrum, spectrum_net);
  std::string spectrum_from, spectrum_to, spectrum_csv;
  spectrum->add_option("--from", spectrum_from,
                       "Start state label (default: farthest from the absorbing state)");
  spectrum->add_option("--to,--absorb", spectrum_to, "Absorbing state label")->required();
  spectrum->add_option("--csv", spectrum_csv, "Write the rates as CSV");
  spectrum->callback([&] {
    const csma::PartiteNetwork net = resolve_network(spectrum_net);
    const csma::AggState to = csma::agg_state_from_label(spectrum_to);
    const csma::AggState from =
        spectrum_from.empty() ? farthest_state(net, to) : csma::agg_state_from_label(spectrum_from);
    const csma::Generator restricted =
        csma::restrict_reachable(csma::build_generator(net, {to}), from);
    const csma::PhaseType pt = csma::absorption_spectrum(restricted, to);
    std::vector<double> products;
    try {
      products = csma::eigen_time_products(net, from, to);
    } catch (const csma::StructureError&) {
      // Non-path geometry: the spectrum stands, the sum-of-exponentials
      // reading (and its eigenvalue-mean products) does not.
    }
    const csma::SymmetrizedChain sym = csma::symmetrize(restricted, to);
    const bool disjoint = csma::discs_disjoint(csma::gershgorin_discs(sym));
    if (!spectrum_csv.empty()) {
      auto out = open_output(spectrum_csv);
      csma::io::write_spectrum_csv(out, pt, products);
    }
    emit(csma::io::spectrum_report(net, from, to, pt, products, disjoint));
  });

  // --- mixing ---
  auto* mixing = app.add_subcommand("mixing", "Mixing time and its bounds");
  NetworkArgs mixing_net;
  add_network_options(*mixing, mixing_net);
  double mixing_eps = 0.01;
  mixing->add_option("--epsilon", mixing_eps, "Distance threshold in (0, 1)")
      ->check(CLI::Range(1e-9, 0.999999));
  mixing->callback([&] {
    const csma::PartiteNetwork net = resolve_network(mixing_net);
    emit(csma::io::mixing_report_json(net, csma::make_mixing_report(net, mixing_eps)));
  });

  // --- sweep ---
  auto* sweep = app.add_subcommand("sweep", "Tabulate a quantity across activation rates");
  std::string sweep_spec_file, sweep_kind, sweep_from, sweep_to, sweep_csv;
  std::vector<int> sweep_sizes;
  std::vector<double> sweep_nus;
  double sweep_eps = 0.01;
  auto* sf = sweep->add_option("--spec", sweep_spec_file, "Sweep spec JSON file");
  auto* sk = sweep->add_option("--kind", sweep_kind, "hitting | spectrum | mixing | limit-law");
  auto* ss = sweep->add_option("--sizes", sweep_sizes, "Component sizes")->delimiter(',');
  auto* sn = sweep->add_option("--nus", sweep_nus, "Activation rates, ascending")->delimiter(',');
  sweep->add_option("--from", sweep_from, "Start state label");
  sweep->add_option("--to", sweep_to, "Target state label");
  sweep->add_option("--epsilon", sweep_eps, "Mixing distance threshold");
  sweep->add_option("--csv", sweep_csv, "Write the table as CSV");
  sf->excludes(sk)->excludes(ss)->excludes(sn);
  sweep->callback([&] {
    csma::SweepSpec spec;
    if (!sweep_spec_file.empty()) {
      spec = csma::io::parse_sweep_file(sweep_spec_file);
    } else {
      if (sweep_kind.empty() || sweep_sizes.empty() || sweep_nus.empty())
        throw csma::ValidationError("provide either --spec or --kind, --sizes and --nus");
      spec.kind = csma::sweep_kind_from_name(sweep_kind);
      spec.sizes = sweep_sizes;
      spec.nus = sweep_nus;
      spec.epsilon = sweep_eps;
      if (spec.kind != csma::SweepKind::mixing) {
        if (sweep_from.empty() || sweep_to.empty())
          throw csma::ValidationError("this sweep kind needs --from and --to");
        spec.from = csma::agg_state_from_label(sweep_from);
        spec.to = csma::agg_state_from_label(sweep_to);
      }
    }
    const csma::SweepResult result = csma::run_sweep(spec);
    if (!sweep_csv.empty()) {
      auto out = open_output(sweep_csv);
      csma::io::write_sweep_csv(out, result);
    }
    emit(csma::io::sweep_report(result));
  });

  // --- limit-law ---
  auto* limit = app.add_subcommand("limit-law", "Limit of the scaled transition time");
  NetworkArgs limit_net;
  add_network_options(*limit, limit_net, /*nu_required=*/false);
  std::string limit_from, limit_to, limit_sample_csv;
  std::uint64_t limit_samples = 0, limit_seed = 0;
  std::vector<std::uint64_t> limit_sample_pair;
  int limit_k1 = 0, limit_k2 = 0, limit_workers = 1;
  double limit_cdf_x = 0.0;
  auto* lfrom = limit->add_option("--from", limit_from, "Start state label");
  auto* lto = limit->add_option("--to", limit_to, "Target state label");
  auto* lk1 = limit->add_option("--k1", limit_k1, "Start component (uses its full-activity state)");
  auto* lk2 = limit->add_option("--k2", limit_k2, "Target component (uses its full-activity state)");
  lk1->excludes(lfrom)->needs(lk2);
  lk2->excludes(lto)->needs(lk1);
  auto* lcdf = limit->add_option("--cdf", limit_cdf_x, "Evaluate the limit CDF at this point");
  auto* ls = limit->add_option("--samples", limit_samples, "Draw this many limit-law samples");
  auto* lseed = limit->add_option("--seed", limit_seed, "Sampling seed");
  auto* lpair = limit->add_option("--sample", limit_sample_pair, "Sample count and seed")
                    ->expected(2);
  ls->needs(lseed);
  lseed->needs(ls);
  lpair->excludes(ls)->excludes(lseed);
  limit->add_option("--workers", limit_workers, "Sampling worker threads");
  limit->add_option("--sample-csv", limit_sample_csv, "Write the samples as CSV");
  limit->callback([&] {
    const csma::PartiteNetwork net = resolve_network(limit_net, /*nu_required=*/false);
    csma::AggState from, to;
    if (lk1->count() > 0) {
      from = csma::AggState::branch(limit_k1, net.size(limit_k1));
      to = csma::AggState::branch(limit_k2, net.size(limit_k2));
    } else {
      if (limit_from.empty() || limit_to.empty())
        throw csma::ValidationError("provide either --from/--to or --k1/--k2");
      from = csma::agg_state_from_label(limit_from);
      to = csma::agg_state_from_label(limit_to);
    }
    const csma::HittingQuery q(from, to);
    const csma::QueryLimit kind = csma::query_limit_law(net, q);
    if (!limit_sample_pair.empty()) {
      limit_samples = limit_sample_pair[0];
      limit_seed = limit_sample_pair[1];
    }
    std::optional<csma::mc::SampleSet> simulation;
    std::optional<double> ks;
    if (limit_samples > 0) {
      if (!kind.law)
        throw csma::ValidationError("sampling is defined for cross-branch limit laws only");
      simulation = csma::mc::sample_limit_law(*kind.law, limit_samples, limit_seed,
                                              limit_workers);
      ks = csma::mc::ks_statistic(simulation->values, [&](double x) {
        return x < 0.0 ? 0.0 : csma::limit_law_cdf(*kind.law, x);
      });
      if (!limit_sample_csv.empty()) {
        auto out = open_output(limit_sample_csv);
        csma::io::write_samples_csv(out, simulation->values);
      }
    }
    nlohmann::json report = csma::io::limit_law_report(net, q, kind, simulation, ks);
    if (lcdf->count() > 0) {
      if (!kind.law)
        throw csma::ValidationError("the limit CDF is defined for cross-branch queries only");
      report["cdf"] = {{"x", limit_cdf_x}, {"value", csma::limit_law_cdf(*kind.law, limit_cdf_x)}};
    }
    emit(report);
  });

  // --- validate ---
  auto* validate = app.add_subcommand("validate", "Run the deterministic self-check suite");
  validate->callback([&] {
    if (!csma::run_validation_suite(std::cout)) exit_code = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const csma::CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return exit_code;
}
