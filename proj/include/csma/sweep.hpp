#pragma once

#include <string>
#include <vector>

#include "csma/network.hpp"
#include "csma/stats.hpp"

namespace csma {

// Quantity tracked across an activation-rate sweep.
enum class SweepKind {
  hitting,    // exact and asymptotic mean transition times
  spectrum,   // smallest absorption rate and its product with the mean
  mixing,     // mixing time with its coupling / conductance sandwich
  limit_law,  // sup distance between the scaled exact law and its limit
};

[[nodiscard]] SweepKind sweep_kind_from_name(const std::string& name);
[[nodiscard]] std::string to_name(SweepKind kind);

struct SweepSpec {
  std::vector<int> sizes;
  std::vector<double> nus;  // at least two, positive, strictly increasing
  SweepKind kind = SweepKind::hitting;
  AggState from;          // hitting / spectrum / limit_law
  AggState to;            // hitting / spectrum / limit_law
  double epsilon = 0.01;  // mixing; must lie in (0, 1/4)
};

// Tabulated sweep: one row per nu, first column always nu, plus a power-law
// fit of `fit_column` against nu over the whole grid.
struct SweepResult {
  SweepSpec spec;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::string fit_column;
  PowerLawFit fit;
};

[[nodiscard]] SweepResult run_sweep(const SweepSpec& spec);

}  // namespace csma
