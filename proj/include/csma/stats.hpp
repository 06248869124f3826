#pragma once

#include <cstddef>
#include <vector>

namespace csma {

struct SampleStats {
  double mean = 0.0;
  double std_error = 0.0;
};

[[nodiscard]] SampleStats sample_stats(const std::vector<double>& values);

// Survival function P(X > x) of a chi-square law with `dof` degrees of freedom.
[[nodiscard]] double chi_square_survival(double x, int dof);

// Pearson chi-square test of observed counts against expected counts.
// Entries with expected count below `min_expected` are pooled into one bin.
struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

[[nodiscard]] ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                                             const std::vector<double>& expected,
                                             double min_expected = 5.0);

// Ordinary least squares of log(value) on log(nu): value ~ coefficient *
// nu^exponent. Needs at least two points with strictly positive coordinates.
struct PowerLawFit {
  double exponent = 0.0;
  double coefficient = 0.0;
  double r_squared = 0.0;
};

[[nodiscard]] PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

}  // namespace csma
