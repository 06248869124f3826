#include "csma/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "csma/errors.hpp"

namespace csma {

SampleStats sample_stats(const std::vector<double>& values) {
  if (values.size() < 2) throw ValidationError("sample statistics need at least two values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  SampleStats out;
  out.mean = mean;
  out.std_error = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

double chi_square_survival(double x, int dof) {
  if (dof < 1) throw ValidationError("chi-square needs dof >= 1");
  if (x <= 0.0) return 1.0;
  const boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, x));
}

ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected, double min_expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw ValidationError("chi-square needs matching nonempty count vectors");

  double stat = 0.0;
  int bins = 0;
  double pooled_obs = 0.0;
  double pooled_exp = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] < 0.0 || observed[i] < 0.0)
      throw ValidationError("chi-square needs nonnegative counts");
    if (expected[i] < min_expected) {
      pooled_obs += observed[i];
      pooled_exp += expected[i];
    } else {
      stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
      ++bins;
    }
  }
  if (pooled_exp > 0.0) {
    stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++bins;
  }
  if (bins < 2) throw ValidationError("chi-square needs at least two usable bins");

  ChiSquareResult out;
  out.statistic = stat;
  out.dof = bins - 1;
  out.p_value = chi_square_survival(stat, out.dof);
  return out;
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw ValidationError("power-law fit needs at least two points");
  std::vector<double> lx(points.size());
  std::vector<double> ly(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].first > 0.0) || !(points[i].second > 0.0))
      throw ValidationError("power-law fit needs strictly positive coordinates");
    lx[i] = std::log(points[i].first);
    ly[i] = std::log(points[i].second);
  }
  const double n = static_cast<double>(points.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw ValidationError("power-law fit needs at least two distinct nu values");

  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.coefficient = std::exp(my - fit.exponent * mx);
  const double ss_res = syy - sxy * sxy / sxx;
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

}  // namespace csma
