#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace seedbank::stats {

inline constexpr double kEulerGamma = 0.57721566490153286060651209;
inline constexpr double kPiSquaredOver6 = 1.64493406684822643647241516;

// Standard Gumbel (location 0, scale 1): CDF exp(-e^{-t}).
double gumbel_cdf(double t);
double gumbel_pdf(double t);
double gumbel_quantile(double q);  // requires q in (0, 1)

// Survival function of the Kolmogorov distribution, evaluated with the
// theta-series for small arguments and the alternating series otherwise.
double kolmogorov_sf(double x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

// One-sample Kolmogorov-Smirnov test against a reference CDF. The p-value
// uses the asymptotic Kolmogorov law with Stephens' finite-sample factor
// sqrt(n) + 0.12 + 0.11/sqrt(n); an approximation, documented as such.
KsResult ks_one_sample(std::vector<double> sample,
                       const std::function<double(double)>& cdf);

// Two-sample KS; same asymptotic p-value with the effective size nm/(n+m).
// With heavily tied (discrete) samples the p-value is conservative.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Largest absolute gap between the empirical CDF of a sample and a
// reference CDF evaluated pointwise at the sorted sample values.
double ks_distance(std::vector<double> sample,
                   const std::function<double(double)>& cdf);

// Upper tail of the chi-square distribution (regularized incomplete gamma).
double chi_square_sf(double x, int df);

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 0.0;
};

// Pearson chi-square of observed counts against expected probabilities.
// Adjacent cells are pooled from both ends until every expected count is at
// least `min_expected`.
ChiSquareResult chi_square_gof(const std::vector<int>& observed,
                               const std::vector<double>& probabilities,
                               double min_expected = 5.0);

struct SummaryStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error = 0.0;
};

SummaryStats summarize(const std::vector<double>& values);
double median(std::vector<double> values);

struct EmpiricalSample {
  std::vector<double> values;
  std::uint64_t seed = 0;
};

// Static partition of [0, n) over worker threads; fn(i) must only touch
// slot i of any shared output.
void parallel_for(int n, int n_threads, const std::function<void(int)>& fn);

}  // namespace seedbank::stats
