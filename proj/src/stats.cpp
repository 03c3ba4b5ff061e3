#include "seedbank/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace seedbank::stats {

double gumbel_cdf(double t) { return std::exp(-std::exp(-t)); }

double gumbel_pdf(double t) { return std::exp(-t - std::exp(-t)); }

double gumbel_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("gumbel_quantile: q must be in (0, 1)");
  }
  return -std::log(-std::log(q));
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.18) {
    // P(K <= x) via the theta-function series, accurate for small x.
    const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * x * x));
    const double cdf = std::sqrt(2.0 * std::numbers::pi) / x *
                       (y + std::pow(y, 9.0) + std::pow(y, 25.0) + std::pow(y, 49.0));
    return 1.0 - cdf;
  }
  double sf = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * std::exp(-2.0 * k * k * x * x);
    sf += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::max(0.0, std::min(1.0, sf));
}

namespace {

double ks_statistic_sorted(const std::vector<double>& sorted,
                           const std::function<double(double)>& cdf) {
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(f - lo), std::abs(f - hi)));
  }
  return d;
}

}  // namespace

KsResult ks_one_sample(std::vector<double> sample,
                       const std::function<double(double)>& cdf) {
  if (sample.size() < 10) throw std::invalid_argument("ks_one_sample: need >= 10 values");
  std::sort(sample.begin(), sample.end());
  const double d = ks_statistic_sorted(sample, cdf);
  const double sn = std::sqrt(static_cast<double>(sample.size()));
  return {d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 10 || b.size() < 10) {
    throw std::invalid_argument("ks_two_sample: need >= 10 values per sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sn = std::sqrt(ne);
  return {d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)};
}

double ks_distance(std::vector<double> sample,
                   const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  return ks_statistic_sorted(sample, cdf);
}

namespace {

// Regularized incomplete gamma Q(a, x), series for x < a+1 and continued
// fraction otherwise.
double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - lg);
    return 1.0 - p;
  }
  // Lentz continued fraction for Q.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - lg);
}

}  // namespace

double chi_square_sf(double x, int df) {
  if (df < 1) throw std::invalid_argument("chi_square_sf: df must be >= 1");
  if (x <= 0.0) return 1.0;
  return gamma_q(static_cast<double>(df) / 2.0, x / 2.0);
}

ChiSquareResult chi_square_gof(const std::vector<int>& observed,
                               const std::vector<double>& probabilities,
                               double min_expected) {
  if (observed.size() != probabilities.size() || observed.empty()) {
    throw std::invalid_argument("chi_square_gof: size mismatch");
  }
  long long total = 0;
  for (int c : observed) total += c;
  if (total <= 0) throw std::invalid_argument("chi_square_gof: empty sample");

  // Greedy left-to-right pooling until each cell expects >= min_expected.
  std::vector<double> exp_counts;
  std::vector<double> obs_counts;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    exp_counts.push_back(probabilities[i] * static_cast<double>(total));
    obs_counts.push_back(static_cast<double>(observed[i]));
  }
  std::vector<double> e;
  std::vector<double> o;
  double ce = 0.0;
  double co = 0.0;
  for (std::size_t i = 0; i < exp_counts.size(); ++i) {
    ce += exp_counts[i];
    co += obs_counts[i];
    if (ce >= min_expected) {
      e.push_back(ce);
      o.push_back(co);
      ce = 0.0;
      co = 0.0;
    }
  }
  if (ce > 0.0 || co > 0.0) {
    if (e.empty()) {
      e.push_back(ce);
      o.push_back(co);
    } else {
      e.back() += ce;
      o.back() += co;
    }
  }
  if (e.size() < 2) throw std::invalid_argument("chi_square_gof: too few cells after pooling");

  double stat = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double diff = o[i] - e[i];
    stat += diff * diff / e[i];
  }
  const int df = static_cast<int>(e.size()) - 1;
  return {stat, df, chi_square_sf(stat, df)};
}

SummaryStats summarize(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("summarize: empty sample");
  const auto n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = values.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, var, std::sqrt(var / n)};
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  std::nth_element(values.begin(), values.begin() + mid - 1, values.end());
  return 0.5 * (hi + values[mid - 1]);
}

void parallel_for(int n, int n_threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  n_threads = std::max(1, std::min(n_threads, n));
  if (n_threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(n_threads));
  for (int w = 0; w < n_threads; ++w) {
    workers.emplace_back([&, w] {
      for (int i = w; i < n; i += n_threads) fn(i);
    });
  }
  for (auto& t : workers) t.join();
}

}  // namespace seedbank::stats
