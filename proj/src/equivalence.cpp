#include "seedbank/equivalence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "seedbank/io.hpp"
#include "seedbank/lookdown.hpp"
#include "seedbank/moran.hpp"
#include "seedbank/stats.hpp"

namespace seedbank::equivalence {

namespace {

long long gcd_ll(long long a, long long b) {
  while (b != 0) {
    const long long t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

}  // namespace

Rational Rational::of(long long n, long long d) {
  if (d == 0) throw std::invalid_argument("Rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const long long g = n == 0 ? d : gcd_ll(n, d);
  return {n / g, d / g};
}

Rational Rational::parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("Rational::parse: empty");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    return of(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return of(std::stoll(text));
  const std::string integral = text.substr(0, dot);
  const std::string frac = text.substr(dot + 1);
  if (frac.size() > 15) throw std::invalid_argument("Rational::parse: too many digits");
  long long den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  const bool negative = !integral.empty() && integral[0] == '-';
  const long long whole =
      integral.empty() || integral == "-" ? 0 : std::stoll(integral);
  const long long frac_num = frac.empty() ? 0 : std::stoll(frac);
  long long num = whole * den + (negative ? -frac_num : frac_num);
  return of(num, den);
}

Rational Rational::operator+(const Rational& o) const {
  return of(num * o.den + o.num * den, den * o.den);
}

Rational Rational::operator-(const Rational& o) const {
  return of(num * o.den - o.num * den, den * o.den);
}

Rational Rational::operator*(const Rational& o) const {
  return of(num * o.num, den * o.den);
}

bool Rational::less_than(const Rational& o) const {
  return num * o.den < o.num * den;
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

GeneratorMatrix::GeneratorMatrix(int n_levels, int n_types, GeneratorVariant variant)
    : n_levels_(n_levels), n_types_(n_types), variant_(variant) {
  if (n_levels < 1 || n_types < 1) {
    throw std::invalid_argument("GeneratorMatrix: need n_levels >= 1, n_types >= 1");
  }
  long long states = 1;
  const long long base = 2LL * n_types;
  for (int i = 0; i < n_levels; ++i) {
    states *= base;
    if (states > 1'000'000LL) {
      throw std::invalid_argument("GeneratorMatrix: state space exceeds 10^6");
    }
  }
  n_states_ = states;
  rows_.resize(static_cast<std::size_t>(states));
}

const std::vector<std::pair<long long, Rational>>& GeneratorMatrix::row(
    long long state) const {
  return rows_.at(static_cast<std::size_t>(state));
}

std::vector<std::pair<long long, Rational>>& GeneratorMatrix::mutable_row(
    long long state) {
  return rows_.at(static_cast<std::size_t>(state));
}

Rational GeneratorMatrix::row_sum(long long state) const {
  Rational sum;
  for (const auto& [target, rate] : row(state)) sum = sum + rate;
  return sum;
}

long long GeneratorMatrix::encode(const Configuration& z) const {
  if (z.size() != n_levels_) throw std::invalid_argument("encode: size mismatch");
  const long long base = 2LL * n_types_;
  long long idx = 0;
  long long mult = 1;
  for (int i = 1; i <= n_levels_; ++i) {
    const Particle& q = z.at_level(i);
    if (q.type_id >= static_cast<std::uint32_t>(n_types_)) {
      throw std::invalid_argument("encode: type out of range");
    }
    const long long digit =
        2LL * q.type_id + (q.state == ActivityState::Dormant ? 1 : 0);
    idx += digit * mult;
    mult *= base;
  }
  return idx;
}

Configuration GeneratorMatrix::decode(long long state) const {
  const long long base = 2LL * n_types_;
  std::vector<Particle> particles(static_cast<std::size_t>(n_levels_));
  for (int i = 0; i < n_levels_; ++i) {
    const long long digit = state % base;
    state /= base;
    particles[static_cast<std::size_t>(i)] = {
        static_cast<std::uint32_t>(digit / 2),
        digit % 2 == 1 ? ActivityState::Dormant : ActivityState::Active};
  }
  return Configuration(std::move(particles));
}

GeneratorMatrix build_generator(const RationalRates& rates, int n_levels,
                                int n_types, GeneratorVariant variant) {
  GeneratorMatrix gen(n_levels, n_types, variant);
  const Rational half = Rational::of(1, 2);
  const Rational one = Rational::of(1);

  for (long long s = 0; s < gen.n_states(); ++s) {
    const Configuration z = gen.decode(s);
    std::map<long long, Rational> entries;
    auto add = [&](const Configuration& target, const Rational& rate) {
      const long long idx = gen.encode(target);
      if (idx == s) return;  // no-op transition contributes nothing
      auto [it, inserted] = entries.try_emplace(idx, rate);
      if (!inserted) it->second = it->second + rate;
    };

    for (int i = 1; i <= n_levels; ++i) {
      add(phi_deactivate(z, i), rates.sigma);
      add(phi_activate(z, i), rates.alpha);
    }
    for (int i = 1; i <= n_levels; ++i) {
      for (int j = 1; j <= n_levels; ++j) {
        if (i == j) continue;
        if (variant == GeneratorVariant::Moran) {
          add(phi_reproduce(z, i, j), half);
        } else if (i < j) {
          add(phi_reproduce(z, i, j), one);
        }
      }
    }
    auto& row = gen.mutable_row(s);
    row.assign(entries.begin(), entries.end());
  }
  return gen;
}

namespace {

void check_permutation_size(int n) {
  if (n > 8) throw std::invalid_argument("permutation averaging limited to N <= 8");
}

}  // namespace

double average_function(const std::function<double(const Configuration&)>& f,
                        const Configuration& z) {
  const int n = z.size();
  check_permutation_size(n);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double sum = 0.0;
  long long count = 0;
  do {
    std::vector<Particle> permuted(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      permuted[static_cast<std::size_t>(i)] =
          z.particles()[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    }
    sum += f(Configuration(std::move(permuted)));
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum / static_cast<double>(count);
}

Rational max_averaged_discrepancy(const GeneratorMatrix& a, const GeneratorMatrix& b) {
  if (a.n_levels() != b.n_levels() || a.n_types() != b.n_types()) {
    throw std::invalid_argument("max_averaged_discrepancy: shape mismatch");
  }
  const int n = a.n_levels();
  check_permutation_size(n);
  const long long n_states = a.n_states();
  const long long base = 2LL * a.n_types();

  // Precompute digit multipliers.
  std::vector<long long> mult(static_cast<std::size_t>(n));
  mult[0] = 1;
  for (int i = 1; i < n; ++i) mult[static_cast<std::size_t>(i)] = mult[static_cast<std::size_t>(i - 1)] * base;

  long long n_perms = 1;
  for (int i = 2; i <= n; ++i) n_perms *= i;
  const Rational inv_perms = Rational::of(1, n_perms);

  std::vector<Rational> acc_a(static_cast<std::size_t>(n_states));
  std::vector<Rational> acc_b(static_cast<std::size_t>(n_states));
  std::vector<long long> touched;
  Rational worst;

  std::vector<long long> digits(static_cast<std::size_t>(n));
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (long long s = 0; s < n_states; ++s) {
    {
      long long rem = s;
      for (int i = 0; i < n; ++i) {
        digits[static_cast<std::size_t>(i)] = rem % base;
        rem /= base;
      }
    }
    std::iota(perm.begin(), perm.end(), 0);
    touched.clear();
    do {
      long long ps = 0;
      for (int i = 0; i < n; ++i) {
        ps += digits[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] *
              mult[static_cast<std::size_t>(i)];
      }
      auto accumulate = [&](const GeneratorMatrix& g, std::vector<Rational>& acc) {
        Rational diag;
        for (const auto& [target, rate] : g.row(ps)) {
          auto& cell = acc[static_cast<std::size_t>(target)];
          if (cell.is_zero()) touched.push_back(target);
          cell = cell + rate;
          diag = diag + rate;
        }
        auto& cell = acc[static_cast<std::size_t>(ps)];
        if (cell.is_zero()) touched.push_back(ps);
        cell = cell - diag;
      };
      accumulate(a, acc_a);
      accumulate(b, acc_b);
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (long long w : touched) {
      const Rational diff =
          (acc_a[static_cast<std::size_t>(w)] - acc_b[static_cast<std::size_t>(w)]).abs();
      if (worst.less_than(diff)) worst = diff;
      acc_a[static_cast<std::size_t>(w)] = Rational();
      acc_b[static_cast<std::size_t>(w)] = Rational();
    }
  }
  return worst * inv_perms;
}

Theorem1Report check_theorem1(const RationalRates& rates, int n_levels, int n_types) {
  const GeneratorMatrix moran =
      build_generator(rates, n_levels, n_types, GeneratorVariant::Moran);
  const GeneratorMatrix lookdown =
      build_generator(rates, n_levels, n_types, GeneratorVariant::Lookdown);
  Theorem1Report report;
  report.n_levels = n_levels;
  report.n_types = n_types;
  report.max_discrepancy = max_averaged_discrepancy(moran, lookdown);
  report.pass = report.max_discrepancy.is_zero();
  return report;
}

void write_theorem1_report(std::ostream& os, const Theorem1Report& report) {
  os << "n_levels = " << report.n_levels << '\n';
  os << "n_types = " << report.n_types << '\n';
  os << "max_discrepancy = " << report.max_discrepancy.str() << '\n';
  os << "pass = " << (report.pass ? "true" : "false") << '\n';
}

double CompareLawsReport::min_corrected_p() const {
  double m = 1.0;
  for (const auto& c : ks_cells) m = std::min(m, c.p_corrected);
  for (const auto& c : chi_cells) m = std::min(m, c.p_corrected);
  return m;
}

CompareLawsReport compare_empirical_laws(const ModelParams& params,
                                         const std::vector<double>& times,
                                         int replicates, int n_types,
                                         RandomSource& rng) {
  params.validate();
  if (params.pop_size > 50) {
    throw std::invalid_argument("compare_empirical_laws: N <= 50 for runtime");
  }
  if (times.empty() || replicates < 10) {
    throw std::invalid_argument("compare_empirical_laws: need times and >= 10 replicates");
  }
  double horizon = 0.0;
  for (double t : times) {
    if (t < 0.0) throw std::invalid_argument("compare_empirical_laws: negative time");
    horizon = std::max(horizon, t);
  }
  horizon = std::max(horizon, 1e-9);

  const int n = params.pop_size;
  const TypeAssignment typing = TypeAssignment::iid_uniform(n_types);
  const std::size_t n_times = times.size();

  enum Stat { FracActive = 0, TopTypeFreq = 1, SurvivingTypes = 2 };
  const char* stat_names[3] = {"fraction_active", "top_type_frequency",
                               "surviving_types"};

  // samples[side][time][stat] and active-count histograms per side/time.
  std::vector<std::vector<std::array<std::vector<double>, 3>>> samples(
      2, std::vector<std::array<std::vector<double>, 3>>(n_times));
  std::vector<std::vector<std::vector<int>>> active_hist(
      2, std::vector<std::vector<int>>(n_times, std::vector<int>(static_cast<std::size_t>(n) + 1, 0)));

  auto record = [&](int side, std::size_t ti, const Configuration& z,
                    std::uint32_t top_type) {
    const int act = count_active(z);
    samples[static_cast<std::size_t>(side)][ti][FracActive].push_back(
        static_cast<double>(act) / n);
    samples[static_cast<std::size_t>(side)][ti][TopTypeFreq].push_back(
        static_cast<double>(count_type(z, top_type)) / n);
    samples[static_cast<std::size_t>(side)][ti][SurvivingTypes].push_back(
        static_cast<double>(count_distinct_types(z)));
    ++active_hist[static_cast<std::size_t>(side)][ti][static_cast<std::size_t>(act)];
  };

  for (int rep = 0; rep < replicates; ++rep) {
    {
      RandomSource init_rng = rng.substream("cel-moran-init", static_cast<std::uint64_t>(rep));
      RandomSource sim_rng = rng.substream("cel-moran-sim", static_cast<std::uint64_t>(rep));
      const Configuration init = sample_stationary_config(params, typing, init_rng);
      const std::uint32_t top = most_common_type(init);
      const auto traj = moran::simulate(params, init, horizon, sim_rng);
      for (std::size_t ti = 0; ti < n_times; ++ti) {
        record(0, ti, moran::state_at(traj, times[ti]), top);
      }
    }
    {
      RandomSource ld_rng = rng.substream("cel-lookdown", static_cast<std::uint64_t>(rep));
      lookdown::LookdownRealization real(params, horizon, typing, ld_rng);
      const Configuration init = real.state_at(0.0);
      const std::uint32_t top = most_common_type(init);
      for (std::size_t ti = 0; ti < n_times; ++ti) {
        record(1, ti, real.state_at(times[ti]), top);
      }
    }
  }

  CompareLawsReport report;
  const auto n_ks_tests = static_cast<double>(n_times * 3);
  for (std::size_t ti = 0; ti < n_times; ++ti) {
    for (int st = 0; st < 3; ++st) {
      const auto ks = stats::ks_two_sample(samples[0][ti][static_cast<std::size_t>(st)],
                                           samples[1][ti][static_cast<std::size_t>(st)]);
      report.ks_cells.push_back({times[ti], stat_names[st], ks.statistic, ks.p_value,
                                 std::min(1.0, ks.p_value * n_ks_tests)});
    }
  }

  // Active-count marginal against Binomial(N, p), both sides.
  std::vector<double> binom(static_cast<std::size_t>(n) + 1, 0.0);
  {
    const double p = params.active_probability();
    // Iterative binomial pmf.
    binom[0] = std::pow(1.0 - p, n);
    for (int k = 1; k <= n; ++k) {
      binom[static_cast<std::size_t>(k)] =
          binom[static_cast<std::size_t>(k - 1)] *
          (static_cast<double>(n - k + 1) / k) * (p / (1.0 - p));
    }
  }
  const auto n_chi_tests = static_cast<double>(2 * n_times);
  const char* side_names[2] = {"moran", "lookdown"};
  for (int side = 0; side < 2; ++side) {
    for (std::size_t ti = 0; ti < n_times; ++ti) {
      const auto chi =
          stats::chi_square_gof(active_hist[static_cast<std::size_t>(side)][ti], binom);
      report.chi_cells.push_back({times[ti], side_names[side], chi.statistic, chi.df,
                                  chi.p_value, std::min(1.0, chi.p_value * n_chi_tests)});
    }
  }
  return report;
}

void write_compare_report(std::ostream& os, const CompareLawsReport& report) {
  for (const auto& c : report.ks_cells) {
    os << "ks time=" << io::fmt_double(c.time) << " statistic=" << c.statistic
       << " D=" << io::fmt_double(c.ks_stat) << " p=" << io::fmt_double(c.p_raw)
       << " p_corrected=" << io::fmt_double(c.p_corrected) << '\n';
  }
  for (const auto& c : report.chi_cells) {
    os << "chi2 time=" << io::fmt_double(c.time) << " side=" << c.side
       << " stat=" << io::fmt_double(c.statistic) << " df=" << c.df
       << " p=" << io::fmt_double(c.p_raw)
       << " p_corrected=" << io::fmt_double(c.p_corrected) << '\n';
  }
  os << "min_corrected_p = " << io::fmt_double(report.min_corrected_p()) << '\n';
}

}  // namespace seedbank::equivalence
