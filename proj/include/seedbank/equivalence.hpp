#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "seedbank/config.hpp"
#include "seedbank/random.hpp"

namespace seedbank::equivalence {

// Exact rational arithmetic for the generator check. Magnitudes stay tiny
// (rates times a factorial), so int64 with gcd normalization is plenty.
struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational of(long long n, long long d = 1);
  // Accepts "2", "0.5", "-1.25" or "3/4"; exact.
  static Rational parse(const std::string& text);

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  friend bool operator==(const Rational&, const Rational&) = default;

  bool is_zero() const { return num == 0; }
  Rational abs() const { return {num < 0 ? -num : num, den}; }
  bool less_than(const Rational& o) const;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
};

struct RationalRates {
  Rational alpha;
  Rational sigma;
};

enum class GeneratorVariant { Moran, Lookdown };

// Explicit rate matrix of the chain on (E' x S)^N for a finite type set E'
// of size n_types. Rows hold consolidated off-diagonal rates; the diagonal
// is minus the row sum. Moran: rate 1/2 per ordered pair (i, j), i != j.
// Lookdown: rate 1 per ordered pair with i < j (parent below). Flag flips
// at sigma (to d) and alpha (to a) in both.
class GeneratorMatrix {
 public:
  GeneratorMatrix(int n_levels, int n_types, GeneratorVariant variant);

  int n_levels() const { return n_levels_; }
  int n_types() const { return n_types_; }
  long long n_states() const { return n_states_; }
  GeneratorVariant variant() const { return variant_; }

  const std::vector<std::pair<long long, Rational>>& row(long long state) const;
  std::vector<std::pair<long long, Rational>>& mutable_row(long long state);

  Rational row_sum(long long state) const;  // off-diagonal total (= -diagonal)

  // State encoding: level i contributes digit type*2 + dormant in base
  // 2*n_types, level 1 least significant.
  long long encode(const Configuration& z) const;
  Configuration decode(long long state) const;

 private:
  int n_levels_;
  int n_types_;
  long long n_states_;
  GeneratorVariant variant_;
  std::vector<std::vector<std::pair<long long, Rational>>> rows_;

  friend GeneratorMatrix build_generator(const RationalRates&, int, int,
                                         GeneratorVariant);
};

// Enumerates the full state space; guarded to at most 10^6 states.
GeneratorMatrix build_generator(const RationalRates& rates, int n_levels,
                                int n_types, GeneratorVariant variant);

// Uniform average of f over all N! coordinate permutations of z (N <= 8).
double average_function(const std::function<double(const Configuration&)>& f,
                        const Configuration& z);

// max over states z and indicator functions f of
//   | avg_pi (A f)(z_pi) - avg_pi (B f)(z_pi) |,
// i.e. the permutation-averaged generators compared entrywise, exactly.
Rational max_averaged_discrepancy(const GeneratorMatrix& a, const GeneratorMatrix& b);

struct Theorem1Report {
  int n_levels = 0;
  int n_types = 0;
  Rational max_discrepancy;
  bool pass = false;
};

// Builds both generators and compares their permutation averages. Indicator
// functions span everything on a finite space, so a zero here is the full
// averaged-generator identity.
Theorem1Report check_theorem1(const RationalRates& rates, int n_levels, int n_types);

void write_theorem1_report(std::ostream& os, const Theorem1Report& report);

// Dynamic check: both simulators from i.i.d. copies of one exchangeable
// initial law, summary statistics of the empirical measure compared at each
// requested time by two-sample KS (Bonferroni-corrected), plus a chi-square
// of the active-count marginal against Binomial(N, p).
struct CompareLawsReport {
  struct KsCell {
    double time;
    std::string statistic;
    double ks_stat;
    double p_raw;
    double p_corrected;
  };
  struct ChiCell {
    double time;
    std::string side;
    double statistic;
    int df;
    double p_raw;
    double p_corrected;
  };
  std::vector<KsCell> ks_cells;
  std::vector<ChiCell> chi_cells;

  double min_corrected_p() const;
  bool pass(double threshold) const { return min_corrected_p() > threshold; }
};

CompareLawsReport compare_empirical_laws(const ModelParams& params,
                                         const std::vector<double>& times,
                                         int replicates, int n_types,
                                         RandomSource& rng);

void write_compare_report(std::ostream& os, const CompareLawsReport& report);

}  // namespace seedbank::equivalence
