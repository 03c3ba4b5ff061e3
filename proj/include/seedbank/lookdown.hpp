#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "seedbank/config.hpp"
#include "seedbank/random.hpp"

namespace seedbank::lookdown {

// One level's alternating active/dormant periods on [0, horizon].
//
// Sampled as the stationary alternating-renewal process: dormant at time 0
// with probability 1-p, residual duration Exp(alpha) (Exp(sigma) when
// active), then Exp(sigma) active and Exp(alpha) dormant stretches. This is
// distribution-identical to the subordinator construction and keeps
// P[t active] = p at every t. Flip times are kept one past the horizon so
// the process extends consistently.
class ActivityTimeline {
 public:
  struct Interval {
    double start;
    double end;
    ActivityState state;
  };

  static ActivityTimeline sample(const ModelParams& params, int level,
                                 double horizon, RandomSource stream);

  // Test hook: explicit initial state and flip times, not extendable.
  static ActivityTimeline from_flips(int level, double horizon,
                                     ActivityState initial,
                                     std::vector<double> flips);

  int level() const { return level_; }
  double horizon() const { return horizon_; }
  ActivityState initial_state() const { return initial_; }

  // State at t (right-continuous). Requires 0 <= t <= horizon.
  ActivityState state_at(double t) const;
  bool active_at(double t) const { return state_at(t) == ActivityState::Active; }

  // Alternating intervals clamped to [0, horizon].
  std::vector<Interval> intervals() const;

  // Continues the renewal sequence; existing flips are untouched.
  void extend(const ModelParams& params, double new_horizon);

 private:
  ActivityTimeline() = default;

  int level_ = 0;
  double horizon_ = 0.0;
  ActivityState initial_ = ActivityState::Active;
  std::vector<double> flips_;  // strictly increasing
  RandomSource stream_{0};
  bool extendable_ = false;
};

// Rate-1 Poisson clock for the ordered pair (upper, lower), lower < upper.
class InteractionClock {
 public:
  static InteractionClock sample(int upper, int lower, double horizon,
                                 RandomSource stream);
  static InteractionClock from_ticks(int upper, int lower, double horizon,
                                     std::vector<double> ticks);

  int upper() const { return upper_; }
  int lower() const { return lower_; }
  double horizon() const { return horizon_; }

  // Occurrence times within [0, horizon].
  std::vector<double> ticks() const;
  const std::vector<double>& raw_ticks() const { return ticks_; }

  void extend(double new_horizon);

 private:
  InteractionClock() = default;

  int upper_ = 0;
  int lower_ = 0;
  double horizon_ = 0.0;
  std::vector<double> ticks_;  // strictly increasing, last may exceed horizon
  RandomSource stream_{0};
  bool extendable_ = false;
};

struct FixationRecord {
  double time = 0.0;
  std::uint32_t fixed_type = 0;
};

// Full realization of the ordered particle system: one timeline per level,
// one clock per pair (i, j) with j < i, and the random initial types f.
// Everything needed to evaluate the recursive type function is materialized;
// queries are const but not thread-safe (type resolution memoizes per
// (level, segment) internally). Horizon extension is an exclusive operation.
class LookdownRealization {
 public:
  LookdownRealization(const ModelParams& params, double horizon,
                      const TypeAssignment& typing, RandomSource& rng);

  // Test hook assembling a realization from explicit parts.
  static LookdownRealization from_parts(const ModelParams& params, double horizon,
                                        std::vector<ActivityTimeline> timelines,
                                        std::vector<InteractionClock> clocks,
                                        std::vector<std::uint32_t> initial_types);

  int levels() const { return params_.pop_size; }
  double horizon() const { return horizon_; }
  const ModelParams& params() const { return params_; }

  const ActivityTimeline& timeline(int level) const;
  const InteractionClock& clock(int upper, int lower) const;
  std::uint32_t initial_type(int level) const;

  struct Interaction {
    double time;
    int donor;      // lower level (parent)
    int recipient;  // upper level
  };

  // Clock occurrences at which both the level and its donor were active,
  // sorted by time.
  const std::vector<Interaction>& effective_interactions(int level) const;

  // All levels' effective interactions merged in time order.
  std::vector<Interaction> all_effective_interactions() const;

  // Latest effective interaction of `level` at or before t, if any.
  std::optional<Interaction> last_interaction(int level, double t) const;

  // The recursive type function: the initial type if the level never looked
  // down before t, otherwise the donor's type at the interaction time.
  std::uint32_t resolve_type(int level, double t) const;

  // Full configuration (type, state) at time t.
  Configuration state_at(double t) const;

  void extend(double new_horizon);

 private:
  LookdownRealization() = default;

  std::size_t clock_index(int upper, int lower) const;

  ModelParams params_;
  double horizon_ = 0.0;
  std::vector<ActivityTimeline> timelines_;      // index = level - 1
  std::vector<InteractionClock> clocks_;         // pair (i, j), j < i
  std::vector<std::uint32_t> initial_types_;
  std::vector<std::vector<Interaction>> effective_;  // per level, time-sorted
  mutable std::map<std::pair<int, std::size_t>, std::uint32_t> resolve_memo_;

  void rebuild_effective(double from);
};

// First time every level carries level 1's initial type; fixation can only
// happen at an effective interaction, so the scan walks those in time order.
// Requires all-distinct initial types. Empty when not yet fixed within the
// horizon (extend and retry).
std::optional<FixationRecord> fixation_time(const LookdownRealization& real);

// Fixation time sampled through a fresh realization, doubling the horizon
// until fixation is observed. Initial horizon 2 ln(Np)/alpha (clamped to 1).
double sample_fixation_time(const ModelParams& params, RandomSource& rng);

// Fixation time from the equivalent thinned jump chain: per-level activity
// flips plus one interaction clock of rate C(A,2) over the currently active
// levels, parent always the lower one. Same law as the realization path
// (no-op ticks carry no information), O(N) memory, used for large N.
double sample_fixation_time_fast(const ModelParams& params, RandomSource& rng);

// First clock occurrence between `level` and any of the levels 1..k at which
// both are active, states started stationary. Law: Exp(k p^2).
double sample_first_coalescence(const ModelParams& params, int level, int k,
                                RandomSource& rng);

// Joint draw, on one realization of timelines and clocks, of
//   direct_time: first effective (level, j<=k) clock occurrence, and
//   merge_time:  time at which the ancestral line of `level` meets the
//                ancestral lines of levels 1..k (lines hop to the donor
//                level at effective ticks; meeting = occupying one level).
// merge_time is stochastically dominated by direct_time; the domination is
// not pathwise (a line can first hop to an intermediate level and bypass
// the direct clock), see the tests.
struct JointCoalescence {
  double direct_time;
  double merge_time;
};
JointCoalescence sample_joint_coalescence(const ModelParams& params, int level,
                                          int k, RandomSource& rng);

// Line-delimited summary: timeline intervals then clock ticks.
void write_realization_summary(std::ostream& os, const LookdownRealization& real);

}  // namespace seedbank::lookdown
