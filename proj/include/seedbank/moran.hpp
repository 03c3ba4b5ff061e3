#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "seedbank/config.hpp"
#include "seedbank/random.hpp"

namespace seedbank::moran {

enum class EventKind : std::uint8_t { Deactivate, Activate, Interact };

// One jump of the forward chain. `target` is the acted-on level; for
// interactions `source` is the parent (already resolved by the fair coin)
// and `target` the replaced child. `effective` is false when the generator
// term was a no-op (deactivating a dormant particle, activating an active
// one, or an interaction with a dormant member).
struct Event {
  double time = 0.0;
  EventKind kind = EventKind::Deactivate;
  int target = 0;
  int source = 0;
  bool effective = false;
};

struct Trajectory {
  Configuration initial;
  std::vector<Event> events;
  double horizon = 0.0;
};

// Event-driven simulation of the N-particle chain: per-particle
// deactivation clocks at rate sigma and activation clocks at rate alpha
// (applied regardless of the current state, no-ops recorded but flagged),
// plus rate 1 per unordered pair with a fair coin for the parent. The total
// event rate is the constant sigma*N + alpha*N + N*(N-1)/2.
Trajectory simulate(const ModelParams& params, Configuration init,
                    double horizon, RandomSource& rng);

// Configuration at time t obtained by replaying the event list. t is
// clamped to the trajectory horizon; events at exactly t are applied.
Configuration state_at(const Trajectory& traj, double t);

Configuration final_state(const Trajectory& traj);

// Empirical measure of a configuration: exact integer counts over observed
// (type, state) pairs, so the total mass is exactly 1 by construction.
class EmpiricalMeasure {
 public:
  using Key = std::pair<std::uint32_t, ActivityState>;

  explicit EmpiricalMeasure(const Configuration& z);

  int total() const { return total_; }
  int count(std::uint32_t type_id, ActivityState s) const;
  double fraction(std::uint32_t type_id, ActivityState s) const;
  const std::map<Key, int>& counts() const { return counts_; }

 private:
  std::map<Key, int> counts_;
  int total_ = 0;
};

EmpiricalMeasure empirical_measure(const Configuration& z);

// Line-delimited export: time, kind, target, source, effective.
void write_trajectory(std::ostream& os, const Trajectory& traj);

}  // namespace seedbank::moran
