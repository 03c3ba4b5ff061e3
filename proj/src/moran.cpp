#include "seedbank/moran.hpp"

#include <ostream>
#include <stdexcept>

#include "seedbank/io.hpp"

namespace seedbank::moran {

Trajectory simulate(const ModelParams& params, Configuration init,
                    double horizon, RandomSource& rng) {
  params.validate();
  if (init.size() != params.pop_size) {
    throw std::invalid_argument("simulate: configuration size != pop_size");
  }
  if (!(horizon >= 0.0)) throw std::invalid_argument("simulate: horizon must be >= 0");

  const auto n = static_cast<std::uint64_t>(params.pop_size);
  const double rate_deact = params.sigma * static_cast<double>(n);
  const double rate_act = params.alpha * static_cast<double>(n);
  const double rate_pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double total_rate = rate_deact + rate_act + rate_pairs;

  Trajectory traj;
  traj.initial = init;
  traj.horizon = horizon;

  Configuration z = std::move(init);
  double t = 0.0;
  for (;;) {
    t += rng.exponential(total_rate);
    if (t > horizon) break;

    Event ev;
    ev.time = t;
    const double u = rng.uniform() * total_rate;
    if (u < rate_deact) {
      const int i = static_cast<int>(rng.uniform_index(n)) + 1;
      ev.kind = EventKind::Deactivate;
      ev.target = i;
      ev.effective = z.at_level(i).state == ActivityState::Active;
      z.at_level(i).state = ActivityState::Dormant;
    } else if (u < rate_deact + rate_act) {
      const int i = static_cast<int>(rng.uniform_index(n)) + 1;
      ev.kind = EventKind::Activate;
      ev.target = i;
      ev.effective = z.at_level(i).state == ActivityState::Dormant;
      z.at_level(i).state = ActivityState::Active;
    } else {
      std::uint64_t a = 0;
      std::uint64_t b = 0;
      rng.uniform_distinct_pair(n, a, b);
      int parent = static_cast<int>(a) + 1;
      int child = static_cast<int>(b) + 1;
      if (rng.bernoulli(0.5)) std::swap(parent, child);
      ev.kind = EventKind::Interact;
      ev.source = parent;
      ev.target = child;
      ev.effective = z.at_level(parent).state == ActivityState::Active &&
                     z.at_level(child).state == ActivityState::Active;
      if (ev.effective) z.at_level(child).type_id = z.at_level(parent).type_id;
    }
    traj.events.push_back(ev);
  }
  return traj;
}

Configuration state_at(const Trajectory& traj, double t) {
  Configuration z = traj.initial;
  for (const auto& ev : traj.events) {
    if (ev.time > t) break;
    switch (ev.kind) {
      case EventKind::Deactivate:
        z.at_level(ev.target).state = ActivityState::Dormant;
        break;
      case EventKind::Activate:
        z.at_level(ev.target).state = ActivityState::Active;
        break;
      case EventKind::Interact:
        if (ev.effective) z.at_level(ev.target).type_id = z.at_level(ev.source).type_id;
        break;
    }
  }
  return z;
}

Configuration final_state(const Trajectory& traj) {
  return state_at(traj, traj.horizon);
}

EmpiricalMeasure::EmpiricalMeasure(const Configuration& z) : total_(z.size()) {
  for (const auto& q : z) ++counts_[{q.type_id, q.state}];
}

int EmpiricalMeasure::count(std::uint32_t type_id, ActivityState s) const {
  auto it = counts_.find({type_id, s});
  return it == counts_.end() ? 0 : it->second;
}

double EmpiricalMeasure::fraction(std::uint32_t type_id, ActivityState s) const {
  return total_ == 0 ? 0.0 : static_cast<double>(count(type_id, s)) / total_;
}

EmpiricalMeasure empirical_measure(const Configuration& z) {
  return EmpiricalMeasure(z);
}

void write_trajectory(std::ostream& os, const Trajectory& traj) {
  os << "time,kind,target,source,effective\n";
  for (const auto& ev : traj.events) {
    const char* kind = ev.kind == EventKind::Deactivate ? "deactivate"
                       : ev.kind == EventKind::Activate ? "activate"
                                                        : "interact";
    os << io::fmt_double(ev.time) << ',' << kind << ',' << ev.target << ','
       << ev.source << ',' << (ev.effective ? 1 : 0) << '\n';
  }
}

}  // namespace seedbank::moran
