#include "seedbank/lookdown.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

#include "seedbank/io.hpp"

namespace seedbank::lookdown {

namespace {

double flip_rate(const ModelParams& params, ActivityState s) {
  return s == ActivityState::Active ? params.sigma : params.alpha;
}

ActivityState flipped(ActivityState s) {
  return s == ActivityState::Active ? ActivityState::Dormant
                                    : ActivityState::Active;
}

// Two-state chain advanced lazily; query times must be non-decreasing.
class LazyState {
 public:
  LazyState(const ModelParams& params, RandomSource stream)
      : params_(params), stream_(std::move(stream)) {
    state_ = stream_.bernoulli(params.active_probability())
                 ? ActivityState::Active
                 : ActivityState::Dormant;
    next_flip_ = stream_.exponential(flip_rate(params_, state_));
  }

  bool active_at(double t) {
    while (next_flip_ <= t) {
      state_ = flipped(state_);
      next_flip_ += stream_.exponential(flip_rate(params_, state_));
    }
    return state_ == ActivityState::Active;
  }

 private:
  ModelParams params_;
  RandomSource stream_;
  ActivityState state_;
  double next_flip_;
};

}  // namespace

ActivityTimeline ActivityTimeline::sample(const ModelParams& params, int level,
                                          double horizon, RandomSource stream) {
  params.validate();
  if (!(horizon >= 0.0)) throw std::invalid_argument("ActivityTimeline: bad horizon");
  ActivityTimeline tl;
  tl.level_ = level;
  tl.horizon_ = horizon;
  tl.stream_ = std::move(stream);
  tl.extendable_ = true;
  tl.initial_ = tl.stream_.bernoulli(params.active_probability())
                    ? ActivityState::Active
                    : ActivityState::Dormant;
  double t = 0.0;
  ActivityState s = tl.initial_;
  for (;;) {
    t += tl.stream_.exponential(flip_rate(params, s));
    tl.flips_.push_back(t);
    s = flipped(s);
    if (t > horizon) break;
  }
  return tl;
}

ActivityTimeline ActivityTimeline::from_flips(int level, double horizon,
                                              ActivityState initial,
                                              std::vector<double> flips) {
  for (std::size_t i = 0; i < flips.size(); ++i) {
    if (flips[i] <= 0.0 || (i > 0 && flips[i] <= flips[i - 1])) {
      throw std::invalid_argument("ActivityTimeline: flips must be positive and increasing");
    }
  }
  ActivityTimeline tl;
  tl.level_ = level;
  tl.horizon_ = horizon;
  tl.initial_ = initial;
  tl.flips_ = std::move(flips);
  tl.extendable_ = false;
  return tl;
}

ActivityState ActivityTimeline::state_at(double t) const {
  if (t < 0.0 || t > horizon_) {
    throw std::out_of_range("ActivityTimeline::state_at: t outside [0, horizon]");
  }
  const auto n_flips = static_cast<std::size_t>(
      std::upper_bound(flips_.begin(), flips_.end(), t) - flips_.begin());
  return n_flips % 2 == 0 ? initial_ : flipped(initial_);
}

std::vector<ActivityTimeline::Interval> ActivityTimeline::intervals() const {
  std::vector<Interval> out;
  double start = 0.0;
  ActivityState s = initial_;
  for (double f : flips_) {
    if (f >= horizon_) break;
    out.push_back({start, f, s});
    start = f;
    s = flipped(s);
  }
  if (start < horizon_ || out.empty()) out.push_back({start, horizon_, s});
  return out;
}

void ActivityTimeline::extend(const ModelParams& params, double new_horizon) {
  if (!extendable_) throw std::logic_error("ActivityTimeline: not extendable");
  if (new_horizon <= horizon_) return;
  while (flips_.back() <= new_horizon) {
    // State on the interval starting at the last stored flip.
    ActivityState s = flips_.size() % 2 == 0 ? initial_ : flipped(initial_);
    flips_.push_back(flips_.back() + stream_.exponential(flip_rate(params, s)));
  }
  horizon_ = new_horizon;
}

InteractionClock InteractionClock::sample(int upper, int lower, double horizon,
                                          RandomSource stream) {
  if (lower >= upper || lower < 1) {
    throw std::invalid_argument("InteractionClock: requires 1 <= lower < upper");
  }
  InteractionClock c;
  c.upper_ = upper;
  c.lower_ = lower;
  c.horizon_ = horizon;
  c.stream_ = std::move(stream);
  c.extendable_ = true;
  double t = 0.0;
  for (;;) {
    t += c.stream_.exponential(1.0);
    c.ticks_.push_back(t);
    if (t > horizon) break;
  }
  return c;
}

InteractionClock InteractionClock::from_ticks(int upper, int lower, double horizon,
                                              std::vector<double> ticks) {
  if (lower >= upper || lower < 1) {
    throw std::invalid_argument("InteractionClock: requires 1 <= lower < upper");
  }
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    if (ticks[i] <= 0.0 || (i > 0 && ticks[i] <= ticks[i - 1])) {
      throw std::invalid_argument("InteractionClock: ticks must be positive and increasing");
    }
  }
  InteractionClock c;
  c.upper_ = upper;
  c.lower_ = lower;
  c.horizon_ = horizon;
  c.ticks_ = std::move(ticks);
  c.extendable_ = false;
  return c;
}

std::vector<double> InteractionClock::ticks() const {
  std::vector<double> out;
  for (double t : ticks_) {
    if (t > horizon_) break;
    out.push_back(t);
  }
  return out;
}

void InteractionClock::extend(double new_horizon) {
  if (!extendable_) throw std::logic_error("InteractionClock: not extendable");
  if (new_horizon <= horizon_) return;
  while (ticks_.back() <= new_horizon) {
    ticks_.push_back(ticks_.back() + stream_.exponential(1.0));
  }
  horizon_ = new_horizon;
}

LookdownRealization::LookdownRealization(const ModelParams& params, double horizon,
                                         const TypeAssignment& typing,
                                         RandomSource& rng) {
  params.validate();
  if (!(horizon > 0.0)) throw std::invalid_argument("LookdownRealization: horizon must be > 0");
  params_ = params;
  horizon_ = horizon;

  RandomSource base(rng.next_u64());
  const int n = params.pop_size;
  timelines_.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    timelines_.push_back(ActivityTimeline::sample(
        params, i, horizon, base.substream("ld-timeline", static_cast<std::uint64_t>(i))));
  }
  for (int i = 2; i <= n; ++i) {
    for (int j = 1; j < i; ++j) {
      clocks_.push_back(InteractionClock::sample(
          i, j, horizon,
          base.substream("ld-clock", static_cast<std::uint64_t>(i),
                         static_cast<std::uint64_t>(j))));
    }
  }
  initial_types_.resize(static_cast<std::size_t>(n));
  RandomSource types_stream = base.substream("ld-types");
  for (int i = 0; i < n; ++i) {
    initial_types_[static_cast<std::size_t>(i)] =
        typing.kind == TypeAssignment::AllDistinct
            ? static_cast<std::uint32_t>(i)
            : static_cast<std::uint32_t>(types_stream.uniform_index(
                  static_cast<std::uint64_t>(typing.n_types)));
  }
  effective_.resize(static_cast<std::size_t>(n));
  rebuild_effective(0.0);
}

LookdownRealization LookdownRealization::from_parts(
    const ModelParams& params, double horizon,
    std::vector<ActivityTimeline> timelines, std::vector<InteractionClock> clocks,
    std::vector<std::uint32_t> initial_types) {
  params.validate();
  const auto n = static_cast<std::size_t>(params.pop_size);
  if (timelines.size() != n || initial_types.size() != n ||
      clocks.size() != n * (n - 1) / 2) {
    throw std::invalid_argument("LookdownRealization::from_parts: size mismatch");
  }
  LookdownRealization real;
  real.params_ = params;
  real.horizon_ = horizon;
  real.timelines_ = std::move(timelines);
  real.clocks_ = std::move(clocks);
  real.initial_types_ = std::move(initial_types);
  real.effective_.resize(n);
  real.rebuild_effective(0.0);
  return real;
}

std::size_t LookdownRealization::clock_index(int upper, int lower) const {
  if (lower < 1 || lower >= upper || upper > params_.pop_size) {
    throw std::out_of_range("LookdownRealization: bad pair");
  }
  return static_cast<std::size_t>((upper - 2) * (upper - 1) / 2 + (lower - 1));
}

const ActivityTimeline& LookdownRealization::timeline(int level) const {
  if (level < 1 || level > params_.pop_size) {
    throw std::out_of_range("LookdownRealization::timeline: bad level");
  }
  return timelines_[static_cast<std::size_t>(level - 1)];
}

const InteractionClock& LookdownRealization::clock(int upper, int lower) const {
  return clocks_[clock_index(upper, lower)];
}

std::uint32_t LookdownRealization::initial_type(int level) const {
  if (level < 1 || level > params_.pop_size) {
    throw std::out_of_range("LookdownRealization::initial_type: bad level");
  }
  return initial_types_[static_cast<std::size_t>(level - 1)];
}

void LookdownRealization::rebuild_effective(double from) {
  const int n = params_.pop_size;
  for (int i = 2; i <= n; ++i) {
    std::vector<Interaction> fresh;
    for (int j = 1; j < i; ++j) {
      const auto& c = clocks_[clock_index(i, j)];
      for (double tick : c.raw_ticks()) {
        if (tick > horizon_) break;
        if (tick <= from) continue;
        if (timelines_[static_cast<std::size_t>(i - 1)].active_at(tick) &&
            timelines_[static_cast<std::size_t>(j - 1)].active_at(tick)) {
          fresh.push_back({tick, j, i});
        }
      }
    }
    std::sort(fresh.begin(), fresh.end(),
              [](const Interaction& a, const Interaction& b) { return a.time < b.time; });
    auto& dst = effective_[static_cast<std::size_t>(i - 1)];
    dst.insert(dst.end(), fresh.begin(), fresh.end());
  }
}

const std::vector<LookdownRealization::Interaction>&
LookdownRealization::effective_interactions(int level) const {
  if (level < 1 || level > params_.pop_size) {
    throw std::out_of_range("LookdownRealization::effective_interactions: bad level");
  }
  return effective_[static_cast<std::size_t>(level - 1)];
}

std::vector<LookdownRealization::Interaction>
LookdownRealization::all_effective_interactions() const {
  std::vector<Interaction> all;
  for (const auto& per_level : effective_) {
    all.insert(all.end(), per_level.begin(), per_level.end());
  }
  std::sort(all.begin(), all.end(),
            [](const Interaction& a, const Interaction& b) { return a.time < b.time; });
  return all;
}

std::optional<LookdownRealization::Interaction>
LookdownRealization::last_interaction(int level, double t) const {
  if (t < 0.0 || t > horizon_) {
    throw std::out_of_range("LookdownRealization::last_interaction: t outside [0, horizon]");
  }
  const auto& evs = effective_interactions(level);
  auto it = std::upper_bound(evs.begin(), evs.end(), t,
                             [](double v, const Interaction& e) { return v < e.time; });
  if (it == evs.begin()) return std::nullopt;
  return *(it - 1);
}

std::uint32_t LookdownRealization::resolve_type(int level, double t) const {
  if (t < 0.0 || t > horizon_) {
    throw std::out_of_range("LookdownRealization::resolve_type: t outside [0, horizon]");
  }
  const auto& evs = effective_interactions(level);
  const auto seg = static_cast<std::size_t>(
      std::upper_bound(evs.begin(), evs.end(), t,
                       [](double v, const Interaction& e) { return v < e.time; }) -
      evs.begin());
  if (seg == 0) return initial_types_[static_cast<std::size_t>(level - 1)];
  const auto key = std::make_pair(level, seg);
  if (auto it = resolve_memo_.find(key); it != resolve_memo_.end()) return it->second;
  const Interaction& last = evs[seg - 1];
  const std::uint32_t result = resolve_type(last.donor, last.time);
  resolve_memo_.emplace(key, result);
  return result;
}

Configuration LookdownRealization::state_at(double t) const {
  std::vector<Particle> particles(static_cast<std::size_t>(params_.pop_size));
  for (int i = 1; i <= params_.pop_size; ++i) {
    auto& q = particles[static_cast<std::size_t>(i - 1)];
    q.type_id = resolve_type(i, t);
    q.state = timelines_[static_cast<std::size_t>(i - 1)].state_at(t);
  }
  return Configuration(std::move(particles));
}

void LookdownRealization::extend(double new_horizon) {
  if (new_horizon <= horizon_) return;
  const double old_horizon = horizon_;
  for (auto& tl : timelines_) tl.extend(params_, new_horizon);
  for (auto& c : clocks_) c.extend(new_horizon);
  horizon_ = new_horizon;
  rebuild_effective(old_horizon);
}

std::optional<FixationRecord> fixation_time(const LookdownRealization& real) {
  const int n = real.levels();
  const std::uint32_t target = real.initial_type(1);
  if (n == 1) return FixationRecord{0.0, target};

  std::vector<std::uint32_t> types(static_cast<std::size_t>(n));
  std::set<std::uint32_t> distinct;
  for (int i = 1; i <= n; ++i) {
    types[static_cast<std::size_t>(i - 1)] = real.initial_type(i);
    distinct.insert(real.initial_type(i));
  }
  if (static_cast<int>(distinct.size()) != n) {
    throw std::invalid_argument("fixation_time: initial types must be all distinct");
  }

  int carrying = 1;  // level 1 only, since types are distinct
  for (const auto& ev : real.all_effective_interactions()) {
    auto& child = types[static_cast<std::size_t>(ev.recipient - 1)];
    const std::uint32_t parent = types[static_cast<std::size_t>(ev.donor - 1)];
    if (child == parent) continue;
    if (child == target) --carrying;
    child = parent;
    if (child == target) ++carrying;
    if (carrying == n) return FixationRecord{ev.time, target};
  }
  return std::nullopt;
}

namespace {

double initial_fixation_horizon(const ModelParams& params) {
  const double np = static_cast<double>(params.pop_size) * params.active_probability();
  return std::max(1.0, 2.0 * std::log(std::max(np, 2.0)) / params.alpha);
}

}  // namespace

double sample_fixation_time(const ModelParams& params, RandomSource& rng) {
  params.validate();
  if (params.pop_size == 1) return 0.0;
  double horizon = initial_fixation_horizon(params);
  LookdownRealization real(params, horizon, TypeAssignment::distinct(), rng);
  for (;;) {
    if (auto rec = fixation_time(real)) return rec->time;
    horizon *= 2.0;
    if (horizon > 1e12) throw std::runtime_error("sample_fixation_time: no fixation");
    real.extend(horizon);
  }
}

double sample_fixation_time_fast(const ModelParams& params, RandomSource& rng) {
  params.validate();
  const int n = params.pop_size;
  if (n == 1) return 0.0;
  const double p = params.active_probability();

  // Level i carries "type" i-1; fixation when every level carries 0.
  std::vector<int> types(static_cast<std::size_t>(n));
  std::vector<int> active_levels;
  std::vector<int> dormant_levels;
  std::vector<int> slot(static_cast<std::size_t>(n));      // position in its list
  std::vector<bool> is_active(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    types[static_cast<std::size_t>(i)] = i;
    const bool a = rng.bernoulli(p);
    is_active[static_cast<std::size_t>(i)] = a;
    auto& list = a ? active_levels : dormant_levels;
    slot[static_cast<std::size_t>(i)] = static_cast<int>(list.size());
    list.push_back(i);
  }

  auto move_level = [&](int lvl, std::vector<int>& from, std::vector<int>& to) {
    const int pos = slot[static_cast<std::size_t>(lvl)];
    const int last = from.back();
    from[static_cast<std::size_t>(pos)] = last;
    slot[static_cast<std::size_t>(last)] = pos;
    from.pop_back();
    slot[static_cast<std::size_t>(lvl)] = static_cast<int>(to.size());
    to.push_back(lvl);
  };

  int carrying = 1;
  double t = 0.0;
  for (;;) {
    const auto n_active = static_cast<double>(active_levels.size());
    const double rate_deact = params.sigma * n_active;
    const double rate_act = params.alpha * static_cast<double>(dormant_levels.size());
    const double rate_inter = n_active * (n_active - 1.0) / 2.0;
    const double total = rate_deact + rate_act + rate_inter;
    t += rng.exponential(total);
    const double u = rng.uniform() * total;
    if (u < rate_deact) {
      const int lvl = active_levels[rng.uniform_index(active_levels.size())];
      is_active[static_cast<std::size_t>(lvl)] = false;
      move_level(lvl, active_levels, dormant_levels);
    } else if (u < rate_deact + rate_act) {
      const int lvl = dormant_levels[rng.uniform_index(dormant_levels.size())];
      is_active[static_cast<std::size_t>(lvl)] = true;
      move_level(lvl, dormant_levels, active_levels);
    } else {
      std::uint64_t a = 0;
      std::uint64_t b = 0;
      rng.uniform_distinct_pair(active_levels.size(), a, b);
      const int u1 = active_levels[a];
      const int u2 = active_levels[b];
      const int parent = std::min(u1, u2);
      const int child = std::max(u1, u2);
      auto& ct = types[static_cast<std::size_t>(child)];
      const int pt = types[static_cast<std::size_t>(parent)];
      if (ct != pt) {
        if (ct == 0) --carrying;
        ct = pt;
        if (ct == 0) ++carrying;
        if (carrying == n) return t;
      }
    }
  }
}

double sample_first_coalescence(const ModelParams& params, int level, int k,
                                RandomSource& rng) {
  params.validate();
  if (k < 1 || k >= level) {
    throw std::invalid_argument("sample_first_coalescence: requires 1 <= k < level");
  }
  LazyState own(params, rng.substream("fc-state", static_cast<std::uint64_t>(level)));
  std::vector<LazyState> lower;
  lower.reserve(static_cast<std::size_t>(k));
  for (int j = 1; j <= k; ++j) {
    lower.emplace_back(params, rng.substream("fc-state", static_cast<std::uint64_t>(j)));
  }
  RandomSource ticks = rng.substream("fc-ticks");
  double t = 0.0;
  for (;;) {
    t += ticks.exponential(static_cast<double>(k));
    const auto j = ticks.uniform_index(static_cast<std::uint64_t>(k));
    if (own.active_at(t) && lower[j].active_at(t)) return t;
  }
}

JointCoalescence sample_joint_coalescence(const ModelParams& params, int level,
                                          int k, RandomSource& rng) {
  params.validate();
  if (k < 1 || k >= level) {
    throw std::invalid_argument("sample_joint_coalescence: requires 1 <= k < level");
  }

  // Ancestral lines for the sample {1..k, level}. Lines hop to the donor
  // level at effective ticks of the pair clocks attached to their current
  // level; two lines on one level have met. Only the union of clocks that
  // can move a line, plus the direct (level, j<=k) clocks, is simulated.
  std::vector<LazyState> states;
  states.reserve(static_cast<std::size_t>(level));
  for (int j = 1; j <= level; ++j) {
    states.emplace_back(params, rng.substream("jc-state", static_cast<std::uint64_t>(j)));
  }
  RandomSource ticks = rng.substream("jc-ticks");

  constexpr int kNone = -1;
  std::vector<int> occupant(static_cast<std::size_t>(level + 1), kNone);
  // Line ids: 0..k-1 are the lower sample, k is the i-line.
  std::vector<int> position(static_cast<std::size_t>(k + 1));
  std::vector<bool> alive(static_cast<std::size_t>(k + 1), true);
  for (int j = 1; j <= k; ++j) {
    occupant[static_cast<std::size_t>(j)] = j - 1;
    position[static_cast<std::size_t>(j - 1)] = j;
  }
  occupant[static_cast<std::size_t>(level)] = k;
  position[static_cast<std::size_t>(k)] = level;

  double direct_time = -1.0;
  double merge_time = -1.0;
  double t = 0.0;
  while (direct_time < 0.0 || merge_time < 0.0) {
    // Clock union: (j, m) for each occupied m and j < m, plus (j <= k, level)
    // when level is vacated and the direct time is still pending.
    double weight_occupied = 0.0;
    for (int id = 0; id <= k; ++id) {
      if (alive[static_cast<std::size_t>(id)]) {
        weight_occupied += static_cast<double>(position[static_cast<std::size_t>(id)] - 1);
      }
    }
    const bool need_direct_extra =
        direct_time < 0.0 && occupant[static_cast<std::size_t>(level)] == kNone;
    const double weight_direct = need_direct_extra ? static_cast<double>(k) : 0.0;
    const double total = weight_occupied + weight_direct;
    t += ticks.exponential(total);

    int tick_upper = 0;
    int tick_lower = 0;
    double u = ticks.uniform() * total;
    if (u < weight_occupied) {
      for (int id = 0; id <= k; ++id) {
        if (!alive[static_cast<std::size_t>(id)]) continue;
        const double w = static_cast<double>(position[static_cast<std::size_t>(id)] - 1);
        if (u < w) {
          tick_upper = position[static_cast<std::size_t>(id)];
          tick_lower = 1 + static_cast<int>(ticks.uniform_index(
                               static_cast<std::uint64_t>(tick_upper - 1)));
          break;
        }
        u -= w;
      }
    } else {
      tick_upper = level;
      tick_lower = 1 + static_cast<int>(ticks.uniform_index(static_cast<std::uint64_t>(k)));
    }

    if (!states[static_cast<std::size_t>(tick_upper - 1)].active_at(t) ||
        !states[static_cast<std::size_t>(tick_lower - 1)].active_at(t)) {
      continue;
    }

    if (direct_time < 0.0 && tick_upper == level && tick_lower <= k) direct_time = t;

    const int mover = occupant[static_cast<std::size_t>(tick_upper)];
    if (mover == kNone) continue;
    occupant[static_cast<std::size_t>(tick_upper)] = kNone;
    const int resident = occupant[static_cast<std::size_t>(tick_lower)];
    if (resident == kNone) {
      occupant[static_cast<std::size_t>(tick_lower)] = mover;
      position[static_cast<std::size_t>(mover)] = tick_lower;
    } else {
      // Lines meet; the i-line merging with any lower line sets the time.
      if (merge_time < 0.0 && (mover == k || resident == k)) merge_time = t;
      const int survivor = std::min(mover, resident);  // keep k-lines alive
      alive[static_cast<std::size_t>(mover == survivor ? resident : mover)] = false;
      occupant[static_cast<std::size_t>(tick_lower)] = survivor;
      position[static_cast<std::size_t>(survivor)] = tick_lower;
    }
  }
  return {direct_time, merge_time};
}

void write_realization_summary(std::ostream& os, const LookdownRealization& real) {
  os << "record,upper,lower,start,end,state\n";
  for (int i = 1; i <= real.levels(); ++i) {
    for (const auto& iv : real.timeline(i).intervals()) {
      os << "timeline," << i << ",0," << io::fmt_double(iv.start) << ','
         << io::fmt_double(iv.end) << ',' << state_char(iv.state) << '\n';
    }
  }
  for (int i = 2; i <= real.levels(); ++i) {
    for (int j = 1; j < i; ++j) {
      for (double t : real.clock(i, j).ticks()) {
        os << "tick," << i << ',' << j << ',' << io::fmt_double(t) << ",,\n";
      }
    }
  }
}

}  // namespace seedbank::lookdown
