#include "seedbank/config.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace seedbank {

void ModelParams::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (pop_size < 1) throw std::invalid_argument("pop_size must be >= 1");
}

namespace {

void check_level(const Configuration& z, int level, const char* who) {
  if (level < 1 || level > z.size()) {
    throw std::out_of_range(std::string(who) + ": level " +
                            std::to_string(level) + " out of range [1, " +
                            std::to_string(z.size()) + "]");
  }
}

}  // namespace

const Particle& Configuration::at_level(int level) const {
  check_level(*this, level, "Configuration::at_level");
  return particles_[static_cast<std::size_t>(level - 1)];
}

Particle& Configuration::at_level(int level) {
  check_level(*this, level, "Configuration::at_level");
  return particles_[static_cast<std::size_t>(level - 1)];
}

Configuration phi_deactivate(Configuration z, int level) {
  check_level(z, level, "phi_deactivate");
  z.at_level(level).state = ActivityState::Dormant;
  return z;
}

Configuration phi_activate(Configuration z, int level) {
  check_level(z, level, "phi_activate");
  z.at_level(level).state = ActivityState::Active;
  return z;
}

Configuration phi_reproduce(Configuration z, int parent, int child) {
  check_level(z, parent, "phi_reproduce");
  check_level(z, child, "phi_reproduce");
  if (parent == child) throw std::invalid_argument("phi_reproduce: parent == child");
  const Particle& p = z.at_level(parent);
  Particle& c = z.at_level(child);
  if (p.state == ActivityState::Active && c.state == ActivityState::Active) {
    c.type_id = p.type_id;
  }
  return z;
}

Configuration sample_stationary_config(const ModelParams& params,
                                       const TypeAssignment& typing,
                                       RandomSource& rng) {
  params.validate();
  if (typing.kind == TypeAssignment::IidUniform && typing.n_types < 1) {
    throw std::invalid_argument("sample_stationary_config: n_types must be >= 1");
  }
  const double p = params.active_probability();
  std::vector<Particle> particles(static_cast<std::size_t>(params.pop_size));
  for (int i = 0; i < params.pop_size; ++i) {
    auto& particle = particles[static_cast<std::size_t>(i)];
    particle.type_id =
        typing.kind == TypeAssignment::AllDistinct
            ? static_cast<std::uint32_t>(i)
            : static_cast<std::uint32_t>(
                  rng.uniform_index(static_cast<std::uint64_t>(typing.n_types)));
    particle.state =
        rng.bernoulli(p) ? ActivityState::Active : ActivityState::Dormant;
  }
  return Configuration(std::move(particles));
}

int count_active(const Configuration& z) {
  return static_cast<int>(std::count_if(z.begin(), z.end(), [](const Particle& q) {
    return q.state == ActivityState::Active;
  }));
}

int count_distinct_types(const Configuration& z) {
  std::vector<std::uint32_t> ids;
  ids.reserve(static_cast<std::size_t>(z.size()));
  for (const auto& q : z) ids.push_back(q.type_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return static_cast<int>(ids.size());
}

int count_type(const Configuration& z, std::uint32_t type_id) {
  return static_cast<int>(std::count_if(z.begin(), z.end(), [&](const Particle& q) {
    return q.type_id == type_id;
  }));
}

std::uint32_t most_common_type(const Configuration& z) {
  if (z.size() == 0) throw std::invalid_argument("most_common_type: empty configuration");
  std::map<std::uint32_t, int> counts;
  for (const auto& q : z) ++counts[q.type_id];
  std::uint32_t best = counts.begin()->first;
  int best_count = counts.begin()->second;
  for (const auto& [id, c] : counts) {
    if (c > best_count) {
      best = id;
      best_count = c;
    }
  }
  return best;
}

}  // namespace seedbank
