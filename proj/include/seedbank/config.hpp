#pragma once

#include <cstdint>
#include <vector>

#include "seedbank/random.hpp"

namespace seedbank {

// Model rates. Convention used throughout the library:
//   active  -> dormant at rate sigma,
//   dormant -> active  at rate alpha,
//   dormancy durations are Exp(alpha),
//   stationary probability of being active is p = alpha / (alpha + sigma).
struct ModelParams {
  double alpha = 1.0;  // dormant -> active rate (1/time)
  double sigma = 1.0;  // active -> dormant rate (1/time)
  int pop_size = 1;    // N, total number of individuals (constant)

  double active_probability() const { return alpha / (alpha + sigma); }

  // Throws std::invalid_argument on non-positive rates or pop_size < 1.
  void validate() const;
};

enum class ActivityState : std::uint8_t { Active, Dormant };

inline char state_char(ActivityState s) {
  return s == ActivityState::Active ? 'a' : 'd';
}

struct Particle {
  std::uint32_t type_id = 0;
  ActivityState state = ActivityState::Active;

  friend bool operator==(const Particle&, const Particle&) = default;
};

// Ordered configuration of the N-particle system. Levels are 1-based in the
// public API, matching the lookdown ordering; the population size is fixed
// for the lifetime of a run.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<Particle> particles)
      : particles_(std::move(particles)) {}

  int size() const { return static_cast<int>(particles_.size()); }

  const Particle& at_level(int level) const;
  Particle& at_level(int level);

  const std::vector<Particle>& particles() const { return particles_; }

  auto begin() const { return particles_.begin(); }
  auto end() const { return particles_.end(); }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<Particle> particles_;
};

// State transforms shared by the forward models. All return a modified copy;
// levels are 1-based and range-checked.
Configuration phi_deactivate(Configuration z, int level);
Configuration phi_activate(Configuration z, int level);

// Copies the parent's type onto the child only when both particles are
// active; states are never touched. Requires parent != child.
Configuration phi_reproduce(Configuration z, int parent, int child);

// Initial type assignment for sampled configurations.
struct TypeAssignment {
  enum Kind { AllDistinct, IidUniform } kind = AllDistinct;
  int n_types = 0;  // support size for IidUniform

  static TypeAssignment distinct() { return {AllDistinct, 0}; }
  static TypeAssignment iid_uniform(int k) { return {IidUniform, k}; }
};

// Stationary configuration: each particle active independently with
// probability p; types either 0..N-1 (one individual per type) or i.i.d.
// uniform on {0, ..., n_types-1}.
Configuration sample_stationary_config(const ModelParams& params,
                                       const TypeAssignment& typing,
                                       RandomSource& rng);

int count_active(const Configuration& z);
int count_distinct_types(const Configuration& z);
int count_type(const Configuration& z, std::uint32_t type_id);

// Most frequent type id; ties broken toward the smallest id.
std::uint32_t most_common_type(const Configuration& z);

}  // namespace seedbank
