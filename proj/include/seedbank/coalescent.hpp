#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "seedbank/config.hpp"
#include "seedbank/random.hpp"

namespace seedbank::coalescent {

struct BlockCount {
  int n_active = 0;
  int n_dormant = 0;

  int total() const { return n_active + n_dormant; }
  friend bool operator==(const BlockCount&, const BlockCount&) = default;
};

// Partition of {1..k} with one activity flag per block. Kept canonical:
// members sorted within blocks, blocks ordered by smallest member.
class MarkedPartition {
 public:
  struct Block {
    std::vector<int> members;
    ActivityState flag = ActivityState::Active;

    friend bool operator==(const Block&, const Block&) = default;
  };

  MarkedPartition(std::vector<Block> blocks, int sample_size);

  static MarkedPartition singletons(const std::vector<ActivityState>& flags);
  static MarkedPartition single_block(int k, ActivityState flag);

  // Singleton blocks, each active independently with probability p.
  static MarkedPartition sample_stationary(int k, const ModelParams& params,
                                           RandomSource& rng);

  int sample_size() const { return sample_size_; }
  int n_blocks() const { return static_cast<int>(blocks_.size()); }
  const Block& block(int b) const { return blocks_[static_cast<std::size_t>(b)]; }
  const std::vector<Block>& blocks() const { return blocks_; }

  BlockCount block_count() const;

  MarkedPartition merge_blocks(int b1, int b2) const;  // result carries the a-flag
  MarkedPartition flip_flag(int b) const;

  friend bool operator==(const MarkedPartition&, const MarkedPartition&) = default;

 private:
  std::vector<Block> blocks_;
  int sample_size_ = 0;
};

// All transitions out of a marked partition: every unordered pair of
// a-flagged blocks merges at rate 1; a-flags flip to d at rate sigma and
// d-flags to a at rate alpha. Rates come from the params so the mirrored
// convention is a call-site choice.
std::vector<std::pair<MarkedPartition, double>> coalescent_transitions(
    const MarkedPartition& pi, const ModelParams& params);

struct BlockPathPoint {
  double time;
  int n_active;
  int n_dormant;
};

// Per-run observables. rho_n ends the Kingman phase: each initial line
// carries a never-dormant tag, cleared when its block first turns dormant
// and inherited through merges; rho_n is the first time at most one tagged
// block remains. psi_n is the largest realized first-inactivity period:
// the dormancy durations of initially dormant lines plus every dormancy
// entered by a still-tagged block, all of which end before absorption, so
// psi_n <= tmrca pathwise.
struct CoalescentRun {
  double tmrca = 0.0;
  double rho_n = 0.0;
  double psi_n = 0.0;
  std::vector<BlockPathPoint> block_path;
  std::vector<std::pair<double, MarkedPartition>> partition_path;
  std::uint64_t seed = 0;
};

struct CoalescentOptions {
  bool record_block_path = true;
  bool record_partition_path = false;
};

// Jump-chain simulation of the full marked-partition chain until one block
// remains.
CoalescentRun simulate_coalescent(const ModelParams& params, MarkedPartition init,
                                  RandomSource& rng,
                                  const CoalescentOptions& opts = {});

// Lumped backend: identical block-counting law plus the tag and dormancy
// records needed for rho_n and the coupled psi_n, O(1) work per event.
// Initial flags are stationary.
CoalescentRun simulate_coalescent_lumped(const ModelParams& params, int n,
                                         RandomSource& rng,
                                         const CoalescentOptions& opts = {});

struct BlockCountingRun {
  double tmrca = 0.0;
  std::vector<BlockPathPoint> path;
};

// Plain (N_t, M_t) chain: (N,M) -> (N-1,M) at C(N,2), -> (N-1,M+1) at
// N sigma, -> (N+1,M-1) at M alpha; absorbs at N+M = 1.
BlockCountingRun simulate_block_counting(const ModelParams& params, BlockCount init,
                                         RandomSource& rng,
                                         bool record_path = true);

// Number of initially dormant lines under stationary initial flags.
int sample_M0(const ModelParams& params, int n, RandomSource& rng);

// B_n = sum_{i=2}^n Bernoulli(2 sigma / (2 sigma + i - 1)), independent.
int sample_B_n(const ModelParams& params, int n, RandomSource& rng);

double exact_mean_B_n(const ModelParams& params, int n);

// Largest first-inactivity period from its distributional representation:
// K = M0 + B_n, then the max of K i.i.d. Exp(alpha) draws (0 when K = 0).
double sample_psi_n(const ModelParams& params, int n, RandomSource& rng);

// Monte Carlo mixture estimate of E[(1 - e^{-alpha t})^{M0+B_n}], an oracle
// for the law of psi_n that never touches the sampler above.
double psi_cdf(const ModelParams& params, int n, double t, int n_mix_samples,
               RandomSource& rng);

// Mixture CDF on a grid sharing one set of K draws across all t.
std::vector<double> psi_cdf_grid(const ModelParams& params, int n,
                                 const std::vector<double>& ts, int n_mix_samples,
                                 RandomSource& rng);

// Coupled psi_n draws for every n in ns (ascending), extending shared
// Bernoulli/exponential arrays; the result is non-decreasing pathwise.
std::vector<double> sample_psi_coupled_sequence(const ModelParams& params,
                                                const std::vector<int>& ns,
                                                RandomSource& rng);

// Line-delimited export: block-count path then a summary record.
void write_coalescent_run(std::ostream& os, const CoalescentRun& run);

}  // namespace seedbank::coalescent
