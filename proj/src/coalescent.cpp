#include "seedbank/coalescent.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "seedbank/io.hpp"

namespace seedbank::coalescent {

namespace {

void canonicalize(std::vector<MarkedPartition::Block>& blocks) {
  for (auto& b : blocks) std::sort(b.members.begin(), b.members.end());
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.members.front() < b.members.front(); });
}

}  // namespace

MarkedPartition::MarkedPartition(std::vector<Block> blocks, int sample_size)
    : blocks_(std::move(blocks)), sample_size_(sample_size) {
  std::vector<bool> seen(static_cast<std::size_t>(sample_size) + 1, false);
  int covered = 0;
  for (const auto& b : blocks_) {
    if (b.members.empty()) throw std::invalid_argument("MarkedPartition: empty block");
    for (int m : b.members) {
      if (m < 1 || m > sample_size || seen[static_cast<std::size_t>(m)]) {
        throw std::invalid_argument("MarkedPartition: blocks must partition {1..k}");
      }
      seen[static_cast<std::size_t>(m)] = true;
      ++covered;
    }
  }
  if (covered != sample_size) {
    throw std::invalid_argument("MarkedPartition: blocks must cover {1..k}");
  }
  canonicalize(blocks_);
}

MarkedPartition MarkedPartition::singletons(const std::vector<ActivityState>& flags) {
  std::vector<Block> blocks;
  blocks.reserve(flags.size());
  for (std::size_t i = 0; i < flags.size(); ++i) {
    blocks.push_back({{static_cast<int>(i) + 1}, flags[i]});
  }
  return MarkedPartition(std::move(blocks), static_cast<int>(flags.size()));
}

MarkedPartition MarkedPartition::single_block(int k, ActivityState flag) {
  Block b;
  b.flag = flag;
  for (int i = 1; i <= k; ++i) b.members.push_back(i);
  return MarkedPartition({std::move(b)}, k);
}

MarkedPartition MarkedPartition::sample_stationary(int k, const ModelParams& params,
                                                   RandomSource& rng) {
  params.validate();
  const double p = params.active_probability();
  std::vector<ActivityState> flags(static_cast<std::size_t>(k));
  for (auto& f : flags) {
    f = rng.bernoulli(p) ? ActivityState::Active : ActivityState::Dormant;
  }
  return singletons(flags);
}

BlockCount MarkedPartition::block_count() const {
  BlockCount bc;
  for (const auto& b : blocks_) {
    if (b.flag == ActivityState::Active) {
      ++bc.n_active;
    } else {
      ++bc.n_dormant;
    }
  }
  return bc;
}

MarkedPartition MarkedPartition::merge_blocks(int b1, int b2) const {
  if (b1 == b2 || b1 < 0 || b2 < 0 || b1 >= n_blocks() || b2 >= n_blocks()) {
    throw std::invalid_argument("merge_blocks: bad block indices");
  }
  std::vector<Block> blocks = blocks_;
  auto& dst = blocks[static_cast<std::size_t>(b1)];
  auto& src = blocks[static_cast<std::size_t>(b2)];
  dst.members.insert(dst.members.end(), src.members.begin(), src.members.end());
  dst.flag = ActivityState::Active;
  blocks.erase(blocks.begin() + b2);
  return MarkedPartition(std::move(blocks), sample_size_);
}

MarkedPartition MarkedPartition::flip_flag(int b) const {
  if (b < 0 || b >= n_blocks()) throw std::invalid_argument("flip_flag: bad block index");
  std::vector<Block> blocks = blocks_;
  auto& blk = blocks[static_cast<std::size_t>(b)];
  blk.flag = blk.flag == ActivityState::Active ? ActivityState::Dormant
                                               : ActivityState::Active;
  return MarkedPartition(std::move(blocks), sample_size_);
}

std::vector<std::pair<MarkedPartition, double>> coalescent_transitions(
    const MarkedPartition& pi, const ModelParams& params) {
  params.validate();
  std::vector<std::pair<MarkedPartition, double>> out;
  const int nb = pi.n_blocks();
  for (int a = 0; a < nb; ++a) {
    if (pi.block(a).flag != ActivityState::Active) continue;
    for (int b = a + 1; b < nb; ++b) {
      if (pi.block(b).flag != ActivityState::Active) continue;
      out.emplace_back(pi.merge_blocks(a, b), 1.0);
    }
  }
  for (int b = 0; b < nb; ++b) {
    const double rate =
        pi.block(b).flag == ActivityState::Active ? params.sigma : params.alpha;
    out.emplace_back(pi.flip_flag(b), rate);
  }
  return out;
}

CoalescentRun simulate_coalescent(const ModelParams& params, MarkedPartition init,
                                  RandomSource& rng, const CoalescentOptions& opts) {
  params.validate();

  struct SimBlock {
    std::vector<int> members;
    ActivityState flag;
    bool tagged;        // contains a line that never turned dormant
    double entered = 0.0;
    bool counts_psi = false;  // current dormancy is a first-inactivity period
  };

  std::vector<SimBlock> blocks;
  blocks.reserve(static_cast<std::size_t>(init.n_blocks()));
  int n_tagged = 0;
  for (const auto& b : init.blocks()) {
    SimBlock sb;
    sb.members = b.members;
    sb.flag = b.flag;
    sb.tagged = b.flag == ActivityState::Active;
    sb.counts_psi = b.flag == ActivityState::Dormant;
    if (sb.tagged) ++n_tagged;
    blocks.push_back(std::move(sb));
  }

  CoalescentRun run;
  run.seed = rng.seed();
  bool rho_set = n_tagged <= 1;

  auto record = [&](double t) {
    if (opts.record_block_path || opts.record_partition_path) {
      int a = 0;
      for (const auto& b : blocks) a += b.flag == ActivityState::Active ? 1 : 0;
      if (opts.record_block_path) {
        run.block_path.push_back({t, a, static_cast<int>(blocks.size()) - a});
      }
    }
    if (opts.record_partition_path) {
      std::vector<MarkedPartition::Block> snapshot;
      snapshot.reserve(blocks.size());
      for (const auto& b : blocks) snapshot.push_back({b.members, b.flag});
      run.partition_path.emplace_back(
          t, MarkedPartition(std::move(snapshot), init.sample_size()));
    }
  };

  record(0.0);
  double t = 0.0;
  while (blocks.size() > 1) {
    std::vector<int> active;
    std::vector<int> dormant;
    for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
      (blocks[static_cast<std::size_t>(b)].flag == ActivityState::Active ? active
                                                                         : dormant)
          .push_back(b);
    }
    const auto na = static_cast<double>(active.size());
    const double rate_merge = na * (na - 1.0) / 2.0;
    const double rate_deact = params.sigma * na;
    const double rate_act = params.alpha * static_cast<double>(dormant.size());
    const double total = rate_merge + rate_deact + rate_act;

    t += rng.exponential(total);
    const double u = rng.uniform() * total;
    if (u < rate_merge) {
      std::uint64_t x = 0;
      std::uint64_t y = 0;
      rng.uniform_distinct_pair(active.size(), x, y);
      auto& keep = blocks[static_cast<std::size_t>(active[x])];
      auto& gone = blocks[static_cast<std::size_t>(active[y])];
      if (keep.tagged && gone.tagged) --n_tagged;
      keep.tagged = keep.tagged || gone.tagged;
      keep.members.insert(keep.members.end(), gone.members.begin(), gone.members.end());
      blocks.erase(blocks.begin() + active[y]);
    } else if (u < rate_merge + rate_deact) {
      auto& blk = blocks[static_cast<std::size_t>(
          active[rng.uniform_index(active.size())])];
      blk.flag = ActivityState::Dormant;
      blk.entered = t;
      blk.counts_psi = blk.tagged;
      if (blk.tagged) --n_tagged;
      blk.tagged = false;
    } else {
      auto& blk = blocks[static_cast<std::size_t>(
          dormant[rng.uniform_index(dormant.size())])];
      if (blk.counts_psi) run.psi_n = std::max(run.psi_n, t - blk.entered);
      blk.flag = ActivityState::Active;
    }
    if (!rho_set && n_tagged <= 1) {
      run.rho_n = t;
      rho_set = true;
    }
    record(t);
  }
  run.tmrca = t;
  if (!rho_set) run.rho_n = t;
  return run;
}

CoalescentRun simulate_coalescent_lumped(const ModelParams& params, int n,
                                         RandomSource& rng,
                                         const CoalescentOptions& opts) {
  params.validate();
  if (n < 1) throw std::invalid_argument("simulate_coalescent_lumped: n must be >= 1");
  if (opts.record_partition_path) {
    throw std::invalid_argument(
        "simulate_coalescent_lumped: partition path not available");
  }
  const double p = params.active_probability();

  struct DormantRec {
    double entered;
    bool counts_psi;
  };

  // Active blocks are counted only; tagged ones are interchangeable, so the
  // tag of a sampled block is Bernoulli(K/A).
  int n_active = 0;
  std::vector<DormantRec> dormant;
  for (int i = 0; i < n; ++i) {
    if (rng.bernoulli(p)) {
      ++n_active;
    } else {
      dormant.push_back({0.0, true});
    }
  }
  int n_tagged = n_active;

  CoalescentRun run;
  run.seed = rng.seed();
  bool rho_set = n_tagged <= 1;
  if (opts.record_block_path) {
    run.block_path.push_back({0.0, n_active, static_cast<int>(dormant.size())});
  }

  double t = 0.0;
  while (n_active + static_cast<int>(dormant.size()) > 1) {
    const auto na = static_cast<double>(n_active);
    const double rate_merge = na * (na - 1.0) / 2.0;
    const double rate_deact = params.sigma * na;
    const double rate_act = params.alpha * static_cast<double>(dormant.size());
    const double total = rate_merge + rate_deact + rate_act;

    t += rng.exponential(total);
    const double u = rng.uniform() * total;
    if (u < rate_merge) {
      // Pair tags by sampling two blocks without replacement.
      const bool first_tagged = rng.uniform_index(static_cast<std::uint64_t>(n_active)) <
                                static_cast<std::uint64_t>(n_tagged);
      const int rest_tagged = n_tagged - (first_tagged ? 1 : 0);
      const bool second_tagged =
          rng.uniform_index(static_cast<std::uint64_t>(n_active - 1)) <
          static_cast<std::uint64_t>(rest_tagged);
      if (first_tagged && second_tagged) --n_tagged;
      --n_active;
    } else if (u < rate_merge + rate_deact) {
      const bool tagged = rng.uniform_index(static_cast<std::uint64_t>(n_active)) <
                          static_cast<std::uint64_t>(n_tagged);
      if (tagged) --n_tagged;
      --n_active;
      dormant.push_back({t, tagged});
    } else {
      const auto idx = rng.uniform_index(dormant.size());
      const DormantRec rec = dormant[idx];
      dormant[idx] = dormant.back();
      dormant.pop_back();
      if (rec.counts_psi) run.psi_n = std::max(run.psi_n, t - rec.entered);
      ++n_active;
    }
    if (!rho_set && n_tagged <= 1) {
      run.rho_n = t;
      rho_set = true;
    }
    if (opts.record_block_path) {
      run.block_path.push_back({t, n_active, static_cast<int>(dormant.size())});
    }
  }
  run.tmrca = t;
  if (!rho_set) run.rho_n = t;
  return run;
}

BlockCountingRun simulate_block_counting(const ModelParams& params, BlockCount init,
                                         RandomSource& rng, bool record_path) {
  params.validate();
  if (init.n_active < 0 || init.n_dormant < 0 || init.total() < 1) {
    throw std::invalid_argument("simulate_block_counting: need n_active + n_dormant >= 1");
  }
  BlockCountingRun run;
  int n = init.n_active;
  int m = init.n_dormant;
  double t = 0.0;
  if (record_path) run.path.push_back({0.0, n, m});
  while (n + m > 1) {
    const auto na = static_cast<double>(n);
    const double rate_merge = na * (na - 1.0) / 2.0;
    const double rate_deact = params.sigma * na;
    const double rate_act = params.alpha * static_cast<double>(m);
    const double total = rate_merge + rate_deact + rate_act;
    t += rng.exponential(total);
    const double u = rng.uniform() * total;
    if (u < rate_merge) {
      --n;
    } else if (u < rate_merge + rate_deact) {
      --n;
      ++m;
    } else {
      ++n;
      --m;
    }
    if (record_path) run.path.push_back({t, n, m});
  }
  run.tmrca = t;
  return run;
}

int sample_M0(const ModelParams& params, int n, RandomSource& rng) {
  params.validate();
  const double q = 1.0 - params.active_probability();
  int m0 = 0;
  for (int i = 0; i < n; ++i) m0 += rng.bernoulli(q) ? 1 : 0;
  return m0;
}

int sample_B_n(const ModelParams& params, int n, RandomSource& rng) {
  params.validate();
  if (n < 1) throw std::invalid_argument("sample_B_n: n must be >= 1");
  int b = 0;
  for (int i = 2; i <= n; ++i) {
    const double prob = 2.0 * params.sigma / (2.0 * params.sigma + (i - 1));
    b += rng.bernoulli(prob) ? 1 : 0;
  }
  return b;
}

double exact_mean_B_n(const ModelParams& params, int n) {
  double sum = 0.0;
  for (int i = 2; i <= n; ++i) {
    sum += 2.0 * params.sigma / (2.0 * params.sigma + (i - 1));
  }
  return sum;
}

double sample_psi_n(const ModelParams& params, int n, RandomSource& rng) {
  const int k = sample_M0(params, n, rng) + sample_B_n(params, n, rng);
  double best = 0.0;
  for (int i = 0; i < k; ++i) best = std::max(best, rng.exponential(params.alpha));
  return best;
}

double psi_cdf(const ModelParams& params, int n, double t, int n_mix_samples,
               RandomSource& rng) {
  return psi_cdf_grid(params, n, {t}, n_mix_samples, rng).front();
}

std::vector<double> psi_cdf_grid(const ModelParams& params, int n,
                                 const std::vector<double>& ts, int n_mix_samples,
                                 RandomSource& rng) {
  params.validate();
  if (n_mix_samples < 1) throw std::invalid_argument("psi_cdf_grid: need samples >= 1");
  // Histogram of K = M0 + B_n so each grid point costs one power per
  // distinct K value.
  std::vector<std::pair<int, int>> k_hist;
  {
    std::vector<int> ks(static_cast<std::size_t>(n_mix_samples));
    for (auto& k : ks) k = sample_M0(params, n, rng) + sample_B_n(params, n, rng);
    std::sort(ks.begin(), ks.end());
    for (std::size_t i = 0; i < ks.size();) {
      std::size_t j = i;
      while (j < ks.size() && ks[j] == ks[i]) ++j;
      k_hist.emplace_back(ks[i], static_cast<int>(j - i));
      i = j;
    }
  }
  std::vector<double> out;
  out.reserve(ts.size());
  for (double t : ts) {
    if (t < 0.0) {
      out.push_back(0.0);
      continue;
    }
    const double q = -std::expm1(-params.alpha * t);  // 1 - e^{-alpha t}
    double acc = 0.0;
    for (const auto& [k, count] : k_hist) {
      acc += static_cast<double>(count) * std::pow(q, k);
    }
    out.push_back(acc / static_cast<double>(n_mix_samples));
  }
  return out;
}

std::vector<double> sample_psi_coupled_sequence(const ModelParams& params,
                                                const std::vector<int>& ns,
                                                RandomSource& rng) {
  params.validate();
  for (std::size_t i = 1; i < ns.size(); ++i) {
    if (ns[i] < ns[i - 1]) {
      throw std::invalid_argument("sample_psi_coupled_sequence: ns must be ascending");
    }
  }
  if (ns.empty()) return {};
  const double q = 1.0 - params.active_probability();

  std::vector<double> out;
  out.reserve(ns.size());
  int covered = 0;  // lines whose state / delta draws exist already
  int k_total = 0;  // current M0 + B_n
  double psi = 0.0;
  for (int n : ns) {
    for (int i = covered + 1; i <= n; ++i) {
      int fresh = rng.bernoulli(q) ? 1 : 0;  // stationary initial state
      if (i >= 2) {
        const double prob = 2.0 * params.sigma / (2.0 * params.sigma + (i - 1));
        fresh += rng.bernoulli(prob) ? 1 : 0;
      }
      for (int r = 0; r < fresh; ++r) {
        psi = std::max(psi, rng.exponential(params.alpha));
      }
      k_total += fresh;
    }
    covered = std::max(covered, n);
    out.push_back(psi);
  }
  return out;
}

void write_coalescent_run(std::ostream& os, const CoalescentRun& run) {
  os << "time,n_active,n_dormant\n";
  for (const auto& pt : run.block_path) {
    os << io::fmt_double(pt.time) << ',' << pt.n_active << ',' << pt.n_dormant << '\n';
  }
  os << "summary,tmrca=" << io::fmt_double(run.tmrca)
     << ",rho_n=" << io::fmt_double(run.rho_n)
     << ",psi_n=" << io::fmt_double(run.psi_n) << ",seed=" << run.seed << '\n';
}

}  // namespace seedbank::coalescent
