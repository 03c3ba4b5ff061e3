#include "seedbank/experiments.hpp"

#include <cmath>
#include <stdexcept>

#include "seedbank/coalescent.hpp"
#include "seedbank/lookdown.hpp"

namespace seedbank::stats {

CoalescentReplicates run_coalescent_replicates(const ModelParams& params, int n,
                                               int replicates, TmrcaBackend backend,
                                               int n_threads,
                                               const RandomSource& rng) {
  params.validate();
  if (n < 1 || replicates < 1) {
    throw std::invalid_argument("run_coalescent_replicates: bad n or replicates");
  }
  CoalescentReplicates out;
  out.tmrca.resize(static_cast<std::size_t>(replicates));
  out.rho.resize(static_cast<std::size_t>(replicates));
  out.psi_coupled.resize(static_cast<std::size_t>(replicates));

  const coalescent::CoalescentOptions opts{false, false};
  parallel_for(replicates, n_threads, [&](int rep) {
    RandomSource sub = rng.substream("tmrca-rep", static_cast<std::uint64_t>(n),
                                     static_cast<std::uint64_t>(rep));
    coalescent::CoalescentRun run;
    if (backend == TmrcaBackend::BlockCounting) {
      run = coalescent::simulate_coalescent_lumped(params, n, sub, opts);
    } else {
      auto init = coalescent::MarkedPartition::sample_stationary(n, params, sub);
      run = coalescent::simulate_coalescent(params, std::move(init), sub, opts);
    }
    out.tmrca[static_cast<std::size_t>(rep)] = run.tmrca;
    out.rho[static_cast<std::size_t>(rep)] = run.rho_n;
    out.psi_coupled[static_cast<std::size_t>(rep)] = run.psi_n;
  });
  return out;
}

std::vector<double> run_fixation_replicates(const ModelParams& params, int replicates,
                                            int n_threads, const RandomSource& rng,
                                            int realization_max_levels) {
  params.validate();
  if (replicates < 1) throw std::invalid_argument("run_fixation_replicates: bad replicates");
  std::vector<double> out(static_cast<std::size_t>(replicates));
  const bool use_realization = params.pop_size <= realization_max_levels;
  parallel_for(replicates, n_threads, [&](int rep) {
    RandomSource sub =
        rng.substream("fixation-rep", static_cast<std::uint64_t>(params.pop_size),
                      static_cast<std::uint64_t>(rep));
    out[static_cast<std::size_t>(rep)] =
        use_realization ? lookdown::sample_fixation_time(params, sub)
                        : lookdown::sample_fixation_time_fast(params, sub);
  });
  return out;
}

std::vector<double> run_psi_replicates(const ModelParams& params, int n,
                                       int replicates, int n_threads,
                                       const RandomSource& rng) {
  params.validate();
  std::vector<double> out(static_cast<std::size_t>(replicates));
  parallel_for(replicates, n_threads, [&](int rep) {
    RandomSource sub = rng.substream("psi-rep", static_cast<std::uint64_t>(n),
                                     static_cast<std::uint64_t>(rep));
    out[static_cast<std::size_t>(rep)] = coalescent::sample_psi_n(params, n, sub);
  });
  return out;
}

double gumbel_centering(const ModelParams& params, int n, double x) {
  return params.alpha * x - std::log(static_cast<double>(n) * params.active_probability());
}

namespace {

std::vector<double> centered(const ModelParams& params, int n,
                             const std::vector<double>& xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(gumbel_centering(params, n, x));
  return out;
}

}  // namespace

std::vector<TmrcaGumbelRow> tmrca_gumbel_experiment(const ModelParams& params,
                                                    const std::vector<int>& n_list,
                                                    int replicates,
                                                    TmrcaBackend backend,
                                                    int n_threads,
                                                    const RandomSource& rng) {
  std::vector<TmrcaGumbelRow> rows;
  rows.reserve(n_list.size());
  for (int n : n_list) {
    const auto runs = run_coalescent_replicates(params, n, replicates, backend,
                                                n_threads, rng);
    const auto psi_indep = run_psi_replicates(params, n, replicates, n_threads, rng);

    TmrcaGumbelRow row;
    row.n = n;
    row.replicates = replicates;

    const auto tm = summarize(runs.tmrca);
    row.tmrca_mean = tm.mean;
    row.tmrca_var = tm.variance;

    const auto tmrca_c = centered(params, n, runs.tmrca);
    const auto ks = ks_one_sample(tmrca_c, gumbel_cdf);
    row.tmrca_ks_gumbel = ks.statistic;
    row.tmrca_ks_p = ks.p_value;
    const auto tc = summarize(tmrca_c);
    row.tmrca_centered_mean = tc.mean;
    row.tmrca_centered_var = tc.variance;

    const auto psi_c = centered(params, n, psi_indep);
    row.psi_ks_gumbel = ks_distance(psi_c, gumbel_cdf);
    row.psi_centered_mean = summarize(psi_c).mean;

    std::vector<double> ratios;
    ratios.reserve(runs.tmrca.size());
    int dominated = 0;
    for (std::size_t i = 0; i < runs.tmrca.size(); ++i) {
      if (runs.psi_coupled[i] <= runs.tmrca[i]) ++dominated;
      if (runs.psi_coupled[i] > 0.0) {
        ratios.push_back(runs.tmrca[i] / runs.psi_coupled[i]);
      }
    }
    row.ratio_median = ratios.empty() ? 0.0 : median(std::move(ratios));
    row.psi_le_tmrca_fraction =
        static_cast<double>(dominated) / static_cast<double>(runs.tmrca.size());
    row.rho_mean = summarize(runs.rho).mean;
    rows.push_back(row);
  }
  return rows;
}

std::vector<FixationGumbelRow> fixation_gumbel_experiment(
    const ModelParams& params, const std::vector<int>& n_list, int replicates,
    int n_threads, const RandomSource& rng, int realization_max_levels) {
  std::vector<FixationGumbelRow> rows;
  rows.reserve(n_list.size());
  for (int n : n_list) {
    ModelParams p = params;
    p.pop_size = n;
    const auto fixations =
        run_fixation_replicates(p, replicates, n_threads, rng, realization_max_levels);

    FixationGumbelRow row;
    row.n_levels = n;
    row.replicates = replicates;
    row.method = n <= realization_max_levels ? "realization" : "thinned";
    const auto fs = summarize(fixations);
    row.fixation_mean = fs.mean;
    row.fixation_var = fs.variance;

    const auto fixation_c = centered(p, n, fixations);
    if (n >= 2) {
      const auto ks = ks_one_sample(fixation_c, gumbel_cdf);
      row.ks_gumbel = ks.statistic;
      row.ks_p = ks.p_value;
    }
    const auto cs = summarize(fixation_c);
    row.centered_mean = cs.mean;
    row.centered_var = cs.variance;
    rows.push_back(row);
  }
  return rows;
}

TwoSampleReport fixation_vs_tmrca(const ModelParams& params, int n, int replicates,
                                  int n_threads, const RandomSource& rng) {
  ModelParams p = params;
  p.pop_size = n;
  const auto fixations = run_fixation_replicates(p, replicates, n_threads, rng);
  const auto runs = run_coalescent_replicates(p, n, replicates,
                                              TmrcaBackend::FullChain, n_threads, rng);
  const auto ks = ks_two_sample(fixations, runs.tmrca);
  return {n, replicates, ks.statistic, ks.p_value};
}

}  // namespace seedbank::stats
