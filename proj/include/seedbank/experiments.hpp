#pragma once

#include <string>
#include <vector>

#include "seedbank/config.hpp"
#include "seedbank/random.hpp"
#include "seedbank/stats.hpp"

namespace seedbank::stats {

enum class TmrcaBackend { FullChain, BlockCounting };

// Per-replicate coalescent observables: absorption time, end of the Kingman
// phase, and the coupled largest first-inactivity period. Substreams are
// keyed by (n, replicate), so output is independent of the thread count.
struct CoalescentReplicates {
  std::vector<double> tmrca;
  std::vector<double> rho;
  std::vector<double> psi_coupled;
};

CoalescentReplicates run_coalescent_replicates(const ModelParams& params, int n,
                                               int replicates, TmrcaBackend backend,
                                               int n_threads, const RandomSource& rng);

// Fixation times of level 1's type. The realization path is used up to
// realization_max_levels; above that the thinned jump chain (same law).
std::vector<double> run_fixation_replicates(const ModelParams& params, int replicates,
                                            int n_threads, const RandomSource& rng,
                                            int realization_max_levels = 64);

std::vector<double> run_psi_replicates(const ModelParams& params, int n,
                                       int replicates, int n_threads,
                                       const RandomSource& rng);

// Centering for the Gumbel limits: x -> alpha * x - ln(n p).
double gumbel_centering(const ModelParams& params, int n, double x);

struct TmrcaGumbelRow {
  int n = 0;
  int replicates = 0;
  double tmrca_mean = 0.0;
  double tmrca_var = 0.0;
  double tmrca_ks_gumbel = 0.0;
  double tmrca_ks_p = 0.0;
  double tmrca_centered_mean = 0.0;
  double tmrca_centered_var = 0.0;
  double psi_ks_gumbel = 0.0;  // independent representation sampler
  double psi_centered_mean = 0.0;
  double ratio_median = 0.0;           // coupled tmrca/psi, psi > 0
  double psi_le_tmrca_fraction = 0.0;  // coupled, should be 1
  double rho_mean = 0.0;
};

// For each n: TMRCA replicates (chosen backend) with coupled rho/psi, an
// independent psi sample of the same size, centered/scaled KS distances to
// the standard Gumbel, and the ratio diagnostics.
std::vector<TmrcaGumbelRow> tmrca_gumbel_experiment(const ModelParams& params,
                                                    const std::vector<int>& n_list,
                                                    int replicates,
                                                    TmrcaBackend backend,
                                                    int n_threads,
                                                    const RandomSource& rng);

struct FixationGumbelRow {
  int n_levels = 0;
  int replicates = 0;
  double fixation_mean = 0.0;
  double fixation_var = 0.0;
  double ks_gumbel = 0.0;
  double ks_p = 0.0;
  double centered_mean = 0.0;
  double centered_var = 0.0;
  std::string method;
};

std::vector<FixationGumbelRow> fixation_gumbel_experiment(
    const ModelParams& params, const std::vector<int>& n_list, int replicates,
    int n_threads, const RandomSource& rng, int realization_max_levels = 64);

struct TwoSampleReport {
  int n = 0;
  int replicates = 0;
  double ks_stat = 0.0;
  double p_value = 0.0;
};

// Fixation times (lookdown realization) against TMRCA draws (full partition
// chain, stationary flags) at the same N.
TwoSampleReport fixation_vs_tmrca(const ModelParams& params, int n, int replicates,
                                  int n_threads, const RandomSource& rng);

}  // namespace seedbank::stats
