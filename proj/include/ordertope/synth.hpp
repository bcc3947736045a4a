#pragma once

// Correlated synthetic score data: u_ij = p t_i + (1 - p) e_ij with t_i and
// e_ij independent standard normals, and the ranking-interval experiment run
// over many such matrices.

#include "ordertope/exact.hpp"
#include "ordertope/scores.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ordertope::synth {

struct SynthConfig {
  std::size_t n = 130;
  std::size_t d = 7;
  double p = 0.6;
  std::size_t trials = 50;
  Rational coverage{19, 20};
  std::uint64_t samples_per_trial = 100000;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // see cone::resolve_threads

  void validate() const;
};

// Deterministic in (cfg.seed, trial). Scores are the double values converted
// exactly; a row equal to an earlier one is redrawn.
ScoreMatrix generate(const SynthConfig& cfg, std::size_t trial);

// Seed of the cone sampler for one trial.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

// Mean Spearman correlation over all pairs of category columns.
double mean_spearman(const ScoreMatrix& m);

struct ExperimentReport {
  SynthConfig config;
  std::vector<double> trial_mean_widths;
  std::vector<double> trial_spearman;
  double overall_mean = 0;
  double min = 0;
  double max = 0;
  double mean_spearman = 0;
};

ExperimentReport run_experiment(const SynthConfig& cfg);

struct TrendReport {
  std::vector<double> ps;
  std::vector<double> means;
  std::size_t inversions = 0;  // adjacent pairs where the width grows with p
};

// Mean widths for each p, everything else taken from `cfg`.
TrendReport width_trend(const SynthConfig& cfg, const std::vector<double>& ps);

}  // namespace ordertope::synth
