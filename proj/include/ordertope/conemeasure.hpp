#pragma once

// Monte Carlo measure of normal cones: functionals are drawn from the
// Gaussian density restricted to the non-negative orthant, and the rankings
// they induce are tallied.

#include "ordertope/exact.hpp"
#include "ordertope/ordertope.hpp"
#include "ordertope/scores.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

namespace ordertope::cone {

// Independent |N(0,1)| coordinates; an exact zero is redrawn. The stream is
// a pure function of (seed, stream_id).
class GaussianOrthantSampler {
 public:
  GaussianOrthantSampler(std::size_t dim, std::uint64_t seed, std::uint64_t stream_id = 0);

  std::size_t dim() const { return dim_; }
  std::vector<double> sample();
  void sample_into(std::vector<double>& out);

 private:
  std::size_t dim_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

struct RankTally {
  std::size_t n = 0;
  // counts[i * n + r]: samples that put entity i at rank r + 1.
  std::vector<std::uint64_t> counts;
  // pairwise[i * n + j]: samples that put i above j. Empty when not tracked.
  std::vector<std::uint64_t> pairwise;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;

  std::uint64_t count(std::size_t entity, std::size_t rank0) const { return counts[entity * n + rank0]; }
  std::uint64_t wins(std::size_t a, std::size_t b) const { return pairwise[a * n + b]; }
  bool has_pairwise() const { return !pairwise.empty(); }

  // Throws std::logic_error if a row or column of counts does not sum to
  // `samples` or a pairwise pair does not.
  void check_conservation() const;
};

struct TallyOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  bool pairwise = true;
  // 0: ORDERTOPE_THREADS if set, else the hardware concurrency.
  std::size_t threads = 0;
  // Samples per RNG stream; part of the reproducibility key, not a tuning knob.
  std::uint64_t chunk = 10000;
};

std::size_t resolve_threads(std::size_t requested);

// Ranks entities by c . u descending with the lexicographic tie-break of the
// oracle. `lex_rank` comes from lexicographic_ranks().
void rank_order(const std::vector<std::vector<double>>& rows, const std::vector<std::size_t>& lex_rank,
                const std::vector<double>& c, std::vector<std::size_t>& order);

RankTally tally_rankings(const ScoreMatrix& m, const TallyOptions& options);

struct RankingInterval {
  std::size_t lo = 1;  // 1-based, inclusive
  std::size_t hi = 1;
  Rational coverage;
  std::uint64_t mass = 0;

  std::size_t width() const { return hi - lo + 1; }
};

// Shortest run of ranks holding at least coverage * samples of the entity's
// tally; the leftmost one among equally short runs.
RankingInterval ranking_interval(const std::uint64_t* histogram, std::size_t n, std::uint64_t samples,
                                 const Rational& coverage);
RankingInterval ranking_interval(const RankTally& t, std::size_t entity, const Rational& coverage);

struct WidthStats {
  std::vector<std::size_t> widths;
  double mean = 0;
  std::optional<double> subgroup_mean;
  std::optional<double> rest_mean;
};

WidthStats interval_width_stats(const RankTally& t, const Rational& coverage,
                                const std::optional<std::vector<std::size_t>>& subgroup = std::nullopt);

double binomial_std_error(std::uint64_t hits, std::uint64_t samples);

struct PrefixEstimate {
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  double fraction() const { return samples ? static_cast<double>(hits) / static_cast<double>(samples) : 0.0; }
  double std_error() const { return binomial_std_error(hits, samples); }
};

// Frequencies of every sampled top-k prefix.
std::map<RankPrefix, std::uint64_t> prefix_counts(const ScoreMatrix& m, std::size_t k, const TallyOptions& options);

PrefixEstimate prefix_probability(const ScoreMatrix& m, const RankPrefix& sigma, const TallyOptions& options);

// Fraction of the tally that puts a above b.
PrefixEstimate pairwise_fraction(const RankTally& t, std::size_t a, std::size_t b);

}  // namespace ordertope::cone
