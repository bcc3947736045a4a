#pragma once

// Recovering unpublished category scores from overall scores, the published
// categories and the per-category ranks of the unpublished ones.

#include "ordertope/exact.hpp"
#include "ordertope/lp.hpp"
#include "ordertope/scores.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ordertope::reverse {

struct PublishedData {
  std::vector<std::string> names;
  std::vector<std::string> categories;  // all d categories, in weight order
  std::vector<bool> known;              // per category
  RationalVector weights;               // d entries, non-negative, summing to 1
  RationalVector overall;               // n values of weights . u_i
  // known_scores[i] lists the known categories of entity i in category order;
  // ranks[i] lists the ranks of the unknown ones (1 = best, ties share a rank).
  std::vector<RationalVector> known_scores;
  std::vector<std::vector<long>> ranks;

  std::size_t size() const { return names.size(); }
  std::vector<std::size_t> known_indices() const;
  std::vector<std::size_t> unknown_indices() const;

  // Throws std::invalid_argument naming the first problem found.
  void validate() const;
};

// Ranks must follow competition numbering: an entity's rank is one more than
// the number of entities ranked strictly better ({1,1,3} is valid, {1,1,2} is not).
bool is_competition_ranking(const std::vector<long>& ranks);

// Competition ranks of a column, highest value first.
std::vector<long> competition_ranks(const RationalVector& column);

// What a publisher releases for the full matrix `truth`: overall scores
// weights . u_i, the known columns, and ranks of the others.
PublishedData publish(const ScoreMatrix& truth, const RationalVector& weights, const std::vector<bool>& known);

// Turns published category `category` into a ranks-only one and returns
// the scores it held, so an estimate can be checked against them.
RationalVector hide_category(PublishedData& data, std::size_t category);

struct ReverseOptions {
  Rational epsilon{1, 1000};
  Rational lower{0};
  Rational upper{100};
};

class Infeasible : public std::runtime_error {
 public:
  Infeasible(const std::string& what, std::vector<std::string> constraints)
      : std::runtime_error(what), constraints_(std::move(constraints)) {}
  const std::vector<std::string>& constraints() const { return constraints_; }

 private:
  std::vector<std::string> constraints_;
};

// Variable x_{i,u} has index i * |U| + u. One equality per entity, one rank
// constraint per adjacent pair of each unknown category (an equality for a
// tie), and box bounds on every unknown.
lp::LPModel build_lp(const PublishedData& data, const ReverseOptions& options);

struct Estimate {
  ScoreMatrix scores;                     // known and estimated categories together
  std::vector<RationalVector> unknown;    // n x |U| averaged estimate
  std::vector<RationalVector> low, high;  // n x |U| per-variable min and max
  std::size_t lp_solves = 0;
  std::size_t pivots = 0;
  std::vector<std::string> residual_violations;  // constraints the average breaks (expected empty)
};

// Minimizes and maximizes every unknown (entity, category) separately and
// averages all 2 n |U| optimal vertices, duplicates included.
Estimate estimate_scores(const PublishedData& data, const ReverseOptions& options);

struct ControlReport {
  double mean_abs_error = 0;
  double baseline_mean = 0;
  double baseline_p95 = 0;  // 95% of baseline trials score above this value
  double baseline_min = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  bool beats_baseline() const { return mean_abs_error < baseline_p95; }
};

// Both vectors are standardized to mean 0 and standard deviation 1 before
// comparing. The baseline draws normal vectors with the truth's mean and
// standard deviation and sorts them into the truth's rank order.
ControlReport validate_control(const RationalVector& truth, const RationalVector& estimate, std::size_t trials,
                               std::uint64_t seed);

}  // namespace ordertope::reverse
