#pragma once

// k-ordertopes: P_k is the convex hull of all sums alpha_1 u_{s_1} + ... +
// alpha_k u_{s_k} over ordered k-tuples of distinct entities. Its vertices
// are the top-k orderings some weight vector produces; the non-negative
// envelope keeps those that a non-negative weight vector produces.

#include "ordertope/exact.hpp"
#include "ordertope/hull.hpp"
#include "ordertope/scores.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ordertope {

using RankPrefix = std::vector<std::size_t>;

enum class AlphaMode { linear, geometric };

struct OrdertopeConfig {
  std::size_t k = 1;
  RationalVector alpha;          // strictly decreasing, positive
  Rational sentinel_magnitude;   // 0 selects the default

  static OrdertopeConfig make(std::size_t k, AlphaMode mode = AlphaMode::linear);
  void validate(std::size_t n) const;
};

struct OracleAnswer {
  RationalVector point;
  RankPrefix prefix;
};

// Top-k prefix for functional c: entities sorted by c . u descending, the
// lexicographically smaller score vector first on ties.
RankPrefix top_k_prefix(const ScoreMatrix& m, const RationalVector& c, std::size_t k);

OracleAnswer oracle_top_k(const ScoreMatrix& m, const RationalVector& c, const OrdertopeConfig& cfg);

// Maximizer of c over P_k together with the sentinels -N e_j. Sentinels win
// ties, the one with the smallest index first; c = 0 gives -N e_1.
RationalVector augmented_oracle(const ScoreMatrix& m, const RationalVector& c, const OrdertopeConfig& cfg);

struct EnvelopeVertex {
  RationalVector point;
  RankPrefix prefix;
  RationalVector certificate;  // non-negative weights summing to 1 that induce the prefix
};

struct PrefixCollision {
  RankPrefix kept;
  RankPrefix other;
};

struct EnvelopePolytope {
  std::vector<EnvelopeVertex> vertices;
  std::vector<hull::Facet> facets;  // hull facets that avoid every sentinel
  OrdertopeConfig config;           // with the sentinel magnitude actually used
  std::size_t oracle_queries = 0;
  std::size_t hull_vertices = 0;    // including sentinels
  std::size_t hull_facets = 0;
  std::size_t rebuilds = 0;
  // Hull vertices whose normal cone meets the non-negative orthant only on
  // its boundary; they are left out of `vertices`.
  std::size_t boundary_vertices = 0;
  std::vector<PrefixCollision> collisions;
};

class CertificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws hull::DimensionDeficient if the augmented point set is flat and
// CertificationFailure if enlarging N a few times does not help.
EnvelopePolytope nonneg_envelope(const ScoreMatrix& m, OrdertopeConfig cfg);

// Non-negative c with sum 1 and c.u_{s_1} > ... > c.u_{s_k} > c.u_j for every
// j outside sigma, maximizing the smallest gap; nullopt if none exists.
std::optional<RationalVector> certify_reasonable(const ScoreMatrix& m, const RankPrefix& sigma);

}  // namespace ordertope
