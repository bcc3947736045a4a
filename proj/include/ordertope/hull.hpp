#pragma once

// Incremental convex hull of a point set that is only reachable through a
// vertex oracle. Every facet of the current hull is probed once with its
// outer normal: the answer is either a new vertex (which is inserted by a
// beneath-beyond update) or proof that the facet belongs to the final hull.
// All predicates are evaluated exactly.

#include "ordertope/exact.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ordertope::hull {

using Point = RationalVector;
using Functional = IntegerVector;

// Must return a point of the underlying set maximizing the functional, and
// must be deterministic. If several points tie, the answer has to be a vertex
// of the hull (e.g. the lexicographically smallest maximizer), otherwise a
// facet probe could return a known point that is not a vertex.
using VertexOracle = std::function<Point(const Functional&)>;

struct Facet {
  RationalVector normal;  // integral and primitive together with offset
  Rational offset;        // normal . x <= offset for every vertex
  std::vector<std::size_t> incident_vertices;  // sorted indices into HullPolytope::vertices
};

struct HullPolytope {
  std::size_t dim = 0;
  std::vector<Point> vertices;
  std::vector<Facet> facets;
  std::size_t oracle_queries = 0;
  // discovery_query[i] is the 0-based index of the oracle call that returned vertex i.
  std::vector<std::size_t> discovery_query;

  // Queries that found neither a vertex nor a facet. Only the bootstrap of a
  // lower-dimensional start can produce these.
  std::size_t surplus_queries() const {
    std::size_t credited = vertices.size() + facets.size();
    return oracle_queries > credited ? oracle_queries - credited : 0;
  }
};

class DimensionDeficient : public std::runtime_error {
 public:
  DimensionDeficient(std::size_t achieved_rank, std::size_t dim)
      : std::runtime_error("oracle point set spans affine dimension " + std::to_string(achieved_rank) +
                           " but " + std::to_string(dim) + " was requested"),
        achieved_rank_(achieved_rank) {}
  std::size_t achieved_rank() const { return achieved_rank_; }

 private:
  std::size_t achieved_rank_;
};

class OracleInconsistent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

HullPolytope build_hull(const VertexOracle& oracle, std::size_t dim);

// Sign of det[q - p0, p1 - p0, ..., p_{d-1} - p0]. Throws DegenerateInput if
// the d facet points are affinely dependent.
int orientation(std::span<const Point> facet_points, const Point& query);

// Indices of the facets with normal . q > offset.
std::vector<std::size_t> visible_facets(const HullPolytope& polytope, const Point& q);

}  // namespace ordertope::hull
