#pragma once

#include "ordertope/exact.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ordertope {

// n entities x d categories of exact scores.
struct ScoreMatrix {
  std::vector<std::string> names;
  std::vector<std::string> categories;
  std::vector<RationalVector> rows;

  std::size_t size() const { return rows.size(); }
  std::size_t dim() const { return categories.size(); }

  // Throws std::invalid_argument on shape problems, duplicate names or
  // duplicate score rows.
  void validate() const;

  std::optional<std::size_t> find(std::string_view name) const;
  std::vector<std::vector<double>> as_doubles() const;
};

// Entity indices sorted by score vector, lexicographically ascending.
// lex_rank[i] is the position of entity i in that order.
std::vector<std::size_t> lexicographic_ranks(const std::vector<RationalVector>& rows);

}  // namespace ordertope
