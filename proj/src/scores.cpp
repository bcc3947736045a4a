#include "ordertope/scores.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace ordertope {

void ScoreMatrix::validate() const {
  if (categories.empty()) throw std::invalid_argument("score matrix needs at least one category");
  if (rows.size() < 2) throw std::invalid_argument("score matrix needs at least two entities");
  if (names.size() != rows.size()) throw std::invalid_argument("score matrix: names and rows differ in length");
  std::map<std::string_view, std::size_t> seen_names;
  std::map<RationalVector, std::size_t> seen_rows;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != categories.size()) {
      throw std::invalid_argument("score matrix: row " + std::to_string(i + 1) + " has " +
                                  std::to_string(rows[i].size()) + " scores, expected " +
                                  std::to_string(categories.size()));
    }
    if (auto [it, fresh] = seen_names.emplace(names[i], i); !fresh) {
      throw std::invalid_argument("duplicate entity name '" + names[i] + "' in rows " + std::to_string(it->second + 1) +
                                  " and " + std::to_string(i + 1));
    }
    if (auto [it, fresh] = seen_rows.emplace(rows[i], i); !fresh) {
      throw std::invalid_argument("duplicate score vector in rows " + std::to_string(it->second + 1) + " and " +
                                  std::to_string(i + 1));
    }
  }
}

std::optional<std::size_t> ScoreMatrix::find(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  return std::nullopt;
}

std::vector<std::vector<double>> ScoreMatrix::as_doubles() const {
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<double> r;
    r.reserve(row.size());
    for (const auto& x : row) r.push_back(x.get_d());
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::size_t> lexicographic_ranks(const std::vector<RationalVector>& rows) {
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rows[a] < rows[b]; });
  std::vector<std::size_t> rank(rows.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = pos;
  return rank;
}

}  // namespace ordertope
