#pragma once

#include "ordertope/scores.hpp"
#include "oracles.hpp"

#include <initializer_list>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace fixtures {

using ordertope::Rational;
using ordertope::RationalVector;
using ordertope::ScoreMatrix;

inline ScoreMatrix matrix(std::initializer_list<std::initializer_list<Rational>> rows) {
  ScoreMatrix m;
  for (const auto& r : rows) {
    m.rows.emplace_back(r);
    m.names.push_back("e" + std::to_string(m.names.size()));
  }
  for (std::size_t j = 0; j < m.rows.front().size(); ++j) m.categories.push_back("c" + std::to_string(j));
  return m;
}

// Distinct random rows with entries num / den, num uniform in [lo, hi].
inline ScoreMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t d, long lo, long hi, long den) {
  ScoreMatrix m;
  std::set<RationalVector> seen;
  while (m.rows.size() < n) {
    RationalVector row;
    for (std::size_t j = 0; j < d; ++j) row.push_back(oracles::random_rational(rng, lo, hi, den));
    if (!seen.insert(row).second) continue;
    m.rows.push_back(row);
    m.names.push_back("e" + std::to_string(m.names.size()));
  }
  for (std::size_t j = 0; j < d; ++j) m.categories.push_back("c" + std::to_string(j));
  return m;
}

// Every ordered k-tuple of distinct indices below n.
inline std::vector<std::vector<std::size_t>> all_prefixes(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  std::vector<bool> used(n, false);
  auto rec = [&](auto&& self) -> void {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      used[i] = true;
      cur.push_back(i);
      self(self);
      cur.pop_back();
      used[i] = false;
    }
  };
  rec(rec);
  return out;
}

}  // namespace fixtures
