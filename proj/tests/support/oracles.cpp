#include "oracles.hpp"

#include <algorithm>
#include <functional>

namespace oracles {

namespace {

// Row reduction of an augmented system [A | rhs]. Returns the solution when
// A has full column rank and the system is consistent.
std::optional<RationalVector> unique_solution(Matrix a, RationalVector rhs) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  std::size_t r = 0;
  std::vector<std::size_t> pivots;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) return std::nullopt;
    std::swap(a[p], a[r]);
    std::swap(rhs[p], rhs[r]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c] / a[r][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
      rhs[i] -= f * rhs[r];
    }
    pivots.push_back(c);
    ++r;
  }
  if (r < cols) return std::nullopt;
  for (std::size_t i = r; i < rows; ++i) {
    if (rhs[i] != 0) return std::nullopt;
  }
  RationalVector x(cols);
  for (std::size_t i = 0; i < cols; ++i) x[i] = rhs[i] / a[i][pivots[i]];
  return x;
}

void for_each_subset(std::size_t n, std::size_t k, const std::function<bool(const std::vector<std::size_t>&)>& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (fn(idx)) return;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

Rational cofactor_determinant(const Matrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  Rational total = 0;
  for (std::size_t col = 0; col < n; ++col) {
    if (m[0][col] == 0) continue;
    Matrix minor;
    for (std::size_t i = 1; i < n; ++i) {
      RationalVector row;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != col) row.push_back(m[i][j]);
      }
      minor.push_back(std::move(row));
    }
    Rational term = m[0][col] * cofactor_determinant(minor);
    if (col % 2) total -= term; else total += term;
  }
  return total;
}

std::optional<RationalVector> cramer_solve(const Matrix& a, const RationalVector& b) {
  Rational det = cofactor_determinant(a);
  if (det == 0) return std::nullopt;
  RationalVector x(a.size());
  for (std::size_t c = 0; c < a.size(); ++c) {
    Matrix swapped = a;
    for (std::size_t r = 0; r < a.size(); ++r) swapped[r][c] = b[r];
    x[c] = cofactor_determinant(swapped) / det;
  }
  return x;
}

bool in_convex_hull(const std::vector<RationalVector>& others, const RationalVector& p) {
  const std::size_t d = p.size();
  for (const auto& q : others) {
    if (q == p) return true;
  }
  bool found = false;
  for (std::size_t m = 2; m <= std::min(d + 1, others.size()) && !found; ++m) {
    for_each_subset(others.size(), m, [&](const std::vector<std::size_t>& s) {
      const auto& base = others[s[0]];
      Matrix a(d, RationalVector(m - 1));
      RationalVector rhs(d);
      for (std::size_t i = 0; i < d; ++i) {
        rhs[i] = p[i] - base[i];
        for (std::size_t k = 1; k < m; ++k) a[i][k - 1] = others[s[k]][i] - base[i];
      }
      auto lambda = unique_solution(std::move(a), std::move(rhs));
      if (!lambda) return false;
      Rational sum = 0;
      for (const auto& l : *lambda) {
        if (l < 0) return false;
        sum += l;
      }
      if (sum <= 1) found = true;
      return found;
    });
  }
  return found;
}

std::vector<std::size_t> hull_vertices(const std::vector<RationalVector>& points) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<RationalVector> others;
    bool duplicate = false;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == i) continue;
      if (points[j] == points[i]) {
        if (j < i) duplicate = true;
        continue;
      }
      others.push_back(points[j]);
    }
    if (duplicate) continue;
    if (!in_convex_hull(others, points[i])) out.push_back(i);
  }
  return out;
}

BruteResult brute_maximize(const BruteLP& lp) {
  const std::size_t n = lp.objective.size();
  BruteResult best;
  for_each_subset(lp.a.size(), n, [&](const std::vector<std::size_t>& rows) {
    Matrix a;
    RationalVector b;
    for (std::size_t r : rows) {
      a.push_back(lp.a[r]);
      b.push_back(lp.b[r]);
    }
    auto x = unique_solution(std::move(a), std::move(b));
    if (!x) return false;
    for (std::size_t r = 0; r < lp.a.size(); ++r) {
      Rational lhs = 0;
      for (std::size_t j = 0; j < n; ++j) lhs += lp.a[r][j] * (*x)[j];
      if (lhs > lp.b[r]) return false;
    }
    Rational value = 0;
    for (std::size_t j = 0; j < n; ++j) value += lp.objective[j] * (*x)[j];
    if (!best.feasible || value > best.value) {
      best.feasible = true;
      best.value = value;
    }
    return false;
  });
  return best;
}

Rational random_rational(std::mt19937_64& rng, long lo, long hi, long den) {
  std::uniform_int_distribution<long> dist(lo, hi);
  Rational r(ordertope::Integer(dist(rng)), ordertope::Integer(den));
  r.canonicalize();
  return r;
}

}  // namespace oracles
