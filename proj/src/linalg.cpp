#include "linalg.hpp"

#include <stdexcept>
#include <utility>

namespace ordertope::linalg {

std::vector<std::size_t> rref(Matrix& rows, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t sel = r;
    while (sel < rows.size() && sgn(rows[sel][c]) == 0) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[r], rows[sel]);
    Rational inv = 1 / rows[r][c];
    for (std::size_t k = c; k < cols; ++k) rows[r][k] *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || sgn(rows[i][c]) == 0) continue;
      Rational f = rows[i][c];
      for (std::size_t k = c; k < cols; ++k) {
        if (sgn(rows[r][k]) != 0) rows[i][k] -= f * rows[r][k];
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::size_t rank(Matrix rows, std::size_t cols) { return rref(rows, cols).size(); }

std::vector<RationalVector> null_space(Matrix rows, std::size_t cols) {
  auto pivots = rref(rows, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<RationalVector> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    RationalVector v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -rows[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

Rational determinant(Matrix rows) {
  const std::size_t n = rows.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    if (rows[c].size() != n) throw std::invalid_argument("determinant: matrix not square");
    std::size_t sel = c;
    while (sel < n && sgn(rows[sel][c]) == 0) ++sel;
    if (sel == n) return 0;
    if (sel != c) {
      std::swap(rows[c], rows[sel]);
      det = -det;
    }
    det *= rows[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      if (sgn(rows[i][c]) == 0) continue;
      Rational f = rows[i][c] / rows[c][c];
      for (std::size_t k = c; k < n; ++k) rows[i][k] -= f * rows[c][k];
    }
  }
  return det;
}

RationalVector orthogonal_component(const Matrix& rows, const RationalVector& g) {
  // Gram-Schmidt on the rows, then strip g's projection.
  std::vector<RationalVector> basis;
  std::vector<Rational> norms;
  for (const auto& row : rows) {
    RationalVector q = row;
    for (std::size_t b = 0; b < basis.size(); ++b) {
      Rational coef = dot(q, basis[b]) / norms[b];
      if (sgn(coef) == 0) continue;
      for (std::size_t k = 0; k < q.size(); ++k) q[k] -= coef * basis[b][k];
    }
    Rational nn = dot(q, q);
    if (sgn(nn) == 0) continue;
    basis.push_back(std::move(q));
    norms.push_back(std::move(nn));
  }
  RationalVector out = g;
  for (std::size_t b = 0; b < basis.size(); ++b) {
    Rational coef = dot(g, basis[b]) / norms[b];
    if (sgn(coef) == 0) continue;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] -= coef * basis[b][k];
  }
  return out;
}

}  // namespace ordertope::linalg
