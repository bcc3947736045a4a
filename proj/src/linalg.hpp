#pragma once

// Exact dense linear algebra over the rationals. Internal to the library.

#include "ordertope/exact.hpp"

#include <cstddef>
#include <vector>

namespace ordertope::linalg {

using Matrix = std::vector<RationalVector>;

// Reduced row echelon form in place; returns the pivot columns.
std::vector<std::size_t> rref(Matrix& rows, std::size_t cols);

std::size_t rank(Matrix rows, std::size_t cols);

// Basis of { x : rows * x = 0 }.
std::vector<RationalVector> null_space(Matrix rows, std::size_t cols);

Rational determinant(Matrix rows);

// Component of g orthogonal to the span of `rows`.
RationalVector orthogonal_component(const Matrix& rows, const RationalVector& g);

}  // namespace ordertope::linalg
