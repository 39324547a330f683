#include "isiwtc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "isiwtc/errors.hpp"

namespace isiwtc {

std::vector<double> solve_square(Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw InvalidInputError("solve_square: shape mismatch");

  double scale = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) scale = std::max(scale, std::abs(a(r, c)));
  if (scale == 0.0) throw NumericalError("singular system");

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) < 1e-13 * scale) throw NumericalError("singular system");
    if (pivot != col) {
      for (std::size_t c = col; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      std::swap(b[pivot], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double acc = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) acc -= a(ri, c) * x[c];
    x[ri] = acc / a(ri, ri);
  }
  return x;
}

std::vector<double> solve_consistent(Matrix a, std::vector<double> b, double residual_tol) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  if (rows < cols || b.size() != rows) throw InvalidInputError("solve_consistent: shape mismatch");

  const Matrix a0 = a;
  const std::vector<double> b0 = b;

  double scale = 0.0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) scale = std::max(scale, std::abs(a(r, c)));
  if (scale == 0.0) throw NumericalError("singular system");

  // Gaussian elimination: the pivot for each column is the largest entry over
  // every not-yet-pivoted row, so surplus rows participate in the elimination
  // and get zeroed out when the system is consistent.
  std::vector<std::size_t> pivot_row(cols);
  std::vector<bool> used(rows, false);
  for (std::size_t col = 0; col < cols; ++col) {
    std::size_t pivot = rows;
    double best = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (used[r]) continue;
      if (std::abs(a(r, col)) > best) {
        best = std::abs(a(r, col));
        pivot = r;
      }
    }
    if (pivot == rows || best < 1e-13 * scale) throw NumericalError("singular system");
    used[pivot] = true;
    pivot_row[col] = pivot;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == pivot) continue;
      const double f = a(r, col) / a(pivot, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < cols; ++c) a(r, c) -= f * a(pivot, c);
      b[r] -= f * b[pivot];
    }
  }

  std::vector<double> x(cols, 0.0);
  for (std::size_t col = 0; col < cols; ++col) x[col] = b[pivot_row[col]] / a(pivot_row[col], col);

  // Consistency check against the original equations.
  double bscale = scale;
  for (double v : b0) bscale = std::max(bscale, std::abs(v));
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = -b0[r];
    for (std::size_t c = 0; c < cols; ++c) acc += a0(r, c) * x[c];
    if (std::abs(acc) > residual_tol * std::max(1.0, bscale))
      throw NumericalError("singular system: inconsistent equations, residual " + std::to_string(acc));
  }
  return x;
}

}  // namespace isiwtc
