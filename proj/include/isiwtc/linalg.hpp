#ifndef ISIWTC_LINALG_HPP
#define ISIWTC_LINALG_HPP

#include <cstddef>
#include <vector>

namespace isiwtc {

/// Dense row-major matrix just large enough for the small systems in this
/// project (stationary distributions and the surrogate-maximizer solve;
/// dimensions stay in the tens).
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

/// Solves the square system a x = b by Gaussian elimination with partial
/// pivoting. Throws NumericalError("singular system") on pivot breakdown.
std::vector<double> solve_square(Matrix a, std::vector<double> b);

/// Solves a consistent overdetermined system (rows >= cols, rank = cols) by
/// column-wise elimination with partial pivoting over all remaining rows.
/// The rows not used as pivots must reduce to ~0 = ~0; a residual above
/// `residual_tol` (scaled by the data magnitude) raises NumericalError.
std::vector<double> solve_consistent(Matrix a, std::vector<double> b, double residual_tol = 1e-8);

}  // namespace isiwtc

#endif
