#include <doctest.h>

#include <cmath>

#include "isiwtc/errors.hpp"
#include "isiwtc/linalg.hpp"
#include "isiwtc/rng.hpp"

using namespace isiwtc;

TEST_CASE("solve_square handles a pivoting-hostile system") {
  Matrix a(3, 3);
  a(0, 0) = 1e-14; a(0, 1) = 1.0; a(0, 2) = 0.0;
  a(1, 0) = 1.0;   a(1, 1) = 1.0; a(1, 2) = 1.0;
  a(2, 0) = 0.0;   a(2, 1) = 1.0; a(2, 2) = 2.0;
  // Solution (1, 2, 3) pushed through the matrix.
  std::vector<double> x_true{1.0, 2.0, 3.0};
  std::vector<double> b(3, 0.0);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) b[r] += a(r, c) * x_true[c];
  const auto x = solve_square(a, b);
  for (int k = 0; k < 3; ++k) CHECK(x[k] == doctest::Approx(x_true[k]).epsilon(1e-12));
}

TEST_CASE("solve_square rejects singular input") {
  Matrix a(2, 2);
  a(0, 0) = 1.0; a(0, 1) = 2.0;
  a(1, 0) = 2.0; a(1, 1) = 4.0;
  CHECK_THROWS_AS(solve_square(a, {1.0, 2.0}), NumericalError);
}

TEST_CASE("solve_consistent uses surplus consistent rows") {
  // 4 equations, 2 unknowns, rank 2, consistent.
  Matrix a(4, 2);
  a(0, 0) = 1.0; a(0, 1) = 1.0;
  a(1, 0) = 1.0; a(1, 1) = -1.0;
  a(2, 0) = 2.0; a(2, 1) = 0.0;   // sum of the first two
  a(3, 0) = 0.0; a(3, 1) = 2.0;   // difference of the first two
  const std::vector<double> b{3.0, -1.0, 2.0, 4.0};
  const auto x = solve_consistent(a, b);
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("solve_consistent flags inconsistent equations") {
  Matrix a(3, 2);
  a(0, 0) = 1.0; a(0, 1) = 0.0;
  a(1, 0) = 0.0; a(1, 1) = 1.0;
  a(2, 0) = 1.0; a(2, 1) = 1.0;
  CHECK_THROWS_AS(solve_consistent(a, {1.0, 1.0, 3.0}), NumericalError);
}

TEST_CASE("rng streams are deterministic and seed-separated") {
  Rng a(42), b(42), c(43);
  for (int k = 0; k < 100; ++k) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  bool any_different = false;
  for (int k = 0; k < 100; ++k) any_different |= (a.uniform() != c.uniform());
  CHECK(any_different);
}

TEST_CASE("gaussian moments look right") {
  Rng rng(7);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double g = rng.gaussian();
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("categorical respects weights") {
  Rng rng(11);
  const std::vector<double> w{0.2, 0.5, 0.3};
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int k = 0; k < n; ++k) ++counts[rng.categorical(w)];
  for (int j = 0; j < 3; ++j) {
    const double freq = static_cast<double>(counts[j]) / n;
    const double sigma = std::sqrt(w[j] * (1 - w[j]) / n);
    CHECK(std::abs(freq - w[j]) < 4.0 * sigma);
  }
}

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  CHECK(derive_seed(1, 1) != derive_seed(2, 1));
  CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}
