#include <cmath>
#include <doctest.h>

#include "bell/linalg.hpp"
#include "bell/rng.hpp"

using namespace bell;

namespace {

Mat4 reconstruct(const SymEigen4& eig) {
  Mat4 m{};
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        m[i][j] += eig.values[k] * eig.vectors[k][i] * eig.vectors[k][j];
      }
    }
  }
  return m;
}

double max_abs_diff(const Mat4& a, const Mat4& b) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      m = std::max(m, std::fabs(a[i][j] - b[i][j]));
  return m;
}

Mat4 mat_mul(const Mat4& a, const Mat4& b) {
  Mat4 c{};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

}  // namespace

TEST_CASE("jacobi eigenvalues of a block matrix") {
  const Mat4 a{{{2.0, 1.0, 0.0, 0.0},
                {1.0, 2.0, 0.0, 0.0},
                {0.0, 0.0, 3.0, 0.0},
                {0.0, 0.0, 0.0, -1.0}}};
  const SymEigen4 eig = jacobi_eigen(a);
  CHECK(eig.values[0] == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(eig.values[1] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(eig.values[2] == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(eig.values[3] == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(max_abs_diff(reconstruct(eig), a) < 1e-12);
}

TEST_CASE("jacobi reconstructs random symmetric matrices") {
  const rng::Stream stream = rng::master(404);
  for (std::uint64_t k = 0; k < 50; ++k) {
    Mat4 a{};
    for (int i = 0; i < 4; ++i) {
      for (int j = i; j < 4; ++j) {
        a[i][j] = a[j][i] = 2.0 * stream.uniform(16 * k + 4 * i + j) - 1.0;
      }
    }
    const SymEigen4 eig = jacobi_eigen(a);
    CHECK(max_abs_diff(reconstruct(eig), a) < 1e-12);
    // Orthonormal eigenvectors.
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const double want = i == j ? 1.0 : 0.0;
        CHECK(std::fabs(dot(eig.vectors[i], eig.vectors[j]) - want) < 1e-12);
      }
    }
  }
}

TEST_CASE("pseudo-inverse satisfies the Penrose identity on PSD input") {
  const rng::Stream stream = rng::master(505);
  for (std::uint64_t k = 0; k < 30; ++k) {
    // a = b^T b is PSD; make it singular by zeroing one factor row.
    Mat4 b{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        b[i][j] = i == 3 ? 0.0 : 2.0 * stream.uniform(16 * k + 4 * i + j) - 1.0;
    Mat4 a{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int r = 0; r < 4; ++r) a[i][j] += b[r][i] * b[r][j];

    const Mat4 inv = pinv_sym(a);
    CHECK(max_abs_diff(mat_mul(mat_mul(a, inv), a), a) < 1e-10);
    CHECK(max_abs_diff(mat_mul(mat_mul(inv, a), inv), inv) < 1e-10);
  }
}

TEST_CASE("quad_form matches explicit expansion") {
  const Mat4 m{{{1.0, 0.5, 0.0, 0.0},
                {0.5, 2.0, 0.0, 0.0},
                {0.0, 0.0, 3.0, 0.0},
                {0.0, 0.0, 0.0, 4.0}}};
  const Vec4 x{1.0, -1.0, 2.0, 0.5};
  // 1 - 0.5 - 0.5 + 2 + 12 + 1 = 15
  CHECK(quad_form(x, m) == doctest::Approx(15.0).epsilon(1e-14));
}
