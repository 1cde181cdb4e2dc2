#include "bell/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace bell {

double dot(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

double norm(const Vec4& a) { return std::sqrt(dot(a, a)); }

Vec4 mat_vec(const Mat4& m, const Vec4& x) {
  Vec4 y{};
  for (int i = 0; i < 4; ++i) y[i] = dot(m[i], x);
  return y;
}

double quad_form(const Vec4& x, const Mat4& m) { return dot(x, mat_vec(m, x)); }

SymEigen4 jacobi_eigen(const Mat4& symmetric) {
  Mat4 a = symmetric;
  Mat4 v{};  // accumulated rotations, rows = eigenvectors of a
  for (int i = 0; i < 4; ++i) v[i][i] = 1.0;

  auto off_diag = [&a] {
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) s += a[i][j] * a[i][j];
    return s;
  };

  for (int sweep = 0; sweep < 64 && off_diag() > 1e-300; ++sweep) {
    for (int p = 0; p < 3; ++p) {
      for (int q = p + 1; q < 4; ++q) {
        const double apq = a[p][q];
        if (apq == 0.0) continue;
        const double tau = (a[q][q] - a[p][p]) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < 4; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 4; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 4; ++k) {
          const double vpk = v[p][k], vqk = v[q][k];
          v[p][k] = c * vpk - s * vqk;
          v[q][k] = s * vpk + c * vqk;
        }
      }
    }
  }

  SymEigen4 result;
  std::array<int, 4> order{0, 1, 2, 3};
  Vec4 diag{a[0][0], a[1][1], a[2][2], a[3][3]};
  std::sort(order.begin(), order.end(),
            [&diag](int i, int j) { return diag[i] < diag[j]; });
  for (int k = 0; k < 4; ++k) {
    result.values[k] = diag[order[k]];
    result.vectors[k] = v[order[k]];
  }
  return result;
}

Mat4 pinv_sym(const Mat4& symmetric, double rel_tol) {
  const SymEigen4 eig = jacobi_eigen(symmetric);
  double max_abs = 0.0;
  for (double lambda : eig.values) max_abs = std::max(max_abs, std::fabs(lambda));
  const double cutoff = rel_tol * max_abs;

  Mat4 inv{};
  for (int k = 0; k < 4; ++k) {
    if (std::fabs(eig.values[k]) <= cutoff) continue;
    const double w = 1.0 / eig.values[k];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        inv[i][j] += w * eig.vectors[k][i] * eig.vectors[k][j];
  }
  return inv;
}

}  // namespace bell
