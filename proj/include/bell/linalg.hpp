#pragma once

#include <array>

namespace bell {

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<Vec4, 4>;

double dot(const Vec4& a, const Vec4& b);
double norm(const Vec4& a);
Vec4 mat_vec(const Mat4& m, const Vec4& x);
double quad_form(const Vec4& x, const Mat4& m);  // x^T m x

struct SymEigen4 {
  Vec4 values;   // ascending
  Mat4 vectors;  // vectors[k] is the eigenvector for values[k]
};

// Cyclic Jacobi rotations; exact enough for the 4x4 covariance work here.
SymEigen4 jacobi_eigen(const Mat4& symmetric);

// Moore-Penrose inverse of a symmetric matrix. Eigenvalues below
// rel_tol * max|eigenvalue| are treated as zero.
Mat4 pinv_sym(const Mat4& symmetric, double rel_tol = 1e-12);

}  // namespace bell
