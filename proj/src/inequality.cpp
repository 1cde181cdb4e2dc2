#include "bell/inequality.hpp"

#include <cmath>
#include <stdexcept>

namespace bell {

double correlation(const ProbabilityQuad& quad) {
  return quad.p_pp - quad.p_pm - quad.p_mp + quad.p_mm;
}

double linear_combination(const CoefficientVector& c,
                          const ProbabilityQuad& quad) {
  // Left-to-right, so c = (1,-1,-1,1) reproduces correlation() bit for bit.
  return c.c_pp * quad.p_pp + c.c_pm * quad.p_pm + c.c_mp * quad.p_mp +
         c.c_mm * quad.p_mm;
}

double chsh_statistic(
    const std::function<double(double, double)>& correlation_fn,
    const ChshAngles& angles) {
  return correlation_fn(angles.a, angles.b) -
         correlation_fn(angles.a, angles.b_prime) +
         correlation_fn(angles.a_prime, angles.b) +
         correlation_fn(angles.a_prime, angles.b_prime);
}

namespace {

// Unit length with the first component above 1e-12 made positive.
Vec4 canonicalize(Vec4 c) {
  const double len = norm(c);
  for (double& x : c) x /= len;
  for (double x : c) {
    if (std::fabs(x) > 1e-12) {
      if (x < 0.0)
        for (double& y : c) y = -y;
      break;
    }
  }
  return c;
}

}  // namespace

OptimalCoefficients optimal_coefficients(const Vec4& delta,
                                         const Mat4& covariance) {
  double scale = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (!std::isfinite(delta[i])) {
      throw std::invalid_argument("delta must be finite");
    }
    for (int j = 0; j < 4; ++j) {
      if (!std::isfinite(covariance[i][j])) {
        throw std::invalid_argument("covariance must be finite");
      }
      scale = std::max(scale, std::fabs(covariance[i][j]));
    }
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (std::fabs(covariance[i][j] - covariance[j][i]) > 1e-8 * scale) {
        throw std::invalid_argument("covariance must be symmetric");
      }
    }
  }

  const SymEigen4 eig = jacobi_eigen(covariance);
  const double max_eig = eig.values[3];
  if (eig.values[0] < -1e-8 * std::max(max_eig, 0.0) - 1e-300) {
    throw std::invalid_argument("covariance must be positive semidefinite");
  }
  const double cutoff = 1e-12 * std::max(max_eig, 0.0);

  // Row-space component of delta and pinv(cov) . delta in one pass.
  Vec4 projected{};
  Vec4 solved{};
  for (int k = 0; k < 4; ++k) {
    if (eig.values[k] <= cutoff) continue;
    const double coeff = dot(eig.vectors[k], delta);
    for (int i = 0; i < 4; ++i) {
      projected[i] += coeff * eig.vectors[k][i];
      solved[i] += coeff / eig.values[k] * eig.vectors[k][i];
    }
  }

  const double delta_len = norm(delta);
  if (delta_len == 0.0) {
    return {CoefficientVector{0.5, -0.5, -0.5, 0.5}, true};
  }
  if (norm(projected) <= 1e-12 * delta_len) {
    // Zero-variance direction: any overlap with delta has unbounded
    // significance, so report delta itself and flag it.
    return {CoefficientVector::from_array(canonicalize(delta)), true};
  }
  return {CoefficientVector::from_array(canonicalize(solved)), false};
}

}  // namespace bell
