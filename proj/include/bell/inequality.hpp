#pragma once

#include <functional>

#include "bell/linalg.hpp"
#include "bell/model.hpp"

namespace bell {

// Real coefficient vector defining a linear-combination test E_c over the
// four joint probabilities. The correlation is the member (1, -1, -1, 1).
struct CoefficientVector {
  double c_pp = 0.0;
  double c_pm = 0.0;
  double c_mp = 0.0;
  double c_mm = 0.0;

  static CoefficientVector correlation() { return {1.0, -1.0, -1.0, 1.0}; }

  Vec4 to_array() const { return {c_pp, c_pm, c_mp, c_mm}; }
  static CoefficientVector from_array(const Vec4& a) {
    return {a[0], a[1], a[2], a[3]};
  }
};

// E(alpha, beta) = P++ - P+- - P-+ + P--.
double correlation(const ProbabilityQuad& quad);

// E_c = c . quad; reduces to correlation() for c = (1, -1, -1, 1).
double linear_combination(const CoefficientVector& c,
                          const ProbabilityQuad& quad);

// Two settings per side for the CHSH statistic.
struct ChshAngles {
  double a = 0.0;
  double a_prime = 0.0;
  double b = 0.0;
  double b_prime = 0.0;
};

inline ChshAngles standard_chsh_angles() {
  return {0.0, deg_to_rad(45.0), deg_to_rad(22.5), deg_to_rad(67.5)};
}

// S = E(a,b) - E(a,b') + E(a',b) + E(a',b'). Deterministic strategies obey
// |S| <= 2; the quantum cosine reaches 2*sqrt(2) at the standard angles.
double chsh_statistic(const std::function<double(double, double)>& correlation_fn,
                      const ChshAngles& angles);

inline constexpr double kChshClassicalBound = 2.0;
inline constexpr double kChshTsirelson = 2.8284271247461903;

struct OptimalCoefficients {
  CoefficientVector c;
  bool degenerate = false;
};

// Coefficients maximizing |c . delta| / sqrt(c^T cov c) over the covariance's
// row space: c = pinv(cov) . delta, unit Euclidean length, first nonzero
// component positive. If delta is zero the correlation vector (normalized) is
// returned; if delta lies in the covariance's null space, delta itself is
// normalized; both cases are flagged degenerate. Non-symmetric or indefinite
// covariances are rejected.
OptimalCoefficients optimal_coefficients(const Vec4& delta,
                                         const Mat4& covariance);

}  // namespace bell
