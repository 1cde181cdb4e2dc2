#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "bell/inequality.hpp"
#include "bell/linalg.hpp"
#include "bell/simulate.hpp"

namespace bell {

// Relative frequencies from one counts record.
struct EmpiricalQuad {
  double p_pp = 0.0;
  double p_pm = 0.0;
  double p_mp = 0.0;
  double p_mm = 0.0;
  std::uint64_t n = 0;

  ProbabilityQuad quad() const { return {p_pp, p_pm, p_mp, p_mm}; }
};

EmpiricalQuad empirical_quad(const CountsRecord& counts);

// Covariance of the four estimated probabilities for n multinomial trials:
// S_ii = p_i (1 - p_i) / n, S_ij = -p_i p_j / n. Singular by construction;
// (1,1,1,1) spans the null space.
Mat4 multinomial_covariance(const ProbabilityQuad& p, std::uint64_t n);
Mat4 multinomial_covariance(const EmpiricalQuad& quad);

// c^T S c evaluated as the variance of c.X for one trial, with c centered
// first so directions along (1,1,1,1) cancel exactly rather than to rounding.
double multinomial_sigma2(const CoefficientVector& c, const ProbabilityQuad& p,
                          std::uint64_t n);

// |sum c_i d_i| / sum |c_i d_i|: 0 means the deviations cancel completely in
// the test, 1 means they all push the same way.
double compensation_ratio(const CoefficientVector& c, const Vec4& delta);

struct TestResult {
  CoefficientVector c;
  double observed = 0.0;
  double predicted = 0.0;
  double sigma = 0.0;
  double z = 0.0;
  double compensation_ratio = 0.0;
  bool degenerate = false;
};

// Which quad the test variance is evaluated at. NullHypothesis (the default)
// uses the model prediction, so z tests the model's own error bar.
enum class VarianceModel { NullHypothesis, Empirical };

TestResult evaluate_test(const CoefficientVector& c,
                         const EmpiricalQuad& empirical,
                         const ProbabilityQuad& predicted,
                         VarianceModel variance = VarianceModel::NullHypothesis);

class ImpossibleOutcomeError : public std::runtime_error {
 public:
  ImpossibleOutcomeError(const SettingPair& settings, const std::string& what)
      : std::runtime_error(what), settings_(settings) {}
  const SettingPair& settings() const { return settings_; }

 private:
  SettingPair settings_;
};

struct ChiSquareResult {
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Pearson chi-square over all setting pairs: sum (n_obs - n p)^2 / (n p),
// skipping cells with p < 1e-12 and no observations. A cell with p < 1e-12
// but observed counts raises ImpossibleOutcomeError naming the pair.
// dof = 3 * pairs - fitted_params.
ChiSquareResult chi_square_statistic(
    std::span<const std::pair<CountsRecord, ProbabilityQuad>> dataset,
    int fitted_params = 0);

}  // namespace bell
