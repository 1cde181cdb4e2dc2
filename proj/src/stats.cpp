#include "bell/stats.hpp"

#include <cmath>
#include <vector>

#include "bell/special.hpp"

namespace bell {

EmpiricalQuad empirical_quad(const CountsRecord& counts) {
  const std::uint64_t total = counts.total();
  if (total == 0) {
    throw std::invalid_argument("counts record has zero total");
  }
  const double n = static_cast<double>(total);
  return {counts.n_pp / n, counts.n_pm / n, counts.n_mp / n, counts.n_mm / n,
          total};
}

Mat4 multinomial_covariance(const ProbabilityQuad& p, std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const Vec4 q = p.to_array();
  const double inv_n = 1.0 / static_cast<double>(n);
  Mat4 cov{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      cov[i][j] = (i == j ? q[i] * (1.0 - q[i]) : -q[i] * q[j]) * inv_n;
    }
  }
  return cov;
}

Mat4 multinomial_covariance(const EmpiricalQuad& quad) {
  return multinomial_covariance(quad.quad(), quad.n);
}

double multinomial_sigma2(const CoefficientVector& c, const ProbabilityQuad& p,
                          std::uint64_t n) {
  // Var(c.X) is unchanged by c -> c - const; centering makes c = s*(1,1,1,1)
  // give exactly zero instead of rounding residue.
  const Vec4 cv = c.to_array();
  const Vec4 pv = p.to_array();
  const double mean_c = (cv[0] + cv[1] + cv[2] + cv[3]) * 0.25;
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double ci = cv[i] - mean_c;
    m1 += pv[i] * ci;
    m2 += pv[i] * ci * ci;
  }
  const double var = m2 - m1 * m1;
  return std::max(var, 0.0) / static_cast<double>(n);
}

double compensation_ratio(const CoefficientVector& c, const Vec4& delta) {
  const Vec4 cv = c.to_array();
  double signed_sum = 0.0, abs_sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double term = cv[i] * delta[i];
    signed_sum += term;
    abs_sum += std::fabs(term);
  }
  if (abs_sum < 1e-15) return 0.0;
  return std::min(std::fabs(signed_sum) / abs_sum, 1.0);
}

TestResult evaluate_test(const CoefficientVector& c,
                         const EmpiricalQuad& empirical,
                         const ProbabilityQuad& predicted,
                         VarianceModel variance) {
  TestResult result;
  result.c = c;
  result.observed = linear_combination(c, empirical.quad());
  result.predicted = linear_combination(c, predicted);

  const ProbabilityQuad& at = variance == VarianceModel::NullHypothesis
                                  ? predicted
                                  : empirical.quad();
  result.sigma = std::sqrt(multinomial_sigma2(c, at, empirical.n));

  const Vec4 e = empirical.quad().to_array();
  const Vec4 m = predicted.to_array();
  Vec4 delta;
  for (int i = 0; i < 4; ++i) delta[i] = e[i] - m[i];
  result.compensation_ratio = compensation_ratio(c, delta);

  if (result.sigma >= 1e-12) {
    result.z = (result.observed - result.predicted) / result.sigma;
  } else {
    result.degenerate = true;
    result.z = 0.0;
  }
  return result;
}

ChiSquareResult chi_square_statistic(
    std::span<const std::pair<CountsRecord, ProbabilityQuad>> dataset,
    int fitted_params) {
  if (dataset.empty()) {
    throw std::invalid_argument("chi_square_statistic needs at least one pair");
  }

  // Per-pair contributions accumulated in pair order, so the total does not
  // depend on any parallel schedule upstream.
  std::vector<double> contributions(dataset.size(), 0.0);
  for (std::size_t k = 0; k < dataset.size(); ++k) {
    const CountsRecord& rec = dataset[k].first;
    const double n = static_cast<double>(rec.total());
    const Vec4 observed{static_cast<double>(rec.n_pp),
                        static_cast<double>(rec.n_pm),
                        static_cast<double>(rec.n_mp),
                        static_cast<double>(rec.n_mm)};
    const Vec4 p = dataset[k].second.to_array();
    double chi2 = 0.0;
    for (int i = 0; i < 4; ++i) {
      if (p[i] < 1e-12) {
        if (observed[i] > 0.0) {
          static constexpr const char* kOutcome[4] = {"n_pp", "n_pm", "n_mp",
                                                      "n_mm"};
          throw ImpossibleOutcomeError(
              rec.settings,
              std::string("outcome ") + kOutcome[i] + " observed at (alpha=" +
                  std::to_string(rec.settings.alpha_deg) + " deg, beta=" +
                  std::to_string(rec.settings.beta_deg) +
                  " deg) where the model predicts probability 0");
        }
        continue;
      }
      const double expected = n * p[i];
      const double r = observed[i] - expected;
      chi2 += r * r / expected;
    }
    contributions[k] = chi2;
  }

  ChiSquareResult result;
  for (double x : contributions) result.chi2 += x;
  result.dof = 3 * static_cast<int>(dataset.size()) - fitted_params;
  if (result.dof < 1) {
    throw std::invalid_argument("chi-square needs dof >= 1");
  }
  result.p_value = chi_square_p_value(result.chi2, result.dof);
  return result;
}

}  // namespace bell
