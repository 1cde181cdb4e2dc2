#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bell/dataset.hpp"
#include "bell/fit.hpp"
#include "bell/inequality.hpp"
#include "bell/stats.hpp"

namespace bell {

// The default test battery: correlation, normalization, the two
// compensating-pair probes, and the two single-side marginal probes.
std::vector<std::pair<std::string, CoefficientVector>> canonical_tests();

// Model prediction for analysis purposes; routes the LHV kind through the
// response-model quad instead of predict_probabilities.
ProbabilityQuad model_quad(const StateModel& model,
                           const AnalyzerSettings& settings);

struct NamedTestResult {
  std::string name;
  TestResult result;
  bool pass = true;
};

struct PairAnalysis {
  SettingPair settings;
  std::vector<NamedTestResult> tests;
};

struct ChshSection {
  bool available = false;
  std::array<double, 4> angles_deg{0.0, 45.0, 22.5, 67.5};  // a, a', b, b'
  double s = 0.0;
};

struct ScanSection {
  std::uint64_t n_tested = 0;
  bool has_result = false;
  double max_abs_z = 0.0;
  CoefficientVector argmax_c;
};

struct Report {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<PairAnalysis> per_pair;
  std::vector<NamedTestResult> aggregate;
  ChshSection chsh;
  ChiSquareResult chi_square;
  // Set when the data contains an outcome the model forbids; chi2 is then
  // pinned at 1e30 with p_value 0 instead of aborting the analysis.
  std::optional<std::string> chi_square_note;
  std::optional<FitResult> fit;
  ScanSection scan;
  double z_threshold = 5.0;

  bool any_rejection() const;
};

struct AnalysisOptions {
  std::vector<std::pair<std::string, CoefficientVector>> tests =
      canonical_tests();
  double z_threshold = 5.0;
  VarianceModel variance = VarianceModel::NullHypothesis;
  std::array<double, 4> chsh_angles_deg{0.0, 45.0, 22.5, 67.5};
  // Null-hypothesis analyzer miscalibration, applied to the nominal settings
  // before predicting (used by the fit report).
  double alpha_offset = 0.0;
  double beta_offset = 0.0;
};

// Evaluates every configured test at every setting pair plus the pooled
// aggregate, the chi-square summary, and — when the four CHSH pairs are
// present in the data — the empirical CHSH value.
Report analyze_dataset(const Dataset& dataset, const StateModel& model,
                       const AnalysisOptions& options);

// Report JSON with fixed key order and floats rounded to 12 significant
// digits. Path "-" writes stdout.
std::string report_json(const Report& report);
void emit_report(const Report& report, const std::string& path);

// E_c(delta) sampled on [0, pi] at the (alpha = 0, beta = delta) slice;
// CSV with header delta_rad,value.
std::string curve_csv(const StateModel& model, const CoefficientVector& c,
                      double step_deg);
void emit_curve(const StateModel& model, const CoefficientVector& c,
                double step_deg, const std::string& path);

}  // namespace bell
