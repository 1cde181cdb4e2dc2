#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace bell {

constexpr double deg_to_rad(double deg) {
  return deg * std::numbers::pi / 180.0;
}

constexpr double rad_to_deg(double rad) {
  return rad * 180.0 / std::numbers::pi;
}

// Analyzer orientations in radians. Polarization analyzers have period pi,
// so all predictions are invariant under adding pi to either angle.
struct AnalyzerSettings {
  double alpha = 0.0;
  double beta = 0.0;
};

// Joint outcome probabilities (P++, P+-, P-+, P--) at one setting pair.
struct ProbabilityQuad {
  double p_pp = 0.0;
  double p_pm = 0.0;
  double p_mp = 0.0;
  double p_mm = 0.0;

  double sum() const { return p_pp + p_pm + p_mp + p_mm; }

  std::array<double, 4> to_array() const { return {p_pp, p_pm, p_mp, p_mm}; }

  bool is_valid(double tol = 1e-9) const {
    const double lo = -tol, hi = 1.0 + tol;
    return p_pp >= lo && p_pp <= hi && p_pm >= lo && p_pm <= hi &&
           p_mp >= lo && p_mp <= hi && p_mm >= lo && p_mm <= hi &&
           std::fabs(sum() - 1.0) <= tol;
  }
};

inline ProbabilityQuad uniform_quad() { return {0.25, 0.25, 0.25, 0.25}; }

// Convex mix of a quad with the uniform quad; v = 1 leaves it unchanged.
inline ProbabilityQuad mix_with_uniform(const ProbabilityQuad& q, double v) {
  const double w = (1.0 - v) * 0.25;
  return {v * q.p_pp + w, v * q.p_pm + w, v * q.p_mp + w, v * q.p_mm + w};
}

enum class StateKind { MaxEntangled, NonMaxEntangled, Lhv };

// Source models: the pure state cos(theta)|HH> + sin(theta)|VV| family
// (maximally entangled at theta = pi/4) with a white-noise visibility mix,
// plus the deterministic local-hidden-variable model.
class StateModel {
 public:
  static StateModel max_entangled(double visibility = 1.0);
  static StateModel nonmax_entangled(double theta, double visibility = 1.0);
  static StateModel lhv();

  StateKind kind() const { return kind_; }
  double theta() const { return theta_; }
  double visibility() const { return visibility_; }

 private:
  StateModel(StateKind kind, double theta, double visibility)
      : kind_(kind), theta_(theta), visibility_(visibility) {}

  StateKind kind_;
  double theta_;
  double visibility_;
};

// Joint probabilities of the quantum models at one setting pair.
// Rejects the Lhv kind and non-finite angles.
ProbabilityQuad predict_probabilities(const StateModel& model,
                                      const AnalyzerSettings& settings);

// Deterministic hidden-variable response: sign(cos 2(analyzer_angle-lambda)),
// with the measure-zero boundary cos = 0 mapped to +1.
int lhv_response(double lambda, double analyzer_angle);

// Closed-form correlation of the response model with lambda uniform on
// [0, pi): the sawtooth 1 - 4d/pi on [0, pi/2], 4d/pi - 3 on (pi/2, pi],
// where d = |alpha - beta| folded into [0, pi].
double lhv_correlation(const AnalyzerSettings& settings);

// Joint probabilities of the response model. Marginals are unbiased, so
// P++ = P-- = (1 + E)/4 and P+- = P-+ = (1 - E)/4 with E the sawtooth.
ProbabilityQuad lhv_probabilities(const AnalyzerSettings& settings);

}  // namespace bell
