#include "bell/model.hpp"

#include <stdexcept>

namespace bell {

namespace {

void check_visibility(double v) {
  if (!(std::isfinite(v) && v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument("visibility must be in [0, 1]");
  }
}

}  // namespace

StateModel StateModel::max_entangled(double visibility) {
  check_visibility(visibility);
  return StateModel(StateKind::MaxEntangled, std::numbers::pi / 4, visibility);
}

StateModel StateModel::nonmax_entangled(double theta, double visibility) {
  check_visibility(visibility);
  if (!(std::isfinite(theta) && theta > 0.0 && theta < std::numbers::pi / 2)) {
    throw std::invalid_argument(
        "entanglement angle theta must lie in (0, pi/2)");
  }
  return StateModel(StateKind::NonMaxEntangled, theta, visibility);
}

StateModel StateModel::lhv() { return StateModel(StateKind::Lhv, 0.0, 1.0); }

ProbabilityQuad predict_probabilities(const StateModel& model,
                                      const AnalyzerSettings& settings) {
  if (!std::isfinite(settings.alpha) || !std::isfinite(settings.beta)) {
    throw std::invalid_argument("analyzer angles must be finite");
  }
  if (model.kind() == StateKind::Lhv) {
    throw std::invalid_argument(
        "the LHV model predicts correlations, not joint quads; "
        "use lhv_correlation / lhv_response");
  }

  ProbabilityQuad quad;
  if (model.kind() == StateKind::MaxEntangled) {
    const double d = settings.alpha - settings.beta;
    const double c = std::cos(d), s = std::sin(d);
    quad = {0.5 * c * c, 0.5 * s * s, 0.5 * s * s, 0.5 * c * c};
  } else {
    // Outcome vectors |+g> = (cos g, sin g), |-g> = (-sin g, cos g) applied
    // to the state cos(theta)|HH> + sin(theta)|VV>; probabilities are the
    // squared transition amplitudes.
    const double ct = std::cos(model.theta()), st = std::sin(model.theta());
    const double ca = std::cos(settings.alpha), sa = std::sin(settings.alpha);
    const double cb = std::cos(settings.beta), sb = std::sin(settings.beta);
    const double a_pp = ct * ca * cb + st * sa * sb;
    const double a_pm = -ct * ca * sb + st * sa * cb;
    const double a_mp = -ct * sa * cb + st * ca * sb;
    const double a_mm = ct * sa * sb + st * ca * cb;
    quad = {a_pp * a_pp, a_pm * a_pm, a_mp * a_mp, a_mm * a_mm};
  }
  return mix_with_uniform(quad, model.visibility());
}

int lhv_response(double lambda, double analyzer_angle) {
  if (!std::isfinite(lambda) || !std::isfinite(analyzer_angle)) {
    throw std::invalid_argument("lhv_response requires finite inputs");
  }
  return std::cos(2.0 * (analyzer_angle - lambda)) >= 0.0 ? 1 : -1;
}

double lhv_correlation(const AnalyzerSettings& settings) {
  if (!std::isfinite(settings.alpha) || !std::isfinite(settings.beta)) {
    throw std::invalid_argument("analyzer angles must be finite");
  }
  const double pi = std::numbers::pi;
  const double d = std::fmod(std::fabs(settings.alpha - settings.beta), pi);
  return d <= pi / 2 ? 1.0 - 4.0 * d / pi : 4.0 * d / pi - 3.0;
}

ProbabilityQuad lhv_probabilities(const AnalyzerSettings& settings) {
  const double e = lhv_correlation(settings);
  const double same = 0.25 * (1.0 + e), diff = 0.25 * (1.0 - e);
  return {same, diff, diff, same};
}

}  // namespace bell
