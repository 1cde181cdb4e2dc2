#include "bell/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bell/parallel.hpp"

namespace bell {

void ExperimentPlan::validate() const {
  if (setting_pairs.empty()) {
    throw std::invalid_argument("experiment plan needs at least one setting pair");
  }
  if (shots_per_pair < 1) {
    throw std::invalid_argument("shots_per_pair must be >= 1");
  }
  for (const SettingPair& p : setting_pairs) {
    if (!std::isfinite(p.alpha_deg) || !std::isfinite(p.beta_deg)) {
      throw std::invalid_argument("setting angles must be finite");
    }
  }
  if (!(noise.visibility >= 0.0 && noise.visibility <= 1.0)) {
    throw std::invalid_argument("noise visibility must be in [0, 1]");
  }
  if (!std::isfinite(noise.alpha_offset) || !std::isfinite(noise.beta_offset) ||
      !std::isfinite(noise.anomaly_eps1) || !std::isfinite(noise.anomaly_eps2)) {
    throw std::invalid_argument("noise parameters must be finite");
  }
}

AnomalyApplication apply_anomaly(const ProbabilityQuad& quad, double eps1,
                                 double eps2) {
  // p_pp + e1 and p_mm - e1 must both stay in [0, 1]; same for the +-/-+ pair.
  const double e1 = std::clamp(eps1, -std::min(quad.p_pp, 1.0 - quad.p_mm),
                               std::min(1.0 - quad.p_pp, quad.p_mm));
  const double e2 = std::clamp(eps2, -std::min(quad.p_pm, 1.0 - quad.p_mp),
                               std::min(1.0 - quad.p_pm, quad.p_mp));
  return {{quad.p_pp + e1, quad.p_pm + e2, quad.p_mp - e2, quad.p_mm - e1},
          e1,
          e2};
}

namespace {

struct Tally {
  std::uint64_t n[4] = {0, 0, 0, 0};
};

// One multinomial trial: cumulative-threshold lookup on a single uniform.
inline int pick_outcome(double u, double t1, double t2, double t3) {
  if (u < t1) return 0;
  if (u < t2) return 1;
  if (u < t3) return 2;
  return 3;
}

Tally sample_quad_parallel(const ProbabilityQuad& quad, std::uint64_t shots,
                           rng::Stream stream) {
  const double t1 = quad.p_pp;
  const double t2 = t1 + quad.p_pm;
  const double t3 = t2 + quad.p_mp;
  std::uint64_t n0 = 0, n1 = 0, n2 = 0, n3 = 0;
#pragma omp parallel for schedule(static) num_threads(max_threads()) \
    reduction(+ : n0, n1, n2, n3)
  for (long long k = 0; k < static_cast<long long>(shots); ++k) {
    switch (pick_outcome(stream.uniform(k), t1, t2, t3)) {
      case 0: ++n0; break;
      case 1: ++n1; break;
      case 2: ++n2; break;
      default: ++n3; break;
    }
  }
  return {{n0, n1, n2, n3}};
}

Tally sample_quad_serial(const ProbabilityQuad& quad, std::uint64_t shots,
                         rng::Stream stream) {
  const double t1 = quad.p_pp;
  const double t2 = t1 + quad.p_pm;
  const double t3 = t2 + quad.p_mp;
  Tally tally;
  for (std::uint64_t k = 0; k < shots; ++k) {
    ++tally.n[pick_outcome(stream.uniform(k), t1, t2, t3)];
  }
  return tally;
}

inline int lhv_outcome_index(double u, double alpha, double beta) {
  const double lambda = u * std::numbers::pi;
  const int a = lhv_response(lambda, alpha);
  const int b = lhv_response(lambda, beta);
  return (a > 0 ? 0 : 2) + (b > 0 ? 0 : 1);
}

Tally sample_lhv_parallel(double alpha, double beta, std::uint64_t shots,
                          rng::Stream stream) {
  std::uint64_t n0 = 0, n1 = 0, n2 = 0, n3 = 0;
#pragma omp parallel for schedule(static) num_threads(max_threads()) \
    reduction(+ : n0, n1, n2, n3)
  for (long long k = 0; k < static_cast<long long>(shots); ++k) {
    switch (lhv_outcome_index(stream.uniform(k), alpha, beta)) {
      case 0: ++n0; break;
      case 1: ++n1; break;
      case 2: ++n2; break;
      default: ++n3; break;
    }
  }
  return {{n0, n1, n2, n3}};
}

Tally sample_lhv_serial(double alpha, double beta, std::uint64_t shots,
                        rng::Stream stream) {
  Tally tally;
  for (std::uint64_t k = 0; k < shots; ++k) {
    ++tally.n[lhv_outcome_index(stream.uniform(k), alpha, beta)];
  }
  return tally;
}

ExperimentResult run_plan(const ExperimentPlan& plan, bool parallel) {
  plan.validate();
  const rng::Stream root = rng::master(plan.seed);
  const std::size_t n_pairs = plan.setting_pairs.size();

  ExperimentResult result;
  result.records.resize(n_pairs);
  result.applied_eps1.assign(n_pairs, 0.0);
  result.applied_eps2.assign(n_pairs, 0.0);

  for (std::size_t i = 0; i < n_pairs; ++i) {
    const SettingPair& pair = plan.setting_pairs[i];
    const AnalyzerSettings nominal = pair.radians();
    const AnalyzerSettings shifted{nominal.alpha + plan.noise.alpha_offset,
                                   nominal.beta + plan.noise.beta_offset};
    const rng::Stream stream = root.substream(i);

    Tally tally;
    if (plan.model.kind() == StateKind::Lhv) {
      tally = parallel ? sample_lhv_parallel(shifted.alpha, shifted.beta,
                                             plan.shots_per_pair, stream)
                       : sample_lhv_serial(shifted.alpha, shifted.beta,
                                           plan.shots_per_pair, stream);
    } else {
      ProbabilityQuad quad = predict_probabilities(plan.model, shifted);
      quad = mix_with_uniform(quad, plan.noise.visibility);
      const AnomalyApplication anomaly =
          apply_anomaly(quad, plan.noise.anomaly_eps1, plan.noise.anomaly_eps2);
      result.applied_eps1[i] = anomaly.applied_eps1;
      result.applied_eps2[i] = anomaly.applied_eps2;
      tally = parallel ? sample_quad_parallel(anomaly.quad,
                                              plan.shots_per_pair, stream)
                       : sample_quad_serial(anomaly.quad, plan.shots_per_pair,
                                            stream);
    }
    result.records[i] = {pair, tally.n[0], tally.n[1], tally.n[2], tally.n[3]};
  }
  return result;
}

}  // namespace

CountsRecord sample_counts(const ProbabilityQuad& quad, std::uint64_t shots,
                           const rng::Stream& stream,
                           const SettingPair& settings) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  const Tally t = sample_quad_parallel(quad, shots, stream);
  return {settings, t.n[0], t.n[1], t.n[2], t.n[3]};
}

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  return run_plan(plan, true);
}

ExperimentResult run_experiment_serial(const ExperimentPlan& plan) {
  return run_plan(plan, false);
}

}  // namespace bell
