#pragma once

#include <cstdint>
#include <vector>

#include "bell/model.hpp"
#include "bell/rng.hpp"

namespace bell {

// A nominal setting pair. Angles are kept in degrees — the unit of every
// external interface — and converted on demand, so values written to count
// files survive round trips byte for byte.
struct SettingPair {
  double alpha_deg = 0.0;
  double beta_deg = 0.0;

  AnalyzerSettings radians() const {
    return {deg_to_rad(alpha_deg), deg_to_rad(beta_deg)};
  }
  static SettingPair from_radians(const AnalyzerSettings& s) {
    return {rad_to_deg(s.alpha), rad_to_deg(s.beta)};
  }

  bool operator==(const SettingPair&) const = default;
};

// Imperfections applied on top of the source model: white-noise visibility,
// systematic analyzer offsets, and the two compensating anomaly transfers
// (eps1 within the ++/-- pair, eps2 within the +-/-+ pair) that move
// probabilities without moving the correlation.
struct NoiseConfig {
  double visibility = 1.0;
  double alpha_offset = 0.0;  // radians
  double beta_offset = 0.0;   // radians
  double anomaly_eps1 = 0.0;
  double anomaly_eps2 = 0.0;
};

// Raw coincidence counts at one setting pair.
struct CountsRecord {
  SettingPair settings;
  std::uint64_t n_pp = 0;
  std::uint64_t n_pm = 0;
  std::uint64_t n_mp = 0;
  std::uint64_t n_mm = 0;

  std::uint64_t total() const { return n_pp + n_pm + n_mp + n_mm; }

  bool operator==(const CountsRecord&) const = default;
};

struct ExperimentPlan {
  std::vector<SettingPair> setting_pairs;
  std::uint64_t shots_per_pair = 0;
  StateModel model = StateModel::max_entangled();
  NoiseConfig noise;
  std::uint64_t seed = 0;

  void validate() const;  // at least one pair, shots >= 1, finite noise
};

struct AnomalyApplication {
  ProbabilityQuad quad;
  double applied_eps1 = 0.0;
  double applied_eps2 = 0.0;
};

// (p_pp + e1, p_pm + e2, p_mp - e2, p_mm - e1) with e1, e2 the requested
// transfers clamped so every component stays in [0, 1]. The output sums to 1
// and has the same correlation as the input; the applied values are reported
// back.
AnomalyApplication apply_anomaly(const ProbabilityQuad& quad, double eps1,
                                 double eps2);

// Multinomial draw of `shots` trials over the four outcomes; shot k consumes
// counter k of the stream, so the result is independent of scheduling.
CountsRecord sample_counts(const ProbabilityQuad& quad, std::uint64_t shots,
                           const rng::Stream& stream,
                           const SettingPair& settings = {});

struct ExperimentResult {
  std::vector<CountsRecord> records;
  // Per-pair anomaly transfers actually applied after clamping (quantum
  // path; zero for LHV runs).
  std::vector<double> applied_eps1;
  std::vector<double> applied_eps2;

  bool operator==(const ExperimentResult&) const = default;
};

// Generates one CountsRecord per setting pair. Quantum models go through
// predict -> visibility -> anomaly -> multinomial sampling; the LHV model
// draws lambda uniformly on [0, pi) per shot, shared by both sides. Substream
// keys are (seed, pair index) and shot draws are counter-indexed, so results
// are bit-identical for any thread count or schedule.
ExperimentResult run_experiment(const ExperimentPlan& plan);

// Plain-loop reference implementation; must match run_experiment exactly.
ExperimentResult run_experiment_serial(const ExperimentPlan& plan);

}  // namespace bell
