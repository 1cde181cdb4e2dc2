// bell_lab — command-line front end: simulate coincidence counts, analyze
// them against quantum or hidden-variable models with the full family of
// linear-combination tests, scan for violating test vectors, fit state
// parameters, and emit correlation curves.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 model rejected
// (with --fail-on-reject).

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bell/dataset.hpp"
#include "bell/fit.hpp"
#include "bell/inequality.hpp"
#include "bell/model.hpp"
#include "bell/report.hpp"
#include "bell/simulate.hpp"
#include "bell/stats.hpp"

namespace {

constexpr const char* kToolName = "bell_lab";
constexpr const char* kToolVersion = "0.1.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelFlags {
  std::string kind = "max";
  double theta = 0.7853981633974483;  // pi/4, radians
  double visibility = 1.0;

  void attach(CLI::App* cmd, bool allow_lhv) {
    cmd->add_option("--model", kind, "State model: max, nonmax, lhv")
        ->check(CLI::IsMember(allow_lhv
                                  ? std::vector<std::string>{"max", "nonmax",
                                                             "lhv"}
                                  : std::vector<std::string>{"max", "nonmax"}))
        ->capture_default_str();
    cmd->add_option("--theta", theta,
                    "Entanglement angle in radians, (0, pi/2); nonmax only")
        ->capture_default_str();
    cmd->add_option("--visibility", visibility, "Visibility in [0, 1]")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  }

  bell::StateModel build() const {
    try {
      if (kind == "lhv") return bell::StateModel::lhv();
      if (kind == "nonmax") {
        return bell::StateModel::nonmax_entangled(theta, visibility);
      }
      return bell::StateModel::max_entangled(visibility);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
};

std::vector<double> parse_number_list(const std::string& text,
                                      std::size_t expected,
                                      const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(what + ": cannot parse '" + item + "'");
    }
  }
  if (values.size() != expected) {
    throw UsageError(what + ": expected " + std::to_string(expected) +
                     " comma-separated values");
  }
  return values;
}

bell::CoefficientVector parse_coefficients(const std::string& text) {
  const std::vector<double> v = parse_number_list(text, 4, "--c");
  bool any_nonzero = false;
  for (double x : v) {
    if (!std::isfinite(x)) throw UsageError("--c: values must be finite");
    if (x != 0.0) any_nonzero = true;
  }
  if (!any_nonzero) throw UsageError("--c: at least one component must be nonzero");
  return {v[0], v[1], v[2], v[3]};
}

std::vector<std::pair<std::string, bell::CoefficientVector>> load_tests(
    const std::string& spec) {
  if (spec == "builtin") return bell::canonical_tests();
  std::ifstream in(spec);
  if (!in) throw std::runtime_error("cannot open tests file: " + spec);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("tests file " + spec + ": " + e.what());
  }
  if (!doc.is_array() || doc.empty()) {
    throw std::runtime_error("tests file " + spec +
                             ": expected a non-empty JSON array");
  }
  std::vector<std::pair<std::string, bell::CoefficientVector>> tests;
  int index = 0;
  for (const auto& entry : doc) {
    ++index;
    std::string name = "custom_" + std::to_string(index);
    const nlohmann::json* coeffs = &entry;
    if (entry.is_object()) {
      if (entry.contains("name")) name = entry["name"].get<std::string>();
      if (!entry.contains("c")) {
        throw std::runtime_error("tests file: entry " + std::to_string(index) +
                                 " lacks a \"c\" array");
      }
      coeffs = &entry["c"];
    }
    if (!coeffs->is_array() || coeffs->size() != 4) {
      throw std::runtime_error("tests file: entry " + std::to_string(index) +
                               " must be a 4-element array");
    }
    bell::Vec4 c{};
    bool any_nonzero = false;
    for (int i = 0; i < 4; ++i) {
      c[i] = (*coeffs)[i].get<double>();
      if (!std::isfinite(c[i])) {
        throw std::runtime_error("tests file: entry " + std::to_string(index) +
                                 " has a non-finite coefficient");
      }
      if (c[i] != 0.0) any_nonzero = true;
    }
    if (!any_nonzero) {
      throw std::runtime_error("tests file: entry " + std::to_string(index) +
                               " is all zero");
    }
    tests.emplace_back(name, bell::CoefficientVector::from_array(c));
  }
  return tests;
}

void add_meta(bell::Report& report, const std::string& command,
              const std::string& input, const ModelFlags& model) {
  report.meta.emplace_back("tool", kToolName);
  report.meta.emplace_back("version", kToolVersion);
  report.meta.emplace_back("command", command);
  report.meta.emplace_back("input", input);
  report.meta.emplace_back("model", model.kind);
  report.meta.emplace_back("theta", bell::format_double(model.theta));
  report.meta.emplace_back("visibility", bell::format_double(model.visibility));
}

// ---------------------------------------------------------------------------
// simulate

int run_simulate(const std::string& settings_spec, const ModelFlags& model,
                 double anomaly_eps1, double anomaly_eps2,
                 double alpha_offset_deg, double beta_offset_deg,
                 std::uint64_t shots, std::uint64_t seed,
                 const std::string& output, const std::string& meta_out) {
  bell::ExperimentPlan plan;
  plan.setting_pairs = bell::load_settings(settings_spec);
  plan.shots_per_pair = shots;
  plan.seed = seed;
  plan.noise.visibility = model.visibility;
  plan.noise.alpha_offset = bell::deg_to_rad(alpha_offset_deg);
  plan.noise.beta_offset = bell::deg_to_rad(beta_offset_deg);
  plan.noise.anomaly_eps1 = anomaly_eps1;
  plan.noise.anomaly_eps2 = anomaly_eps2;
  // The model carries no visibility of its own here; the noise config owns it
  // so the quad is mixed exactly once.
  if (model.kind == "lhv") {
    plan.model = bell::StateModel::lhv();
  } else if (model.kind == "nonmax") {
    plan.model = bell::StateModel::nonmax_entangled(model.theta, 1.0);
  } else {
    plan.model = bell::StateModel::max_entangled(1.0);
  }

  const bell::ExperimentResult result = bell::run_experiment(plan);

  bell::Dataset dataset;
  dataset.records = result.records;
  dataset.metadata["tool"] = kToolName;
  dataset.metadata["version"] = kToolVersion;
  dataset.metadata["model"] = model.kind;
  dataset.metadata["theta"] = bell::format_double(model.theta);
  dataset.metadata["visibility"] = bell::format_double(model.visibility);
  dataset.metadata["alpha_offset_deg"] = bell::format_double(alpha_offset_deg);
  dataset.metadata["beta_offset_deg"] = bell::format_double(beta_offset_deg);
  dataset.metadata["anomaly_eps1"] = bell::format_double(anomaly_eps1);
  dataset.metadata["anomaly_eps2"] = bell::format_double(anomaly_eps2);
  dataset.metadata["seed"] = std::to_string(seed);
  dataset.metadata["shots_per_pair"] = std::to_string(shots);
  dataset.metadata["settings"] = settings_spec;
  std::string applied1, applied2;
  for (std::size_t i = 0; i < result.applied_eps1.size(); ++i) {
    if (i) {
      applied1 += ',';
      applied2 += ',';
    }
    applied1 += bell::format_double(result.applied_eps1[i]);
    applied2 += bell::format_double(result.applied_eps2[i]);
  }
  dataset.metadata["applied_eps1"] = applied1;
  dataset.metadata["applied_eps2"] = applied2;

  bell::save_dataset(dataset, output);

  if (!meta_out.empty()) {
    nlohmann::ordered_json meta;
    for (const auto& [key, value] : dataset.metadata) meta[key] = value;
    std::ofstream out(meta_out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write metadata: " + meta_out);
    out << meta.dump(2) << "\n";
  }

  bool clamped = false;
  for (std::size_t i = 0; i < result.applied_eps1.size(); ++i) {
    if (result.applied_eps1[i] != anomaly_eps1 ||
        result.applied_eps2[i] != anomaly_eps2) {
      clamped = true;
    }
  }
  std::cerr << kToolName << ": simulated " << plan.setting_pairs.size()
            << " pairs x " << shots << " shots (model=" << model.kind
            << ", seed=" << seed << ")"
            << (clamped ? "; anomaly transfers clamped at some pairs" : "")
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// analyze / scan / fit share the loaded dataset + report skeleton

bell::Report analyze_with_options(const bell::Dataset& dataset,
                                  const ModelFlags& model,
                                  bell::AnalysisOptions& options) {
  return bell::analyze_dataset(dataset, model.build(), options);
}

int run_analyze(const std::string& input, const ModelFlags& model,
                const std::string& tests_spec, double z_threshold,
                bool fail_on_reject, bool strict, bool empirical_sigma,
                double alpha_offset_deg, double beta_offset_deg,
                const std::string& angles_text, const std::string& output) {
  const bell::Dataset dataset = bell::load_dataset(
      input, strict ? bell::DuplicatePolicy::Strict : bell::DuplicatePolicy::Merge);

  bell::AnalysisOptions options;
  options.tests = load_tests(tests_spec);
  options.z_threshold = z_threshold;
  options.variance = empirical_sigma ? bell::VarianceModel::Empirical
                                     : bell::VarianceModel::NullHypothesis;
  options.alpha_offset = bell::deg_to_rad(alpha_offset_deg);
  options.beta_offset = bell::deg_to_rad(beta_offset_deg);
  const std::vector<double> angles =
      parse_number_list(angles_text, 4, "--angles");
  options.chsh_angles_deg = {angles[0], angles[1], angles[2], angles[3]};

  bell::Report report = analyze_with_options(dataset, model, options);
  add_meta(report, "analyze", input, model);
  report.meta.emplace_back("tests", tests_spec);
  report.meta.emplace_back(
      "variance", empirical_sigma ? "empirical" : "null_hypothesis");
  bell::emit_report(report, output);

  if (fail_on_reject && report.any_rejection()) return 3;
  return 0;
}

int run_scan(const std::string& input, const ModelFlags& model,
             std::uint64_t random_c, std::uint64_t seed, bool include_optimal,
             double z_threshold, double alpha_offset_deg, double beta_offset_deg,
             bool strict, const std::string& output) {
  const bell::Dataset dataset = bell::load_dataset(
      input, strict ? bell::DuplicatePolicy::Strict : bell::DuplicatePolicy::Merge);

  bell::AnalysisOptions options;
  options.z_threshold = z_threshold;
  options.alpha_offset = bell::deg_to_rad(alpha_offset_deg);
  options.beta_offset = bell::deg_to_rad(beta_offset_deg);
  bell::Report report = analyze_with_options(dataset, model, options);
  add_meta(report, "scan", input, model);
  report.meta.emplace_back("random_c", std::to_string(random_c));
  report.meta.emplace_back("scan_seed", std::to_string(seed));
  report.meta.emplace_back("include_optimal",
                           include_optimal ? "true" : "false");

  const bell::StateModel state = model.build();
  std::vector<bell::EmpiricalQuad> empirical;
  std::vector<bell::ProbabilityQuad> predicted;
  for (const bell::CountsRecord& rec : dataset.records) {
    empirical.push_back(bell::empirical_quad(rec));
    const bell::AnalyzerSettings nominal = rec.settings.radians();
    predicted.push_back(
        bell::model_quad(state, {nominal.alpha + options.alpha_offset,
                                 nominal.beta + options.beta_offset}));
  }

  bell::ScanSection scan;
  auto consider = [&](const bell::CoefficientVector& c, std::size_t pair) {
    const bell::TestResult r =
        bell::evaluate_test(c, empirical[pair], predicted[pair]);
    if (r.degenerate) return;
    if (!scan.has_result || std::fabs(r.z) > scan.max_abs_z) {
      scan.has_result = true;
      scan.max_abs_z = std::fabs(r.z);
      scan.argmax_c = c;
    }
  };

  const bell::rng::Stream stream = bell::rng::master(seed).substream(0xC0);
  for (std::uint64_t k = 0; k < random_c; ++k) {
    const bell::rng::Stream draw = stream.substream(k);
    bell::Vec4 c{};
    double len2 = 0.0;
    for (int i = 0; i < 4; ++i) {
      c[i] = bell::rng::normal(draw, i);
      len2 += c[i] * c[i];
    }
    if (len2 < 1e-12) continue;  // vanishing draw, astronomically unlikely
    const double inv = 1.0 / std::sqrt(len2);
    for (double& x : c) x *= inv;
    ++scan.n_tested;
    for (std::size_t pair = 0; pair < empirical.size(); ++pair) {
      consider(bell::CoefficientVector::from_array(c), pair);
    }
  }

  if (include_optimal) {
    for (std::size_t pair = 0; pair < empirical.size(); ++pair) {
      const bell::Vec4 e = empirical[pair].quad().to_array();
      const bell::Vec4 m = predicted[pair].to_array();
      bell::Vec4 delta{};
      for (int i = 0; i < 4; ++i) delta[i] = e[i] - m[i];
      const bell::Mat4 cov =
          bell::multinomial_covariance(predicted[pair], empirical[pair].n);
      const bell::OptimalCoefficients best =
          bell::optimal_coefficients(delta, cov);
      ++scan.n_tested;
      if (!best.degenerate) consider(best.c, pair);
    }
  }

  report.scan = scan;
  bell::emit_report(report, output);
  return 0;
}

int run_fit(const std::string& input, const ModelFlags& model,
            const std::string& free_list, double alpha_offset_deg,
            double beta_offset_deg, bool strict, const std::string& output) {
  if (model.kind == "lhv") {
    throw UsageError("fit applies to the quantum state family, not lhv");
  }
  const bell::Dataset dataset = bell::load_dataset(
      input, strict ? bell::DuplicatePolicy::Strict : bell::DuplicatePolicy::Merge);

  bell::FitFamily family;
  family.theta = model.theta;
  family.visibility = model.visibility;
  family.alpha_offset = bell::deg_to_rad(alpha_offset_deg);
  family.beta_offset = bell::deg_to_rad(beta_offset_deg);
  std::stringstream ss(free_list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "theta") {
      family.free_theta = true;
    } else if (item == "visibility") {
      family.free_visibility = true;
    } else if (item == "offsets") {
      family.free_alpha_offset = true;
      family.free_beta_offset = true;
    } else if (item == "alpha_offset") {
      family.free_alpha_offset = true;
    } else if (item == "beta_offset") {
      family.free_beta_offset = true;
    } else {
      throw UsageError("--free: unknown parameter '" + item +
                       "' (theta, visibility, offsets, alpha_offset, "
                       "beta_offset)");
    }
  }
  if (family.free_count() == 0) {
    throw UsageError("--free: name at least one parameter");
  }

  const bell::FitResult fit = bell::fit_model(dataset.records, family);

  // Report the tests at the fitted parameters.
  ModelFlags fitted = model;
  fitted.kind = "nonmax";
  fitted.theta = fit.parameters.at("theta");
  fitted.visibility = fit.parameters.at("visibility");
  bell::AnalysisOptions options;
  options.alpha_offset = fit.parameters.at("alpha_offset");
  options.beta_offset = fit.parameters.at("beta_offset");
  bell::Report report = analyze_with_options(dataset, fitted, options);
  add_meta(report, "fit", input, fitted);
  report.meta.emplace_back("free", free_list);
  report.fit = fit;
  report.chi_square = {fit.chi2, fit.dof, fit.p_value};
  bell::emit_report(report, output);
  return 0;
}

// ---------------------------------------------------------------------------
// chsh / curve

int run_chsh(const std::string& input, const ModelFlags& model,
             const std::string& angles_text, bool strict,
             const std::string& output) {
  const std::vector<double> a = parse_number_list(angles_text, 4, "--angles");
  double s = 0.0;
  std::string source;
  if (!input.empty()) {
    const bell::Dataset dataset = bell::load_dataset(
        input,
        strict ? bell::DuplicatePolicy::Strict : bell::DuplicatePolicy::Merge);
    auto find = [&](double alpha_deg, double beta_deg) -> const bell::CountsRecord& {
      for (const bell::CountsRecord& rec : dataset.records) {
        if (std::fabs(rec.settings.alpha_deg - alpha_deg) <= 1e-9 &&
            std::fabs(rec.settings.beta_deg - beta_deg) <= 1e-9) {
          return rec;
        }
      }
      throw std::runtime_error(
          "counts file lacks setting pair (" + bell::format_double(alpha_deg) +
          ", " + bell::format_double(beta_deg) + ") deg needed for CHSH");
    };
    auto e_hat = [&](double alpha_deg, double beta_deg) {
      return bell::correlation(
          bell::empirical_quad(find(alpha_deg, beta_deg)).quad());
    };
    s = e_hat(a[0], a[2]) - e_hat(a[0], a[3]) + e_hat(a[1], a[2]) +
        e_hat(a[1], a[3]);
    source = "data";
  } else {
    const bell::StateModel state = model.build();
    const auto e_model = [&state](double alpha, double beta) {
      return bell::correlation(bell::model_quad(state, {alpha, beta}));
    };
    const bell::ChshAngles angles{bell::deg_to_rad(a[0]), bell::deg_to_rad(a[1]),
                                  bell::deg_to_rad(a[2]),
                                  bell::deg_to_rad(a[3])};
    s = bell::chsh_statistic(e_model, angles);
    source = "model";
  }

  nlohmann::ordered_json j;
  j["source"] = source;
  j["angles"] = nlohmann::ordered_json::array({a[0], a[1], a[2], a[3]});
  j["S"] = s;
  j["classical_bound"] = bell::kChshClassicalBound;
  j["tsirelson"] = bell::kChshTsirelson;
  const std::string body = j.dump(2) + "\n";
  if (output == "-") {
    std::cout << body;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output: " + output);
    out << body;
  }
  return 0;
}

int run_curve(const ModelFlags& model, const std::string& c_text,
              double step_deg, const std::string& output) {
  bell::emit_curve(model.build(), parse_coefficients(c_text), step_deg, output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EPR-Bohm coincidence statistics laboratory"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand(
      "simulate", "Generate synthetic coincidence counts from a model");
  ModelFlags sim_model;
  sim_model.attach(sim, /*allow_lhv=*/true);
  std::string sim_settings = "builtin:grid16";
  double sim_eps1 = 0.0, sim_eps2 = 0.0;
  double sim_aoff = 0.0, sim_boff = 0.0;
  std::uint64_t sim_shots = 10000, sim_seed = 0;
  std::string sim_output = "-";
  std::string sim_meta_out;
  sim->add_option("--settings", sim_settings,
                  "builtin:chsh, builtin:grid16, or a CSV with header "
                  "alpha_deg,beta_deg")
      ->capture_default_str();
  sim->add_option("--anomaly-eps1", sim_eps1,
                  "Probability transfer within the ++/-- pair");
  sim->add_option("--anomaly-eps2", sim_eps2,
                  "Probability transfer within the +-/-+ pair");
  sim->add_option("--alpha-offset-deg", sim_aoff,
                  "Analyzer A miscalibration, degrees");
  sim->add_option("--beta-offset-deg", sim_boff,
                  "Analyzer B miscalibration, degrees");
  sim->add_option("--shots", sim_shots, "Shots per setting pair")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  sim->add_option("-o,--output", sim_output, "Counts CSV path, - for stdout")
      ->capture_default_str();
  sim->add_option("--meta-out", sim_meta_out,
                  "Write run metadata (incl. applied anomaly transfers) as "
                  "JSON");

  // analyze
  auto* ana = app.add_subcommand(
      "analyze", "Evaluate the linear-combination tests against a model");
  ModelFlags ana_model;
  ana_model.attach(ana, /*allow_lhv=*/true);
  std::string ana_input;
  std::string ana_tests = "builtin";
  double ana_threshold = 5.0;
  bool ana_fail_on_reject = false, ana_strict = false, ana_empirical = false;
  double ana_aoff = 0.0, ana_boff = 0.0;
  std::string ana_angles = "0,45,22.5,67.5";
  std::string ana_output = "-";
  ana->add_option("counts", ana_input, "Counts CSV, - for stdin")->required();
  ana->add_option("--tests", ana_tests,
                  "builtin or a JSON file with an array of coefficient "
                  "vectors")
      ->capture_default_str();
  ana->add_option("--z-threshold", ana_threshold,
                  "Reject a test when |z| reaches this value")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ana->add_flag("--fail-on-reject", ana_fail_on_reject,
                "Exit with code 3 when any test is rejected");
  ana->add_flag("--strict", ana_strict,
                "Reject duplicate setting pairs instead of merging");
  ana->add_flag("--empirical-sigma", ana_empirical,
                "Use the empirical quad for the test variance instead of the "
                "model prediction");
  ana->add_option("--alpha-offset-deg", ana_aoff,
                  "Known analyzer A miscalibration in the null hypothesis, "
                  "degrees");
  ana->add_option("--beta-offset-deg", ana_boff,
                  "Known analyzer B miscalibration in the null hypothesis, "
                  "degrees");
  ana->add_option("--angles", ana_angles, "CHSH angles a,a',b,b' in degrees")
      ->capture_default_str();
  ana->add_option("-o,--output", ana_output, "Report JSON path, - for stdout")
      ->capture_default_str();

  // scan
  auto* scan = app.add_subcommand(
      "scan", "Search coefficient vectors for the largest |z|");
  ModelFlags scan_model;
  scan_model.attach(scan, /*allow_lhv=*/true);
  std::string scan_input;
  std::uint64_t scan_n = 1000, scan_seed = 0;
  bool scan_optimal = false, scan_strict = false;
  double scan_threshold = 5.0;
  double scan_aoff = 0.0, scan_boff = 0.0;
  std::string scan_output = "-";
  scan->add_option("counts", scan_input, "Counts CSV, - for stdin")->required();
  scan->add_option("--random-c", scan_n, "Number of random unit vectors")
      ->capture_default_str();
  scan->add_option("--seed", scan_seed, "Seed for the random vectors")
      ->capture_default_str();
  scan->add_flag("--include-optimal", scan_optimal,
                 "Also evaluate the per-pair optimal coefficients");
  scan->add_option("--z-threshold", scan_threshold,
                   "Threshold recorded with the canonical tests")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  scan->add_option("--alpha-offset-deg", scan_aoff,
                   "Known analyzer A miscalibration, degrees");
  scan->add_option("--beta-offset-deg", scan_boff,
                   "Known analyzer B miscalibration, degrees");
  scan->add_flag("--strict", scan_strict,
                 "Reject duplicate setting pairs instead of merging");
  scan->add_option("-o,--output", scan_output, "Report JSON path, - for stdout")
      ->capture_default_str();

  // chsh
  auto* chsh = app.add_subcommand(
      "chsh", "CHSH statistic from counts or from a model curve");
  ModelFlags chsh_model;
  chsh_model.attach(chsh, /*allow_lhv=*/true);
  std::string chsh_input;
  std::string chsh_angles = "0,45,22.5,67.5";
  bool chsh_strict = false;
  std::string chsh_output = "-";
  chsh->add_option("counts", chsh_input, "Counts CSV, - for stdin");
  chsh->add_option("--angles", chsh_angles, "Angles a,a',b,b' in degrees")
      ->capture_default_str();
  chsh->add_flag("--strict", chsh_strict,
                 "Reject duplicate setting pairs instead of merging");
  chsh->add_option("-o,--output", chsh_output, "Output JSON path, - for stdout")
      ->capture_default_str();

  // fit
  auto* fit = app.add_subcommand(
      "fit", "Minimum-chi-square fit of the state/noise parameters");
  ModelFlags fit_model_flags;
  fit_model_flags.attach(fit, /*allow_lhv=*/false);
  std::string fit_input;
  std::string fit_free = "theta,visibility";
  double fit_aoff = 0.0, fit_boff = 0.0;
  bool fit_strict = false;
  std::string fit_output = "-";
  fit->add_option("counts", fit_input, "Counts CSV, - for stdin")->required();
  fit->add_option("--free", fit_free,
                  "Free parameters: theta, visibility, offsets, alpha_offset, "
                  "beta_offset")
      ->capture_default_str();
  fit->add_option("--alpha-offset-deg", fit_aoff,
                  "Fixed analyzer A offset, degrees");
  fit->add_option("--beta-offset-deg", fit_boff,
                  "Fixed analyzer B offset, degrees");
  fit->add_flag("--strict", fit_strict,
                "Reject duplicate setting pairs instead of merging");
  fit->add_option("-o,--output", fit_output, "Report JSON path, - for stdout")
      ->capture_default_str();

  // curve
  auto* curve = app.add_subcommand(
      "curve", "Emit E_c(delta) over delta in [0, pi] as CSV");
  ModelFlags curve_model;
  curve_model.attach(curve, /*allow_lhv=*/true);
  std::string curve_c = "1,-1,-1,1";
  double curve_step = 1.0;
  std::string curve_output = "-";
  curve->add_option("--c", curve_c, "Coefficient vector c_pp,c_pm,c_mp,c_mm")
      ->capture_default_str();
  curve->add_option("--step-deg", curve_step, "Step in degrees")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  curve->add_option("-o,--output", curve_output, "Curve CSV path, - for stdout")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sim->parsed()) {
      return run_simulate(sim_settings, sim_model, sim_eps1, sim_eps2, sim_aoff,
                          sim_boff, sim_shots, sim_seed, sim_output,
                          sim_meta_out);
    }
    if (ana->parsed()) {
      return run_analyze(ana_input, ana_model, ana_tests, ana_threshold,
                         ana_fail_on_reject, ana_strict, ana_empirical,
                         ana_aoff, ana_boff, ana_angles, ana_output);
    }
    if (scan->parsed()) {
      return run_scan(scan_input, scan_model, scan_n, scan_seed, scan_optimal,
                      scan_threshold, scan_aoff, scan_boff, scan_strict,
                      scan_output);
    }
    if (chsh->parsed()) {
      return run_chsh(chsh_input, chsh_model, chsh_angles, chsh_strict,
                      chsh_output);
    }
    if (fit->parsed()) {
      return run_fit(fit_input, fit_model_flags, fit_free, fit_aoff, fit_boff,
                     fit_strict, fit_output);
    }
    if (curve->parsed()) {
      return run_curve(curve_model, curve_c, curve_step, curve_output);
    }
  } catch (const UsageError& e) {
    std::cerr << kToolName << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << kToolName << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}
