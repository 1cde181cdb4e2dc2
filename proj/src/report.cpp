#include "bell/report.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include <json.hpp>

namespace bell {

namespace {

using ordered_json = nlohmann::ordered_json;

double round_sig(double v, int digits = 12) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  const double scale =
      std::pow(10.0, digits - 1 - std::floor(std::log10(std::fabs(v))));
  return std::round(v * scale) / scale;
}

ordered_json coeff_json(const CoefficientVector& c) {
  return ordered_json::array(
      {round_sig(c.c_pp), round_sig(c.c_pm), round_sig(c.c_mp),
       round_sig(c.c_mm)});
}

ordered_json test_json(const NamedTestResult& t) {
  ordered_json j;
  j["name"] = t.name;
  j["c"] = coeff_json(t.result.c);
  j["observed"] = round_sig(t.result.observed);
  j["predicted"] = round_sig(t.result.predicted);
  j["sigma"] = round_sig(t.result.sigma);
  j["z"] = round_sig(t.result.z);
  j["compensation_ratio"] = round_sig(t.result.compensation_ratio);
  j["degenerate"] = t.result.degenerate;
  j["pass"] = t.pass;
  return j;
}

bool test_passes(const TestResult& r, double z_threshold) {
  if (r.degenerate) {
    // Zero model variance: any real deviation is an automatic violation.
    return std::fabs(r.observed - r.predicted) < 1e-9;
  }
  return std::fabs(r.z) < z_threshold;
}

}  // namespace

std::vector<std::pair<std::string, CoefficientVector>> canonical_tests() {
  return {
      {"correlation", {1.0, -1.0, -1.0, 1.0}},
      {"normalization", {1.0, 1.0, 1.0, 1.0}},
      {"pp_mm_probe", {1.0, 0.0, 0.0, -1.0}},
      {"pm_mp_probe", {0.0, 1.0, -1.0, 0.0}},
      {"marginal_a", {1.0, 1.0, -1.0, -1.0}},
      {"marginal_b", {1.0, -1.0, 1.0, -1.0}},
  };
}

ProbabilityQuad model_quad(const StateModel& model,
                           const AnalyzerSettings& settings) {
  if (model.kind() == StateKind::Lhv) return lhv_probabilities(settings);
  return predict_probabilities(model, settings);
}

bool Report::any_rejection() const {
  for (const PairAnalysis& pair : per_pair) {
    for (const NamedTestResult& t : pair.tests) {
      if (!t.pass) return true;
    }
  }
  for (const NamedTestResult& t : aggregate) {
    if (!t.pass) return true;
  }
  return false;
}

Report analyze_dataset(const Dataset& dataset, const StateModel& model,
                       const AnalysisOptions& options) {
  if (dataset.records.empty()) {
    throw std::invalid_argument("dataset has no records");
  }

  Report report;
  report.z_threshold = options.z_threshold;

  const std::size_t n_pairs = dataset.records.size();
  std::vector<EmpiricalQuad> empirical(n_pairs);
  std::vector<ProbabilityQuad> predicted(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    empirical[i] = empirical_quad(dataset.records[i]);
    const AnalyzerSettings nominal = dataset.records[i].settings.radians();
    predicted[i] = model_quad(model, {nominal.alpha + options.alpha_offset,
                                      nominal.beta + options.beta_offset});
  }

  report.per_pair.resize(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    report.per_pair[i].settings = dataset.records[i].settings;
    for (const auto& [name, c] : options.tests) {
      const TestResult r =
          evaluate_test(c, empirical[i], predicted[i], options.variance);
      report.per_pair[i].tests.push_back(
          {name, r, test_passes(r, options.z_threshold)});
    }
  }

  // Pooled aggregate per test: mean observed/predicted over pairs; the
  // pooled sigma follows from per-pair independence.
  for (const auto& [name, c] : options.tests) {
    TestResult agg;
    agg.c = c;
    double sum_obs = 0.0, sum_pred = 0.0, sum_var = 0.0;
    Vec4 mean_delta{};
    for (std::size_t i = 0; i < n_pairs; ++i) {
      const ProbabilityQuad& at =
          options.variance == VarianceModel::NullHypothesis ? predicted[i]
                                                            : empirical[i].quad();
      sum_obs += linear_combination(c, empirical[i].quad());
      sum_pred += linear_combination(c, predicted[i]);
      sum_var += multinomial_sigma2(c, at, empirical[i].n);
      const Vec4 e = empirical[i].quad().to_array();
      const Vec4 m = predicted[i].to_array();
      for (int d = 0; d < 4; ++d) mean_delta[d] += (e[d] - m[d]) / n_pairs;
    }
    agg.observed = sum_obs / n_pairs;
    agg.predicted = sum_pred / n_pairs;
    agg.sigma = std::sqrt(sum_var) / n_pairs;
    agg.compensation_ratio = compensation_ratio(c, mean_delta);
    if (agg.sigma >= 1e-12) {
      agg.z = (agg.observed - agg.predicted) / agg.sigma;
    } else {
      agg.degenerate = true;
      agg.z = 0.0;
    }
    report.aggregate.push_back(
        {name, agg, test_passes(agg, options.z_threshold)});
  }

  // Empirical CHSH when all four pairs are present.
  report.chsh.angles_deg = options.chsh_angles_deg;
  const auto [a, ap, b, bp] = options.chsh_angles_deg;
  auto find_pair = [&](double alpha_deg, double beta_deg) -> int {
    for (std::size_t i = 0; i < n_pairs; ++i) {
      if (std::fabs(dataset.records[i].settings.alpha_deg - alpha_deg) <= 1e-9 &&
          std::fabs(dataset.records[i].settings.beta_deg - beta_deg) <= 1e-9) {
        return static_cast<int>(i);
      }
    }
    return -1;
  };
  const int i_ab = find_pair(a, b), i_abp = find_pair(a, bp);
  const int i_apb = find_pair(ap, b), i_apbp = find_pair(ap, bp);
  if (i_ab >= 0 && i_abp >= 0 && i_apb >= 0 && i_apbp >= 0) {
    report.chsh.available = true;
    report.chsh.s = correlation(empirical[i_ab].quad()) -
                    correlation(empirical[i_abp].quad()) +
                    correlation(empirical[i_apb].quad()) +
                    correlation(empirical[i_apbp].quad());
  }

  std::vector<std::pair<CountsRecord, ProbabilityQuad>> chi_input;
  chi_input.reserve(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    chi_input.emplace_back(dataset.records[i], predicted[i]);
  }
  try {
    report.chi_square = chi_square_statistic(chi_input, 0);
  } catch (const ImpossibleOutcomeError& e) {
    report.chi_square = {1e30, 3 * static_cast<int>(n_pairs), 0.0};
    report.chi_square_note = e.what();
  }

  return report;
}

std::string report_json(const Report& report) {
  ordered_json j;

  ordered_json meta;
  for (const auto& [key, value] : report.meta) meta[key] = value;
  meta["z_threshold"] = round_sig(report.z_threshold);
  j["meta"] = std::move(meta);

  ordered_json pairs = ordered_json::array();
  for (const PairAnalysis& pair : report.per_pair) {
    ordered_json p;
    p["alpha_deg"] = round_sig(pair.settings.alpha_deg);
    p["beta_deg"] = round_sig(pair.settings.beta_deg);
    ordered_json tests = ordered_json::array();
    for (const NamedTestResult& t : pair.tests) tests.push_back(test_json(t));
    p["tests"] = std::move(tests);
    pairs.push_back(std::move(p));
  }
  j["per_pair"] = std::move(pairs);

  ordered_json aggregate = ordered_json::array();
  for (const NamedTestResult& t : report.aggregate) {
    aggregate.push_back(test_json(t));
  }
  j["aggregate"] = std::move(aggregate);

  ordered_json chsh;
  chsh["available"] = report.chsh.available;
  chsh["angles"] = ordered_json::array(
      {round_sig(report.chsh.angles_deg[0]), round_sig(report.chsh.angles_deg[1]),
       round_sig(report.chsh.angles_deg[2]),
       round_sig(report.chsh.angles_deg[3])});
  if (report.chsh.available) chsh["S"] = round_sig(report.chsh.s);
  chsh["classical_bound"] = 2.0;
  chsh["tsirelson"] = kChshTsirelson;
  j["chsh"] = std::move(chsh);

  ordered_json chi;
  chi["chi2"] = round_sig(report.chi_square.chi2);
  chi["dof"] = report.chi_square.dof;
  chi["p_value"] = round_sig(report.chi_square.p_value);
  if (report.chi_square_note) chi["note"] = *report.chi_square_note;
  j["chi_square"] = std::move(chi);

  if (report.fit) {
    ordered_json fit;
    ordered_json params;
    for (const auto& [name, value] : report.fit->parameters) {
      params[name] = round_sig(value);
    }
    fit["parameters"] = std::move(params);
    fit["chi2"] = round_sig(report.fit->chi2);
    fit["dof"] = report.fit->dof;
    fit["p_value"] = round_sig(report.fit->p_value);
    fit["converged"] = report.fit->converged;
    fit["evaluations"] = report.fit->evaluations;
    fit["uninformative"] = report.fit->uninformative;
    j["fit"] = std::move(fit);
  }

  ordered_json scan;
  scan["n_tested"] = report.scan.n_tested;
  if (report.scan.has_result) {
    scan["max_abs_z"] = round_sig(report.scan.max_abs_z);
    scan["argmax_c"] = coeff_json(report.scan.argmax_c);
  }
  j["scan"] = std::move(scan);

  return j.dump(2) + "\n";
}

void emit_report(const Report& report, const std::string& path) {
  const std::string body = report_json(report);
  if (path == "-") {
    std::cout << body;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << body;
}

std::string curve_csv(const StateModel& model, const CoefficientVector& c,
                      double step_deg) {
  if (!(step_deg > 0.0)) {
    throw std::invalid_argument("curve step must be > 0");
  }
  std::string out = "delta_rad,value\n";
  std::vector<double> degrees;
  for (std::uint64_t k = 0;; ++k) {
    const double d = k * step_deg;
    if (d >= 180.0 - 1e-9) break;
    degrees.push_back(d);
  }
  degrees.push_back(180.0);
  for (double d : degrees) {
    const double delta = deg_to_rad(d);
    const double value = linear_combination(c, model_quad(model, {0.0, delta}));
    out += format_double(delta);
    out += ',';
    out += format_double(value);
    out += '\n';
  }
  return out;
}

void emit_curve(const StateModel& model, const CoefficientVector& c,
                double step_deg, const std::string& path) {
  const std::string body = curve_csv(model, c, step_deg);
  if (path == "-") {
    std::cout << body;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write curve: " + path);
  out << body;
}

}  // namespace bell
