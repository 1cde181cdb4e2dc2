#include "bell/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bell/special.hpp"

namespace bell {

namespace {

constexpr double kPenalty = 1e30;

std::vector<double> clamp_to_bounds(
    std::vector<double> x, std::span<const std::pair<double, double>> bounds) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::clamp(x[i], bounds[i].first, bounds[i].second);
  }
  return x;
}

}  // namespace

NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& objective,
    std::span<const double> x0,
    std::span<const std::pair<double, double>> bounds, double tol,
    int max_evals) {
  const std::size_t k = x0.size();
  if (k < 1) throw std::invalid_argument("nelder_mead needs k >= 1");
  if (bounds.size() != k) throw std::invalid_argument("bounds size mismatch");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  for (std::size_t i = 0; i < k; ++i) {
    if (!(bounds[i].first <= x0[i] && x0[i] <= bounds[i].second)) {
      throw std::invalid_argument("x0 must lie within bounds");
    }
  }

  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double value = objective(x);
    return std::isnan(value) ? kPenalty : value;  // keep the sort well ordered
  };

  // Initial simplex: x0 plus a 5%-of-range step along each coordinate,
  // flipped when the step would leave the box.
  std::vector<std::vector<double>> simplex;
  simplex.push_back(std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> v(x0.begin(), x0.end());
    double h = 0.05 * (bounds[i].second - bounds[i].first);
    if (h == 0.0) h = 0.05;
    if (v[i] + h > bounds[i].second) h = -h;
    v[i] = std::clamp(v[i] + h, bounds[i].first, bounds[i].second);
    simplex.push_back(std::move(v));
  }

  std::vector<double> f(simplex.size());
  for (std::size_t i = 0; i < simplex.size(); ++i) f[i] = eval(simplex[i]);

  std::vector<std::size_t> order(simplex.size());
  auto sort_simplex = [&] {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&f](std::size_t a, std::size_t b) { return f[a] < f[b]; });
  };

  bool converged = false;
  while (true) {
    sort_simplex();
    const bool feasible = f[order.front()] < kPenalty;
    if (feasible && f[order.back()] - f[order.front()] < tol) {
      converged = true;
      break;
    }
    if (evals >= max_evals) break;

    const std::size_t worst = order.back();
    const std::size_t second_worst = order[order.size() - 2];
    const std::size_t best = order.front();

    std::vector<double> centroid(k, 0.0);
    for (std::size_t i : order) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < k; ++d) centroid[d] += simplex[i][d];
    }
    for (double& c : centroid) c /= static_cast<double>(k);

    auto point_along = [&](double scale) {
      std::vector<double> p(k);
      for (std::size_t d = 0; d < k; ++d) {
        p[d] = centroid[d] + scale * (centroid[d] - simplex[worst][d]);
      }
      return clamp_to_bounds(std::move(p), bounds);
    };

    const std::vector<double> reflected = point_along(1.0);
    const double f_reflected = eval(reflected);

    if (f_reflected < f[best]) {
      const std::vector<double> expanded = point_along(2.0);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        f[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        f[worst] = f_reflected;
      }
    } else if (f_reflected < f[second_worst]) {
      simplex[worst] = reflected;
      f[worst] = f_reflected;
    } else {
      const bool outside = f_reflected < f[worst];
      const std::vector<double> contracted = point_along(outside ? 0.5 : -0.5);
      const double f_contracted = eval(contracted);
      if (f_contracted < (outside ? f_reflected : f[worst])) {
        simplex[worst] = contracted;
        f[worst] = f_contracted;
      } else {
        for (std::size_t i : order) {
          if (i == best) continue;
          for (std::size_t d = 0; d < k; ++d) {
            simplex[i][d] =
                simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
          }
          f[i] = eval(simplex[i]);
          if (evals >= max_evals) break;
        }
      }
    }
    if (evals >= max_evals) {
      sort_simplex();
      break;
    }
  }

  sort_simplex();
  return {simplex[order.front()], f[order.front()], evals, converged};
}

void FitFamily::validate() const {
  const double half_pi = std::numbers::pi / 2;
  const double quarter_pi = std::numbers::pi / 4;
  if (free_count() < 1) {
    throw std::invalid_argument("fit family needs at least one free parameter");
  }
  if (!(theta > 0.0 && theta < half_pi)) {
    throw std::invalid_argument("theta must lie in (0, pi/2)");
  }
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw std::invalid_argument("visibility must lie in [0, 1]");
  }
  if (!(alpha_offset > -quarter_pi && alpha_offset < quarter_pi) ||
      !(beta_offset > -quarter_pi && beta_offset < quarter_pi)) {
    throw std::invalid_argument("offsets must lie in (-pi/4, pi/4)");
  }
}

namespace {

struct FreeLayout {
  // Index into the packed parameter vector, -1 when fixed.
  int theta = -1;
  int visibility = -1;
  int alpha_offset = -1;
  int beta_offset = -1;
  std::vector<std::pair<double, double>> bounds;
};

FreeLayout make_layout(const FitFamily& family) {
  constexpr double kMargin = 1e-6;
  const double half_pi = std::numbers::pi / 2;
  const double quarter_pi = std::numbers::pi / 4;
  FreeLayout layout;
  int next = 0;
  if (family.free_theta) {
    layout.theta = next++;
    layout.bounds.emplace_back(kMargin, half_pi - kMargin);
  }
  if (family.free_visibility) {
    layout.visibility = next++;
    layout.bounds.emplace_back(0.0, 1.0);
  }
  if (family.free_alpha_offset) {
    layout.alpha_offset = next++;
    layout.bounds.emplace_back(-quarter_pi + kMargin, quarter_pi - kMargin);
  }
  if (family.free_beta_offset) {
    layout.beta_offset = next++;
    layout.bounds.emplace_back(-quarter_pi + kMargin, quarter_pi - kMargin);
  }
  return layout;
}

}  // namespace

FitResult fit_model(std::span<const CountsRecord> dataset,
                    const FitFamily& family) {
  family.validate();
  if (dataset.empty()) throw std::invalid_argument("fit needs data");
  const int k = family.free_count();
  const int dof = 3 * static_cast<int>(dataset.size()) - k;
  if (dof < 1) throw std::invalid_argument("fit needs dof >= 1");

  const FreeLayout layout = make_layout(family);

  auto objective = [&](std::span<const double> x) -> double {
    const double theta = layout.theta >= 0 ? x[layout.theta] : family.theta;
    const double vis =
        layout.visibility >= 0 ? x[layout.visibility] : family.visibility;
    const double a_off = layout.alpha_offset >= 0 ? x[layout.alpha_offset]
                                                  : family.alpha_offset;
    const double b_off = layout.beta_offset >= 0 ? x[layout.beta_offset]
                                                 : family.beta_offset;
    const StateModel model = StateModel::nonmax_entangled(theta, vis);

    std::vector<std::pair<CountsRecord, ProbabilityQuad>> pairs;
    pairs.reserve(dataset.size());
    for (const CountsRecord& rec : dataset) {
      const AnalyzerSettings nominal = rec.settings.radians();
      pairs.emplace_back(rec, predict_probabilities(
                                  model, {nominal.alpha + a_off,
                                          nominal.beta + b_off}));
    }
    try {
      return chi_square_statistic(pairs, k).chi2;
    } catch (const ImpossibleOutcomeError&) {
      return kPenalty;
    }
  };

  // Five fixed starts: box center plus four pulled-in corner patterns.
  constexpr double kStartFractions[5][2] = {
      {0.50, 0.50}, {0.15, 0.15}, {0.85, 0.85}, {0.15, 0.85}, {0.85, 0.15}};
  NelderMeadResult best;
  best.f = std::numeric_limits<double>::infinity();
  int total_evals = 0;
  for (const auto& fractions : kStartFractions) {
    std::vector<double> x0(k);
    for (int j = 0; j < k; ++j) {
      const auto [lo, hi] = layout.bounds[j];
      x0[j] = lo + fractions[j % 2] * (hi - lo);
    }
    NelderMeadResult run =
        nelder_mead(objective, x0, layout.bounds, 1e-9, 4000);
    total_evals += run.evaluations;
    if (run.f < best.f) best = std::move(run);
  }

  FitResult result;
  result.parameters["theta"] =
      layout.theta >= 0 ? best.x[layout.theta] : family.theta;
  result.parameters["visibility"] =
      layout.visibility >= 0 ? best.x[layout.visibility] : family.visibility;
  result.parameters["alpha_offset"] = layout.alpha_offset >= 0
                                          ? best.x[layout.alpha_offset]
                                          : family.alpha_offset;
  result.parameters["beta_offset"] = layout.beta_offset >= 0
                                         ? best.x[layout.beta_offset]
                                         : family.beta_offset;
  result.chi2 = best.f;
  result.dof = dof;
  result.p_value = result.chi2 >= kPenalty
                       ? 0.0
                       : chi_square_p_value(result.chi2, dof);
  result.converged = best.converged;
  result.evaluations = total_evals;
  result.uninformative = result.parameters["visibility"] < 0.05;
  return result;
}

}  // namespace bell
