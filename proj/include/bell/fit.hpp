#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bell/simulate.hpp"
#include "bell/stats.hpp"

namespace bell {

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Downhill simplex with the standard moves (reflect 1, expand 2, contract
// 1/2, shrink 1/2). Trial points are clamped to the bounds; convergence is
// declared when the simplex's function-value spread drops below tol. Runs
// out of budget -> converged = false with the best point found. Objective
// values at or above 1e30 mark infeasible points and never converge.
NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& objective,
    std::span<const double> x0,
    std::span<const std::pair<double, double>> bounds, double tol,
    int max_evals);

// Which state/noise parameters are free in a fit, and the values the fixed
// ones are pinned to. theta in (0, pi/2), visibility in [0, 1], offsets in
// (-pi/4, pi/4).
struct FitFamily {
  bool free_theta = false;
  bool free_visibility = false;
  bool free_alpha_offset = false;
  bool free_beta_offset = false;

  double theta = 0.7853981633974483;  // pi/4
  double visibility = 1.0;
  double alpha_offset = 0.0;  // radians
  double beta_offset = 0.0;   // radians

  int free_count() const {
    return int(free_theta) + int(free_visibility) + int(free_alpha_offset) +
           int(free_beta_offset);
  }
  void validate() const;
};

struct FitResult {
  std::map<std::string, double> parameters;  // all four, fitted or fixed
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 0.0;
  bool converged = false;
  int evaluations = 0;
  bool uninformative = false;  // fitted visibility < 0.05
};

// Minimum-chi-square estimate over the free parameters, run from 5 fixed
// starting points spread over the bounded box (deterministic). A family
// member assigning probability 0 to an observed outcome is penalized with
// 1e30 rather than aborting the fit.
FitResult fit_model(std::span<const CountsRecord> dataset,
                    const FitFamily& family);

}  // namespace bell
