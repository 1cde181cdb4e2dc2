// Timing comparison of the OpenMP sampling kernels against the serial
// reference path, and a cross-check that both produce identical counts.
//
// Usage: bell_bench [pairs] [shots]

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>

#include "bell/parallel.hpp"
#include "bell/simulate.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_run(bell::ExperimentResult (*run)(const bell::ExperimentPlan&),
                const bell::ExperimentPlan& plan,
                bell::ExperimentResult& out) {
  const auto start = Clock::now();
  out = run(plan);
  const std::chrono::duration<double> elapsed = Clock::now() - start;
  return elapsed.count();
}

void bench(const char* label, const bell::ExperimentPlan& plan) {
  bell::ExperimentResult serial, parallel;
  const double t_serial = time_run(bell::run_experiment_serial, plan, serial);
  const double t_parallel = time_run(bell::run_experiment, plan, parallel);
  const bool identical = serial == parallel;
  const double total_shots =
      static_cast<double>(plan.setting_pairs.size()) *
      static_cast<double>(plan.shots_per_pair);
  std::printf("%-12s %8.3fs serial (%6.1f Mshot/s) | %8.3fs omp (%6.1f "
              "Mshot/s) | speedup %.2fx | identical: %s\n",
              label, t_serial, total_shots / t_serial / 1e6, t_parallel,
              total_shots / t_parallel / 1e6, t_serial / t_parallel,
              identical ? "yes" : "NO");
  if (!identical) std::exit(1);
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n_pairs = 32;
  std::uint64_t shots = 500000;
  if (argc > 1) n_pairs = std::strtoull(argv[1], nullptr, 10);
  if (argc > 2) shots = std::strtoull(argv[2], nullptr, 10);

  std::printf("threads: %d, pairs: %zu, shots/pair: %llu\n",
              bell::max_threads(), n_pairs,
              static_cast<unsigned long long>(shots));

  bell::ExperimentPlan plan;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    plan.setting_pairs.push_back(
        {static_cast<double>(i % 8) * 11.25, 22.5 + (i % 4) * 11.25});
  }
  plan.shots_per_pair = shots;
  plan.seed = 7;

  plan.model = bell::StateModel::max_entangled(1.0);
  plan.noise.visibility = 0.95;
  plan.noise.anomaly_eps1 = 0.01;
  bench("quantum", plan);

  plan.model = bell::StateModel::lhv();
  bench("lhv", plan);

  return 0;
}
