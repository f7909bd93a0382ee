#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rbheat/decomposition_builders.hpp"

namespace rbheat {

/// Convergence study over mesh sizes with the switching length tied to the
/// mesh through delta = h^{7/(1-epsilon)}.
struct SweepConfig {
  std::vector<int> n_values;  // interior nodes per edge, one row each
  double epsilon = 1e-4;
  double horizon = 1.0;
  double length = 1.0;
  int realizations = 30;
  std::uint64_t seed = 0;
  DecompositionStyle style = DecompositionStyle::overlapping;
  int zeta_target = 201;  // sets the coarsest admissible time step
  int dof_cap = 500000;
  int jobs = 0;
};

struct SweepRow {
  int n = 0;
  double h = 0.0;
  double delta = 0.0;            // configured h^{7/(1-eps)}
  double delta_effective = 0.0;  // aligned to the time grid
  double dt = 0.0;
  int zeta = 0;
  double err_rbm = 0.0;
  double err_full = 0.0;
  double time_rbm_s = 0.0;
  double time_full_s = 0.0;
  double speedup = 0.0;
  int realizations = 0;
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double fitted_order = 0.0;
  bool excluded_coarsest = false;
  std::vector<std::string> log;

  /// CSV with header
  /// h,delta,err_rbm,err_full,time_rbm_s,time_full_s,speedup,realizations,seed
  std::string csv() const;
  std::string summary() const;
};

SweepResult run_convergence_sweep(const SweepConfig& config);

/// Least-squares slope of log(error) against log(delta).
double fit_observed_order(const std::vector<double>& errors,
                          const std::vector<double>& deltas);

}  // namespace rbheat
