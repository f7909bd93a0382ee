#pragma once

#include "rbheat/decomposition.hpp"
#include "rbheat/time_integration.hpp"

namespace rbheat::reference {

/// Serial dense implicit Euler on the full system; baseline for tests and
/// the benchmark.
Trajectory solve_full_dense(const FemSystem& system, const TimeLoad& load,
                            const Vec& y0, const TimeGrid& grid);

/// Serial dense implicit Euler on the batch system, stepping the full state
/// vector with the materialized batch matrix of each subinterval. No Schur
/// reduction: this is the independent reference the reduced solver is
/// checked against.
Trajectory solve_rbm_dense(const FemSystem& system, const Decomposition& dec,
                           const BatchSchedule& schedule, const TimeLoad& load,
                           const Vec& y0, const TimeGrid& grid);

}  // namespace rbheat::reference
