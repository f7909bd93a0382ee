#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "rbheat/decomposition.hpp"
#include "rbheat/error_metrics.hpp"
#include "rbheat/fem_system.hpp"
#include "rbheat/mesh.hpp"

namespace rbheat {

/// States at the collocation points, one column per t_n.
struct Trajectory {
  TimeGrid grid;
  Mat states;  // dimension x points

  Vec at(int n) const { return states.col(n); }
};

/// Called once with the initial state and once after every implicit-Euler
/// step: (step index, t_n, state).
using StateObserver = std::function<void(int, double, const Vec&)>;

/// Implicit Euler on E dY/dt + R Y = F: one factorization of (E + dt R),
/// source evaluated at the end of each step.
Trajectory solve_full(const FemSystem& system, const TimeLoad& load,
                      const Vec& y0, const TimeGrid& grid);
void solve_full_cb(const FemSystem& system, const TimeLoad& load, const Vec& y0,
                   const TimeGrid& grid, const StateObserver& observe);

/// Number of steps per switching subinterval; throws unless the schedule's
/// delta is an integer multiple of the grid step and the schedule covers the
/// horizon.
int steps_per_subinterval(const BatchSchedule& schedule, const TimeGrid& grid);

/// Implicit Euler on the batch system E dY/dt + R_rb Y = F_rb. Each
/// subinterval advances only the active block through the mass-Schur reduced
/// system; the remaining components follow the exact coupling relation
/// Y_I(t) = Y_I(t_k) - E_II^{-1} E_IA (Y_A(t) - Y_A(t_k)), applied once per
/// step. Reduced factorizations are cached per (subset, dt). The result is
/// algebraically identical to full-dimensional implicit Euler on the batch
/// system.
Trajectory solve_rbm(const FemSystem& system, const Decomposition& dec,
                     const BatchSchedule& schedule, const TimeLoad& load,
                     const Vec& y0, const TimeGrid& grid);
void solve_rbm_cb(const FemSystem& system, const Decomposition& dec,
                  const BatchSchedule& schedule, const TimeLoad& load,
                  const Vec& y0, const TimeGrid& grid,
                  const StateObserver& observe);

/// Step solver for (E + dt A_step) x = rhs with A piecewise constant in
/// time; shared by the forward and discrete-adjoint sweeps.
class ImplicitStepOperator {
 public:
  virtual ~ImplicitStepOperator() = default;
  virtual void solve(int step, const Vec& rhs, Vec& out) const = 0;
  virtual int dimension() const = 0;
};

class FullStepOperator final : public ImplicitStepOperator {
 public:
  FullStepOperator(const FemSystem& system, double dt);
  void solve(int step, const Vec& rhs, Vec& out) const override;
  int dimension() const override { return n_; }

 private:
  int n_;
  Eigen::SimplicialLDLT<SpMat> fact_;
};

/// Full-dimensional batch operator: factors (E + dt R_rb) once per distinct
/// subset appearing in the schedule. Used where the right-hand side is not
/// split (optimal control), so the reduced solve does not apply.
class BatchStepOperator final : public ImplicitStepOperator {
 public:
  BatchStepOperator(const FemSystem& system, const Decomposition& dec,
                    const BatchSchedule& schedule, const TimeGrid& grid);
  void solve(int step, const Vec& rhs, Vec& out) const override;
  int dimension() const override { return n_; }
  int subset_for_step(int step) const;

 private:
  struct Factor;
  int n_;
  int steps_per_sub_;
  const BatchSchedule* schedule_;
  std::vector<std::shared_ptr<Factor>> by_subset_;
};

enum class VarianceKind { error_l2, state_norm };

struct EnsembleOptions {
  int jobs = 0;              // 0 = library default thread count
  int trajectory_stride = 1; // 0 = do not keep the mean trajectory
  VarianceKind variance = VarianceKind::error_l2;
};

/// Ensemble statistics. Accumulation order is fixed by realization index,
/// so results are bit-identical for any worker count.
struct EnsembleResult {
  int realizations = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> realization_seeds;
  TimeGrid grid;
  int trajectory_stride = 1;
  std::vector<int> kept_steps;
  Mat mean_states;  // dimension x kept_steps.size()
  Vec mean_final;
  std::vector<double> mean_error;  // per step, when an exact solution is given
  std::vector<double> variance_series;
  std::vector<double> per_realization_error;
  double error_linf_mean_l2 = std::numeric_limits<double>::quiet_NaN();
  double error_of_mean_trajectory = std::numeric_limits<double>::quiet_NaN();
  double mean_solve_seconds = 0.0;
};

/// Independent batch realizations r = 0..n-1, each with RNG stream
/// (seed, r); realizations may run concurrently.
EnsembleResult run_ensemble(const FemSystem& system, const Decomposition& dec,
                            double delta, const TimeGrid& grid, const Vec& y0,
                            const TimeLoad& load, int n_real,
                            std::uint64_t seed, const EnsembleOptions& options = {},
                            const ExactSolution* exact = nullptr);

/// max over collocation times of the L2(E) norm of the state difference.
double trajectory_distance(const FemSystem& system, const Trajectory& a,
                           const Trajectory& b);

}  // namespace rbheat
