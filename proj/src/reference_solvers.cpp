#include "rbheat/reference_solvers.hpp"

#include <map>

namespace rbheat::reference {

Trajectory solve_full_dense(const FemSystem& system, const TimeLoad& load,
                            const Vec& y0, const TimeGrid& grid) {
  const int n = system.dimension();
  const double dt = grid.dt();
  const Mat E = Mat(system.mass());
  const Mat A = E + dt * Mat(system.stiffness());
  Eigen::PartialPivLU<Mat> lu(A);

  Trajectory traj;
  traj.grid = grid;
  traj.states.resize(n, grid.points);
  Vec y = y0;
  traj.states.col(0) = y;
  for (int step = 0; step < grid.steps(); ++step) {
    const double t_next = grid.time(step + 1);
    y = lu.solve(E * y + dt * load.at(t_next));
    traj.states.col(step + 1) = y;
  }
  return traj;
}

Trajectory solve_rbm_dense(const FemSystem& system, const Decomposition& dec,
                           const BatchSchedule& schedule, const TimeLoad& load,
                           const Vec& y0, const TimeGrid& grid) {
  const int n = system.dimension();
  const double dt = grid.dt();
  const int s = steps_per_subinterval(schedule, grid);
  const Mat E = Mat(system.mass());

  std::map<int, Eigen::PartialPivLU<Mat>> factors;
  std::map<int, Vec> weights;
  const int used = (grid.steps() + s - 1) / s;
  for (int k = 0; k < used; ++k) {
    const int subset = schedule.omega[k];
    if (!factors.count(subset)) {
      Mat A = E + dt * Mat(dec.subset_matrix(subset));
      factors.emplace(subset, Eigen::PartialPivLU<Mat>(A));
      weights.emplace(subset, dec.subset_force_weight(subset));
    }
  }

  Trajectory traj;
  traj.grid = grid;
  traj.states.resize(n, grid.points);
  Vec y = y0;
  traj.states.col(0) = y;
  for (int step = 0; step < grid.steps(); ++step) {
    const double t_next = grid.time(step + 1);
    const int subset = schedule.omega[step / s];
    const Vec f = weights.at(subset).cwiseProduct(load.at(t_next));
    y = factors.at(subset).solve(E * y + dt * f);
    traj.states.col(step + 1) = y;
  }
  return traj;
}

}  // namespace rbheat::reference
