// Timing comparison of the solver paths: full-system implicit Euler vs the
// reduced batch stepper, the reduced stepper vs the dense serial reference,
// and serial vs parallel ensemble execution.

#include <chrono>
#include <cstdio>
#include <functional>

#include "rbheat/decomposition_builders.hpp"
#include "rbheat/manufactured.hpp"
#include "rbheat/reference_solvers.hpp"
#include "rbheat/time_integration.hpp"

using namespace rbheat;

namespace {

double time_once(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

double time_best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) best = std::min(best, time_once(fn));
  return best;
}

}  // namespace

int main() {
  std::printf("%-44s %10s %10s %8s\n", "case", "base_s", "other_s", "ratio");

  {
    // Reference-network workload: one batch realization vs the full solve.
    const int n = 300;
    const FemSystem sys =
        assemble(build_paper_graph(1.0), Mesh1D::for_edge_length(1.0, n));
    const ManufacturedCase mc = ManufacturedCase::paper_case(1.0);
    const TimeLoad load = mc.load(sys);
    const Vec y0 = sys.project_initial(mc.initial());
    const TimeGrid grid(1.0, 201);
    const Decomposition dec = build_overlapping(sys, paper_overlap_plan());
    const BatchSchedule sched = sample_schedule(dec, 0.01, 1.0, 1);

    const double t_full = time_best_of(3, [&] {
      solve_full_cb(sys, load, y0, grid, [](int, double, const Vec&) {});
    });
    const double t_rbm = time_best_of(3, [&] {
      solve_rbm_cb(sys, dec, sched, load, y0, grid,
                   [](int, double, const Vec&) {});
    });
    std::printf("%-44s %10.4f %10.4f %8.2f\n",
                "full solve vs reduced batch (N=300)", t_full, t_rbm,
                t_full / t_rbm);
  }

  {
    // Reduced stepper vs the dense serial reference at a test-sized mesh.
    const int n = 12;
    const FemSystem sys =
        assemble(build_paper_graph(1.0), Mesh1D::for_edge_length(1.0, n));
    const ManufacturedCase mc = ManufacturedCase::paper_case(1.0);
    const TimeLoad load = mc.load(sys);
    const Vec y0 = sys.project_initial(mc.initial());
    const TimeGrid grid(1.0, 101);
    const Decomposition dec = build_nonoverlapping(sys, paper_nonoverlap_plan());
    const BatchSchedule sched = sample_schedule(dec, 0.05, 1.0, 1);

    const double t_dense = time_best_of(3, [&] {
      reference::solve_rbm_dense(sys, dec, sched, load, y0, grid);
    });
    const double t_reduced = time_best_of(3, [&] {
      solve_rbm_cb(sys, dec, sched, load, y0, grid,
                   [](int, double, const Vec&) {});
    });
    std::printf("%-44s %10.4f %10.4f %8.2f\n",
                "dense reference vs reduced batch (N=12)", t_dense, t_reduced,
                t_dense / t_reduced);
  }

  {
    // Ensemble throughput: one worker vs the machine default.
    const int n = 100;
    const FemSystem sys =
        assemble(build_paper_graph(1.0), Mesh1D::for_edge_length(1.0, n));
    const ManufacturedCase mc = ManufacturedCase::paper_case(1.0);
    const TimeLoad load = mc.load(sys);
    const Vec y0 = sys.project_initial(mc.initial());
    const TimeGrid grid(1.0, 201);
    const Decomposition dec = build_overlapping(sys, paper_overlap_plan());
    const ExactSolution exact = mc.solution(sys);

    EnsembleOptions serial;
    serial.jobs = 1;
    serial.trajectory_stride = 0;
    EnsembleOptions parallel = serial;
    parallel.jobs = 0;

    const double t_serial = time_once([&] {
      run_ensemble(sys, dec, 0.01, grid, y0, load, 30, 7, serial, &exact);
    });
    const double t_parallel = time_once([&] {
      run_ensemble(sys, dec, 0.01, grid, y0, load, 30, 7, parallel, &exact);
    });
    std::printf("%-44s %10.4f %10.4f %8.2f\n",
                "ensemble 30 realizations: 1 worker vs all", t_serial,
                t_parallel, t_serial / t_parallel);
  }

  return 0;
}
