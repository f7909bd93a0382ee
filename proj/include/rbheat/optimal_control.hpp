#pragma once

#include <cstdint>
#include <vector>

#include "rbheat/decomposition.hpp"
#include "rbheat/fem_system.hpp"
#include "rbheat/time_integration.hpp"

namespace rbheat {

/// Quadratic tracking problem for E dY/dt + R Y = F with running cost
/// (1/2) int ||F||_E^2 + ||Y - y_d||_E^2 dt; both weights are the mass
/// matrix, so the quadratic forms are L2 norms of the reconstructed fields.
struct ControlProblem {
  const FemSystem* system = nullptr;
  TimeGrid grid;
  Vec y0;  // projected initial coefficients
  Vec yd;  // projected target coefficients
};

/// One coefficient vector per collocation point.
using ControlField = std::vector<Vec>;

ControlField zero_control(const ControlProblem& problem);

/// Trapezoid-weighted, mass-weighted inner product in time:
/// sum_n theta_n dt a_n' E b_n.
double control_inner(const ControlProblem& problem, const ControlField& a,
                     const ControlField& b);
double control_norm(const ControlProblem& problem, const ControlField& a);

/// Forward implicit Euler driven by the control (source at step end).
Trajectory forward_solve(const ControlProblem& problem,
                         const ImplicitStepOperator& op,
                         const ControlField& control);

double evaluate_functional(const ControlProblem& problem,
                           const ControlField& control);
double evaluate_functional_op(const ControlProblem& problem,
                              const ImplicitStepOperator& op,
                              const ControlField& control,
                              Trajectory* state_out = nullptr);

/// Gradient of the functional in the control_inner geometry, computed from
/// the discrete adjoint of the forward scheme: the backward sweep solves
/// (E + dt A) lambda_n = E lambda_{n+1} - dt theta_n E (Y_n - y_d) with the
/// same step matrices as the forward solve, and the returned field is
/// g_n = F_n - E^{-1} lambda_n / theta_n, so that
/// control_inner(g, dF) equals the directional derivative of J along dF.
ControlField gradient(const ControlProblem& problem, const ControlField& control);
ControlField gradient_op(const ControlProblem& problem,
                         const ImplicitStepOperator& op,
                         const ControlField& control, const Trajectory& state);

struct DescentRecord {
  int iteration = 0;
  double functional = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct ControlIterate {
  ControlField control;
  Trajectory state;
  double functional = 0.0;
  double grad_norm = 0.0;
  double last_update_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<DescentRecord> history;
};

/// Gradient descent with Armijo backtracking (c = 1e-4, halving) and a
/// Barzilai-Borwein step proposal after the first accepted step. Stops when
/// the control update norm drops below tol.
ControlIterate solve_deterministic(const ControlProblem& problem, double tol,
                                   int max_iter);
ControlIterate solve_with_operator(const ControlProblem& problem,
                                   const ImplicitStepOperator& op, double tol,
                                   int max_iter);

struct ControlEnsemble {
  int realizations = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> realization_seeds;
  ControlField mean_control;
  Mat mean_state;  // dimension x points
  std::vector<double> functional;   // per realization
  std::vector<int> iterations;      // per realization
  bool all_converged = true;
};

/// Independent batch-dynamics control problems, one fixed schedule per
/// realization reused by every state and adjoint solve of its descent run;
/// controls and states averaged in realization order.
ControlEnsemble solve_random(const ControlProblem& problem,
                             const Decomposition& dec, double delta, double tol,
                             int max_iter, int n_real, std::uint64_t seed,
                             int jobs = 0);

}  // namespace rbheat
