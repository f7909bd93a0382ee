#include "rbheat/optimal_control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rbheat/rng.hpp"

namespace rbheat {

namespace {

double theta(const TimeGrid& grid, int n) {
  return (n == 0 || n == grid.points - 1) ? 0.5 : 1.0;
}

void check_problem(const ControlProblem& p) {
  if (!p.system) throw std::invalid_argument("control problem has no system");
  const int n = p.system->dimension();
  if (p.y0.size() != n || p.yd.size() != n)
    throw std::invalid_argument("control problem data dimension mismatch");
}

void check_control(const ControlProblem& p, const ControlField& f) {
  if (static_cast<int>(f.size()) != p.grid.points)
    throw std::invalid_argument("control field must have one vector per t_n");
  for (const Vec& v : f)
    if (v.size() != p.system->dimension())
      throw std::invalid_argument("control vector dimension mismatch");
}

ControlField axpy(const ControlField& a, double alpha, const ControlField& b) {
  ControlField out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + alpha * b[i];
  return out;
}

}  // namespace

ControlField zero_control(const ControlProblem& problem) {
  check_problem(problem);
  return ControlField(problem.grid.points,
                      Vec::Zero(problem.system->dimension()));
}

double control_inner(const ControlProblem& problem, const ControlField& a,
                     const ControlField& b) {
  check_problem(problem);
  const SpMat& E = problem.system->mass();
  const double dt = problem.grid.dt();
  double acc = 0.0;
  for (int n = 0; n < problem.grid.points; ++n)
    acc += theta(problem.grid, n) * dt * a[n].dot(E * b[n]);
  return acc;
}

double control_norm(const ControlProblem& problem, const ControlField& a) {
  return std::sqrt(std::max(0.0, control_inner(problem, a, a)));
}

Trajectory forward_solve(const ControlProblem& problem,
                         const ImplicitStepOperator& op,
                         const ControlField& control) {
  check_problem(problem);
  check_control(problem, control);
  const FemSystem& sys = *problem.system;
  const double dt = problem.grid.dt();
  Trajectory traj;
  traj.grid = problem.grid;
  traj.states.resize(sys.dimension(), problem.grid.points);
  Vec y = problem.y0;
  traj.states.col(0) = y;
  Vec rhs(sys.dimension());
  for (int step = 0; step < problem.grid.steps(); ++step) {
    rhs = sys.mass() * y + dt * control[step + 1];
    op.solve(step, rhs, y);
    traj.states.col(step + 1) = y;
  }
  return traj;
}

double evaluate_functional_op(const ControlProblem& problem,
                              const ImplicitStepOperator& op,
                              const ControlField& control,
                              Trajectory* state_out) {
  Trajectory state = forward_solve(problem, op, control);
  const FemSystem& sys = *problem.system;
  const double dt = problem.grid.dt();
  double acc = 0.0;
  for (int n = 0; n < problem.grid.points; ++n) {
    const Vec diff = state.states.col(n) - problem.yd;
    acc += theta(problem.grid, n) * dt *
           (control[n].dot(sys.mass() * control[n]) +
            diff.dot(sys.mass() * diff));
  }
  if (state_out) *state_out = std::move(state);
  return 0.5 * acc;
}

double evaluate_functional(const ControlProblem& problem,
                           const ControlField& control) {
  check_problem(problem);
  FullStepOperator op(*problem.system, problem.grid.dt());
  return evaluate_functional_op(problem, op, control);
}

ControlField gradient_op(const ControlProblem& problem,
                         const ImplicitStepOperator& op,
                         const ControlField& control, const Trajectory& state) {
  check_problem(problem);
  check_control(problem, control);
  const FemSystem& sys = *problem.system;
  const double dt = problem.grid.dt();
  const int zeta = problem.grid.points;

  ControlField grad(zeta);
  grad[0] = control[0];  // t_0 never drives a step: pure penalty entry
  Vec lambda_next = Vec::Zero(sys.dimension());
  Vec lambda(sys.dimension()), rhs(sys.dimension());
  for (int m = zeta - 1; m >= 1; --m) {
    rhs = sys.mass() * lambda_next -
          dt * theta(problem.grid, m) *
              (sys.mass() * (state.states.col(m) - problem.yd));
    op.solve(m - 1, rhs, lambda);
    grad[m] = control[m] -
              sys.mass_factor().solve(lambda) / theta(problem.grid, m);
    lambda_next = lambda;
  }
  return grad;
}

ControlField gradient(const ControlProblem& problem, const ControlField& control) {
  check_problem(problem);
  FullStepOperator op(*problem.system, problem.grid.dt());
  Trajectory state = forward_solve(problem, op, control);
  return gradient_op(problem, op, control, state);
}

ControlIterate solve_with_operator(const ControlProblem& problem,
                                   const ImplicitStepOperator& op, double tol,
                                   int max_iter) {
  check_problem(problem);
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxBacktracks = 60;

  ControlIterate it;
  it.control = zero_control(problem);
  Trajectory state;
  double j = evaluate_functional_op(problem, op, it.control, &state);
  ControlField g = gradient_op(problem, op, it.control, state);
  double gnorm_sq = control_inner(problem, g, g);
  double gnorm = std::sqrt(std::max(0.0, gnorm_sq));

  it.functional = j;
  it.grad_norm = gnorm;
  it.state = state;
  if (gnorm == 0.0) {
    it.converged = true;
    return it;
  }

  double alpha = 1.0;
  for (int k = 1; k <= max_iter; ++k) {
    // Armijo backtracking along the negative gradient.
    ControlField trial;
    Trajectory trial_state;
    double j_trial = 0.0;
    int bt = 0;
    for (; bt < kMaxBacktracks; ++bt) {
      trial = axpy(it.control, -alpha, g);
      j_trial = evaluate_functional_op(problem, op, trial, &trial_state);
      if (j_trial <= j - kArmijo * alpha * gnorm_sq) break;
      alpha *= 0.5;
    }
    if (bt == kMaxBacktracks) break;  // stalled: leave converged = false

    const double update_norm = alpha * gnorm;
    ControlField g_new = gradient_op(problem, op, trial, trial_state);
    const double gnorm_sq_new = control_inner(problem, g_new, g_new);

    // Barzilai-Borwein proposal: s = -alpha g, y = g_new - g, so
    // <s,s>/<s,y> = alpha <g,g> / (<g,g> - <g,g_new>).
    const double gg_new = control_inner(problem, g, g_new);
    const double denom = gnorm_sq - gg_new;
    double alpha_next = denom > 0.0 ? alpha * gnorm_sq / denom : alpha * 2.0;
    alpha_next = std::clamp(alpha_next, 1e-10, 1e10);

    it.control = std::move(trial);
    it.state = std::move(trial_state);
    j = j_trial;
    g = std::move(g_new);
    gnorm_sq = gnorm_sq_new;
    gnorm = std::sqrt(std::max(0.0, gnorm_sq));
    it.functional = j;
    it.grad_norm = gnorm;
    it.last_update_norm = update_norm;
    it.iterations = k;
    it.history.push_back({k, j, gnorm, alpha});
    alpha = alpha_next;

    if (update_norm < tol) {
      it.converged = true;
      break;
    }
    if (gnorm == 0.0) {
      it.converged = true;
      break;
    }
  }
  return it;
}

ControlIterate solve_deterministic(const ControlProblem& problem, double tol,
                                   int max_iter) {
  check_problem(problem);
  FullStepOperator op(*problem.system, problem.grid.dt());
  return solve_with_operator(problem, op, tol, max_iter);
}

ControlEnsemble solve_random(const ControlProblem& problem,
                             const Decomposition& dec, double delta, double tol,
                             int max_iter, int n_real, std::uint64_t seed,
                             int jobs) {
  check_problem(problem);
  if (n_real < 1) throw std::invalid_argument("need at least one realization");
  const FemSystem& sys = *problem.system;
  const int n = sys.dimension();
  const int zeta = problem.grid.points;

  ControlEnsemble out;
  out.realizations = n_real;
  out.seed = seed;
  out.realization_seeds.resize(n_real);
  out.mean_control.assign(zeta, Vec::Zero(n));
  out.mean_state = Mat::Zero(n, zeta);
  out.functional.resize(n_real);
  out.iterations.resize(n_real);

#ifdef _OPENMP
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for ordered schedule(dynamic, 1) num_threads(threads)
#endif
  for (int r = 0; r < n_real; ++r) {
    const std::uint64_t seed_r = realization_seed(seed, r);
    const BatchSchedule schedule =
        sample_schedule(dec, delta, problem.grid.horizon, seed_r);
    const BatchStepOperator op(sys, dec, schedule, problem.grid);
    ControlIterate it = solve_with_operator(problem, op, tol, max_iter);

#ifdef _OPENMP
#pragma omp ordered
#endif
    {
      out.realization_seeds[r] = seed_r;
      for (int m = 0; m < zeta; ++m) out.mean_control[m] += it.control[m];
      out.mean_state += it.state.states;
      out.functional[r] = it.functional;
      out.iterations[r] = it.iterations;
      out.all_converged = out.all_converged && it.converged;
    }
  }

  const double inv = 1.0 / n_real;
  for (Vec& v : out.mean_control) v *= inv;
  out.mean_state *= inv;
  return out;
}

}  // namespace rbheat
