#include "rbheat/time_integration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rbheat/rng.hpp"

namespace rbheat {

namespace {

struct SymFactor {
  Eigen::SimplicialLDLT<SpMat> ldlt;
  Eigen::SparseLU<SpMat> lu;
  bool use_ldlt = true;

  void compute(const SpMat& m) {
    ldlt.compute(m);
    if (ldlt.info() == Eigen::Success) {
      use_ldlt = true;
      return;
    }
    lu.compute(m);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("implicit-Euler matrix factorization failed");
    use_ldlt = false;
  }

  Vec solve(const Vec& b) const {
    if (use_ldlt) return ldlt.solve(b);
    return lu.solve(b);
  }
};

SpMat restrict_matrix(const SpMat& m, const std::vector<int>& rows_cols,
                      const std::vector<int>& glob2loc) {
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      const int r = glob2loc[it.row()];
      const int c = glob2loc[it.col()];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  SpMat out(static_cast<int>(rows_cols.size()),
            static_cast<int>(rows_cols.size()));
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

// Cached per-(subset, dt) data for the reduced step.
struct ReducedWorkspace {
  std::vector<int> active, inactive;
  SpMat S;  // E_AA - E_AI E_II^{-1} E_IA
  SymFactor K;
  struct Coup {
    int col_active_local;
    double value;
    int zcol;
  };
  std::vector<Coup> coups;
  std::vector<Vec> zcols;  // E_II^{-1} e_row per unique coupled inactive row
  Vec w_active;
  Vec base_active;  // (w .* base)|_A for separable loads
  bool separable = false;
  mutable Vec yA, rhs, yA_new;  // scratch, one solver instance per thread
};

std::unique_ptr<ReducedWorkspace> build_reduced_workspace(
    const FemSystem& system, const Decomposition& dec, int subset_index,
    double dt, const TimeLoad& load) {
  auto ws_ptr = std::make_unique<ReducedWorkspace>();
  ReducedWorkspace& ws = *ws_ptr;
  const int n = system.dimension();
  ws.active = dec.subset_support(subset_index);
  std::vector<int> g2a(n, -1), g2i(n, -1);
  for (size_t i = 0; i < ws.active.size(); ++i) g2a[ws.active[i]] = static_cast<int>(i);
  for (int d = 0; d < n; ++d)
    if (g2a[d] < 0) {
      g2i[d] = static_cast<int>(ws.inactive.size());
      ws.inactive.push_back(d);
    }

  const SpMat& E = system.mass();
  SpMat E_AA = restrict_matrix(E, ws.active, g2a);

  if (!ws.inactive.empty()) {
    SpMat E_II = restrict_matrix(E, ws.inactive, g2i);
    Eigen::SimplicialLDLT<SpMat> fact_II(E_II);
    if (fact_II.info() != Eigen::Success)
      throw std::runtime_error("inactive mass block factorization failed");

    // Couplings E(I, A): a handful of entries at block interfaces.
    struct RawCoup {
      int row_local;
      int col_local;
      double value;
    };
    std::vector<RawCoup> raw;
    for (int k = 0; k < E.outerSize(); ++k)
      for (SpMat::InnerIterator it(E, k); it; ++it) {
        const int r = g2i[it.row()];
        const int c = g2a[it.col()];
        if (r >= 0 && c >= 0) raw.push_back({r, c, it.value()});
      }

    std::map<int, int> row_slot;
    for (const auto& rc : raw)
      if (!row_slot.count(rc.row_local)) {
        const int slot = static_cast<int>(ws.zcols.size());
        row_slot[rc.row_local] = slot;
        Vec e = Vec::Zero(static_cast<int>(ws.inactive.size()));
        e[rc.row_local] = 1.0;
        ws.zcols.push_back(fact_II.solve(e));
      }
    for (const auto& rc : raw)
      ws.coups.push_back({rc.col_local, rc.value, row_slot[rc.row_local]});

    // Low-rank Schur correction: only |coups|^2 entries.
    std::vector<Eigen::Triplet<double>> corr;
    for (const auto& a : raw)
      for (const auto& b : raw)
        corr.emplace_back(a.col_local, b.col_local,
                          -a.value * b.value * ws.zcols[row_slot[b.row_local]][a.row_local]);
    SpMat C(E_AA.rows(), E_AA.cols());
    C.setFromTriplets(corr.begin(), corr.end());
    ws.S = E_AA + C;
  } else {
    ws.S = E_AA;
  }
  ws.S.makeCompressed();

  SpMat G = restrict_matrix(dec.subset_matrix(subset_index), ws.active, g2a);
  SpMat K = ws.S + dt * G;
  ws.K.compute(K);

  const Vec w = dec.subset_force_weight(subset_index);
  ws.w_active.resize(static_cast<int>(ws.active.size()));
  for (size_t i = 0; i < ws.active.size(); ++i)
    ws.w_active[static_cast<int>(i)] = w[ws.active[i]];
  ws.separable = load.is_separable();
  if (ws.separable) {
    ws.base_active.resize(static_cast<int>(ws.active.size()));
    for (size_t i = 0; i < ws.active.size(); ++i)
      ws.base_active[static_cast<int>(i)] =
          w[ws.active[i]] * load.base()[ws.active[i]];
  }
  const int na = static_cast<int>(ws.active.size());
  ws.yA.resize(na);
  ws.rhs.resize(na);
  ws.yA_new.resize(na);
  return ws_ptr;
}

}  // namespace

Trajectory solve_full(const FemSystem& system, const TimeLoad& load,
                      const Vec& y0, const TimeGrid& grid) {
  Trajectory traj;
  traj.grid = grid;
  traj.states.resize(system.dimension(), grid.points);
  solve_full_cb(system, load, y0, grid,
                [&traj](int n, double, const Vec& y) { traj.states.col(n) = y; });
  return traj;
}

void solve_full_cb(const FemSystem& system, const TimeLoad& load, const Vec& y0,
                   const TimeGrid& grid, const StateObserver& observe) {
  const int n = system.dimension();
  if (y0.size() != n) throw std::invalid_argument("initial state size mismatch");
  if (load.size() != n) throw std::invalid_argument("load size mismatch");
  const double dt = grid.dt();
  SpMat A = system.mass() + dt * system.stiffness();
  Eigen::SimplicialLDLT<SpMat> fact(A);
  if (fact.info() != Eigen::Success)
    throw std::runtime_error("implicit-Euler factorization failed (system not SPD)");

  Vec y = y0;
  observe(0, 0.0, y);
  for (int step = 0; step < grid.steps(); ++step) {
    const double t_next = grid.time(step + 1);
    Vec rhs = system.mass() * y + dt * load.at(t_next);
    y = fact.solve(rhs);
    observe(step + 1, t_next, y);
  }
}

int steps_per_subinterval(const BatchSchedule& schedule, const TimeGrid& grid) {
  const double dt = grid.dt();
  const double ratio = schedule.delta / dt;
  const long long s = std::llround(ratio);
  if (s < 1 || std::abs(schedule.delta - s * dt) >
                   1e-9 * std::max(schedule.delta, dt))
    throw std::invalid_argument(
        "schedule delta is not an integer multiple of the grid step");
  if (std::abs(schedule.horizon - grid.horizon) > 1e-9 * grid.horizon)
    throw std::invalid_argument("schedule and grid horizons disagree");
  const int needed = (grid.steps() + static_cast<int>(s) - 1) / static_cast<int>(s);
  if (needed > schedule.subintervals())
    throw std::invalid_argument("schedule has too few subintervals for the grid");
  return static_cast<int>(s);
}

Trajectory solve_rbm(const FemSystem& system, const Decomposition& dec,
                     const BatchSchedule& schedule, const TimeLoad& load,
                     const Vec& y0, const TimeGrid& grid) {
  Trajectory traj;
  traj.grid = grid;
  traj.states.resize(system.dimension(), grid.points);
  solve_rbm_cb(system, dec, schedule, load, y0, grid,
               [&traj](int n, double, const Vec& y) { traj.states.col(n) = y; });
  return traj;
}

void solve_rbm_cb(const FemSystem& system, const Decomposition& dec,
                  const BatchSchedule& schedule, const TimeLoad& load,
                  const Vec& y0, const TimeGrid& grid,
                  const StateObserver& observe) {
  const int n = system.dimension();
  if (y0.size() != n) throw std::invalid_argument("initial state size mismatch");
  if (load.size() != n) throw std::invalid_argument("load size mismatch");
  if (dec.dimension() != n)
    throw std::invalid_argument("decomposition dimension mismatch");
  const int s = steps_per_subinterval(schedule, grid);
  const double dt = grid.dt();

  std::map<int, std::unique_ptr<ReducedWorkspace>> workspaces;
  const int used_subintervals = (grid.steps() + s - 1) / s;
  for (int k = 0; k < used_subintervals; ++k) {
    const int subset = schedule.omega[k];
    if (!workspaces.count(subset))
      workspaces.emplace(
          subset, build_reduced_workspace(system, dec, subset, dt, load));
  }

  Vec y = y0;
  observe(0, 0.0, y);
  Vec f_general;
  for (int step = 0; step < grid.steps(); ++step) {
    const double t_next = grid.time(step + 1);
    ReducedWorkspace& ws = *workspaces.at(schedule.omega[step / s]);
    const int na = static_cast<int>(ws.active.size());

    for (int i = 0; i < na; ++i) ws.yA[i] = y[ws.active[i]];
    ws.rhs.noalias() = ws.S * ws.yA;
    if (ws.separable) {
      ws.rhs += (dt * load.scale(t_next)) * ws.base_active;
    } else {
      f_general = load.at(t_next);
      for (int i = 0; i < na; ++i)
        ws.rhs[i] += dt * ws.w_active[i] * f_general[ws.active[i]];
    }
    ws.yA_new = ws.K.solve(ws.rhs);

    // Exact coupling of the inactive components, rank-one per interface.
    for (const auto& c : ws.coups) {
      const double coef =
          c.value * (ws.yA_new[c.col_active_local] - ws.yA[c.col_active_local]);
      if (coef == 0.0) continue;
      const Vec& z = ws.zcols[c.zcol];
      for (size_t j = 0; j < ws.inactive.size(); ++j)
        y[ws.inactive[j]] -= coef * z[static_cast<int>(j)];
    }
    for (int i = 0; i < na; ++i) y[ws.active[i]] = ws.yA_new[i];

    observe(step + 1, t_next, y);
  }
}

FullStepOperator::FullStepOperator(const FemSystem& system, double dt)
    : n_(system.dimension()) {
  SpMat A = system.mass() + dt * system.stiffness();
  fact_.compute(A);
  if (fact_.info() != Eigen::Success)
    throw std::runtime_error("implicit-Euler factorization failed");
}

void FullStepOperator::solve(int, const Vec& rhs, Vec& out) const {
  out = fact_.solve(rhs);
}

struct BatchStepOperator::Factor {
  SymFactor fact;
};

BatchStepOperator::BatchStepOperator(const FemSystem& system,
                                     const Decomposition& dec,
                                     const BatchSchedule& schedule,
                                     const TimeGrid& grid)
    : n_(system.dimension()), schedule_(&schedule) {
  steps_per_sub_ = steps_per_subinterval(schedule, grid);
  const double dt = grid.dt();
  std::map<int, std::shared_ptr<Factor>> cache;
  const int used = (grid.steps() + steps_per_sub_ - 1) / steps_per_sub_;
  by_subset_.resize(dec.num_subsets());
  for (int k = 0; k < used; ++k) {
    const int subset = schedule.omega[k];
    if (!cache.count(subset)) {
      auto f = std::make_shared<Factor>();
      SpMat A = system.mass() + dt * dec.subset_matrix(subset);
      f->fact.compute(A);
      cache[subset] = f;
    }
    by_subset_[subset] = cache[subset];
  }
}

int BatchStepOperator::subset_for_step(int step) const {
  return schedule_->omega.at(step / steps_per_sub_);
}

void BatchStepOperator::solve(int step, const Vec& rhs, Vec& out) const {
  const auto& f = by_subset_.at(subset_for_step(step));
  if (!f) throw std::logic_error("no factorization for requested step");
  out = f->fact.solve(rhs);
}

EnsembleResult run_ensemble(const FemSystem& system, const Decomposition& dec,
                            double delta, const TimeGrid& grid, const Vec& y0,
                            const TimeLoad& load, int n_real,
                            std::uint64_t seed, const EnsembleOptions& options,
                            const ExactSolution* exact) {
  if (n_real < 1) throw std::invalid_argument("need at least one realization");
  const int n = system.dimension();
  const int zeta = grid.points;

  EnsembleResult res;
  res.realizations = n_real;
  res.seed = seed;
  res.realization_seeds.resize(n_real);
  res.grid = grid;
  res.trajectory_stride = options.trajectory_stride;
  res.mean_final = Vec::Zero(n);
  res.per_realization_error.assign(exact ? n_real : 0, 0.0);

  if (options.variance == VarianceKind::state_norm &&
      options.trajectory_stride != 1)
    throw std::invalid_argument(
        "state-norm variance needs the full mean trajectory (stride 1)");

  if (options.trajectory_stride > 0) {
    for (int step = 0; step < zeta; ++step)
      if (step % options.trajectory_stride == 0 || step == zeta - 1)
        res.kept_steps.push_back(step);
    res.mean_states = Mat::Zero(n, static_cast<int>(res.kept_steps.size()));
  }
  if (exact) res.mean_error.assign(zeta, 0.0);
  std::vector<double> acc_sq(exact && options.variance == VarianceKind::error_l2
                                 ? zeta
                                 : 0,
                             0.0);
  std::vector<double> acc_state_sq(
      options.variance == VarianceKind::state_norm ? zeta : 0, 0.0);
  double seconds_sum = 0.0;

  std::vector<int> step_to_kept(zeta, -1);
  for (size_t j = 0; j < res.kept_steps.size(); ++j)
    step_to_kept[res.kept_steps[j]] = static_cast<int>(j);

#ifdef _OPENMP
  const int jobs = options.jobs > 0 ? options.jobs : omp_get_max_threads();
#pragma omp parallel for ordered schedule(dynamic, 1) num_threads(jobs)
#endif
  for (int r = 0; r < n_real; ++r) {
    const std::uint64_t seed_r = realization_seed(seed, r);
    const BatchSchedule schedule =
        sample_schedule(dec, delta, grid.horizon, seed_r);

    std::vector<double> err_r(exact ? zeta : 0, 0.0);
    std::vector<double> state_sq_r(acc_state_sq.empty() ? 0 : zeta, 0.0);
    Mat slices;
    if (options.trajectory_stride > 0)
      slices = Mat::Zero(n, static_cast<int>(res.kept_steps.size()));
    Vec final_state = Vec::Zero(n);

    const auto t0 = std::chrono::steady_clock::now();
    solve_rbm_cb(system, dec, schedule, load, y0, grid,
                 [&](int step, double t, const Vec& y) {
                   if (exact) err_r[step] = exact->error(y, t);
                   if (!state_sq_r.empty()) {
                     const double nm = system.l2_norm(y);
                     state_sq_r[step] = nm * nm;
                   }
                   if (options.trajectory_stride > 0 && step_to_kept[step] >= 0)
                     slices.col(step_to_kept[step]) = y;
                   if (step == zeta - 1) final_state = y;
                 });
    const auto t1 = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(t1 - t0).count();

#ifdef _OPENMP
#pragma omp ordered
#endif
    {
      res.realization_seeds[r] = seed_r;
      res.mean_final += final_state;
      if (options.trajectory_stride > 0) res.mean_states += slices;
      if (exact) {
        double worst = 0.0;
        for (int step = 0; step < zeta; ++step) {
          res.mean_error[step] += err_r[step];
          if (!acc_sq.empty()) acc_sq[step] += err_r[step] * err_r[step];
          worst = std::max(worst, err_r[step]);
        }
        res.per_realization_error[r] = worst;
      }
      for (size_t j = 0; j < state_sq_r.size(); ++j)
        acc_state_sq[j] += state_sq_r[j];
      seconds_sum += secs;
    }
  }

  const double inv = 1.0 / n_real;
  res.mean_final *= inv;
  if (options.trajectory_stride > 0) res.mean_states *= inv;
  res.mean_solve_seconds = seconds_sum * inv;
  if (exact) {
    double worst = 0.0;
    for (double& e : res.mean_error) {
      e *= inv;
      worst = std::max(worst, e);
    }
    res.error_linf_mean_l2 = worst;
    if (options.trajectory_stride > 0) {
      double em = 0.0;
      for (size_t j = 0; j < res.kept_steps.size(); ++j)
        em = std::max(em, exact->error(res.mean_states.col(j),
                                       grid.time(res.kept_steps[j])));
      res.error_of_mean_trajectory = em;
    }
  }
  if (n_real > 1) {
    if (!acc_sq.empty()) {
      res.variance_series.assign(zeta, 0.0);
      for (int step = 0; step < zeta; ++step) {
        const double m = res.mean_error[step];
        res.variance_series[step] =
            std::max(0.0, (acc_sq[step] - n_real * m * m) / (n_real - 1));
      }
    } else if (!acc_state_sq.empty()) {
      res.variance_series.assign(zeta, 0.0);
      for (int step = 0; step < zeta; ++step) {
        const Vec m = res.mean_states.col(step_to_kept[step]);
        const double mn = system.l2_norm(m);
        res.variance_series[step] = std::max(
            0.0, (acc_state_sq[step] - n_real * mn * mn) / (n_real - 1));
      }
    }
  }
  return res;
}

double trajectory_distance(const FemSystem& system, const Trajectory& a,
                           const Trajectory& b) {
  if (a.states.cols() != b.states.cols() || a.states.rows() != b.states.rows())
    throw std::invalid_argument("trajectory_distance: shape mismatch");
  double worst = 0.0;
  for (int c = 0; c < a.states.cols(); ++c) {
    Vec d = a.states.col(c) - b.states.col(c);
    worst = std::max(worst, system.l2_norm(d));
  }
  return worst;
}

}  // namespace rbheat
