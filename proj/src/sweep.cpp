#include "rbheat/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "rbheat/manufactured.hpp"
#include "rbheat/rng.hpp"
#include "rbheat/time_integration.hpp"

namespace rbheat {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

std::string SweepResult::csv() const {
  std::ostringstream os;
  os << "h,delta,err_rbm,err_full,time_rbm_s,time_full_s,speedup,"
        "realizations,seed\n";
  for (const SweepRow& r : rows) {
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.6f,%.6f,%.3f,%d,%llu\n", r.h,
                  r.delta, r.err_rbm, r.err_full, r.time_rbm_s, r.time_full_s,
                  r.speedup, r.realizations,
                  static_cast<unsigned long long>(r.seed));
    os << buf;
  }
  return os.str();
}

std::string SweepResult::summary() const {
  std::ostringstream os;
  os << "rows = " << rows.size() << "\n";
  os << "fitted_order = " << fmt("%.6f", fitted_order) << "\n";
  os << "excluded_coarsest = " << (excluded_coarsest ? "true" : "false") << "\n";
  for (const auto& l : log) os << "log = " << l << "\n";
  return os.str();
}

double fit_observed_order(const std::vector<double>& errors,
                          const std::vector<double>& deltas) {
  if (errors.size() != deltas.size())
    throw std::invalid_argument("fit_observed_order: size mismatch");
  if (errors.size() < 3)
    throw std::invalid_argument("fit_observed_order: need at least 3 points");
  const size_t n = errors.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (!(errors[i] > 0.0) || !(deltas[i] > 0.0))
      throw std::invalid_argument("fit_observed_order: values must be positive");
    mx += std::log(deltas[i]);
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = std::log(deltas[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0)
    throw std::invalid_argument("fit_observed_order: all deltas equal");
  return sxy / sxx;
}

SweepResult run_convergence_sweep(const SweepConfig& config) {
  if (config.n_values.empty())
    throw std::invalid_argument("sweep needs at least one mesh size");
  if (!(config.epsilon > 0.0))
    throw std::invalid_argument("sweep epsilon must be positive");
  if (std::abs(config.length - 1.0) > 1e-14)
    throw std::invalid_argument("the manufactured sweep case needs L = 1");

  SweepResult result;
  const double T = config.horizon;
  const double dt_target = T / (config.zeta_target - 1);
  const MetricGraph graph = build_paper_graph(config.length);
  const ManufacturedCase mc = ManufacturedCase::paper_case(T);

  for (int n : config.n_values) {
    SweepRow row;
    row.n = n;
    row.h = config.length / (n + 1);
    row.delta = std::pow(row.h, 7.0 / (1.0 - config.epsilon));
    row.realizations = config.realizations;
    row.seed = keyed_bits(config.seed, 0x726f77ull, static_cast<std::uint64_t>(n));

    const int dofs = 10 * n + 3;
    if (dofs > config.dof_cap)
      throw std::runtime_error("sweep row exceeds the configured dof cap (" +
                               std::to_string(dofs) + " > " +
                               std::to_string(config.dof_cap) + ")");

    // Time grid: steps no coarser than delta and the target step, landing on
    // T exactly; delta is then snapped to the nearest step multiple.
    const double dt_raw = row.delta / std::ceil(row.delta / dt_target);
    const long long n_steps =
        std::max<long long>(1, std::llround(std::ceil(T / dt_raw - 1e-12)));
    const TimeGrid grid(T, static_cast<int>(n_steps) + 1);
    row.dt = grid.dt();
    row.zeta = grid.points;
    const long long s = std::max<long long>(1, std::llround(row.delta / row.dt));
    row.delta_effective = s * row.dt;
    if (std::abs(row.delta_effective - row.delta) > 1e-6 * row.delta)
      result.log.push_back("n=" + std::to_string(n) + ": delta adjusted to " +
                           fmt("%.9e", row.delta_effective) +
                           " to align with dt");

    const FemSystem system = assemble(graph, Mesh1D(n, row.h));
    const Decomposition dec =
        config.style == DecompositionStyle::overlapping
            ? build_overlapping(system, paper_overlap_plan())
            : build_nonoverlapping(system, paper_nonoverlap_plan());
    const TimeLoad load = mc.load(system);
    const Vec y0 = system.project_initial(mc.initial());
    const ExactSolution exact = mc.solution(system);

    // Full-graph reference on the same grid, streamed error.
    double err_full = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    solve_full_cb(system, load, y0, grid,
                  [&](int, double t, const Vec& y) {
                    err_full = std::max(err_full, exact.error(y, t));
                  });
    const auto t1 = std::chrono::steady_clock::now();
    row.err_full = err_full;
    row.time_full_s = std::chrono::duration<double>(t1 - t0).count();

    EnsembleOptions opts;
    opts.jobs = config.jobs;
    opts.trajectory_stride = 0;  // errors only; trajectories stay unstored
    const EnsembleResult ens =
        run_ensemble(system, dec, row.delta_effective, grid, y0, load,
                     config.realizations, row.seed, opts, &exact);
    row.err_rbm = ens.error_linf_mean_l2;
    row.time_rbm_s = ens.mean_solve_seconds;
    row.speedup = row.time_rbm_s > 0.0 ? row.time_full_s / row.time_rbm_s : 0.0;

    result.rows.push_back(row);
  }

  // Observed order in delta; drop the coarsest point when the sweep spans
  // more than three decades (pre-asymptotic pollution).
  std::vector<double> errs, dels;
  for (const SweepRow& r : result.rows) {
    errs.push_back(r.err_rbm);
    dels.push_back(r.delta);
  }
  if (result.rows.size() >= 4) {
    double dmin = dels[0], dmax = dels[0];
    size_t imax = 0;
    for (size_t i = 0; i < dels.size(); ++i) {
      dmin = std::min(dmin, dels[i]);
      if (dels[i] > dmax) {
        dmax = dels[i];
        imax = i;
      }
    }
    if (std::log10(dmax / dmin) > 3.0) {
      errs.erase(errs.begin() + imax);
      dels.erase(dels.begin() + imax);
      result.excluded_coarsest = true;
      result.log.push_back("coarsest point excluded from the order fit");
    }
  }
  result.fitted_order =
      errs.size() >= 3 ? fit_observed_order(errs, dels) : 0.0;
  return result;
}

}  // namespace rbheat
