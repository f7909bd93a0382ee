// Experiment driver: assembles graph heat systems, runs full and
// random-batch solves, convergence sweeps and tracking control, and writes
// reproducible CSV/text artifacts.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "rbheat/bounds.hpp"
#include "rbheat/config.hpp"
#include "rbheat/decomposition_builders.hpp"
#include "rbheat/graph_io.hpp"
#include "rbheat/manufactured.hpp"
#include "rbheat/optimal_control.hpp"
#include "rbheat/sweep.hpp"
#include "rbheat/time_integration.hpp"

namespace fs = std::filesystem;
using namespace rbheat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNonconverged = 4;

struct CliOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
  std::optional<std::string> preset;
};

std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

// Shared experiment setup resolved from config + flags.
struct Experiment {
  KeyValueConfig resolved;
  MetricGraph graph;
  bool paper_graph = false;
  int n = 0;
  double length = 1.0;
  double horizon = 1.0;
  int zeta = 201;
  std::uint64_t seed = 0;
  int jobs = 0;
  fs::path out_dir;
  std::string decomposition = "";  // preset name or plan path ("" = none)
  std::optional<double> delta;
  std::optional<double> epsilon;
  int realizations = 30;
  double probe_x = -1.0;  // < 0: command default
};

Experiment resolve_experiment(const KeyValueConfig& cfg, const CliOptions& cli,
                              const std::set<std::string>& allowed) {
  KeyValueConfig merged = cfg;
  if (cli.preset) {
    if (*cli.preset == "paper") {
      merged.set("graph", "paper");
    } else if (*cli.preset == "paper_overlap_3" ||
               *cli.preset == "paper_nonoverlap_3") {
      merged.set("graph", "paper");
      merged.set("decomposition", *cli.preset);
    } else {
      throw std::runtime_error("unknown preset '" + *cli.preset + "'");
    }
  }
  if (cli.seed) merged.set("seed", std::to_string(*cli.seed));
  if (cli.jobs) merged.set("jobs", std::to_string(*cli.jobs));
  if (cli.out) merged.set("out", *cli.out);
  merged.require_known(allowed);

  Experiment ex;
  ex.length = merged.get_double("L", 1.0);
  ex.horizon = merged.get_double("T", 1.0);
  ex.n = merged.get_int("N", 300);
  ex.zeta = merged.get_int("zeta", 201);
  ex.seed = merged.get_u64("seed", 0);
  ex.jobs = merged.get_int("jobs", 0);
  ex.out_dir = merged.get_string("out", "out");
  ex.realizations = merged.get_int("realizations", 30);
  ex.decomposition = merged.get_string("decomposition", "");
  ex.probe_x = merged.get_double("probe_x", -1.0);
  if (merged.has("delta")) ex.delta = merged.get_double("delta");
  if (merged.has("epsilon")) ex.epsilon = merged.get_double("epsilon");

  if (ex.n < 1) throw std::runtime_error("N must be at least 1");
  if (ex.zeta < 2) throw std::runtime_error("zeta must be at least 2");
  if (!(ex.horizon > 0.0)) throw std::runtime_error("T must be positive");
  if (!(ex.length > 0.0)) throw std::runtime_error("L must be positive");
  if (ex.realizations < 1)
    throw std::runtime_error("realizations must be at least 1");

  const std::string graph_src = merged.get_string("graph", "paper");
  if (graph_src == "paper") {
    ex.graph = build_paper_graph(ex.length);
    ex.paper_graph = true;
  } else if (graph_src == "interval") {
    ex.graph = build_interval_graph(ex.length);
  } else {
    GraphFile gf = load_graph_file(graph_src);
    const ValidationReport rep = gf.graph.validate();
    if (!rep.ok())
      throw std::runtime_error("invalid graph file:\n" + rep.text());
    ex.graph = gf.graph;
  }

  ex.resolved = merged;
  ex.resolved.set("graph", graph_src);
  ex.resolved.set("N", std::to_string(ex.n));
  ex.resolved.set("zeta", std::to_string(ex.zeta));
  ex.resolved.set("T", fmt17(ex.horizon));
  ex.resolved.set("L", fmt17(ex.length));
  ex.resolved.set("seed", std::to_string(ex.seed));
  ex.resolved.set("jobs", std::to_string(ex.jobs));
  ex.resolved.set("out", ex.out_dir.string());
  return ex;
}

Decomposition make_decomposition_from_config(const Experiment& ex,
                                             const FemSystem& sys) {
  if (ex.decomposition == "paper_overlap_3")
    return build_overlapping(sys, paper_overlap_plan());
  if (ex.decomposition == "paper_nonoverlap_3")
    return build_nonoverlapping(sys, paper_nonoverlap_plan());
  if (ex.decomposition == "single")
    return Decomposition::single(sys.stiffness());
  if (ex.decomposition.empty())
    throw std::runtime_error("a decomposition preset or plan file is required");
  return build_decomposition(sys, load_plan_file(ex.decomposition));
}

// delta from `delta` or `epsilon` (exactly one), aligned to the grid step.
double resolve_delta(Experiment& ex, const TimeGrid& grid) {
  if (ex.delta.has_value() == ex.epsilon.has_value())
    throw std::runtime_error(
        "exactly one of delta / epsilon must be supplied for batch runs");
  double delta = 0.0;
  if (ex.delta) {
    delta = *ex.delta;
  } else {
    const double h = ex.length / (ex.n + 1);
    delta = std::pow(h, 7.0 / (1.0 - *ex.epsilon));
  }
  if (!(delta > 0.0)) throw std::runtime_error("delta must be positive");
  const double dt = grid.dt();
  const double aligned = dt * std::max<long long>(1, std::llround(delta / dt));
  ex.resolved.set("delta_requested", fmt17(delta));
  ex.resolved.set("delta_effective", fmt17(aligned));
  ex.resolved.set("dt", fmt17(dt));
  return aligned;
}

std::vector<std::pair<EdgeId, double>> probe_points(const Experiment& ex,
                                                    double default_frac) {
  std::vector<std::pair<EdgeId, double>> probes;
  const double x =
      ex.probe_x >= 0.0 ? ex.probe_x : default_frac * ex.length;
  for (const Edge& e : ex.graph.edges()) probes.emplace_back(e.id, x);
  return probes;
}

void write_probe_csv(const fs::path& path, const FemSystem& sys,
                     const TimeGrid& grid, const std::vector<int>& steps,
                     const Mat& states,
                     const std::vector<std::pair<EdgeId, double>>& probes) {
  std::ostringstream os;
  os << "t,edge,x,value\n";
  for (size_t j = 0; j < steps.size(); ++j) {
    const double t = grid.time(steps[j]);
    for (const auto& [e, x] : probes) {
      os << fmt17(t) << "," << e << "," << fmt17(x) << ","
         << fmt17(sys.reconstruct(states.col(j), e, x)) << "\n";
    }
  }
  write_file(path, os.str());
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj) {
  std::ostringstream os;
  os << "t";
  for (int d = 0; d < traj.states.rows(); ++d) os << ",dof_" << d;
  os << "\n";
  for (int c = 0; c < traj.states.cols(); ++c) {
    os << fmt17(traj.grid.time(c));
    for (int d = 0; d < traj.states.rows(); ++d)
      os << "," << fmt17(traj.states(d, c));
    os << "\n";
  }
  write_file(path, os.str());
}

std::optional<ManufacturedCase> manufactured_for(const Experiment& ex) {
  if (!ex.paper_graph && ex.graph.edges().size() != 1) return std::nullopt;
  if (std::abs(ex.length - 1.0) > 1e-14) return std::nullopt;
  if (ex.paper_graph) return ManufacturedCase::paper_case(ex.horizon);
  return ManufacturedCase::interval_case(1.0, ex.horizon);
}

int cmd_solve(const KeyValueConfig& cfg, const CliOptions& cli) {
  const std::set<std::string> allowed = {"graph", "N",   "zeta", "T",
                                         "L",     "seed", "jobs", "out",
                                         "probe_x", "full_trajectory"};
  Experiment ex = resolve_experiment(cfg, cli, allowed);
  fs::create_directories(ex.out_dir);
  const TimeGrid grid(ex.horizon, ex.zeta);

  const FemSystem sys = assemble(ex.graph, Mesh1D::for_edge_length(ex.length, ex.n));
  const auto mc = manufactured_for(ex);
  const TimeLoad load =
      mc ? mc->load(sys) : TimeLoad::zero(sys.dimension());
  const Vec y0 = mc ? sys.project_initial(mc->initial())
                    : Vec::Zero(sys.dimension());

  const auto t0 = std::chrono::steady_clock::now();
  const Trajectory traj = solve_full(sys, load, y0, grid);
  const auto t1 = std::chrono::steady_clock::now();

  std::vector<int> steps(grid.points);
  for (int i = 0; i < grid.points; ++i) steps[i] = i;
  write_probe_csv(ex.out_dir / "probes.csv", sys, grid, steps, traj.states,
                  probe_points(ex, 0.5));
  if (ex.resolved.get_string("full_trajectory", "false") == "true")
    write_trajectory_csv(ex.out_dir / "trajectory.csv", traj);

  std::ostringstream rep;
  rep << "dofs = " << sys.dimension() << "\n";
  rep << "solve_seconds = "
      << fmt17(std::chrono::duration<double>(t1 - t0).count()) << "\n";
  if (mc) {
    const double err = exact_error(sys, traj, *mc);
    rep << "err_linf_l2 = " << fmt17(err) << "\n";
  } else {
    rep << "err_linf_l2 = nan  # no manufactured solution for this graph\n";
  }
  write_file(ex.out_dir / "error_report.txt", rep.str());
  write_file(ex.out_dir / "resolved_config.txt", ex.resolved.text());
  return kExitOk;
}

int cmd_rbm(const KeyValueConfig& cfg, const CliOptions& cli) {
  const std::set<std::string> allowed = {
      "graph", "N",          "zeta",  "T",   "L",       "seed",
      "jobs",  "out",        "delta", "epsilon", "realizations",
      "probe_x", "decomposition"};
  Experiment ex = resolve_experiment(cfg, cli, allowed);
  fs::create_directories(ex.out_dir);
  const TimeGrid grid(ex.horizon, ex.zeta);
  const double delta = resolve_delta(ex, grid);

  const FemSystem sys = assemble(ex.graph, Mesh1D::for_edge_length(ex.length, ex.n));
  const Decomposition dec = make_decomposition_from_config(ex, sys);
  const auto mc = manufactured_for(ex);
  const TimeLoad load = mc ? mc->load(sys) : TimeLoad::zero(sys.dimension());
  const Vec y0 =
      mc ? sys.project_initial(mc->initial()) : Vec::Zero(sys.dimension());
  std::optional<ExactSolution> exact;
  if (mc) exact = mc->solution(sys);

  EnsembleOptions opts;
  opts.jobs = ex.jobs;
  const EnsembleResult ens =
      run_ensemble(sys, dec, delta, grid, y0, load, ex.realizations, ex.seed,
                   opts, exact ? &*exact : nullptr);

  write_probe_csv(ex.out_dir / "mean_probes.csv", sys, grid, ens.kept_steps,
                  ens.mean_states, probe_points(ex, 0.5));

  {
    std::ostringstream os;
    os << "realization,seed,err_linf_l2\n";
    for (int r = 0; r < ens.realizations; ++r) {
      os << r << "," << ens.realization_seeds[r] << ",";
      os << (exact ? fmt17(ens.per_realization_error[r]) : "nan");
      os << "\n";
    }
    write_file(ex.out_dir / "per_realization_errors.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "t,variance\n";
    for (size_t i = 0; i < ens.variance_series.size(); ++i)
      os << fmt17(grid.time(static_cast<int>(i))) << ","
         << fmt17(ens.variance_series[i]) << "\n";
    write_file(ex.out_dir / "variance_series.csv", os.str());
  }

  const double var = variance(dec);
  std::ostringstream rep;
  rep << "realizations = " << ens.realizations << "\n";
  rep << "mean_solve_seconds = " << fmt17(ens.mean_solve_seconds) << "\n";
  if (exact) {
    rep << "err_linf_mean_l2 = " << fmt17(ens.error_linf_mean_l2) << "\n";
    rep << "err_of_mean_trajectory = " << fmt17(ens.error_of_mean_trajectory)
        << "\n";
  }
  rep << "degenerate_law = " << (var == 0.0 ? "true" : "false") << "\n";
  if (var == 0.0) rep << "note = degenerate law; equals full solve\n";
  write_file(ex.out_dir / "error_report.txt", rep.str());

  write_file(ex.out_dir / "decomposition_summary.txt",
             decomposition_summary(dec, sys.mesh().step));
  const BoundReport bound =
      bound_trajectory(sys, dec, load, y0, delta, grid);
  write_file(ex.out_dir / "bound_report.txt", bound.text());
  write_file(ex.out_dir / "resolved_config.txt", ex.resolved.text());
  return kExitOk;
}

int cmd_sweep(const KeyValueConfig& cfg, const CliOptions& cli) {
  const std::set<std::string> allowed = {
      "graph", "T",   "L",     "seed",        "jobs",    "out",
      "zeta",  "N_list", "epsilon", "realizations", "dof_cap", "decomposition"};
  Experiment ex = resolve_experiment(cfg, cli, allowed);
  fs::create_directories(ex.out_dir);

  SweepConfig sc;
  sc.epsilon = ex.epsilon.value_or(1e-4);
  sc.horizon = ex.horizon;
  sc.length = ex.length;
  sc.realizations = ex.realizations;
  sc.seed = ex.seed;
  sc.zeta_target = ex.zeta;
  sc.jobs = ex.jobs;
  sc.dof_cap = ex.resolved.has("dof_cap")
                   ? ex.resolved.get_int("dof_cap")
                   : sc.dof_cap;
  if (ex.decomposition == "paper_nonoverlap_3")
    sc.style = DecompositionStyle::non_overlapping;
  else if (ex.decomposition == "paper_overlap_3" || ex.decomposition.empty())
    sc.style = DecompositionStyle::overlapping;
  else
    throw std::runtime_error("sweep supports the paper decomposition presets");

  std::istringstream list(ex.resolved.get_string("N_list", "1,2,3,4,6"));
  std::string tok;
  while (std::getline(list, tok, ',')) sc.n_values.push_back(std::stoi(tok));

  const SweepResult result = run_convergence_sweep(sc);
  write_file(ex.out_dir / "sweep.csv", result.csv());
  write_file(ex.out_dir / "sweep_summary.txt", result.summary());
  write_file(ex.out_dir / "resolved_config.txt", ex.resolved.text());
  return kExitOk;
}

int cmd_control(const KeyValueConfig& cfg, const CliOptions& cli) {
  const std::set<std::string> allowed = {
      "graph", "N",    "zeta",  "T",       "L",        "seed",
      "jobs",  "out",  "delta", "epsilon", "realizations", "probe_x",
      "y_d",   "tol",  "max_iter", "decomposition"};
  Experiment ex = resolve_experiment(cfg, cli, allowed);
  fs::create_directories(ex.out_dir);
  const TimeGrid grid(ex.horizon, ex.zeta);

  const double yd_value = ex.resolved.get_double("y_d", 1.0);
  const double tol = ex.resolved.get_double("tol", 1e-8);
  const int max_iter = ex.resolved.get_int("max_iter", 20000);
  if (!(tol > 0.0)) throw std::runtime_error("tol must be positive");
  if (max_iter < 0) throw std::runtime_error("max_iter must be nonnegative");

  const FemSystem sys = assemble(ex.graph, Mesh1D::for_edge_length(ex.length, ex.n));
  ControlProblem problem;
  problem.system = &sys;
  problem.grid = grid;
  problem.y0 = Vec::Zero(sys.dimension());
  problem.yd = sys.project(EdgeField::constant(yd_value), 0.0);

  const ControlIterate det = solve_deterministic(problem, tol, max_iter);

  {
    std::ostringstream os;
    os << "iter,J,grad_norm,step\n";
    for (const DescentRecord& r : det.history)
      os << r.iteration << "," << fmt17(r.functional) << ","
         << fmt17(r.grad_norm) << "," << fmt17(r.step) << "\n";
    write_file(ex.out_dir / "convergence_log.csv", os.str());
  }

  std::vector<int> steps(grid.points);
  for (int i = 0; i < grid.points; ++i) steps[i] = i;
  const auto probes = probe_points(ex, 1.0);
  write_probe_csv(ex.out_dir / "state_probes.csv", sys, grid, steps,
                  det.state.states, probes);
  Mat control_states(sys.dimension(), grid.points);
  for (int i = 0; i < grid.points; ++i) control_states.col(i) = det.control[i];
  write_probe_csv(ex.out_dir / "control_probes.csv", sys, grid, steps,
                  control_states, probes);

  std::ostringstream rep;
  rep << "converged = " << (det.converged ? "true" : "false") << "\n";
  rep << "iterations = " << det.iterations << "\n";
  rep << "functional = " << fmt17(det.functional) << "\n";
  rep << "grad_norm = " << fmt17(det.grad_norm) << "\n";

  bool random_converged = true;
  if (!ex.decomposition.empty()) {
    const Decomposition dec = make_decomposition_from_config(ex, sys);
    double delta = grid.dt();
    if (ex.delta || ex.epsilon) delta = resolve_delta(ex, grid);
    const ControlEnsemble rnd =
        solve_random(problem, dec, delta, tol, max_iter, ex.realizations,
                     ex.seed, ex.jobs);
    random_converged = rnd.all_converged;
    write_probe_csv(ex.out_dir / "random_mean_state_probes.csv", sys, grid,
                    steps, rnd.mean_state, probes);
    Mat mean_control(sys.dimension(), grid.points);
    for (int i = 0; i < grid.points; ++i) mean_control.col(i) = rnd.mean_control[i];
    write_probe_csv(ex.out_dir / "random_mean_control_probes.csv", sys, grid,
                    steps, mean_control, probes);

    ControlField diff(det.control.size());
    for (size_t i = 0; i < diff.size(); ++i)
      diff[i] = det.control[i] - rnd.mean_control[i];
    rep << "random_realizations = " << rnd.realizations << "\n";
    rep << "random_all_converged = " << (rnd.all_converged ? "true" : "false")
        << "\n";
    rep << "mean_control_gap = " << fmt17(control_norm(problem, diff)) << "\n";
  }
  write_file(ex.out_dir / "control_report.txt", rep.str());
  write_file(ex.out_dir / "resolved_config.txt", ex.resolved.text());

  if (!det.converged || !random_converged) return kExitNonconverged;
  return kExitOk;
}

int cmd_report(const KeyValueConfig& cfg, const CliOptions& cli) {
  const std::set<std::string> allowed = {
      "graph", "N",   "zeta", "T",     "L",   "seed", "jobs",
      "out",   "delta", "epsilon", "realizations", "decomposition",
      "dump_matrices"};
  Experiment ex = resolve_experiment(cfg, cli, allowed);
  fs::create_directories(ex.out_dir);
  const TimeGrid grid(ex.horizon, ex.zeta);

  const FemSystem sys = assemble(ex.graph, Mesh1D::for_edge_length(ex.length, ex.n));
  const auto mc = manufactured_for(ex);
  const TimeLoad load = mc ? mc->load(sys) : TimeLoad::zero(sys.dimension());
  const Vec y0 =
      mc ? sys.project_initial(mc->initial()) : Vec::Zero(sys.dimension());
  const Vec yd = sys.project(EdgeField::constant(1.0), 0.0);

  if (!ex.decomposition.empty()) {
    const Decomposition dec = make_decomposition_from_config(ex, sys);
    write_file(ex.out_dir / "decomposition_summary.txt",
               decomposition_summary(dec, sys.mesh().step));
    double delta = grid.dt();
    if (ex.delta || ex.epsilon) delta = resolve_delta(ex, grid);
    write_file(ex.out_dir / "bound_trajectory.txt",
               bound_trajectory(sys, dec, load, y0, delta, grid).text());
    write_file(ex.out_dir / "bound_control.txt",
               bound_control(sys, dec, load, y0, yd, delta, grid).text());
  }
  if (ex.resolved.get_string("dump_matrices", "false") == "true") {
    std::ostringstream em, rm;
    write_matrix_triples(em, sys.mass());
    write_matrix_triples(rm, sys.stiffness());
    write_file(ex.out_dir / "mass_matrix.txt", em.str());
    write_file(ex.out_dir / "stiffness_matrix.txt", rm.str());
  }
  if (mc) {
    const CompatibilityReport comp = check_compatibility(*mc, ex.graph);
    write_file(ex.out_dir / "compatibility_report.txt", comp.text());
  }
  write_file(ex.out_dir / "resolved_config.txt", ex.resolved.text());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random-batch heat solver on metric graphs"};
  app.require_subcommand(1);

  CliOptions cli;
  std::uint64_t seed_opt = 0;
  int jobs_opt = 0;
  std::string out_opt, preset_opt;

  app.add_option("--config", cli.config_path, "flat key = value config file");
  auto* seed_flag = app.add_option("--seed", seed_opt, "RNG seed");
  auto* jobs_flag = app.add_option("--jobs", jobs_opt, "worker threads");
  auto* out_flag = app.add_option("--out", out_opt, "output directory");
  auto* preset_flag = app.add_option(
      "--preset", preset_opt, "paper | paper_overlap_3 | paper_nonoverlap_3");

  auto* solve = app.add_subcommand("solve", "full implicit-Euler solve");
  auto* rbm = app.add_subcommand("rbm", "random-batch ensemble solve");
  auto* sweep = app.add_subcommand("sweep", "mesh/delta convergence sweep");
  auto* control = app.add_subcommand("control", "tracking control runs");
  auto* report = app.add_subcommand("report", "decomposition and bound report");
  for (CLI::App* sub : {solve, rbm, sweep, control, report}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  KeyValueConfig cfg;
  try {
    if (!cli.config_path.empty())
      cfg = KeyValueConfig::parse_file(cli.config_path);
    if (*seed_flag) cli.seed = seed_opt;
    if (*jobs_flag) cli.jobs = jobs_opt;
    if (*out_flag) cli.out = out_opt;
    if (*preset_flag) cli.preset = preset_opt;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve(cfg, cli);
    if (rbm->parsed()) return cmd_rbm(cfg, cli);
    if (sweep->parsed()) return cmd_sweep(cfg, cli);
    if (control->parsed()) return cmd_control(cfg, cli);
    if (report->parsed()) return cmd_report(cfg, cli);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    if (what.find("unknown config key") != std::string::npos ||
        what.find("config") != std::string::npos ||
        what.find("must be") != std::string::npos ||
        what.find("cannot open") != std::string::npos ||
        what.find("required") != std::string::npos ||
        what.find("invalid graph") != std::string::npos ||
        what.find("preset") != std::string::npos ||
        what.find("supports") != std::string::npos) {
      std::cerr << "config error: " << what << "\n";
      return kExitConfig;
    }
    std::cerr << "numerical failure: " << what << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
