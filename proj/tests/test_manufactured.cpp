#include <doctest.h>

#include <cmath>
#include <random>

#include "rbheat/manufactured.hpp"
#include "rbheat/sweep.hpp"
#include "rbheat/time_integration.hpp"

using namespace rbheat;

namespace {

FemSystem interval_system(int n) {
  return assemble(build_interval_graph(1.0), Mesh1D::for_edge_length(1.0, n));
}

}  // namespace

TEST_CASE("manufactured data satisfies the heat equation pointwise") {
  const ManufacturedCase mc = ManufacturedCase::paper_case(1.0);
  const EdgeField y = mc.exact_field();
  const EdgeField f = mc.source();
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> ux(0.0, 1.0), ut(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const EdgeId e = 1 + static_cast<int>(rng() % 10);
    const double x = ux(rng), t = ut(rng);
    const double p = mc.coefficients.at(e);
    // dt y = -y, dxx y = -2 p e^{-t}; residual dt y - dxx y - f must vanish.
    const double resid =
        -y(e, x, t) + 2.0 * p * std::exp(-t) - f(e, x, t);
    CHECK(std::abs(resid) <= 1e-12);
  }
}

TEST_CASE("junction flux balance holds for the reference coefficients") {
  const MetricGraph g = build_paper_graph(1.0);
  const ManufacturedCase mc = ManufacturedCase::paper_case(1.0);
  const CompatibilityReport rep = check_compatibility(mc, g);
  CHECK(rep.continuity_ok);
  CHECK(rep.max_abs <= 1e-14);
  // Independent route: every incident edge contributes -p_e at a vertex.
  for (VertexId v : g.interior_vertices()) {
    double expect = 0.0;
    for (EdgeId e : g.incident_edges(v)) expect -= mc.coefficients.at(e);
    CHECK(rep.kirchhoff_sum.at(v) == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("perturbing one coefficient breaks the balance at its junctions") {
  const MetricGraph g = build_paper_graph(1.0);
  ManufacturedCase mc = ManufacturedCase::paper_case(1.0);
  mc.coefficients[8] = 3.0;
  const CompatibilityReport rep = check_compatibility(mc, g);
  CHECK(std::abs(rep.kirchhoff_sum.at(2)) > 0.5);
  CHECK(std::abs(rep.kirchhoff_sum.at(3)) > 0.5);
  CHECK(std::abs(rep.kirchhoff_sum.at(1)) <= 1e-14);
  CHECK_FALSE(rep.ok());
}

TEST_CASE("error of the zero trajectory is the solution norm") {
  const FemSystem sys = interval_system(5);
  const ManufacturedCase mc = ManufacturedCase::interval_case(1.0, 1.0);
  Trajectory zero;
  zero.grid = TimeGrid(1.0, 5);
  zero.states = Mat::Zero(sys.dimension(), 5);
  // max_t e^{-t} ||x(1-x)|| attained at t = 0; the squared norm is 1/30.
  CHECK(exact_error(sys, zero, mc) ==
        doctest::Approx(std::sqrt(1.0 / 30.0)).epsilon(1e-12));
}

TEST_CASE("interpolated exact solution leaves only interpolation error") {
  const int n = 8;
  const double h = 1.0 / (n + 1);
  const FemSystem sys = interval_system(n);
  const ManufacturedCase mc = ManufacturedCase::interval_case(1.0, 1.0);
  const TimeGrid grid(1.0, 3);
  Trajectory interp;
  interp.grid = grid;
  interp.states.resize(n, grid.points);
  for (int c = 0; c < grid.points; ++c) {
    const double t = grid.time(c);
    for (int j = 0; j < n; ++j) {
      const double x = (j + 1) * h;
      interp.states(j, c) = x * (1.0 - x) * std::exp(-t);
    }
  }
  const double err = exact_error(sys, interp, mc);
  // Nodal interpolation of x(1-x): elementwise error x(h-x), squared
  // integral h^5/30 per element, (n+1) elements.
  const double expect = std::sqrt((n + 1) * std::pow(h, 5) / 30.0);
  CHECK(err == doctest::Approx(expect).epsilon(1e-10));
  CHECK(err > 0.0);
}

TEST_CASE("separable and sampled error paths agree") {
  const FemSystem sys =
      assemble(build_paper_graph(1.0), Mesh1D::for_edge_length(1.0, 3));
  const ManufacturedCase mc = ManufacturedCase::paper_case(1.0);
  const ExactSolution fast = mc.solution(sys);
  const ExactSolution slow = ExactSolution::sampled(sys, mc.exact_field());
  std::mt19937 rng(5);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 5; ++trial) {
    Vec v(sys.dimension());
    for (int i = 0; i < v.size(); ++i) v[i] = dist(rng);
    const double t = 0.3 * trial;
    CHECK(fast.error(v, t) == doctest::Approx(slow.error(v, t)).epsilon(1e-12));
  }
}

TEST_CASE("trajectory distance vanishes only on itself") {
  const FemSystem sys = interval_system(4);
  std::mt19937 rng(2);
  std::normal_distribution<double> dist;
  Trajectory a;
  a.grid = TimeGrid(1.0, 4);
  a.states.resize(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a.states(i, j) = dist(rng);
  CHECK(trajectory_distance(sys, a, a) == 0.0);
  Trajectory b = a;
  b.states(2, 3) += 1e-3;
  CHECK(trajectory_distance(sys, a, b) > 0.0);
}

TEST_CASE("observed order fit recovers exact power laws") {
  std::vector<double> deltas = {1e-2, 1e-3, 1e-4, 1e-5};
  std::vector<double> lin, sqrt_law;
  for (double d : deltas) {
    lin.push_back(3.0 * d);
    sqrt_law.push_back(0.7 * std::sqrt(d));
  }
  CHECK(fit_observed_order(lin, deltas) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit_observed_order(sqrt_law, deltas) ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK_THROWS(fit_observed_order({1.0, 2.0}, {1.0, 2.0}));
  CHECK_THROWS(fit_observed_order({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0}));
}

TEST_CASE("reported rate matches the documented sweep magnitudes") {
  // The five-point error/delta table the sweep reproduces has slope near
  // 0.2 after dropping the coarsest point.
  std::vector<double> errs = {1.4249e-01, 9.4943e-02, 6.7732e-02, 3.9374e-02};
  std::vector<double> dels = {4.57e-04, 6.10e-05, 1.28e-05, 1.21e-06};
  const double slope = fit_observed_order(errs, dels);
  CHECK(slope > 0.1);
  CHECK(slope < 0.3);
}

TEST_CASE("interval scheme converges at second order in space") {
  const ManufacturedCase mc = ManufacturedCase::interval_case(1.0, 1.0);
  std::vector<double> errs, hs;
  for (int n : {7, 15, 31}) {  // h = 1/8, 1/16, 1/32
    const double h = 1.0 / (n + 1);
    const FemSystem sys = interval_system(n);
    // dt ~ h^2 keeps the first-order time error subdominant.
    const int steps = static_cast<int>(std::lround(1.0 / (h * h)));
    const TimeGrid grid(1.0, steps + 1);
    const Trajectory t =
        solve_full(sys, mc.load(sys), sys.project_initial(mc.initial()), grid);
    errs.push_back(exact_error(sys, t, mc));
    hs.push_back(h);
  }
  const double order =
      std::log(errs[0] / errs[2]) / std::log(hs[0] / hs[2]);
  CHECK(order >= 1.9);
}
