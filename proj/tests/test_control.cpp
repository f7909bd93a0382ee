#include <doctest.h>

#include <cmath>
#include <random>

#include "rbheat/decomposition_builders.hpp"
#include "rbheat/optimal_control.hpp"

using namespace rbheat;

namespace {

FemSystem interval_system(int n) {
  return assemble(build_interval_graph(1.0), Mesh1D::for_edge_length(1.0, n));
}

ControlProblem make_problem(const FemSystem& sys, const TimeGrid& grid,
                            const EdgeField& y0, const EdgeField& yd) {
  ControlProblem p;
  p.system = &sys;
  p.grid = grid;
  p.y0 = sys.project_initial(y0);
  p.yd = sys.project(yd, 0.0);
  return p;
}

ControlField random_control(const ControlProblem& p, std::mt19937& rng) {
  std::normal_distribution<double> dist;
  ControlField f(p.grid.points, Vec::Zero(p.system->dimension()));
  for (Vec& v : f)
    for (int i = 0; i < v.size(); ++i) v[i] = dist(rng);
  return f;
}

// Dense solve of the discrete first-order optimality system: dynamics,
// adjoint and stationarity stacked as one linear system. Independent of the
// descent path used by the solver.
ControlField kkt_oracle(const ControlProblem& p) {
  const FemSystem& sys = *p.system;
  const int n = sys.dimension();
  const int zeta = p.grid.points;
  const double dt = p.grid.dt();
  const Mat E = Mat(sys.mass());
  const Mat A = E + dt * Mat(sys.stiffness());
  auto theta = [&](int m) { return (m == 0 || m == zeta - 1) ? 0.5 : 1.0; };

  // Unknowns: F^0..F^{z-1}, Y^1..Y^{z-1}, L^1..L^{z-1}.
  const int nf = zeta * n, ny = (zeta - 1) * n;
  const int total = nf + 2 * ny;
  Mat K = Mat::Zero(total, total);
  Vec rhs = Vec::Zero(total);
  auto F = [&](int m) { return m * n; };
  auto Y = [&](int m) { return nf + (m - 1) * n; };
  auto L = [&](int m) { return nf + ny + (m - 1) * n; };

  int row = 0;
  // Stationarity: theta_m E F^m - L^m = 0 (L^0 absent).
  K.block(row, F(0), n, n) = theta(0) * E;
  row += n;
  for (int m = 1; m < zeta; ++m) {
    K.block(row, F(m), n, n) = theta(m) * E;
    K.block(row, L(m), n, n) = -Mat::Identity(n, n);
    row += n;
  }
  // Dynamics: A Y^{m} - E Y^{m-1} - dt F^{m} = 0, m = 1..zeta-1, Y^0 given.
  for (int m = 1; m < zeta; ++m) {
    K.block(row, Y(m), n, n) = A;
    if (m > 1) K.block(row, Y(m - 1), n, n) = -E;
    K.block(row, F(m), n, n) = -dt * Mat::Identity(n, n);
    if (m == 1) rhs.segment(row, n) = E * p.y0;
    row += n;
  }
  // Adjoint: A L^m - E L^{m+1} + dt theta_m E Y^m = dt theta_m E y_d.
  for (int m = 1; m < zeta; ++m) {
    K.block(row, L(m), n, n) = A;
    if (m < zeta - 1) K.block(row, L(m + 1), n, n) = -E;
    K.block(row, Y(m), n, n) = dt * theta(m) * E;
    rhs.segment(row, n) = dt * theta(m) * (E * p.yd);
    row += n;
  }
  REQUIRE(row == total);

  const Vec sol = K.fullPivLu().solve(rhs);
  ControlField control(zeta);
  for (int m = 0; m < zeta; ++m) control[m] = sol.segment(F(m), n);
  return control;
}

}  // namespace

TEST_CASE("functional: zero problem, pure target, quadratic scaling") {
  const FemSystem sys = interval_system(4);
  const TimeGrid grid(1.0, 9);
  const ControlProblem zero =
      make_problem(sys, grid, EdgeField::zero(), EdgeField::zero());
  CHECK(evaluate_functional(zero, zero_control(zero)) == 0.0);

  const ControlProblem tracking =
      make_problem(sys, grid, EdgeField::zero(), EdgeField::constant(0.7));
  const double j = evaluate_functional(tracking, zero_control(tracking));
  const double yd_sq = tracking.yd.dot(sys.mass() * tracking.yd);
  CHECK(j == doctest::Approx(0.5 * grid.horizon * yd_sq).epsilon(1e-12));

  std::mt19937 rng(21);
  ControlField f = random_control(zero, rng);
  ControlField f2(f.size());
  for (size_t i = 0; i < f.size(); ++i) f2[i] = 2.0 * f[i];
  const double j1 = evaluate_functional(zero, f);
  const double j2 = evaluate_functional(zero, f2);
  CHECK(j2 == doctest::Approx(4.0 * j1).epsilon(1e-11));
  CHECK(j1 > 0.0);
}

TEST_CASE("gradient vanishes at the trivial optimum") {
  const FemSystem sys = interval_system(3);
  const TimeGrid grid(1.0, 7);
  const ControlProblem p =
      make_problem(sys, grid, EdgeField::zero(), EdgeField::zero());
  const ControlField g = gradient(p, zero_control(p));
  CHECK(control_norm(p, g) == 0.0);
}

TEST_CASE("adjoint gradient matches central finite differences") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    const int n = 3 + trial;
    const FemSystem sys = interval_system(n);
    const TimeGrid grid(1.0, 6 + trial);
    const ControlProblem p = make_problem(
        sys, grid, EdgeField::uniform([](double x, double) { return x * (1 - x); }),
        EdgeField::constant(1.0));
    const ControlField f = random_control(p, rng);
    const ControlField g = gradient(p, f);
    const ControlField df = random_control(p, rng);

    const double eps = 1e-6;
    ControlField fp(f.size()), fm(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
      fp[i] = f[i] + eps * df[i];
      fm[i] = f[i] - eps * df[i];
    }
    const double fd =
        (evaluate_functional(p, fp) - evaluate_functional(p, fm)) / (2 * eps);
    const double pairing = control_inner(p, g, df);
    CHECK(pairing == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("descent converges to the dense optimality-system solution") {
  const FemSystem sys = interval_system(1);  // scalar state
  const TimeGrid grid(1.0, 6);
  const ControlProblem p =
      make_problem(sys, grid, EdgeField::uniform([](double x, double) {
                     return x * (1 - x);
                   }),
                   EdgeField::constant(1.0));

  const ControlIterate it = solve_deterministic(p, 1e-12, 20000);
  CHECK(it.converged);
  CHECK(it.grad_norm <= 1e-10);

  const ControlField expect = kkt_oracle(p);
  ControlField diff(expect.size());
  for (size_t i = 0; i < expect.size(); ++i) diff[i] = it.control[i] - expect[i];
  CHECK(control_norm(p, diff) <= 1e-9);

  // Accepted steps never increase the functional.
  for (size_t i = 1; i < it.history.size(); ++i)
    CHECK(it.history[i].functional <= it.history[i - 1].functional + 1e-15);
}

TEST_CASE("trivial problem converges in zero iterations") {
  const FemSystem sys = interval_system(2);
  const TimeGrid grid(1.0, 5);
  const ControlProblem p =
      make_problem(sys, grid, EdgeField::zero(), EdgeField::zero());
  const ControlIterate it = solve_deterministic(p, 1e-8, 100);
  CHECK(it.converged);
  CHECK(it.iterations == 0);
}

TEST_CASE("max_iter zero reports nonconvergence without failing") {
  const FemSystem sys = interval_system(2);
  const TimeGrid grid(1.0, 5);
  const ControlProblem p =
      make_problem(sys, grid, EdgeField::zero(), EdgeField::constant(1.0));
  const ControlIterate it = solve_deterministic(p, 1e-8, 0);
  CHECK_FALSE(it.converged);
  CHECK(it.iterations == 0);
}

TEST_CASE("gradient norm at convergence scales down with the tolerance") {
  const FemSystem sys = interval_system(3);
  const TimeGrid grid(1.0, 9);
  const ControlProblem p =
      make_problem(sys, grid, EdgeField::zero(), EdgeField::constant(1.0));
  std::vector<double> gnorms;
  for (double tol : {1e-4, 1e-6, 1e-8}) {
    const ControlIterate it = solve_deterministic(p, tol, 5000);
    REQUIRE(it.converged);
    gnorms.push_back(it.grad_norm);
  }
  CHECK(gnorms[1] < gnorms[0]);
  CHECK(gnorms[2] < gnorms[1]);
  CHECK(gnorms[2] <= 1e-8 * 1e3);
}

TEST_CASE("random control with the one-part law is the deterministic run") {
  const FemSystem sys =
      assemble(build_paper_graph(1.0), Mesh1D::for_edge_length(1.0, 4));
  const TimeGrid grid(1.0, 17);
  ControlProblem p;
  p.system = &sys;
  p.grid = grid;
  p.y0 = Vec::Zero(sys.dimension());
  p.yd = sys.project(EdgeField::constant(1.0), 0.0);

  const Decomposition one = Decomposition::single(sys.stiffness());
  const ControlIterate det = solve_deterministic(p, 1e-9, 2000);
  const ControlEnsemble rnd =
      solve_random(p, one, grid.dt(), 1e-9, 2000, 3, 77);
  REQUIRE(det.converged);
  REQUIRE(rnd.all_converged);
  ControlField diff(det.control.size());
  for (size_t i = 0; i < diff.size(); ++i)
    diff[i] = det.control[i] - rnd.mean_control[i];
  CHECK(control_norm(p, diff) <= 1e-12);

  // Fixed seeds reproduce bitwise.
  const ControlEnsemble again =
      solve_random(p, one, grid.dt(), 1e-9, 2000, 3, 77);
  for (size_t i = 0; i < rnd.mean_control.size(); ++i)
    CHECK((rnd.mean_control[i] - again.mean_control[i]).norm() == 0.0);
}
