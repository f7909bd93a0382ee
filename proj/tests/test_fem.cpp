#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rbheat/fem_system.hpp"

using namespace rbheat;

namespace {

FemSystem interval_system(int n, double length = 1.0) {
  return assemble(build_interval_graph(length), Mesh1D::for_edge_length(length, n));
}

FemSystem graph_system(int n, double length = 1.0) {
  return assemble(build_paper_graph(length), Mesh1D::for_edge_length(length, n));
}

}  // namespace

TEST_CASE("interval matrices match the closed-form entries") {
  const double h = 1.0 / 3.0;
  const FemSystem sys = interval_system(2);
  REQUIRE(sys.dimension() == 2);
  const Mat e = Mat(sys.mass());
  const Mat r = Mat(sys.stiffness());
  CHECK(e(0, 0) == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
  CHECK(e(0, 1) == doctest::Approx(1.0 / 18.0).epsilon(1e-15));
  CHECK(e(1, 0) == doctest::Approx(1.0 / 18.0).epsilon(1e-15));
  CHECK(e(1, 1) == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
  CHECK(r(0, 0) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(r(0, 1) == doctest::Approx(-3.0).epsilon(1e-15));
  CHECK(r(1, 1) == doctest::Approx(6.0).epsilon(1e-15));
  (void)h;
}

TEST_CASE("assembled matrices agree with the quadrature oracle") {
  for (int n : {1, 2, 4}) {
    for (bool graph : {false, true}) {
      const FemSystem sys = graph ? graph_system(n) : interval_system(n);
      const Mat e_oracle = oracle::dense_mass_by_quadrature(sys);
      const Mat r_oracle = oracle::dense_stiffness_by_quadrature(sys);
      CHECK((Mat(sys.mass()) - e_oracle).cwiseAbs().maxCoeff() < 1e-13);
      CHECK((Mat(sys.stiffness()) - r_oracle).cwiseAbs().maxCoeff() < 1e-11);
    }
  }
}

TEST_CASE("graph dimensions and junction rows") {
  const int n = 4;
  const double h = 1.0 / (n + 1);
  const FemSystem sys = graph_system(n);
  CHECK(sys.dimension() == 10 * n + 3);

  const Mat r = Mat(sys.stiffness());
  const Mat e = Mat(sys.mass());
  const auto& vdof = sys.dofs().vertex_dof;
  const int deg[3] = {4, 5, 3};
  for (int v = 1; v <= 3; ++v) {
    const int d = vdof.at(v);
    CHECK(r(d, d) == doctest::Approx(deg[v - 1] / h).epsilon(1e-14));
    CHECK(e(d, d) == doctest::Approx(deg[v - 1] * h / 3.0).epsilon(1e-14));
    int offdiag = 0;
    for (int c = 0; c < sys.dimension(); ++c) {
      if (c == d || r(d, c) == 0.0) continue;
      ++offdiag;
      CHECK(r(d, c) == doctest::Approx(-1.0 / h).epsilon(1e-14));
      CHECK(e(d, c) == doctest::Approx(h / 6.0).epsilon(1e-14));
    }
    CHECK(offdiag == deg[v - 1]);
  }
}

TEST_CASE("large graph assembly reaches the documented size") {
  const FemSystem sys = graph_system(300);
  CHECK(sys.dimension() == 3003);
  CHECK(sys.stiffness().rows() == 3003);
  CHECK(sys.stiffness().cols() == 3003);
}

TEST_CASE("matrices are exactly symmetric and R rows sum to zero") {
  const FemSystem sys = graph_system(3);
  SpMat rt = SpMat(sys.stiffness().transpose());
  SpMat et = SpMat(sys.mass().transpose());
  CHECK(max_abs_diff(sys.stiffness(), rt) == 0.0);
  CHECK(max_abs_diff(sys.mass(), et) == 0.0);

  // Stiffness annihilates constants away from the boundary: rows whose hat
  // has no boundary neighbor sum to zero.
  const Mat r = Mat(sys.stiffness());
  for (const auto& [v, d] : sys.dofs().vertex_dof) {
    (void)v;
    CHECK(std::abs(r.row(d).sum()) < 1e-12);
  }
}

TEST_CASE("positive definiteness on small instances") {
  std::mt19937 rng(7);
  std::normal_distribution<double> dist;
  for (int n : {2, 5, 8}) {
    const FemSystem sys = interval_system(n);
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(sys.mass()));
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    for (int trial = 0; trial < 5; ++trial) {
      Vec x(sys.dimension());
      for (int i = 0; i < x.size(); ++i) x[i] = dist(rng);
      CHECK(x.dot(sys.stiffness() * x) >= -1e-12);
    }
  }
}

TEST_CASE("load assembly: zero, constant and linear sources") {
  const FemSystem sys = interval_system(2);
  const double h = 1.0 / 3.0;

  const Vec zero = sys.assemble_load(EdgeField::zero(), 0.0);
  CHECK(zero.norm() == 0.0);

  // Interior hat integral is h.
  const Vec ones = sys.assemble_load(EdgeField::constant(1.0), 0.0);
  CHECK(ones[0] == doctest::Approx(h).epsilon(1e-14));
  CHECK(ones[1] == doctest::Approx(h).epsilon(1e-14));

  // First moment of a hat: h x_j (exact for the 3-point rule).
  const Vec lin = sys.assemble_load(
      EdgeField::uniform([](double x, double) { return x; }), 0.0);
  CHECK(lin[0] == doctest::Approx(h * h).epsilon(1e-13));
  CHECK(lin[1] == doctest::Approx(h * 2.0 * h).epsilon(1e-13));
}

TEST_CASE("junction load sums contributions of all incident edge halves") {
  const int n = 2;
  const double h = 1.0 / (n + 1);
  const FemSystem sys = graph_system(n);
  const Vec f = sys.assemble_load(EdgeField::constant(1.0), 0.0);
  // A degree-d junction hat integrates to d * h / 2... each half-hat has
  // integral h/2.
  const auto& vdof = sys.dofs().vertex_dof;
  CHECK(f[vdof.at(1)] == doctest::Approx(4.0 * h / 2.0).epsilon(1e-13));
  CHECK(f[vdof.at(2)] == doctest::Approx(5.0 * h / 2.0).epsilon(1e-13));
  CHECK(f[vdof.at(3)] == doctest::Approx(3.0 * h / 2.0).epsilon(1e-13));
}

TEST_CASE("projection: zero, single hat, smooth data") {
  const FemSystem sys = interval_system(3);
  CHECK(sys.project_initial(EdgeField::zero()).norm() == 0.0);

  // A function already in the space projects to itself: phi_2 of the mesh.
  const double h = 0.25;
  const EdgeField hat = EdgeField::uniform([h](double x, double) {
    return std::max(0.0, 1.0 - std::abs(x - 2 * h) / h);
  });
  const Vec c = sys.project_initial(hat);
  CHECK(c[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c[2] == doctest::Approx(0.0).epsilon(1e-12));

  // Smooth data: coefficients close to nodal values, O(h^2).
  const Vec s = sys.project_initial(
      EdgeField::uniform([](double x, double) { return x * (1.0 - x); }));
  for (int j = 0; j < 3; ++j) {
    const double xj = (j + 1) * h;
    CHECK(std::abs(s[j] - xj * (1.0 - xj)) < h * h);
  }
}

TEST_CASE("coefficient norm is the L2 norm of the reconstruction") {
  const FemSystem sys = interval_system(4);
  const double h = 0.2;
  CHECK(sys.l2_norm(Vec::Zero(4)) == 0.0);

  Vec e2 = Vec::Zero(4);
  e2[1] = 1.0;
  CHECK(sys.l2_norm(e2) == doctest::Approx(std::sqrt(2.0 * h / 3.0)).epsilon(1e-14));

  std::mt19937 rng(3);
  std::normal_distribution<double> dist;
  Vec v(4);
  for (int i = 0; i < 4; ++i) v[i] = dist(rng);
  CHECK(sys.l2_norm(v) ==
        doctest::Approx(oracle::l2_norm_by_quadrature(sys, v)).epsilon(1e-13));
}

TEST_CASE("interval mass eigenvalue formula") {
  CHECK(lambda_min_interval_mass(1, 0.3) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(lambda_min_interval_mass(2, 0.1) == doctest::Approx(0.05).epsilon(1e-13));
  for (int n : {1, 2, 3, 8, 17}) {
    const double h = 1.0 / (n + 1);
    const FemSystem sys = interval_system(n);
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(sys.mass()));
    const double expect = es.eigenvalues().minCoeff();
    CHECK(lambda_min_interval_mass(n, h) ==
          doctest::Approx(expect).epsilon(1e-12));
    CHECK(lambda_min_interval_mass(n, h) > h / 3.0);
  }
}

TEST_CASE("reconstruction interpolates nodal values and vanishes at the boundary") {
  const FemSystem sys = interval_system(3);
  const double h = 0.25;
  Vec v(3);
  v << 1.0, -2.0, 0.5;
  CHECK(sys.reconstruct(Vec::Zero(3), 1, 0.4) == 0.0);
  for (int j = 1; j <= 3; ++j)
    CHECK(sys.reconstruct(v, 1, j * h) == doctest::Approx(v[j - 1]).epsilon(1e-14));
  CHECK(sys.reconstruct(v, 1, 0.0) == 0.0);
  CHECK(sys.reconstruct(v, 1, 1.0) == 0.0);
  CHECK(sys.reconstruct(v, 1, 0.125) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS(sys.reconstruct(v, 9, 0.5));
}

TEST_CASE("junction value is shared by incident edges in reconstruction") {
  const FemSystem sys = graph_system(2);
  Vec v = Vec::Zero(sys.dimension());
  const int d1 = sys.dofs().vertex_dof.at(1);
  v[d1] = 3.0;
  // v1 = head of e1 (x = 1) = tail of e2, e3, e4 (x = 0).
  CHECK(sys.reconstruct(v, 1, 1.0) == doctest::Approx(3.0));
  CHECK(sys.reconstruct(v, 2, 0.0) == doctest::Approx(3.0));
  CHECK(sys.reconstruct(v, 4, 0.0) == doctest::Approx(3.0));
}

TEST_CASE("load bound against the mass inverse") {
  // ||E^{-1} F|| <= 3 sqrt(L) ||f|| / h for f constant one.
  for (int n : {4, 8, 16}) {
    const FemSystem sys = interval_system(n);
    const double h = 1.0 / (n + 1);
    const Vec f = sys.assemble_load(EdgeField::constant(1.0), 0.0);
    const Vec c = sys.mass_factor().solve(f);
    CHECK(c.norm() <= 3.0 * 1.0 / h + 1e-12);
  }
}

TEST_CASE("mesh and graph lengths must agree") {
  CHECK_THROWS(assemble(build_interval_graph(2.0), Mesh1D(3, 0.25)));
}

TEST_CASE("matrix triple dump is sorted and 0-based") {
  const FemSystem sys = interval_system(2);
  std::ostringstream os;
  write_matrix_triples(os, sys.stiffness());
  std::istringstream in(os.str());
  int r, c;
  double v;
  int count = 0;
  int prev_r = -1, prev_c = -1;
  while (in >> r >> c >> v) {
    CHECK(r >= 0);
    CHECK(c >= 0);
    const bool ordered = r > prev_r || (r == prev_r && c > prev_c);
    CHECK(ordered);
    prev_r = r;
    prev_c = c;
    ++count;
  }
  CHECK(count == 4);
}
