#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "rbheat/decomposition_builders.hpp"
#include "rbheat/manufactured.hpp"

using namespace rbheat;

namespace {

FemSystem graph_system(int n) {
  return assemble(build_paper_graph(1.0), Mesh1D::for_edge_length(1.0, n));
}

}  // namespace

TEST_CASE("overlapping group blocks have the documented sizes") {
  const int n = 300;
  const FemSystem sys = graph_system(n);
  const Decomposition dec = build_overlapping(sys, paper_overlap_plan());
  CHECK(dec.part_support(0).size() == 4 * n + 1);
  CHECK(dec.part_support(1).size() == 5 * n + 1);
  CHECK(dec.part_support(2).size() == 3 * n + 1);
}

TEST_CASE("non-overlapping interface bookkeeping at n = 300") {
  const int n = 300;
  CHECK(split_interface_node(n) == 149);
  CHECK(n - split_interface_node(n) + 1 == 152);
  const FemSystem sys = graph_system(n);
  const Decomposition dec = build_nonoverlapping(sys, paper_nonoverlap_plan());
  // Group 1: three whole edges, the junction, and the first 149 nodes of the
  // split edge.
  CHECK(dec.part_support(0).size() == 3 * n + 1 + 149);
}

TEST_CASE("parts and force splits sum exactly for both styles") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int n : {4, 8}) {
    const FemSystem sys = graph_system(n);
    const ManufacturedCase mc = ManufacturedCase::paper_case(1.0);
    const TimeLoad load = mc.load(sys);
    const double scale = max_abs(sys.stiffness());
    for (const auto& plan : {paper_overlap_plan(), paper_nonoverlap_plan()}) {
      const Decomposition dec = build_decomposition(sys, plan);
      SpMat sum(sys.dimension(), sys.dimension());
      for (int m = 0; m < dec.num_parts(); ++m) sum += dec.part(m);
      CHECK(max_abs_diff(sum, sys.stiffness()) <= 1e-12 * scale);

      for (int trial = 0; trial < 20; ++trial) {
        const double t = uni(rng);
        const Vec full = load.at(t);
        Vec acc = Vec::Zero(sys.dimension());
        for (int m = 0; m < dec.num_parts(); ++m)
          acc += dec.force_weight(m).cwiseProduct(full);
        CHECK((acc - full).norm() <= 1e-12 * std::max(1.0, full.norm()));
      }
    }
  }
}

TEST_CASE("shared edge blocks are halved between their two groups") {
  const int n = 4;
  const FemSystem sys = graph_system(n);
  const Decomposition dec = build_overlapping(sys, paper_overlap_plan());
  const Mat r = Mat(sys.stiffness());
  const Mat r1 = Mat(dec.part(0));
  const Mat r2 = Mat(dec.part(1));
  const int off = sys.dofs().edge_offset.at(4);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      CHECK(r1(off + a, off + b) ==
            doctest::Approx(0.5 * r(off + a, off + b)).epsilon(1e-14));
      CHECK(r2(off + a, off + b) ==
            doctest::Approx(0.5 * r(off + a, off + b)).epsilon(1e-14));
    }
  // Junction row of v1 lives wholly in group 1.
  const int d1 = sys.dofs().vertex_dof.at(1);
  for (int c = 0; c < sys.dimension(); ++c) {
    CHECK(r1(d1, c) == doctest::Approx(r(d1, c)).epsilon(1e-14));
    CHECK(r2(d1, c) == 0.0);
  }
}

TEST_CASE("split edge interface diagonal carries 1/h from each side") {
  const int n = 4;
  const double h = 0.2;
  const FemSystem sys = graph_system(n);
  const Decomposition dec = build_nonoverlapping(sys, paper_nonoverlap_plan());
  const int nbar = split_interface_node(n);
  REQUIRE(nbar == 1);
  const int iface = sys.dofs().edge_offset.at(4) + (nbar - 1);
  const Mat r1 = Mat(dec.part(0));
  const Mat r2 = Mat(dec.part(1));
  CHECK(r1(iface, iface) == doctest::Approx(1.0 / h).epsilon(1e-14));
  CHECK(r2(iface, iface) == doctest::Approx(1.0 / h).epsilon(1e-14));
  // Couplings across the interface belong to one side each.
  CHECK(r1(iface, iface + 1) == 0.0);
  CHECK(r2(iface, iface + 1) == doctest::Approx(-1.0 / h).epsilon(1e-14));
  const Mat r = Mat(sys.stiffness());
  CHECK(r1(iface, iface) + r2(iface, iface) ==
        doctest::Approx(r(iface, iface)).epsilon(1e-14));
}

TEST_CASE("non-overlapping supports intersect only at interface nodes") {
  const int n = 8;
  const FemSystem sys = graph_system(n);
  const Decomposition dec = build_nonoverlapping(sys, paper_nonoverlap_plan());
  const int nbar = split_interface_node(n);
  const int iface_e4 = sys.dofs().edge_offset.at(4) + (nbar - 1);
  const int iface_e8 = sys.dofs().edge_offset.at(8) + (nbar - 1);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      std::set<int> sa(dec.part_support(a).begin(), dec.part_support(a).end());
      std::vector<int> inter;
      for (int d : dec.part_support(b))
        if (sa.count(d)) inter.push_back(d);
      for (int d : inter) CHECK((d == iface_e4 || d == iface_e8));
      CHECK(inter.size() <= 1);
    }
}

TEST_CASE("overlapping parts are symmetric and vanish outside their block") {
  const int n = 4;
  const FemSystem sys = graph_system(n);
  const Decomposition dec = build_overlapping(sys, paper_overlap_plan());
  for (int m = 0; m < 3; ++m) {
    const SpMat& p = dec.part(m);
    CHECK(max_abs_diff(p, SpMat(p.transpose())) == 0.0);
    std::set<int> inside(dec.part_support(m).begin(),
                         dec.part_support(m).end());
    for (int k = 0; k < p.outerSize(); ++k)
      for (SpMat::InnerIterator it(p, k); it; ++it)
        if (it.value() != 0.0) {
          CHECK(inside.count(static_cast<int>(it.row())) == 1);
          CHECK(inside.count(static_cast<int>(it.col())) == 1);
        }
  }
}

TEST_CASE("mass couplings between adjacent non-overlapping blocks are rank one") {
  const int n = 8;
  const double h = 1.0 / (n + 1);
  const FemSystem sys = graph_system(n);
  const Decomposition dec = build_nonoverlapping(sys, paper_nonoverlap_plan());
  const SpMat& e = sys.mass();

  // Couplings from part 1's support to the rest of the graph: exactly one
  // mass entry of value h/6 (the interface pair on the split edge).
  std::vector<int> active = dec.part_support(0);
  std::vector<char> in_active(sys.dimension(), 0);
  for (int d : active) in_active[d] = 1;
  int count = 0;
  for (int k = 0; k < e.outerSize(); ++k)
    for (SpMat::InnerIterator it(e, k); it; ++it)
      if (in_active[it.row()] && !in_active[it.col()]) {
        ++count;
        CHECK(it.value() == doctest::Approx(h / 6.0).epsilon(1e-14));
      }
  CHECK(count == 1);
}

TEST_CASE("plan validation errors") {
  const FemSystem sys = graph_system(4);

  GroupPlan missing = paper_overlap_plan();
  missing.groups[2].members.pop_back();  // drop e10
  CHECK_THROWS_WITH_AS(build_overlapping(sys, missing),
                       doctest::Contains("not covered"), std::invalid_argument);

  GroupPlan oneside = paper_overlap_plan();
  // e4 shared in group 1 only.
  oneside.groups[1].members.erase(oneside.groups[1].members.begin());
  CHECK_THROWS_WITH_AS(build_overlapping(sys, oneside),
                       doctest::Contains("only one group"),
                       std::invalid_argument);

  GroupPlan unowned = paper_overlap_plan();
  unowned.owners.erase(2);
  CHECK_THROWS_WITH_AS(build_overlapping(sys, unowned),
                       doctest::Contains("no owning group"),
                       std::invalid_argument);

  // Owner whose group does not contain all incident couplings.
  GroupPlan bad_owner = paper_overlap_plan();
  bad_owner.owners[1] = "g3";
  CHECK_THROWS_WITH_AS(build_overlapping(sys, bad_owner),
                       doctest::Contains("outside its owning group"),
                       std::invalid_argument);

  // Style mismatches.
  CHECK_THROWS(build_overlapping(sys, paper_nonoverlap_plan()));
  CHECK_THROWS(build_nonoverlapping(sys, paper_overlap_plan()));

  // Split needs at least 4 interior nodes.
  const FemSystem tiny = graph_system(2);
  CHECK_THROWS_WITH_AS(build_nonoverlapping(tiny, paper_nonoverlap_plan()),
                       doctest::Contains("at least 4"), std::invalid_argument);
}
