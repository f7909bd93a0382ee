#include <doctest.h>

#include "rbheat/metric_graph.hpp"

using namespace rbheat;

TEST_CASE("reference network has the documented shape") {
  const MetricGraph g = build_paper_graph(1.0);
  CHECK(g.edges().size() == 10);
  CHECK(g.interior_vertices().size() == 3);
  CHECK(g.boundary_vertices().size() == 8);
  CHECK(g.degree(1) == 4);
  CHECK(g.degree(2) == 5);
  CHECK(g.degree(3) == 3);
  for (VertexId v : g.boundary_vertices()) CHECK(g.degree(v) == 1);
  CHECK(g.validate().ok());
}

TEST_CASE("incidence signs at the first junction") {
  const MetricGraph g = build_paper_graph(1.0);
  CHECK(g.incidence_sign(1, 1) == +1);
  CHECK(g.incidence_sign(2, 1) == -1);
  CHECK(g.incidence_sign(3, 1) == -1);
  CHECK(g.incidence_sign(4, 1) == -1);
  CHECK(g.incidence_sign(4, 2) == +1);
  CHECK(g.incidence_sign(8, 2) == +1);
  CHECK(g.incidence_sign(8, 3) == -1);
  CHECK_THROWS(g.incidence_sign(1, 3));
}

TEST_CASE("length parameterization keeps the topology") {
  const MetricGraph g = build_paper_graph(2.0);
  CHECK(g.edges().size() == 10);
  for (const Edge& e : g.edges()) CHECK(e.length == 2.0);
  CHECK(g.validate().ok());
}

TEST_CASE("incidence is defined exactly twice per edge") {
  const MetricGraph g = build_paper_graph(1.0);
  int count = 0;
  for (const Edge& e : g.edges())
    for (const auto& [v, kind] : g.vertices()) {
      (void)kind;
      if (e.tail == v || e.head == v) ++count;
    }
  CHECK(count == 2 * static_cast<int>(g.edges().size()));
}

TEST_CASE("degree sums split between interior and boundary") {
  const MetricGraph g = build_paper_graph(1.0);
  int interior = 0, boundary = 0;
  for (VertexId v : g.interior_vertices()) interior += g.degree(v);
  for (VertexId v : g.boundary_vertices()) boundary += g.degree(v);
  CHECK(interior == 12);
  CHECK(boundary == 8);
}

TEST_CASE("construction is deterministic") {
  const MetricGraph a = build_paper_graph(1.0);
  const MetricGraph b = build_paper_graph(1.0);
  REQUIRE(a.edges().size() == b.edges().size());
  for (size_t i = 0; i < a.edges().size(); ++i) {
    CHECK(a.edges()[i].id == b.edges()[i].id);
    CHECK(a.edges()[i].tail == b.edges()[i].tail);
    CHECK(a.edges()[i].head == b.edges()[i].head);
  }
  for (VertexId v : a.interior_vertices())
    CHECK(a.junction_host(v) == b.junction_host(v));
}

TEST_CASE("junction hosts follow the reference layout") {
  const MetricGraph g = build_paper_graph(1.0);
  CHECK(g.junction_host(1) == 4);
  CHECK(g.junction_host(2) == 6);
  CHECK(g.junction_host(3) == 10);
}

TEST_CASE("validation flags an edge to an undeclared vertex") {
  MetricGraph g({{1, 1, 7, 1.0}},
                {{1, VertexKind::boundary}, {2, VertexKind::boundary}});
  const ValidationReport rep = g.validate();
  CHECK_FALSE(rep.ok());
  bool found = false;
  for (const auto& p : rep.problems)
    found = found || p.find("unknown vertex") != std::string::npos;
  CHECK(found);
}

TEST_CASE("validation flags a disconnected graph") {
  // Two disjoint triangles.
  std::vector<Edge> edges = {{1, 1, 2, 1.0}, {2, 2, 3, 1.0}, {3, 3, 1, 1.0},
                             {4, 4, 5, 1.0}, {5, 5, 6, 1.0}, {6, 6, 4, 1.0}};
  std::map<VertexId, VertexKind> vertices;
  for (int v = 1; v <= 6; ++v) vertices[v] = VertexKind::interior;
  MetricGraph g(std::move(edges), std::move(vertices));
  const ValidationReport rep = g.validate();
  CHECK_FALSE(rep.ok());
  bool found = false;
  for (const auto& p : rep.problems)
    found = found || p.find("not connected") != std::string::npos;
  CHECK(found);
}

TEST_CASE("validation flags bad lengths and boundary degrees") {
  std::vector<Edge> edges = {{1, 1, 2, 0.0}, {2, 2, 3, 1.0}, {3, 2, 4, 1.0}};
  std::map<VertexId, VertexKind> vertices = {{1, VertexKind::boundary},
                                             {2, VertexKind::boundary},
                                             {3, VertexKind::boundary},
                                             {4, VertexKind::boundary}};
  MetricGraph g(std::move(edges), std::move(vertices));
  const ValidationReport rep = g.validate();
  bool nonpositive = false, degree = false;
  for (const auto& p : rep.problems) {
    nonpositive = nonpositive || p.find("nonpositive length") != std::string::npos;
    degree = degree || p.find("has degree") != std::string::npos;
  }
  CHECK(nonpositive);
  CHECK(degree);
}

TEST_CASE("paper graph rejects nonpositive length") {
  CHECK_THROWS(build_paper_graph(0.0));
  CHECK_THROWS(build_paper_graph(-1.0));
}
