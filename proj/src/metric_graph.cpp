#include "rbheat/metric_graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rbheat {

std::string to_string(Portion p) {
  switch (p) {
    case Portion::whole: return "whole";
    case Portion::first_half: return "first_half";
    case Portion::second_half: return "second_half";
    case Portion::shared_whole: return "shared";
  }
  return "?";
}

std::optional<Portion> portion_from_string(const std::string& s) {
  if (s == "whole") return Portion::whole;
  if (s == "first_half") return Portion::first_half;
  if (s == "second_half") return Portion::second_half;
  if (s == "shared") return Portion::shared_whole;
  return std::nullopt;
}

const GroupMember* EdgeGroup::find(EdgeId e) const {
  for (const auto& m : members)
    if (m.edge == e) return &m;
  return nullptr;
}

std::string ValidationReport::text() const {
  std::ostringstream os;
  for (const auto& p : problems) os << p << "\n";
  return os.str();
}

MetricGraph::MetricGraph(std::vector<Edge> edges,
                         std::map<VertexId, VertexKind> vertices,
                         std::map<VertexId, EdgeId> junction_hosts)
    : edges_(std::move(edges)),
      vertices_(std::move(vertices)),
      junction_hosts_(std::move(junction_hosts)) {
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return a.id < b.id; });
  for (const auto& e : edges_) {
    incident_[e.tail].push_back(e.id);
    if (e.head != e.tail) incident_[e.head].push_back(e.id);
  }
}

const Edge& MetricGraph::edge(EdgeId id) const {
  for (const auto& e : edges_)
    if (e.id == id) return e;
  throw std::out_of_range("unknown edge id " + std::to_string(id));
}

bool MetricGraph::is_interior(VertexId v) const {
  auto it = vertices_.find(v);
  return it != vertices_.end() && it->second == VertexKind::interior;
}

int MetricGraph::degree(VertexId v) const {
  auto it = incident_.find(v);
  return it == incident_.end() ? 0 : static_cast<int>(it->second.size());
}

const std::vector<EdgeId>& MetricGraph::incident_edges(VertexId v) const {
  static const std::vector<EdgeId> none;
  auto it = incident_.find(v);
  return it == incident_.end() ? none : it->second;
}

int MetricGraph::incidence_sign(EdgeId e, VertexId v) const {
  const Edge& ed = edge(e);
  if (ed.head == v) return +1;
  if (ed.tail == v) return -1;
  throw std::invalid_argument("edge " + std::to_string(e) +
                              " is not incident to vertex " + std::to_string(v));
}

std::vector<VertexId> MetricGraph::interior_vertices() const {
  std::vector<VertexId> out;
  for (const auto& [v, k] : vertices_)
    if (k == VertexKind::interior) out.push_back(v);
  return out;
}

std::vector<VertexId> MetricGraph::boundary_vertices() const {
  std::vector<VertexId> out;
  for (const auto& [v, k] : vertices_)
    if (k == VertexKind::boundary) out.push_back(v);
  return out;
}

EdgeId MetricGraph::junction_host(VertexId v) const {
  auto it = junction_hosts_.find(v);
  if (it != junction_hosts_.end()) return it->second;
  EdgeId best = 0;
  for (const auto& e : edges_) {
    if (e.tail == v) return e.id;  // edges sorted by id
    if (e.head == v && best == 0) best = e.id;
  }
  if (best == 0) throw std::invalid_argument("vertex has no incident edge");
  return best;
}

ValidationReport MetricGraph::validate() const {
  ValidationReport rep;
  auto add = [&rep](const std::string& s) { rep.problems.push_back(s); };

  if (edges_.empty()) add("graph has no edges");

  std::set<EdgeId> seen_ids;
  for (const auto& e : edges_) {
    if (!seen_ids.insert(e.id).second)
      add("duplicate edge id " + std::to_string(e.id));
    if (!(e.length > 0.0))
      add("edge " + std::to_string(e.id) + " has nonpositive length");
    for (VertexId v : {e.tail, e.head})
      if (!has_vertex(v))
        add("edge " + std::to_string(e.id) + " references unknown vertex " +
            std::to_string(v));
  }

  for (const auto& [v, kind] : vertices_) {
    const int d = degree(v);
    if (d == 0) add("vertex " + std::to_string(v) + " is isolated");
    if (kind == VertexKind::boundary && d > 1)
      add("boundary vertex " + std::to_string(v) + " has degree " +
          std::to_string(d));
    if (kind == VertexKind::interior && d < 2)
      add("interior vertex " + std::to_string(v) + " has degree " +
          std::to_string(d));
  }

  for (const auto& [v, e] : junction_hosts_) {
    if (!has_vertex(v)) {
      add("junction host entry names unknown vertex " + std::to_string(v));
      continue;
    }
    bool incident = false;
    for (EdgeId id : incident_edges(v)) incident = incident || id == e;
    if (!incident)
      add("junction host edge " + std::to_string(e) +
          " is not incident to vertex " + std::to_string(v));
  }

  // Connectivity over the undirected skeleton.
  if (!vertices_.empty() && !edges_.empty()) {
    std::set<VertexId> reached;
    std::queue<VertexId> frontier;
    frontier.push(vertices_.begin()->first);
    reached.insert(vertices_.begin()->first);
    while (!frontier.empty()) {
      VertexId v = frontier.front();
      frontier.pop();
      for (EdgeId id : incident_edges(v)) {
        const Edge& e = edge(id);
        for (VertexId w : {e.tail, e.head}) {
          if (reached.insert(w).second) frontier.push(w);
        }
      }
    }
    if (reached.size() != vertices_.size()) add("graph is not connected");
  }

  return rep;
}

MetricGraph build_paper_graph(double L) {
  if (!(L > 0.0)) throw std::invalid_argument("edge length must be positive");
  // Junctions: v1 = head(e1) = tail(e2,e3,e4); v2 = head(e4,e8) = tail(e5,e6,e7);
  // v3 = head(e9) = tail(e8,e10). Boundary tips v4..v11 in edge order.
  std::vector<Edge> edges = {
      {1, 4, 1, L},  {2, 1, 5, L},  {3, 1, 6, L},  {4, 1, 2, L},
      {5, 2, 7, L},  {6, 2, 8, L},  {7, 2, 9, L},  {8, 3, 2, L},
      {9, 10, 3, L}, {10, 3, 11, L}};
  std::map<VertexId, VertexKind> vertices;
  for (VertexId v = 1; v <= 3; ++v) vertices[v] = VertexKind::interior;
  for (VertexId v = 4; v <= 11; ++v) vertices[v] = VertexKind::boundary;
  std::map<VertexId, EdgeId> hosts = {{1, 4}, {2, 6}, {3, 10}};
  return MetricGraph(std::move(edges), std::move(vertices), std::move(hosts));
}

MetricGraph build_interval_graph(double L) {
  if (!(L > 0.0)) throw std::invalid_argument("edge length must be positive");
  std::vector<Edge> edges = {{1, 1, 2, L}};
  std::map<VertexId, VertexKind> vertices = {{1, VertexKind::boundary},
                                             {2, VertexKind::boundary}};
  return MetricGraph(std::move(edges), std::move(vertices));
}

}  // namespace rbheat
