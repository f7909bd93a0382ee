#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rbheat {

using VertexId = int;
using EdgeId = int;

enum class VertexKind { interior, boundary };

/// Portion of an edge contributed to a decomposition group.
/// `shared_whole` marks an edge whose stiffness block is halved between two
/// groups; `first_half`/`second_half` split an edge at a single interface
/// node (first = tail side, second = head side).
enum class Portion { whole, first_half, second_half, shared_whole };

std::string to_string(Portion p);
std::optional<Portion> portion_from_string(const std::string& s);

struct Edge {
  EdgeId id = 0;
  VertexId tail = 0;  // x = 0
  VertexId head = 0;  // x = length
  double length = 0.0;
};

struct GroupMember {
  EdgeId edge = 0;
  Portion portion = Portion::whole;
};

/// Named cluster of edges used to carve a stiffness decomposition out of the
/// assembled graph system.
struct EdgeGroup {
  std::string label;
  std::vector<GroupMember> members;

  const GroupMember* find(EdgeId e) const;
};

struct ValidationReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
  std::string text() const;
};

/// Oriented metric graph: edges are intervals [0, l_e] glued at vertices.
/// The incidence sign of an edge at a vertex is +1 at the head (x = l_e)
/// and -1 at the tail (x = 0). Immutable after construction.
class MetricGraph {
 public:
  MetricGraph() = default;
  MetricGraph(std::vector<Edge> edges, std::map<VertexId, VertexKind> vertices,
              std::map<VertexId, EdgeId> junction_hosts = {});

  const std::vector<Edge>& edges() const { return edges_; }
  const std::map<VertexId, VertexKind>& vertices() const { return vertices_; }

  const Edge& edge(EdgeId id) const;
  bool has_vertex(VertexId v) const { return vertices_.count(v) > 0; }
  bool is_interior(VertexId v) const;
  int degree(VertexId v) const;
  const std::vector<EdgeId>& incident_edges(VertexId v) const;

  /// +1 if v is the head of e, -1 if v is the tail. Throws if not incident.
  /// An edge looping head-to-tail on the same vertex never occurs here:
  /// boundary vertices have degree 1 and interior ones join distinct edges.
  int incidence_sign(EdgeId e, VertexId v) const;

  std::vector<VertexId> interior_vertices() const;
  std::vector<VertexId> boundary_vertices() const;

  /// Edge whose node-0 slot stores the junction coefficient of v in the
  /// degree-of-freedom layout. Explicit assignments win; the fallback is the
  /// lowest-id edge leaving v, then the lowest-id incident edge.
  EdgeId junction_host(VertexId v) const;

  /// Structural sanity: declared endpoints, positive lengths, connectivity,
  /// boundary degree 1, interior degree >= 2. Collects every violation.
  ValidationReport validate() const;

 private:
  std::vector<Edge> edges_;
  std::map<VertexId, VertexKind> vertices_;
  std::map<VertexId, EdgeId> junction_hosts_;
  std::map<VertexId, std::vector<EdgeId>> incident_;
};

/// The 10-edge, 11-vertex reference network: three junctions v1..v3 of
/// degrees 4, 5 and 3, eight boundary tips, all edges of length L.
MetricGraph build_paper_graph(double L);

/// Single edge of length L between two boundary vertices; its assembled
/// system reproduces the classical interval mass/stiffness matrices.
MetricGraph build_interval_graph(double L);

}  // namespace rbheat
