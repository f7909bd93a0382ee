#include "rbheat/decomposition_builders.hpp"

#include <algorithm>
#include <stdexcept>

namespace rbheat {

namespace {

struct EdgeAssignment {
  // Group indices by role; -1 when absent.
  int whole = -1;
  int shared_a = -1, shared_b = -1;  // overlapping partners
  int first_half = -1, second_half = -1;
};

std::map<EdgeId, EdgeAssignment> scan_groups(const MetricGraph& graph,
                                             const GroupPlan& plan) {
  std::map<EdgeId, EdgeAssignment> out;
  for (const Edge& e : graph.edges()) out[e.id] = {};
  for (size_t g = 0; g < plan.groups.size(); ++g) {
    for (const GroupMember& m : plan.groups[g].members) {
      auto it = out.find(m.edge);
      if (it == out.end())
        throw std::invalid_argument("plan references unknown edge " +
                                    std::to_string(m.edge));
      EdgeAssignment& a = it->second;
      const int gi = static_cast<int>(g);
      switch (m.portion) {
        case Portion::whole:
          if (a.whole >= 0)
            throw std::invalid_argument("edge " + std::to_string(m.edge) +
                                        " listed whole in two groups");
          a.whole = gi;
          break;
        case Portion::shared_whole:
          if (a.shared_a < 0)
            a.shared_a = gi;
          else if (a.shared_b < 0)
            a.shared_b = gi;
          else
            throw std::invalid_argument("shared edge " + std::to_string(m.edge) +
                                        " appears in more than two groups");
          break;
        case Portion::first_half:
          if (a.first_half >= 0)
            throw std::invalid_argument("first half of edge " +
                                        std::to_string(m.edge) +
                                        " listed twice");
          a.first_half = gi;
          break;
        case Portion::second_half:
          if (a.second_half >= 0)
            throw std::invalid_argument("second half of edge " +
                                        std::to_string(m.edge) +
                                        " listed twice");
          a.second_half = gi;
          break;
      }
    }
  }
  return out;
}

std::map<VertexId, int> resolve_owners(const MetricGraph& graph,
                                       const GroupPlan& plan) {
  std::map<std::string, int> by_label;
  for (size_t g = 0; g < plan.groups.size(); ++g) {
    if (!by_label.emplace(plan.groups[g].label, static_cast<int>(g)).second)
      throw std::invalid_argument("duplicate group label " +
                                  plan.groups[g].label);
  }
  std::map<VertexId, int> owners;
  for (VertexId v : graph.interior_vertices()) {
    auto it = plan.owners.find(v);
    if (it == plan.owners.end())
      throw std::invalid_argument("interior vertex " + std::to_string(v) +
                                  " has no owning group");
    auto lbl = by_label.find(it->second);
    if (lbl == by_label.end())
      throw std::invalid_argument("owner of vertex " + std::to_string(v) +
                                  " names unknown group " + it->second);
    owners[v] = lbl->second;
  }
  return owners;
}

// The owner of a junction takes the whole junction row; every coupling in
// that row must stay inside the owner's block, so each incident edge portion
// adjacent to the vertex has to belong to the owner group.
void check_junction_locality(const MetricGraph& graph,
                             const std::map<EdgeId, EdgeAssignment>& assign,
                             const std::map<VertexId, int>& owners,
                             DecompositionStyle style) {
  for (const auto& [v, owner] : owners) {
    for (EdgeId id : graph.incident_edges(v)) {
      const EdgeAssignment& a = assign.at(id);
      bool ok = false;
      if (a.whole >= 0) ok = a.whole == owner;
      if (style == DecompositionStyle::overlapping && a.shared_a >= 0)
        ok = a.shared_a == owner || a.shared_b == owner;
      if (style == DecompositionStyle::non_overlapping &&
          (a.first_half >= 0 || a.second_half >= 0)) {
        const bool at_tail = graph.edge(id).tail == v;
        ok = at_tail ? a.first_half == owner : a.second_half == owner;
      }
      if (!ok)
        throw std::invalid_argument(
            "junction " + std::to_string(v) +
            " couples into edge " + std::to_string(id) +
            " outside its owning group; reassign ownership or the plan");
    }
  }
}

Decomposition build_from_rules(const FemSystem& system, const GroupPlan& plan) {
  const MetricGraph& graph = system.graph();
  const Mesh1D& mesh = system.mesh();
  const DofMap& dofs = system.dofs();
  const int nn = mesh.interior_nodes;
  const double h = mesh.step;
  const int n = dofs.size;
  const int n_groups = static_cast<int>(plan.groups.size());
  const bool overlap = plan.style == DecompositionStyle::overlapping;

  if (n_groups == 0) throw std::invalid_argument("plan has no groups");

  auto assign = scan_groups(graph, plan);
  for (const auto& [id, a] : assign) {
    const bool covered =
        a.whole >= 0 || (a.shared_a >= 0 && a.shared_b >= 0) ||
        (a.first_half >= 0 && a.second_half >= 0);
    if (overlap) {
      if (a.first_half >= 0 || a.second_half >= 0)
        throw std::invalid_argument("overlapping plan cannot split edge " +
                                    std::to_string(id));
      if (a.shared_a >= 0 && a.shared_b < 0)
        throw std::invalid_argument("shared edge " + std::to_string(id) +
                                    " appears in only one group");
    } else {
      if (a.shared_a >= 0)
        throw std::invalid_argument(
            "non-overlapping plan cannot share whole edge " +
            std::to_string(id));
      if ((a.first_half >= 0) != (a.second_half >= 0))
        throw std::invalid_argument("edge " + std::to_string(id) +
                                    " is split on one side only");
      if (a.first_half >= 0 && a.first_half == a.second_half)
        throw std::invalid_argument("both halves of edge " +
                                    std::to_string(id) +
                                    " fall in the same group");
    }
    if (!covered)
      throw std::invalid_argument("edge " + std::to_string(id) +
                                  " is not covered by the plan");
    if (a.whole >= 0 && (a.shared_a >= 0 || a.first_half >= 0))
      throw std::invalid_argument("edge " + std::to_string(id) +
                                  " is both whole and split/shared");
  }
  const auto owners = resolve_owners(graph, plan);
  check_junction_locality(graph, assign, owners, plan.style);

  int nbar = 0;
  if (!overlap) {
    bool any_split = false;
    for (const auto& [id, a] : assign) any_split = any_split || a.first_half >= 0;
    if (any_split) {
      nbar = split_interface_node(nn);
      if (nbar < 1)
        throw std::invalid_argument(
            "non-overlapping split needs at least 4 interior nodes per edge");
    }
  }

  // Element-by-element distribution of stiffness contributions; mirrors the
  // assembly loop so that the parts sum back to R exactly.
  std::vector<std::vector<Eigen::Triplet<double>>> triplets(n_groups);
  const double r_diag = 1.0 / h, r_off = -1.0 / h;
  for (const Edge& e : graph.edges()) {
    const EdgeAssignment& a = assign.at(e.id);
    for (int k = 0; k <= nn; ++k) {
      const int dof[2] = {dofs.node_dof(graph, e, k),
                          dofs.node_dof(graph, e, k + 1)};
      const bool junction[2] = {k == 0 && graph.is_interior(e.tail),
                                k == nn && graph.is_interior(e.head)};
      const double rl[2][2] = {{r_diag, r_off}, {r_off, r_diag}};
      for (int p = 0; p < 2; ++p) {
        if (dof[p] < 0) continue;
        for (int q = 0; q < 2; ++q) {
          if (dof[q] < 0) continue;
          const double val = rl[p][q];
          if (junction[p] || junction[q]) {
            const VertexId v = junction[p] ? (p == 0 ? e.tail : e.head)
                                           : (q == 0 ? e.tail : e.head);
            triplets[owners.at(v)].emplace_back(dof[p], dof[q], val);
          } else if (a.whole >= 0) {
            triplets[a.whole].emplace_back(dof[p], dof[q], val);
          } else if (overlap) {
            triplets[a.shared_a].emplace_back(dof[p], dof[q], 0.5 * val);
            triplets[a.shared_b].emplace_back(dof[p], dof[q], 0.5 * val);
          } else {
            // Split edge: whole elements change hands at the interface node.
            const int g = (k < nbar) ? a.first_half : a.second_half;
            triplets[g].emplace_back(dof[p], dof[q], val);
          }
        }
      }
    }
  }

  std::vector<SpMat> parts(n_groups, SpMat(n, n));
  for (int g = 0; g < n_groups; ++g) {
    parts[g].setFromTriplets(triplets[g].begin(), triplets[g].end());
    parts[g].prune(0.0);
    parts[g].makeCompressed();
  }

  // Force weights: junction loads to the owner, shared-edge loads halved,
  // split-edge loads restricted to each side with the interface entry split
  // evenly.
  std::vector<Vec> weights(n_groups, Vec::Zero(n));
  for (const auto& [v, g] : owners) weights[g][dofs.vertex_dof.at(v)] = 1.0;
  for (const Edge& e : graph.edges()) {
    const EdgeAssignment& a = assign.at(e.id);
    const int off = dofs.edge_offset.at(e.id);
    for (int j = 1; j <= nn; ++j) {
      const int dof = off + (j - 1);
      if (a.whole >= 0) {
        weights[a.whole][dof] = 1.0;
      } else if (overlap) {
        weights[a.shared_a][dof] = 0.5;
        weights[a.shared_b][dof] = 0.5;
      } else if (j < nbar) {
        weights[a.first_half][dof] = 1.0;
      } else if (j == nbar) {
        weights[a.first_half][dof] = 0.5;
        weights[a.second_half][dof] = 0.5;
      } else {
        weights[a.second_half][dof] = 1.0;
      }
    }
  }

  // Uniform law over singleton subsets, one per group.
  std::vector<Subset> subsets;
  for (int g = 0; g < n_groups; ++g)
    subsets.push_back(Subset{{g}, 1.0 / n_groups});

  return Decomposition::make(system.stiffness(), std::move(parts),
                             std::move(weights), std::move(subsets));
}

GroupPlan paper_plan(Portion e4_e8_portion_first, Portion e4_e8_portion_second,
                     DecompositionStyle style) {
  GroupPlan plan;
  plan.style = style;
  EdgeGroup g1{"g1",
               {{1, Portion::whole},
                {2, Portion::whole},
                {3, Portion::whole},
                {4, e4_e8_portion_first}}};
  EdgeGroup g2{"g2",
               {{4, e4_e8_portion_second},
                {5, Portion::whole},
                {6, Portion::whole},
                {7, Portion::whole},
                {8, e4_e8_portion_second}}};
  EdgeGroup g3{"g3",
               {{8, e4_e8_portion_first},
                {9, Portion::whole},
                {10, Portion::whole}}};
  plan.groups = {g1, g2, g3};
  plan.owners = {{1, "g1"}, {2, "g2"}, {3, "g3"}};
  return plan;
}

}  // namespace

std::string to_string(DecompositionStyle s) {
  return s == DecompositionStyle::overlapping ? "overlapping"
                                              : "non_overlapping";
}

int split_interface_node(int interior_nodes) { return interior_nodes / 2 - 1; }

Decomposition build_overlapping(const FemSystem& system, const GroupPlan& plan) {
  if (plan.style != DecompositionStyle::overlapping)
    throw std::invalid_argument("plan style is not overlapping");
  return build_from_rules(system, plan);
}

Decomposition build_nonoverlapping(const FemSystem& system,
                                   const GroupPlan& plan) {
  if (plan.style != DecompositionStyle::non_overlapping)
    throw std::invalid_argument("plan style is not non_overlapping");
  return build_from_rules(system, plan);
}

Decomposition build_decomposition(const FemSystem& system,
                                  const GroupPlan& plan) {
  return build_from_rules(system, plan);
}

GroupPlan paper_overlap_plan() {
  return paper_plan(Portion::shared_whole, Portion::shared_whole,
                    DecompositionStyle::overlapping);
}

GroupPlan paper_nonoverlap_plan() {
  return paper_plan(Portion::first_half, Portion::second_half,
                    DecompositionStyle::non_overlapping);
}

}  // namespace rbheat
