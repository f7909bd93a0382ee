#pragma once

#include <map>
#include <string>
#include <vector>

#include "rbheat/decomposition.hpp"
#include "rbheat/fem_system.hpp"
#include "rbheat/metric_graph.hpp"

namespace rbheat {

enum class DecompositionStyle { overlapping, non_overlapping };

std::string to_string(DecompositionStyle s);

/// Recipe turning edge groups into a stiffness/force decomposition.
/// Overlapping plans share whole edges between two groups (their diagonal
/// blocks halved); non-overlapping plans split an edge at one interface
/// node. Every interior vertex is owned by exactly one group, which takes
/// the junction row and column in full.
struct GroupPlan {
  DecompositionStyle style = DecompositionStyle::overlapping;
  std::vector<EdgeGroup> groups;
  std::map<VertexId, std::string> owners;
};

/// Interface node of a split edge: interior node index floor(N/2) - 1.
/// Requires N >= 4 so both halves keep at least one owned element.
int split_interface_node(int interior_nodes);

Decomposition build_overlapping(const FemSystem& system, const GroupPlan& plan);
Decomposition build_nonoverlapping(const FemSystem& system, const GroupPlan& plan);

/// Dispatch on plan.style.
Decomposition build_decomposition(const FemSystem& system, const GroupPlan& plan);

/// Three-group plans for the reference network: junction-centered clusters
/// {e1..e4}, {e4..e8}, {e8..e10} with uniform singleton probabilities.
GroupPlan paper_overlap_plan();
GroupPlan paper_nonoverlap_plan();

}  // namespace rbheat
