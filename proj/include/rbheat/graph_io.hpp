#pragma once

#include <string>
#include <vector>

#include "rbheat/decomposition_builders.hpp"
#include "rbheat/metric_graph.hpp"

namespace rbheat {

/// Parsed graph description: topology plus any named edge groups.
struct GraphFile {
  MetricGraph graph;
  std::vector<EdgeGroup> groups;
};

/// JSON document with `vertices` (id, kind), `edges` (id, tail, head,
/// length) and optional `groups` (label, members of {edge, portion}).
/// Portions: "whole", "first_half", "second_half", "shared". Unknown keys
/// are errors.
GraphFile parse_graph_text(const std::string& text);
GraphFile load_graph_file(const std::string& path);

/// Plan document: the graph description's `groups` section plus `style`
/// ("overlapping" | "non_overlapping") and an `owners` map from interior
/// vertex id to group label.
GroupPlan parse_plan_text(const std::string& text);
GroupPlan load_plan_file(const std::string& path);

}  // namespace rbheat
