#include "rbheat/graph_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rbheat {

namespace {

using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::runtime_error("unknown key '" + it.key() + "' in " + where);
}

std::vector<EdgeGroup> parse_groups(const json& doc) {
  std::vector<EdgeGroup> groups;
  if (!doc.contains("groups")) return groups;
  for (const json& g : doc.at("groups")) {
    check_keys(g, {"label", "members"}, "group entry");
    EdgeGroup group;
    group.label = g.at("label").get<std::string>();
    for (const json& m : g.at("members")) {
      check_keys(m, {"edge", "portion"}, "group member");
      GroupMember member;
      member.edge = m.at("edge").get<int>();
      const std::string p = m.at("portion").get<std::string>();
      const auto parsed = portion_from_string(p);
      if (!parsed)
        throw std::runtime_error("unknown portion '" + p + "' in group " +
                                 group.label);
      member.portion = *parsed;
      group.members.push_back(member);
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

}  // namespace

GraphFile parse_graph_text(const std::string& text) {
  const json doc = json::parse(text);
  check_keys(doc, {"vertices", "edges", "groups"}, "graph document");

  std::map<VertexId, VertexKind> vertices;
  for (const json& v : doc.at("vertices")) {
    check_keys(v, {"id", "kind"}, "vertex entry");
    const std::string kind = v.at("kind").get<std::string>();
    if (kind != "interior" && kind != "boundary")
      throw std::runtime_error("vertex kind must be interior or boundary");
    vertices[v.at("id").get<int>()] =
        kind == "interior" ? VertexKind::interior : VertexKind::boundary;
  }

  std::vector<Edge> edges;
  for (const json& e : doc.at("edges")) {
    check_keys(e, {"id", "tail", "head", "length"}, "edge entry");
    edges.push_back(Edge{e.at("id").get<int>(), e.at("tail").get<int>(),
                         e.at("head").get<int>(), e.at("length").get<double>()});
  }

  GraphFile out{MetricGraph(std::move(edges), std::move(vertices)),
                parse_groups(doc)};
  return out;
}

GraphFile load_graph_file(const std::string& path) {
  return parse_graph_text(slurp(path));
}

GroupPlan parse_plan_text(const std::string& text) {
  const json doc = json::parse(text);
  check_keys(doc, {"vertices", "edges", "groups", "style", "owners"},
             "plan document");
  GroupPlan plan;
  const std::string style = doc.at("style").get<std::string>();
  if (style == "overlapping")
    plan.style = DecompositionStyle::overlapping;
  else if (style == "non_overlapping")
    plan.style = DecompositionStyle::non_overlapping;
  else
    throw std::runtime_error("plan style must be overlapping or non_overlapping");
  plan.groups = parse_groups(doc);
  if (plan.groups.empty()) throw std::runtime_error("plan has no groups");
  for (auto it = doc.at("owners").begin(); it != doc.at("owners").end(); ++it)
    plan.owners[std::stoi(it.key())] = it.value().get<std::string>();
  return plan;
}

GroupPlan load_plan_file(const std::string& path) {
  return parse_plan_text(slurp(path));
}

}  // namespace rbheat
