#include "amap/hierarchy.hpp"

#include <algorithm>
#include <functional>

#include "amap/error.hpp"

namespace amap {

std::optional<std::size_t> HierarchyGraph::find(const Toponym& name) const {
  auto it = std::find_if(nodes_.begin(), nodes_.end(),
                         [&](const Node& n) { return n.name == name; });
  if (it == nodes_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

void HierarchyGraph::set_node(const Toponym& name, int level) {
  if (level < 1) throw Error(ErrorCode::HierarchyLevelConflict, "levels start at 1");
  if (auto i = find(name)) {
    nodes_[*i].level = level;
  } else {
    nodes_.push_back({name, level});
  }
}

void HierarchyGraph::add_edge(const Toponym& parent, const Toponym& child) {
  if (!contains(parent)) nodes_.push_back({parent, 2});
  if (!contains(child)) nodes_.push_back({child, 1});
  if (!has_edge(parent, child)) edges_.push_back({parent, child});
}

void HierarchyGraph::raise(const Toponym& name, int at_least) {
  const std::size_t i = *find(name);
  if (nodes_[i].level >= at_least) return;
  nodes_[i].level = at_least;
  for (const Edge& e : edges_) {
    if (e.child == name) raise(e.parent, at_least + 1);
  }
}

bool HierarchyGraph::add_containment(const Toponym& parent, const Toponym& child) {
  if (parent == child) throw Error(ErrorCode::CyclicGraph, "'" + parent.str() + "' contains itself");
  if (has_edge(parent, child)) return false;
  const auto pl = level(parent);
  const auto cl = level(child);
  int parent_level = 0, child_level = 0;
  if (pl && cl) {
    parent_level = *pl;
    child_level = *cl;
  } else if (pl) {
    if (*pl <= 1) raise(parent, 2);
    parent_level = *level(parent);
    child_level = parent_level - 1;
  } else if (cl) {
    child_level = *cl;
    parent_level = *cl + 1;
  } else {
    child_level = 1;
    parent_level = 2;
  }
  if (child_level < 1 || child_level >= parent_level) {
    throw Error(ErrorCode::HierarchyLevelConflict,
                "'" + child.str() + "' cannot sit inside '" + parent.str() + "'");
  }
  if (!pl) nodes_.push_back({parent, parent_level});
  if (!cl) nodes_.push_back({child, child_level});
  edges_.push_back({parent, child});
  return true;
}

bool HierarchyGraph::contains(const Toponym& name) const { return find(name).has_value(); }

bool HierarchyGraph::has_edge(const Toponym& parent, const Toponym& child) const {
  return std::find(edges_.begin(), edges_.end(), Edge{parent, child}) != edges_.end();
}

std::optional<int> HierarchyGraph::level(const Toponym& name) const {
  if (auto i = find(name)) return nodes_[*i].level;
  return std::nullopt;
}

int HierarchyGraph::level_or_default(const Toponym& name) const { return level(name).value_or(1); }

std::vector<Toponym> HierarchyGraph::children(const Toponym& parent) const {
  std::vector<Toponym> out;
  for (const auto& e : edges_) {
    if (e.parent == parent) out.push_back(e.child);
  }
  return out;
}

std::vector<Toponym> HierarchyGraph::roots() const {
  std::vector<Toponym> out;
  for (const auto& n : nodes_) {
    const bool has_parent = std::any_of(edges_.begin(), edges_.end(),
                                        [&](const Edge& e) { return e.child == n.name; });
    if (!has_parent) out.push_back(n.name);
  }
  return out;
}

bool HierarchyGraph::is_acyclic() const {
  enum Mark : char { White, Grey, Black };
  std::vector<Mark> mark(nodes_.size(), White);
  std::function<bool(std::size_t)> visit = [&](std::size_t i) {
    mark[i] = Grey;
    for (const auto& e : edges_) {
      if (e.parent != nodes_[i].name) continue;
      const std::size_t j = *find(e.child);
      if (mark[j] == Grey) return false;
      if (mark[j] == White && !visit(j)) return false;
    }
    mark[i] = Black;
    return true;
  };
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (mark[i] == White && !visit(i)) return false;
  }
  return true;
}

void HierarchyGraph::validate() const {
  if (!is_acyclic()) throw Error(ErrorCode::CyclicGraph, "hierarchy contains a cycle");
  for (const auto& e : edges_) {
    if (*level(e.child) >= *level(e.parent)) {
      throw Error(ErrorCode::HierarchyLevelConflict,
                  "'" + e.child.str() + "' is not below '" + e.parent.str() + "'");
    }
  }
}

std::vector<RelationalClause> hierarchy_to_clauses(const HierarchyGraph& graph) {
  if (!graph.is_acyclic()) throw Error(ErrorCode::CyclicGraph, "hierarchy contains a cycle");
  std::vector<RelationalClause> out;
  out.reserve(graph.edges().size());
  std::vector<Toponym> expanded;
  std::function<void(const Toponym&)> walk = [&](const Toponym& node) {
    if (std::find(expanded.begin(), expanded.end(), node) != expanded.end()) return;
    expanded.push_back(node);
    for (const Toponym& child : graph.children(node)) {
      out.push_back(RelationalClause{"in", child, {node}, std::nullopt});
      walk(child);
    }
  };
  for (const Toponym& root : graph.roots()) walk(root);
  return out;
}

}  // namespace amap
