#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "amap/grammar.hpp"

namespace amap {

// Directed containment graph (parent -> child) with a level per node:
// 1 = rooms, 2 = themed areas / buildings, 3 = site.
//
// Mutation keeps insertion order so traversals are deterministic. add_edge
// does not enforce acyclicity; validate() and hierarchy_to_clauses() do.
class HierarchyGraph {
 public:
  struct Node {
    Toponym name;
    int level = 1;
  };
  struct Edge {
    Toponym parent;
    Toponym child;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  // Adds or updates a node. Level must be positive.
  void set_node(const Toponym& name, int level);
  void add_edge(const Toponym& parent, const Toponym& child);

  // Adds a containment edge learnt from a clause. Missing nodes get levels
  // inferred from the other endpoint. Throws HierarchyLevelConflict when both
  // exist and the child is not below the parent, CyclicGraph on a cycle. A
  // level-1 parent gaining a new child is lifted, along with its ancestors.
  // Returns false when the edge already existed.
  bool add_containment(const Toponym& parent, const Toponym& child);

  bool contains(const Toponym& name) const;
  bool has_edge(const Toponym& parent, const Toponym& child) const;
  std::optional<int> level(const Toponym& name) const;
  // Level used for scaling-factor lookup; places not in the graph are rooms.
  int level_or_default(const Toponym& name) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::vector<Toponym> children(const Toponym& parent) const;
  std::vector<Toponym> roots() const;

  bool is_acyclic() const;
  // Throws CyclicGraph or HierarchyLevelConflict.
  void validate() const;

 private:
  std::optional<std::size_t> find(const Toponym& name) const;
  void raise(const Toponym& name, int at_least);

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
};

}  // namespace amap
