#ifndef TPD_TREE_ENV_HPP
#define TPD_TREE_ENV_HPP

#include <compare>
#include <cstdint>
#include <vector>

#include "tpd/rational.hpp"

namespace tpd {

using VertexId = std::int64_t;

/* Full delta-ary rooted tree of depth d with unit-length edges, heap-numbered:
 * root = 0, the j-th child (0-indexed) of vertex i is i*delta + j + 1, so
 * "leftmost" always means smallest id.  The defended perimeter is the set of
 * depth-rho vertices; intruders enter at the leaves. */
class Environment {
 public:
  Environment(int depth, int branching, int perimeter_depth);

  int depth() const { return d_; }
  int branching() const { return delta_; }
  int perimeter_depth() const { return rho_; }

  std::int64_t vertex_count() const { return vertex_count_; }
  std::int64_t level_first(int level) const;  // id of the leftmost depth-`level` vertex
  std::int64_t level_size(int level) const;   // delta^level

  bool valid_vertex(VertexId v) const { return v >= 0 && v < vertex_count_; }
  int vertex_depth(VertexId v) const;
  VertexId parent(VertexId v) const;
  VertexId child(VertexId v, int j) const;
  bool is_leaf(VertexId v) const { return vertex_depth(v) == d_; }
  bool is_perimeter(VertexId v) const { return vertex_depth(v) == rho_; }
  VertexId ancestor_at_depth(VertexId v, int level) const;
  bool is_ancestor(VertexId anc, VertexId v) const;

  std::vector<VertexId> perimeter_vertices() const;
  std::vector<VertexId> leaf_entrances() const;
  /* Leaves of the subtree hanging below v, in ascending id order (v itself if
   * v is a leaf). */
  std::vector<VertexId> branch_entrances(VertexId v) const;
  VertexId leftmost_leaf(VertexId v) const;

  VertexId lca(VertexId u, VertexId w) const;
  std::int64_t dist_vertices(VertexId u, VertexId w) const;

  /* The unique depth-rho ancestor: where an intruder entering at `leaf` is
   * headed, and where it is lost if it gets there uncaptured. */
  VertexId nearest_perimeter_vertex(VertexId leaf) const;

  /* Closed depth-first walk from `start` covering every edge of its subtree
   * exactly twice (down + up), children visited in ascending id order.
   * Returned as the vertex sequence, consecutive entries adjacent; edge count
   * is 2 * (#edges below start). */
  std::vector<VertexId> sweep_walk(VertexId start) const;

  friend bool operator==(const Environment&, const Environment&) = default;

 private:
  int d_, delta_, rho_;
  std::int64_t vertex_count_;
  std::vector<std::int64_t> level_first_;  // level_first_[k], k in [0, d+1]
};

/* A point of the tree's metric space.  Canonical form: a point strictly inside
 * the edge (parent(c), c) stores edge_child = c and offset in (0,1) measured
 * from the shallower endpoint; a point at vertex v stores {v, 1}.  The root is
 * {0, 1}.  This makes equality structural. */
class Location {
 public:
  static Location at_vertex(VertexId v);
  static Location on_edge(const Environment& env, VertexId edge_child, Rat offset);

  VertexId edge_child() const { return edge_child_; }
  const Rat& offset() const { return offset_; }
  bool is_vertex() const { return offset_ == 1; }
  VertexId vertex() const;  // requires is_vertex()

  friend bool operator==(const Location& a, const Location& b) {
    return a.edge_child_ == b.edge_child_ && a.offset_ == b.offset_;
  }

 private:
  Location(VertexId edge_child, Rat offset)
      : edge_child_(edge_child), offset_(std::move(offset)) {}
  VertexId edge_child_;
  Rat offset_;
};

Rat location_depth(const Environment& env, const Location& loc);

/* Tree metric between two arbitrary points. */
Rat dist_locations(const Environment& env, const Location& a, const Location& b);

/* Point reached from `from` after travelling `dist` toward the root along the
 * ancestor line.  Requires dist <= depth(from). */
Location ascend(const Environment& env, const Location& from, const Rat& dist);

/* Point at distance `dist` from `a` along the unique shortest path to `b`.
 * Requires 0 <= dist <= dist_locations(a, b). */
Location path_point(const Environment& env, const Location& a, const Location& b,
                    const Rat& dist);

}  // namespace tpd

#endif
