#include "tpd/tree_env.hpp"

#include <algorithm>
#include <utility>

namespace tpd {

Rat parse_rat(const std::string& text) {
  if (text.empty()) throw ValidationError("empty rational literal");
  mpq_class q;
  if (q.set_str(text, 10) != 0) {
    throw ValidationError("invalid rational literal: " + text);
  }
  if (q.get_den() == 0) throw ValidationError("zero denominator: " + text);
  q.canonicalize();
  return q;
}

std::string rat_decimal(const Rat& q, int digits) {
  mpf_class f(q, 256);
  // %.*Fg prints `digits` significant digits from the exact binary expansion.
  char buf[128];
  gmp_snprintf(buf, sizeof buf, "%.*Fg", digits, f.get_mpf_t());
  return std::string(buf);
}

Environment::Environment(int depth, int branching, int perimeter_depth)
    : d_(depth), delta_(branching), rho_(perimeter_depth) {
  if (d_ < 2) throw ValidationError("d must satisfy d >= 2");
  if (delta_ < 2) throw ValidationError("delta must satisfy delta >= 2");
  if (rho_ < 1 || rho_ >= d_) throw ValidationError("rho must satisfy 1 <= rho < d");
  // level_first_[k] = (delta^k - 1) / (delta - 1); keep everything within
  // int64 so vertex ids stay plain integers.
  mpz_class count = 0, pow = 1;
  level_first_.resize(d_ + 2);
  for (int k = 0; k <= d_ + 1; ++k) {
    level_first_[k] = count.get_si();
    if (k <= d_) {
      count += pow;
      pow *= delta_;
      if (!count.fits_slong_p()) {
        throw ValidationError("environment too large: vertex ids exceed 63 bits");
      }
    }
  }
  vertex_count_ = level_first_[d_ + 1];
}

std::int64_t Environment::level_first(int level) const { return level_first_[level]; }

std::int64_t Environment::level_size(int level) const {
  return level_first_[level + 1] - level_first_[level];
}

int Environment::vertex_depth(VertexId v) const {
  if (!valid_vertex(v)) throw ValidationError("vertex id out of range");
  int k = 0;
  while (v >= level_first_[k + 1]) ++k;
  return k;
}

VertexId Environment::parent(VertexId v) const {
  if (!valid_vertex(v) || v == 0) throw ValidationError("vertex has no parent");
  return (v - 1) / delta_;
}

VertexId Environment::child(VertexId v, int j) const {
  if (j < 0 || j >= delta_) throw ValidationError("child index out of range");
  VertexId c = v * delta_ + j + 1;
  if (!valid_vertex(c)) throw ValidationError("vertex has no children");
  return c;
}

VertexId Environment::ancestor_at_depth(VertexId v, int level) const {
  int k = vertex_depth(v);
  if (level > k) throw ValidationError("ancestor depth below vertex");
  while (k > level) {
    v = (v - 1) / delta_;
    --k;
  }
  return v;
}

bool Environment::is_ancestor(VertexId anc, VertexId v) const {
  int ka = vertex_depth(anc), kv = vertex_depth(v);
  return ka <= kv && ancestor_at_depth(v, ka) == anc;
}

std::vector<VertexId> Environment::perimeter_vertices() const {
  std::vector<VertexId> out;
  out.reserve(level_size(rho_));
  for (VertexId v = level_first_[rho_]; v < level_first_[rho_ + 1]; ++v) out.push_back(v);
  return out;
}

std::vector<VertexId> Environment::leaf_entrances() const {
  std::vector<VertexId> out;
  out.reserve(level_size(d_));
  for (VertexId v = level_first_[d_]; v < level_first_[d_ + 1]; ++v) out.push_back(v);
  return out;
}

VertexId Environment::leftmost_leaf(VertexId v) const {
  int k = vertex_depth(v);
  while (k < d_) {
    v = v * delta_ + 1;
    ++k;
  }
  return v;
}

std::vector<VertexId> Environment::branch_entrances(VertexId v) const {
  VertexId first = leftmost_leaf(v);
  std::int64_t n = 1;
  for (int k = vertex_depth(v); k < d_; ++k) n *= delta_;
  std::vector<VertexId> out;
  out.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) out.push_back(first + i);
  return out;
}

VertexId Environment::lca(VertexId u, VertexId w) const {
  int ku = vertex_depth(u), kw = vertex_depth(w);
  while (ku > kw) u = (u - 1) / delta_, --ku;
  while (kw > ku) w = (w - 1) / delta_, --kw;
  while (u != w) {
    u = (u - 1) / delta_;
    w = (w - 1) / delta_;
  }
  return u;
}

std::int64_t Environment::dist_vertices(VertexId u, VertexId w) const {
  return vertex_depth(u) + vertex_depth(w) - 2 * vertex_depth(lca(u, w));
}

VertexId Environment::nearest_perimeter_vertex(VertexId leaf) const {
  if (!is_leaf(leaf)) throw ValidationError("entrance must be a leaf");
  return ancestor_at_depth(leaf, rho_);
}

std::vector<VertexId> Environment::sweep_walk(VertexId start) const {
  std::vector<VertexId> walk{start};
  // Iterative DFS emitting the vertex on the way down and again after each
  // child subtree; children in ascending id order.
  struct Frame {
    VertexId v;
    int next_child;
  };
  std::vector<Frame> stack{{start, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (vertex_depth(f.v) == d_ || f.next_child == delta_) {
      stack.pop_back();
      if (!stack.empty()) walk.push_back(stack.back().v);
      continue;
    }
    VertexId c = f.v * delta_ + f.next_child + 1;
    ++f.next_child;
    walk.push_back(c);
    stack.push_back({c, 0});
  }
  return walk;
}

Location Location::at_vertex(VertexId v) { return Location(v, Rat(1)); }

Location Location::on_edge(const Environment& env, VertexId edge_child, Rat offset) {
  if (!env.valid_vertex(edge_child)) throw ValidationError("edge child out of range");
  if (offset < 0 || offset > 1) throw ValidationError("edge offset outside [0, 1]");
  if (offset == 1) return at_vertex(edge_child);
  if (offset == 0) {
    if (edge_child == 0) return at_vertex(0);
    return at_vertex(env.parent(edge_child));
  }
  if (edge_child == 0) throw ValidationError("the root has no carrying edge");
  return Location(edge_child, std::move(offset));
}

VertexId Location::vertex() const {
  if (!is_vertex()) throw ValidationError("location is not a vertex");
  return edge_child_;
}

Rat location_depth(const Environment& env, const Location& loc) {
  return Rat(env.vertex_depth(loc.edge_child()) - 1) + loc.offset();
}

Rat dist_locations(const Environment& env, const Location& a, const Location& b) {
  if (a == b) return Rat(0);
  if (!a.is_vertex() && !b.is_vertex() && a.edge_child() == b.edge_child()) {
    return abs(a.offset() - b.offset());
  }
  // Any path between points on distinct edges exits through an edge endpoint;
  // vertex forms contribute themselves at cost 0.
  auto ends = [&](const Location& loc) {
    std::vector<std::pair<VertexId, Rat>> e;
    if (loc.is_vertex()) {
      e.emplace_back(loc.vertex(), Rat(0));
    } else {
      e.emplace_back(env.parent(loc.edge_child()), loc.offset());
      e.emplace_back(loc.edge_child(), Rat(1) - loc.offset());
    }
    return e;
  };
  bool first = true;
  Rat best;
  for (const auto& [u, du] : ends(a)) {
    for (const auto& [w, dw] : ends(b)) {
      Rat cand = du + Rat(env.dist_vertices(u, w)) + dw;
      if (first || cand < best) best = cand, first = false;
    }
  }
  return best;
}

Location ascend(const Environment& env, const Location& from, const Rat& dist) {
  if (dist < 0) throw ValidationError("ascent distance negative");
  if (dist > location_depth(env, from)) throw ValidationError("ascent past the root");
  if (dist == 0) return from;
  VertexId c = from.edge_child();
  Rat to_upper = from.offset();  // distance from the point up to parent(edge_child)
  Rat left = dist;
  while (left >= to_upper) {
    left -= to_upper;
    c = (c == 0) ? 0 : env.parent(c);
    if (left == 0) return Location::at_vertex(c);
    to_upper = 1;
  }
  // Strictly inside edge (parent(c), c), `left` below its upper endpoint
  // after accounting for the partial first hop.
  return Location::on_edge(env, c, to_upper - left);
}

Location path_point(const Environment& env, const Location& a, const Location& b,
                    const Rat& dist) {
  Rat total = dist_locations(env, a, b);
  if (dist < 0 || dist > total) throw ValidationError("path point outside segment");
  // Ascent length from `a` to the path apex: depths identify it exactly.
  Rat up_a = (total + location_depth(env, a) - location_depth(env, b)) / 2;
  if (dist <= up_a) return ascend(env, a, dist);
  return ascend(env, b, total - dist);
}

}  // namespace tpd
