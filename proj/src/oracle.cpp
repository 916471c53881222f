#include "tpd/oracle.hpp"

#include <algorithm>
#include <queue>

namespace tpd {

namespace {

/* One distinct trajectory: a canonical release entry.  Capturing its point
 * captures all `mult` riders at once. */
struct Node {
  VertexId leaf;
  Rat release;
  std::int64_t mult;
  std::int64_t base_id;  // ids base_id .. base_id + mult - 1
  Rat loss;
};

struct NodeLeg {
  int node;
  Rat time;
  Location where;
};

struct State {
  Location loc;
  Rat time;
  std::uint64_t mask = 0;  // captured nodes
  std::int64_t value = 0;
  std::vector<NodeLeg> legs;
};

std::vector<Node> build_nodes(const Environment& env, const Speed& v,
                              InputInstance inst) {
  canonicalize(inst);
  Rat m = crossing_distance(env);
  std::vector<Node> nodes;
  std::int64_t id = 0;
  for (const Release& r : inst.releases) {
    nodes.push_back({r.leaf, r.t, r.count, id, Rat(r.t + m / v.value())});
    id += r.count;
  }
  return nodes;
}

std::optional<Intercept> leg_intercept(const Environment& env, const Speed& v,
                                       const State& s, const Node& n) {
  return intercept_time(env, s.loc, s.time, {n.base_id, n.leaf, n.release}, v);
}

State greedy_from_root(const Environment& env, const Speed& v,
                       const std::vector<Node>& nodes) {
  State s{Location::at_vertex(0), Rat(0), 0, 0, {}};
  for (;;) {
    int pick = -1;
    std::optional<Intercept> pick_ic;
    for (int j = 0; j < static_cast<int>(nodes.size()); ++j) {
      if (s.mask >> j & 1) continue;
      auto ic = leg_intercept(env, v, s, nodes[j]);
      if (!ic) continue;
      if (pick < 0 || nodes[j].loss < nodes[pick].loss) {
        pick = j;
        pick_ic = ic;
      }
    }
    if (pick < 0) return s;
    s.mask |= std::uint64_t(1) << pick;
    s.value += nodes[pick].mult;
    s.legs.push_back({pick, pick_ic->time, pick_ic->where});
    s.loc = pick_ic->where;
    s.time = pick_ic->time;
  }
}

CaptureSchedule expand_schedule(const std::vector<Node>& nodes,
                                const std::vector<NodeLeg>& legs) {
  CaptureSchedule sched;
  for (const NodeLeg& leg : legs) {
    const Node& n = nodes[leg.node];
    for (std::int64_t i = 0; i < n.mult; ++i) {
      sched.legs.push_back({n.base_id + i, leg.time, leg.where});
      ++sched.value;
    }
  }
  return sched;
}

}  // namespace

OracleResult optimal_offline(const Environment& env, const Speed& v,
                             const InputInstance& inst,
                             const OracleOptions& options) {
  if (options.node_cap < 1 || options.node_cap > 62)
    throw ValidationError("node cap must lie in [1, 62]");
  if (options.expansion_budget < 0)
    throw ValidationError("expansion budget must be non-negative");
  std::vector<Node> nodes = build_nodes(env, v, inst);
  const int n = static_cast<int>(nodes.size());
  std::int64_t total = 0;
  for (const Node& nd : nodes) total += nd.mult;

  OracleResult result;
  State best = greedy_from_root(env, v, nodes);
  if (n > options.node_cap || best.value == total) {
    result.captures = best.value;
    result.schedule = expand_schedule(nodes, best.legs);
    result.exact = best.value == total;  // capturing everyone is optimal
    return result;
  }

  // Best-first branch-and-bound over capture orders.  Bound: captures so far
  // plus everyone still individually interceptable from the current state
  // (reaching any later capture point only gets harder, so this dominates
  // every completion).
  struct Entry {
    std::int64_t ub;
    std::int64_t value;
    std::int64_t seq;
    State state;
  };
  auto later = [](const Entry& a, const Entry& b) {
    if (a.ub != b.ub) return a.ub < b.ub;
    if (a.value != b.value) return a.value < b.value;
    return a.seq > b.seq;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(later)> open(later);
  std::int64_t seq = 0;
  open.push({total, 0, seq++, State{Location::at_vertex(0), Rat(0), 0, 0, {}}});

  bool complete = true;
  while (!open.empty()) {
    if (result.expanded >= options.expansion_budget) {
      complete = false;
      break;
    }
    Entry top = std::move(const_cast<Entry&>(open.top()));
    open.pop();
    ++result.expanded;
    if (top.ub <= best.value) continue;  // stale bound
    for (int j = 0; j < n; ++j) {
      if (top.state.mask >> j & 1) continue;
      auto ic = leg_intercept(env, v, top.state, nodes[j]);
      if (!ic) continue;
      State child{ic->where, ic->time,
                  top.state.mask | std::uint64_t(1) << j,
                  top.state.value + nodes[j].mult, top.state.legs};
      child.legs.push_back({j, ic->time, ic->where});
      if (child.value > best.value) best = child;
      std::int64_t ub = child.value;
      for (int k = 0; k < n; ++k) {
        if (child.mask >> k & 1) continue;
        if (leg_intercept(env, v, child, nodes[k])) ub += nodes[k].mult;
      }
      if (ub > best.value) open.push({ub, child.value, seq++, std::move(child)});
    }
    if (best.value == total) break;  // cannot beat capturing everyone
  }

  result.captures = best.value;
  result.schedule = expand_schedule(nodes, best.legs);
  result.exact = complete || best.value == total;
  return result;
}

std::int64_t greedy_offline(const Environment& env, const Speed& v,
                            const InputInstance& inst) {
  return greedy_from_root(env, v, build_nodes(env, v, inst)).value;
}

}  // namespace tpd
