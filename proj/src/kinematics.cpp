#include "tpd/kinematics.hpp"

#include <algorithm>

namespace tpd {

IntruderPosition intruder_position(const Environment& env, const Intruder& intr,
                                   const Speed& v, const Rat& t) {
  if (t < intr.release) return {IntruderPhase::NotYetReleased, std::nullopt};
  if (t > loss_time(env, intr, v)) return {IntruderPhase::Lost, std::nullopt};
  Rat climbed = v.value() * (t - intr.release);
  return {IntruderPhase::Active, ascend(env, Location::at_vertex(intr.entry), climbed)};
}

PathTrajectory intruder_trajectory(const Environment& env, const Intruder& intr,
                                   const Speed& v) {
  VertexId goal = env.ancestor_at_depth(intr.entry, env.perimeter_depth());
  return PathTrajectory(env, intr.release, Location::at_vertex(intr.entry),
                        Location::at_vertex(goal), v.value());
}

namespace {

/* Deepest vertex incident to the edge (or the vertex itself). */
VertexId deep_anchor(const Location& loc) {
  return loc.is_vertex() ? loc.vertex() : loc.edge_child();
}

}  // namespace

PathTrajectory::PathTrajectory(const Environment& env, Rat start_time, Location from,
                               Location to, Rat speed)
    : t0_(std::move(start_time)),
      from_(std::move(from)),
      to_(std::move(to)),
      speed_(std::move(speed)),
      total_(dist_locations(env, from_, to_)) {
  if (speed_ < 0) throw InvariantError("trajectory speed must be nonnegative");
  moving_ = speed_ > 0 && total_ > 0;
  if (moving_) arrival_ = t0_ + total_ / speed_;

  // Vertices on the travel path, found by the metric identity
  // dist(from,w) + dist(w,to) == dist(from,to); candidates are the ancestor
  // chains of the two endpoint edges.
  std::vector<VertexId> cand;
  for (VertexId v : {deep_anchor(from_), deep_anchor(to_)}) {
    for (;;) {
      cand.push_back(v);
      if (v == 0) break;
      v = env.parent(v);
    }
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  for (VertexId w : cand) {
    Location lw = Location::at_vertex(w);
    Rat r = dist_locations(env, from_, lw);
    if (r + dist_locations(env, lw, to_) == total_) marks_.emplace_back(r, w);
  }
  std::sort(marks_.begin(), marks_.end());
}

Location PathTrajectory::position_at(const Environment& env, const Rat& t) const {
  if (!moving_ || t <= t0_) return from_;
  if (t >= *arrival_) return to_;
  return path_point(env, from_, to_, speed_ * (t - t0_));
}

void PathTrajectory::vertex_times(const Environment& env, const Rat& a, const Rat& b,
                                  std::vector<Rat>& out) const {
  (void)env;
  if (!moving_) return;
  for (const auto& [r, w] : marks_) {
    Rat t = t0_ + r / speed_;
    if (t > a && t < b) out.push_back(t);
  }
}

std::optional<Rat> PathTrajectory::first_time_at_vertex(const Environment& env, VertexId v,
                                                        const Rat& a, const Rat& b) const {
  (void)env;
  if (a > b) return std::nullopt;
  if (!moving_) {
    if (from_.is_vertex() && from_.vertex() == v) return a;
    return std::nullopt;
  }
  std::optional<Rat> best;
  auto consider = [&](const Rat& t) {
    if (t < a || t > b) return;
    if (!best || t < *best) best = t;
  };
  if (from_.is_vertex() && from_.vertex() == v && a <= t0_) consider(a);
  for (const auto& [r, w] : marks_) {
    if (w == v) consider(t0_ + r / speed_);
  }
  if (to_.is_vertex() && to_.vertex() == v) consider(std::max(a, *arrival_));
  return best;
}

namespace {

struct EdgePos {
  bool on_edge;
  VertexId edge_child;
  Rat offset;
};

EdgePos edge_pos(const Location& loc) {
  if (loc.is_vertex()) return {false, loc.vertex(), Rat(1)};
  return {true, loc.edge_child(), loc.offset()};
}

}  // namespace

std::optional<Rat> coincide_in_window(const Environment& env, const PathTrajectory& x,
                                      const PathTrajectory& y, const Rat& a, const Rat& b) {
  if (a > b) return std::nullopt;
  std::vector<Rat> cuts{a, b};
  auto add_inside = [&](const Rat& t) {
    if (t > a && t < b) cuts.push_back(t);
  };
  for (const PathTrajectory* tr : {&x, &y}) {
    add_inside(tr->start_time());
    if (tr->arrival_time()) add_inside(*tr->arrival_time());
    tr->vertex_times(env, a, b, cuts);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  for (std::size_t i = 0; i < cuts.size(); ++i) {
    // Boundary instant.
    if (x.position_at(env, cuts[i]) == y.position_at(env, cuts[i])) return cuts[i];
    if (i + 1 == cuts.size()) break;

    // Open interval: each point stays within one edge (or sits on one vertex),
    // so coincidence reduces to a linear solve in the shared edge offset.
    const Rat& lo = cuts[i];
    const Rat& hi = cuts[i + 1];
    Rat tm = lo + (hi - lo) / 2;
    Location px = x.position_at(env, tm), py = y.position_at(env, tm);
    EdgePos ex = edge_pos(px), ey = edge_pos(py);
    if (!ex.on_edge || !ey.on_edge || ex.edge_child != ey.edge_child) continue;
    Rat tq = lo + (hi - lo) * 3 / 4;
    Rat ox1 = edge_pos(x.position_at(env, tq)).offset;
    Rat oy1 = edge_pos(y.position_at(env, tq)).offset;
    Rat span = tq - tm;
    Rat sx = (ox1 - ex.offset) / span;
    Rat sy = (oy1 - ey.offset) / span;
    if (sx == sy) {
      if (ex.offset == ey.offset) return lo;  // overlapping throughout; unreachable after boundary pass
      continue;
    }
    Rat troot = tm + (ey.offset - ex.offset) / (sx - sy);
    if (troot > lo && troot < hi) return troot;
  }
  return std::nullopt;
}

std::optional<Rat> coincide_in_window(const Environment& env, const MotionSegment& a,
                                      const MotionSegment& b) {
  Rat lo = std::max(a.t0, b.t0);
  Rat hi = std::min(a.t1, b.t1);
  if (lo > hi) return std::nullopt;
  PathTrajectory ta(env, a.t0, a.from, a.to, a.speed);
  PathTrajectory tb(env, b.t0, b.from, b.to, b.speed);
  return coincide_in_window(env, ta, tb, lo, hi);
}

std::optional<Intercept> intercept_time(const Environment& env, const Location& from,
                                        const Rat& t0, const Intruder& intr,
                                        const Speed& v) {
  const Rat& vv = v.value();
  Rat m = crossing_distance(env);
  VertexId pv = env.ancestor_at_depth(intr.entry, env.perimeter_depth());
  Rat da = dist_locations(env, from, Location::at_vertex(intr.entry));
  Rat db = dist_locations(env, from, Location::at_vertex(pv));
  Rat h = (da + db - m) / 2;   // distance from defender to the climb path
  Rat sc = (da - db + m) / 2;  // projection onto the path, measured from the leaf

  Rat loss = intr.release + m / vv;
  Rat t_start = std::max(t0, intr.release);

  auto reach_gap = [&](const Rat& t) -> Rat {
    Rat s = vv * (t - intr.release);
    return h + abs(s - sc) - (t - t0);
  };

  Rat tstar;
  if (reach_gap(t_start) <= 0) {
    tstar = t_start;
  } else {
    // The gap decreases strictly (defender closes faster than the intruder
    // moves), so there is exactly one root past t_start; it lies on the
    // approaching side iff the meeting point is below the projection.
    Rat t1 = (h + sc + t0 + vv * intr.release) / (1 + vv);
    if (t1 >= t_start && vv * (t1 - intr.release) <= sc) {
      tstar = t1;
    } else {
      tstar = (t0 + h - sc - vv * intr.release) / (1 - vv);
    }
  }
  if (tstar > loss) return std::nullopt;
  IntruderPosition ip = intruder_position(env, intr, v, tstar);
  if (ip.phase != IntruderPhase::Active)
    throw InvariantError("interception instant must fall in the intruder's active window");
  return Intercept{tstar, *ip.location};
}

}  // namespace tpd
