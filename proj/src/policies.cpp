#include "tpd/policies.hpp"

#include <algorithm>

namespace tpd {

namespace {

Location vertex_loc(VertexId v) { return Location::at_vertex(v); }

/* Index of the largest value, lowest index on ties. */
template <typename Row, typename Score>
int argmax_by(const std::vector<Row>& rows, Score score) {
  int best = 0;
  auto best_score = score(rows[0], 0);
  for (int k = 1; k < static_cast<int>(rows.size()); ++k) {
    auto s = score(rows[k], k);
    if (s > best_score) {
      best = k;
      best_score = s;
    }
  }
  return best;
}

}  // namespace

SweepingPolicy::SweepingPolicy(const Environment& env)
    : walk_(env.sweep_walk(0)) {}

PolicyDecision SweepingPolicy::decide(const PolicyContext& ctx) {
  if (ctx.trigger == Trigger::Start) {
    idx_ = 1;
  } else if (ctx.defender == vertex_loc(walk_[idx_])) {
    // Reached the current goal (the arrival may share a batch with a capture,
    // so key on position rather than on the trigger).
    ++idx_;
    if (idx_ == walk_.size()) idx_ = 1;  // walk is closed: back home, go again
  }
  return {1, walk_[idx_], std::nullopt};
}

SapRegionCounts sap_region_counts(const Environment& env, const Rat& v,
                                  const std::vector<ObservedIntruder>& intruders) {
  const int rho = env.perimeter_depth();
  SapRegionCounts counts(static_cast<std::size_t>(env.level_size(rho)));
  Rat band = 2 * rho * v;
  for (const ObservedIntruder& it : intruders) {
    Rat depth = location_depth(env, it.where);
    if (depth < rho) continue;  // above every station's subtree
    Rat g = depth - rho;        // distance still to go
    if (g > 3 * band) continue;
    std::size_t k = static_cast<std::size_t>(
        env.ancestor_at_depth(it.where.edge_child(), rho) - env.level_first(rho));
    if (g > 2 * band)
      ++counts[k].far;
    else if (g > band)
      ++counts[k].mid;
    else
      ++counts[k].near;
  }
  return counts;
}

StayAtPerimeterPolicy::StayAtPerimeterPolicy(const Environment& env,
                                             const Speed& v,
                                             bool allow_out_of_regime)
    : perim_(env.perimeter_vertices()),
      v_(v.value()),
      pick_at_(2 * env.perimeter_depth()),
      stay_len_(2 * env.perimeter_depth()),
      move_len_(4 * env.perimeter_depth()),
      wake_(pick_at_) {
  if (!allow_out_of_regime &&
      v.value() > sap_speed_bound(env.depth(), env.perimeter_depth()))
    throw ValidationError("sap regime violated: need 6*rho*v <= d - rho");
}

PolicyDecision StayAtPerimeterPolicy::decide(const PolicyContext& ctx) {
  const Rat& t = ctx.time;
  if (cur_ < 0) {
    if (t >= pick_at_) {
      // Initial selection from the root: every station is scored by the two
      // outer bands only, since nobody is being guarded yet.
      SapRegionCounts counts = sap_region_counts(ctx.env, v_, ctx.intruders);
      cur_ = argmax_by(counts, [](const SapBandCounts& c, int) {
        return c.mid + c.far;
      });
      wake_ = 3 * pick_at_;  // first epoch boundary: t = 6 rho
      return {1, perim_[cur_], wake_};
    }
    return {0, std::nullopt, pick_at_};
  }

  bool at_station = ctx.defender == vertex_loc(perim_[cur_]);
  if (t >= wake_) {
    if (!at_station)
      throw InvariantError("defender away from its station at an epoch boundary");
    SapRegionCounts counts = sap_region_counts(ctx.env, v_, ctx.intruders);
    int cur = cur_;
    int n = argmax_by(counts, [&](const SapBandCounts& c, int k) {
      return k == cur ? c.near + c.mid + c.far : c.mid + c.far;
    });
    // Relocating abandons the near band here; only worth it if the candidate
    // mid band (the intruders a move can still beat to the perimeter) is at
    // least as large.
    bool move = n != cur_ && counts[n].mid >= counts[cur_].near;
    Rat len = move ? move_len_ : stay_len_;
    epochs_.push_back({t, Rat(t + len), move, cur_, move ? n : cur_});
    wake_ = t + len;
    if (move) {
      cur_ = n;
      return {1, perim_[cur_], wake_};
    }
    return {0, std::nullopt, wake_};
  }
  if (at_station) return {0, std::nullopt, wake_};
  return {1, perim_[cur_], wake_};
}

std::vector<std::int64_t> cass_capture_region_counts(
    const Environment& env, const CassParams& params,
    const std::vector<ObservedIntruder>& intruders) {
  const int rho = env.perimeter_depth();
  if (params.s < 1 || params.s > rho)
    throw ValidationError("s must satisfy 1 <= s <= rho");
  std::vector<std::int64_t> counts(
      static_cast<std::size_t>(env.level_size(params.s)));
  // Deep enough that this subtree's next sweep still beats it to the
  // perimeter: at most halfway across the crossing gap.
  Rat min_depth = Rat(2 * rho + env.depth() - rho) / 2;
  for (const ObservedIntruder& it : intruders) {
    if (location_depth(env, it.where) < min_depth) continue;
    std::size_t k = static_cast<std::size_t>(
        env.ancestor_at_depth(it.where.edge_child(), params.s) -
        env.level_first(params.s));
    ++counts[k];
  }
  return counts;
}

namespace {

int checked_anchor_depth(const Environment& env, int s) {
  if (s < 1 || s > env.perimeter_depth())
    throw ValidationError("s must satisfy 1 <= s <= rho");
  return s;
}

}  // namespace

CompareSubtreeSweepPolicy::CompareSubtreeSweepPolicy(const Environment& env,
                                                     const Speed& v,
                                                     const CassParams& params,
                                                     bool allow_out_of_regime)
    : params_{checked_anchor_depth(env, params.s)},
      anchor_first_(env.level_first(params.s)),
      epoch_len_(cass_epoch_length(env.depth(), env.branching(), params.s)) {
  if (!allow_out_of_regime &&
      v.value() > cass_speed_bound(env.depth(), env.branching(),
                                   env.perimeter_depth(), params.s))
    throw ValidationError(
        "cass regime violated: need 4*v*(s + delta^(d-s+1)/(delta-1) - 1) <= d - rho");
}

PolicyDecision CompareSubtreeSweepPolicy::start_epoch(const PolicyContext& ctx) {
  wake_.reset();
  std::vector<std::int64_t> counts =
      cass_capture_region_counts(ctx.env, params_, ctx.intruders);
  int chosen = argmax_by(counts, [](std::int64_t c, int) { return c; });
  epochs_.push_back({ctx.time, chosen, counts});
  VertexId anchor = anchor_first_ + chosen;
  std::vector<VertexId> walk = ctx.env.sweep_walk(anchor);
  queue_.assign(walk.begin(), walk.end());
  queue_.push_back(0);
  return {1, queue_.front(), std::nullopt};
}

PolicyDecision CompareSubtreeSweepPolicy::decide(const PolicyContext& ctx) {
  if (!queue_.empty()) {
    if (ctx.defender == vertex_loc(queue_.front())) {
      queue_.pop_front();
      if (queue_.empty()) return start_epoch(ctx);  // home again: next epoch
      return {1, queue_.front(), std::nullopt};
    }
    return {1, queue_.front(), std::nullopt};
  }
  if (!seen_release_) {
    if (ctx.trigger == Trigger::Release) {
      seen_release_ = true;
      wake_ = ctx.time + epoch_len_;
      return {0, std::nullopt, wake_};
    }
    return {0, std::nullopt, std::nullopt};
  }
  if (ctx.time >= *wake_) return start_epoch(ctx);
  return {0, std::nullopt, wake_};
}

ScriptPolicy::ScriptPolicy(const Environment& env, std::vector<ScriptStep> steps)
    : steps_(std::move(steps)) {
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (steps_[i].until < 0 || (i > 0 && steps_[i].until < steps_[i - 1].until))
      throw ValidationError("script step times must be nondecreasing");
    // Location construction already validated `where` against some env; make
    // sure it is a point of *this* tree.
    if (!env.valid_vertex(steps_[i].where.edge_child()))
      throw ValidationError("script step outside the environment");
  }
}

PolicyDecision ScriptPolicy::decide(const PolicyContext& ctx) {
  const Rat& t = ctx.time;
  while (idx_ < steps_.size() && steps_[idx_].until <= t) ++idx_;
  if (idx_ == steps_.size()) return {0, std::nullopt, std::nullopt};
  const ScriptStep& st = steps_[idx_];
  const Location& pos = ctx.defender;
  if (dist_locations(ctx.env, pos, st.where) == 0)
    return {0, std::nullopt, st.until};
  if (st.where.is_vertex()) return {1, st.where.vertex(), st.until};

  // Mid-edge target: steer past it with a vertex goal and wake exactly on it.
  VertexId c = st.where.edge_child();
  VertexId p = ctx.env.parent(c);
  const Rat& ox = st.where.offset();
  if (!pos.is_vertex() && pos.edge_child() == c) {
    bool down = pos.offset() < ox;
    Rat eta = abs(ox - pos.offset());
    return {1, down ? c : p, Rat(std::min(Rat(t + eta), st.until))};
  }
  Rat via_parent = dist_locations(ctx.env, pos, vertex_loc(p)) + ox;
  Rat via_child = dist_locations(ctx.env, pos, vertex_loc(c)) + (1 - ox);
  // Entering the edge from above passes the parent first (and conversely), so
  // the cheaper entry side fixes which endpoint to aim beyond.
  bool from_above = via_parent <= via_child;
  Rat eta = from_above ? via_parent : via_child;
  return {1, from_above ? c : p, Rat(std::min(Rat(t + eta), st.until))};
}

std::unique_ptr<Policy> make_policy(const Environment& env, const Speed& v,
                                    const PolicySpec& spec) {
  if (spec.name == "hold") return std::make_unique<HoldPolicy>();
  if (spec.name == "sweeping") return std::make_unique<SweepingPolicy>(env);
  if (spec.name == "sap")
    return std::make_unique<StayAtPerimeterPolicy>(env, v,
                                                   spec.allow_out_of_regime);
  if (spec.name == "cass")
    return std::make_unique<CompareSubtreeSweepPolicy>(
        env, v, CassParams{spec.cass_s}, spec.allow_out_of_regime);
  if (spec.name == "script")
    return std::make_unique<ScriptPolicy>(env, spec.script);
  throw ValidationError("unknown policy: " + spec.name);
}

}  // namespace tpd
