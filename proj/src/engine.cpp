#include "tpd/engine.hpp"

#include <algorithm>

namespace tpd {

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::Release: return "release";
    case EventKind::Capture: return "capture";
    case EventKind::Loss: return "loss";
    case EventKind::Decision: return "decision";
    case EventKind::Arrival: return "arrival";
  }
  return "unknown";
}

namespace {

struct ActiveIntruder {
  Intruder intr;
  PathTrajectory traj;
  Rat loss;
};

}  // namespace

Trace simulate(const Environment& env, const Speed& v, const InputInstance& inst,
               Policy& policy, const SimOptions& options) {
  validate_instance(env, inst);
  if (options.horizon && *options.horizon < 0)
    throw ValidationError("horizon must be >= 0");

  const Rat& vv = v.value();
  const Rat resolve_pad = Rat(env.depth()) + crossing_distance(env) / vv;

  Trace trace;

  Rat now = 0;
  Location defender = Location::at_vertex(0);
  PathTrajectory motion(env, now, defender, defender, 0);
  bool moving = false;
  std::optional<VertexId> motion_goal;

  Rat seg_start = 0;
  Location seg_from = defender;
  int seg_speed = 0;

  std::optional<Rat> pending_wake;
  std::size_t next_rel = 0;
  std::vector<ActiveIntruder> active;  // ascending id
  std::int64_t next_id = 0;
  AdaptiveSource* adv = options.adversary;

  const bool fixed_horizon = options.horizon.has_value();
  Rat horizon = fixed_horizon ? *options.horizon : resolve_pad;
  auto extend_horizon = [&](const Rat& release_time) {
    if (fixed_horizon) return;
    Rat h = release_time + resolve_pad;
    if (h > horizon) horizon = h;
  };
  if (!inst.releases.empty()) extend_horizon(inst.releases.back().t);

  // Close the open defender-path segment at time t (current position pos) and
  // start a fresh one there.
  auto cut_segment = [&](const Rat& t, const Location& pos) {
    if (t > seg_start)
      trace.defender_path.push_back({seg_start, t, seg_from, pos, Rat(seg_speed)});
    seg_start = t;
    seg_from = pos;
  };

  auto become_stationary = [&](const Rat& t, const Location& pos) {
    cut_segment(t, pos);
    motion = PathTrajectory(env, t, pos, pos, 0);
    moving = false;
    motion_goal.reset();
    seg_speed = 0;
  };

  std::vector<ObservedIntruder> observed;
  auto consult = [&](Trigger trig, const Rat& t) {
    observed.clear();
    for (const auto& ai : active) {
      IntruderPosition ip = intruder_position(env, ai.intr, v, t);
      if (ip.phase != IntruderPhase::Active)
        throw InvariantError("active intruder outside its active window");
      observed.push_back({ai.intr.id, *ip.location});
    }
    Location pos = motion.position_at(env, t);
    PolicyContext ctx{env, vv, t, pos, observed, trig};
    PolicyDecision dec = policy.decide(ctx);

    if (dec.speed != 0 && dec.speed != 1)
      throw PolicyContractError("policy speed must be 0 or 1");
    if (dec.speed == 1 && !dec.goal)
      throw PolicyContractError("policy motion requires a goal vertex");
    if (dec.goal && !env.valid_vertex(*dec.goal))
      throw PolicyContractError("policy goal is not a vertex of the environment");
    if (dec.wake_at && *dec.wake_at <= t)
      throw PolicyContractError("policy wake-up must be strictly in the future");

    trace.events.push_back({t, EventKind::Decision, -1, pos});

    bool want_move = dec.speed == 1 && !(pos.is_vertex() && pos.vertex() == *dec.goal);
    if (want_move) {
      if (!(moving && motion_goal && *motion_goal == *dec.goal)) {
        cut_segment(t, pos);
        motion = PathTrajectory(env, t, pos, Location::at_vertex(*dec.goal), 1);
        moving = true;
        motion_goal = *dec.goal;
        seg_speed = 1;
      }
      // else: same goal, same plan; the in-flight trajectory continues
    } else if (moving) {
      become_stationary(t, pos);
    }
    pending_wake = dec.wake_at;
  };

  consult(Trigger::Start, now);

  for (long iter = 0;; ++iter) {
    if (iter > 50'000'000) throw InvariantError("simulation failed to make progress");

    std::optional<Rat> t_rel;
    if (next_rel < inst.releases.size()) t_rel = inst.releases[next_rel].t;
    if (adv) {
      if (auto nr = adv->next_release()) {
        extend_horizon(nr->t);
        if (!t_rel || nr->t < *t_rel) t_rel = nr->t;
      }
    }

    Rat base = horizon;
    auto lower_to = [&](const std::optional<Rat>& c) {
      if (c && *c < base) base = *c;
    };
    lower_to(t_rel);
    for (const auto& ai : active) lower_to(ai.loss);
    if (moving) lower_to(motion.arrival_time());
    lower_to(pending_wake);

    std::optional<Rat> t_watch;
    if (adv) {
      if (auto w = adv->watching()) {
        t_watch = motion.first_time_at_vertex(env, *w, now, base);
        lower_to(t_watch);
      }
    }

    Rat T = base;
    for (const auto& ai : active) {
      auto c = coincide_in_window(env, motion, ai.traj, now, T);
      if (c && *c < T) T = *c;
    }

    bool any_release = false, any_capture = false, any_loss = false;
    bool any_arrival = false, any_wake = false;
    bool triggered = t_watch && *t_watch == T;

    if (triggered) adv->on_defender_at(T);

    std::vector<Release> batch_rel;
    while (next_rel < inst.releases.size() && inst.releases[next_rel].t == T)
      batch_rel.push_back(inst.releases[next_rel++]);
    if (adv) {
      for (;;) {
        auto nr = adv->next_release();
        if (!nr || nr->t > T) break;
        if (nr->t < T) throw InvariantError("adaptive source scheduled a release in the past");
        batch_rel.push_back(*nr);
        adv->pop_release();
      }
    }
    std::stable_sort(batch_rel.begin(), batch_rel.end(),
                     [](const Release& a, const Release& b) { return a.leaf < b.leaf; });
    for (const Release& r : batch_rel) {
      if (!env.valid_vertex(r.leaf) || !env.is_leaf(r.leaf))
        throw ValidationError("release leaf " + std::to_string(r.leaf) + " is not an entrance");
      if (r.count < 1) throw ValidationError("release count must be >= 1");
      any_release = true;
      extend_horizon(r.t);
      trace.realized.releases.push_back(r);
      for (std::int64_t k = 0; k < r.count; ++k) {
        Intruder it{next_id++, r.leaf, r.t};
        trace.events.push_back({T, EventKind::Release, it.id, Location::at_vertex(r.leaf)});
        trace.intruders.push_back({it.id, it.entry, it.release,
                                   IntruderRecord::Fate::Unresolved, std::nullopt});
        active.push_back({it, intruder_trajectory(env, it, v), loss_time(env, it, v)});
        ++trace.released;
      }
    }

    Location dpos = motion.position_at(env, T);
    std::vector<ActiveIntruder> survivors;
    survivors.reserve(active.size());
    std::vector<const ActiveIntruder*> lost_now;
    for (const auto& ai : active) {
      IntruderPosition ip = intruder_position(env, ai.intr, v, T);
      if (ip.phase != IntruderPhase::Active)
        throw InvariantError("active intruder outside its active window");
      if (*ip.location == dpos) {
        any_capture = true;
        trace.events.push_back({T, EventKind::Capture, ai.intr.id, dpos});
        trace.intruders[static_cast<std::size_t>(ai.intr.id)].fate =
            IntruderRecord::Fate::Captured;
        trace.intruders[static_cast<std::size_t>(ai.intr.id)].resolved_at = T;
        ++trace.captured;
      } else if (ai.loss == T) {
        lost_now.push_back(&ai);
      } else {
        survivors.push_back(ai);
      }
    }
    for (const ActiveIntruder* ai : lost_now) {
      any_loss = true;
      IntruderPosition ip = intruder_position(env, ai->intr, v, T);
      trace.events.push_back({T, EventKind::Loss, ai->intr.id, *ip.location});
      trace.intruders[static_cast<std::size_t>(ai->intr.id)].fate = IntruderRecord::Fate::Lost;
      trace.intruders[static_cast<std::size_t>(ai->intr.id)].resolved_at = T;
      ++trace.lost;
    }
    active.swap(survivors);

    if (moving && *motion.arrival_time() == T) {
      any_arrival = true;
      trace.events.push_back({T, EventKind::Arrival, -1, dpos});
      become_stationary(T, dpos);
    }
    if (pending_wake && *pending_wake == T) {
      pending_wake.reset();
      any_wake = true;
    }

    if (trace.captured + trace.lost + static_cast<std::int64_t>(active.size()) !=
        trace.released)
      throw InvariantError("intruder conservation violated");

    bool any_event = any_release || any_capture || any_loss || any_arrival || any_wake;
    if (any_event) {
      Trigger trig = any_release   ? Trigger::Release
                     : any_capture ? Trigger::Capture
                     : any_loss    ? Trigger::Loss
                     : any_arrival ? Trigger::Arrival
                                   : Trigger::Wake;
      consult(trig, T);
    }
    now = T;
    if (!any_event && !triggered) break;  // T is the horizon: nothing left
  }

  cut_segment(now, motion.position_at(env, now));
  if (!fixed_horizon && !active.empty())
    throw InvariantError("intruders left unresolved at the derived horizon");

  trace.horizon = horizon;
  canonicalize(trace.realized);
  return trace;
}

Outcome count_outcome(const Trace& trace) { return {trace.captured, trace.lost}; }

Ratio competitive_ratio(std::int64_t offline_captures, std::int64_t online_captures) {
  if (online_captures == 0 && offline_captures == 0) return {false, Rat(1)};
  if (online_captures == 0) return {true, Rat(0)};
  Rat r(static_cast<long>(offline_captures), static_cast<long>(online_captures));
  r.canonicalize();
  return {false, r};
}

bool ratio_less(const Ratio& a, const Ratio& b) {
  if (a.infinite || b.infinite) return !a.infinite && b.infinite;
  return a.value < b.value;
}

std::string ratio_str(const Ratio& r) { return r.infinite ? "inf" : rat_str(r.value); }

}  // namespace tpd
