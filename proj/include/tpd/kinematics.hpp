#ifndef TPD_KINEMATICS_HPP
#define TPD_KINEMATICS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "tpd/tree_env.hpp"

namespace tpd {

/* Intruder speed, a fixed rational strictly between 0 and 1 (the defender
 * moves at speed at most 1, so pursuit always closes). */
class Speed {
 public:
  explicit Speed(Rat v) : v_(std::move(v)) {
    if (v_ <= 0 || v_ >= 1) throw ValidationError("speed must lie strictly in (0, 1)");
  }
  const Rat& value() const { return v_; }

 private:
  Rat v_;
};

struct Intruder {
  std::int64_t id;
  VertexId entry;  // leaf it enters at
  Rat release;     // entry time
};

enum class IntruderPhase { NotYetReleased, Active, Lost };

struct IntruderPosition {
  IntruderPhase phase;
  std::optional<Location> location;  // set iff Active
};

/* Distance an intruder must cover from entry to its perimeter vertex. */
inline Rat crossing_distance(const Environment& env) {
  return Rat(env.depth() - env.perimeter_depth());
}

inline Rat loss_time(const Environment& env, const Intruder& intr, const Speed& v) {
  return intr.release + crossing_distance(env) / v.value();
}

/* Position at time t: ascending from the entry leaf toward its perimeter
 * vertex at speed v.  Exactly at the loss instant the intruder is still
 * present, at the perimeter vertex (ties go to the defender); strictly after,
 * it is Lost. */
IntruderPosition intruder_position(const Environment& env, const Intruder& intr,
                                   const Speed& v, const Rat& t);

/* Constant-speed movement along the unique shortest path between two points,
 * then holding at the destination.  speed == 0 means holding at `from`
 * forever.  This one shape covers defender motion plans, intruder ascents and
 * trace segments, so coincidence detection has a single implementation. */
class PathTrajectory {
 public:
  PathTrajectory(const Environment& env, Rat start_time, Location from, Location to,
                 Rat speed);

  const Rat& start_time() const { return t0_; }
  const Location& origin() const { return from_; }
  const Location& destination() const { return to_; }
  const Rat& speed() const { return speed_; }
  bool moving() const { return moving_; }
  /* Arrival instant; empty when holding in place. */
  const std::optional<Rat>& arrival_time() const { return arrival_; }

  /* Clamps: before start_time -> origin, after arrival -> destination. */
  Location position_at(const Environment& env, const Rat& t) const;

  /* Times strictly inside (a, b) at which the moving point sits on a vertex.
   * Appended to `out` unsorted. */
  void vertex_times(const Environment& env, const Rat& a, const Rat& b,
                    std::vector<Rat>& out) const;

  /* Earliest instant in [a, b] at which the point sits exactly at vertex v;
   * empty if it never does in that window. */
  std::optional<Rat> first_time_at_vertex(const Environment& env, VertexId v,
                                          const Rat& a, const Rat& b) const;

 private:
  Rat t0_;
  Location from_, to_;
  Rat speed_;
  bool moving_;
  std::optional<Rat> arrival_;
  Rat total_;
  /* Vertices passed strictly between from_ and to_ (inclusive of endpoint
   * vertices when from_/to_ are vertex forms), with distance from origin. */
  std::vector<std::pair<Rat, VertexId>> marks_;
};

PathTrajectory intruder_trajectory(const Environment& env, const Intruder& intr,
                                   const Speed& v);

/* Earliest t in [a, b] with the two moving points coincident, or empty.
 * Exact: window endpoints are eligible (closed interval). */
std::optional<Rat> coincide_in_window(const Environment& env, const PathTrajectory& x,
                                      const PathTrajectory& y, const Rat& a, const Rat& b);

/* One recorded stretch of defender movement: shortest-path travel from `from`
 * to `to` at constant speed (0 = waiting).  dist(from,to) == speed * (t1-t0). */
struct MotionSegment {
  Rat t0, t1;
  Location from, to;
  Rat speed;
};

std::optional<Rat> coincide_in_window(const Environment& env, const MotionSegment& a,
                                      const MotionSegment& b);

struct Intercept {
  Rat time;
  Location where;
};

/* Earliest instant at which a defender standing at `from` at time t0 can be
 * coincident with the intruder (moving at most at unit speed, waiting
 * allowed), no later than the intruder's loss instant.  Empty if the intruder
 * escapes every unit-speed pursuit. */
std::optional<Intercept> intercept_time(const Environment& env, const Location& from,
                                        const Rat& t0, const Intruder& intr,
                                        const Speed& v);

}  // namespace tpd

#endif
