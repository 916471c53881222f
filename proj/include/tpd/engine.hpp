#ifndef TPD_ENGINE_HPP
#define TPD_ENGINE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tpd/instance.hpp"
#include "tpd/kinematics.hpp"
#include "tpd/tree_env.hpp"

namespace tpd {

enum class EventKind { Release, Capture, Loss, Decision, Arrival };

const char* event_kind_name(EventKind k);  // "release", "capture", ...

/* What caused a policy invocation. Start fires once at t = 0. */
enum class Trigger { Start, Release, Capture, Loss, Arrival, Wake };

struct TraceEvent {
  Rat time;
  EventKind kind;
  std::int64_t intruder_id;  // -1 when the event has no intruder
  Location where;
};

struct PolicyDecision {
  int speed = 0;                  // 0 or 1
  std::optional<VertexId> goal;   // required when speed == 1
  std::optional<Rat> wake_at;     // replaces any pending wake-up; empty clears it
};

struct ObservedIntruder {
  std::int64_t id;
  Location where;
};

struct PolicyContext {
  const Environment& env;
  const Rat& v;
  const Rat& time;
  const Location& defender;
  const std::vector<ObservedIntruder>& intruders;  // active, ascending id
  Trigger trigger;
};

/* Online defender algorithm.  Sees only the current world (never future
 * releases) and its own memory; one instance drives one simulation. */
class Policy {
 public:
  virtual ~Policy() = default;
  virtual PolicyDecision decide(const PolicyContext& ctx) = 0;
  virtual std::string name() const = 0;
};

/* A release source that may react to the defender: while watching() names a
 * vertex, the engine calls on_defender_at at the first instant the defender
 * occupies it, at which point the source may reshape its pending schedule. */
class AdaptiveSource {
 public:
  virtual ~AdaptiveSource() = default;
  virtual std::optional<Release> next_release() const = 0;
  virtual void pop_release() = 0;
  virtual std::optional<VertexId> watching() const = 0;
  virtual void on_defender_at(const Rat& time) = 0;
};

struct IntruderRecord {
  std::int64_t id;
  VertexId entry;
  Rat release;
  enum class Fate { Captured, Lost, Unresolved } fate = Fate::Unresolved;
  std::optional<Rat> resolved_at;
};

struct Trace {
  std::vector<TraceEvent> events;        // time-ordered
  std::vector<MotionSegment> defender_path;  // contiguous, speeds in {0,1}
  std::int64_t released = 0, captured = 0, lost = 0;
  Rat horizon;
  std::vector<IntruderRecord> intruders;
  InputInstance realized;  // includes adaptive-source releases, canonical
};

struct SimOptions {
  std::optional<Rat> horizon;        // hard stop; default: derived from releases
  AdaptiveSource* adversary = nullptr;
};

/* Deterministic event-driven run of one scenario.  Event batches at equal
 * times are processed as Release, then Capture, then Loss (so loss-instant
 * ties go to the defender), then Arrival, then Wake; the policy is re-invoked
 * after every batch.  Capture instants between events are found exactly. */
Trace simulate(const Environment& env, const Speed& v, const InputInstance& inst,
               Policy& policy, const SimOptions& options = {});

struct Outcome {
  std::int64_t captured = 0;
  std::int64_t lost = 0;
};

Outcome count_outcome(const Trace& trace);

struct Ratio {
  bool infinite = false;
  Rat value;  // meaningful iff !infinite
};

/* offline/online; 1 when both are zero, infinite when only online is. */
Ratio competitive_ratio(std::int64_t offline_captures, std::int64_t online_captures);

bool ratio_less(const Ratio& a, const Ratio& b);
std::string ratio_str(const Ratio& r);

}  // namespace tpd

#endif
