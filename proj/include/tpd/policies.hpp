#ifndef TPD_POLICIES_HPP
#define TPD_POLICIES_HPP

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tpd/engine.hpp"
#include "tpd/regimes.hpp"

namespace tpd {

/* The defender stands still at the root.  Baseline for ratio experiments. */
class HoldPolicy : public Policy {
 public:
  PolicyDecision decide(const PolicyContext&) override { return {}; }
  std::string name() const override { return "hold"; }
};

/* Perpetually repeats the closed depth-first walk of the whole tree at speed
 * 1, starting at t = 0; captures happen wherever the walk crosses an
 * intruder.  Loses nobody when v <= sweeping_speed_bound. */
class SweepingPolicy : public Policy {
 public:
  explicit SweepingPolicy(const Environment& env);
  PolicyDecision decide(const PolicyContext& ctx) override;
  std::string name() const override { return "sweeping"; }

 private:
  std::vector<VertexId> walk_;
  std::size_t idx_ = 0;  // position of the current goal within walk_
};

/* Distance-to-go bands below one perimeter vertex, nearest first.  An
 * intruder at distance g above its target perimeter vertex falls in near for
 * g in [0, 2 rho v], mid for (2 rho v, 4 rho v], far for (4 rho v, 6 rho v];
 * a shared boundary joins the more urgent band.  Anything beyond 6 rho v is
 * in no band. */
struct SapBandCounts {
  std::int64_t near = 0, mid = 0, far = 0;
  friend bool operator==(const SapBandCounts&, const SapBandCounts&) = default;
};

/* One entry per perimeter vertex, ascending id order. */
using SapRegionCounts = std::vector<SapBandCounts>;

SapRegionCounts sap_region_counts(const Environment& env, const Rat& v,
                                  const std::vector<ObservedIntruder>& intruders);

struct SapEpoch {
  Rat start, end;
  bool moved = false;
  int from_k = 0, to_k = 0;  // perimeter indices, equal when !moved
};

/* Guards one perimeter vertex at a time.  Waits at the root until t = 2 rho,
 * moves to the station with the most approaching intruders, waits until
 * t = 6 rho, then runs fixed-length epochs: stay (2 rho) unless some other
 * station's mid band outweighs the current near band, in which case relocate
 * (4 rho: travel plus settling).  (3 delta^rho - 1)/2-competitive for
 * v <= sap_speed_bound. */
class StayAtPerimeterPolicy : public Policy {
 public:
  StayAtPerimeterPolicy(const Environment& env, const Speed& v,
                        bool allow_out_of_regime = false);
  PolicyDecision decide(const PolicyContext& ctx) override;
  std::string name() const override { return "sap"; }

  const std::vector<SapEpoch>& epochs() const { return epochs_; }

 private:
  std::vector<VertexId> perim_;
  Rat v_;
  Rat pick_at_;   // 2 rho: end of the blind wait at the root
  Rat stay_len_;  // 2 rho
  Rat move_len_;  // 4 rho
  int cur_ = -1;  // station index; -1 until the initial selection
  Rat wake_;      // next boundary the policy owns
  std::vector<SapEpoch> epochs_;
};

struct CassParams {
  int s = 1;  // anchor depth, 1 <= s <= rho
};

/* Per depth-s subtree, how many active intruders sit deep enough (at least
 * halfway across the gap below the perimeter) to be caught by one full sweep
 * of that subtree.  Indexed by anchor in ascending id order. */
std::vector<std::int64_t> cass_capture_region_counts(
    const Environment& env, const CassParams& params,
    const std::vector<ObservedIntruder>& intruders);

struct CassEpoch {
  Rat start;
  int chosen = 0;  // anchor index swept this epoch
  std::vector<std::int64_t> counts;
};

/* Waits at the root until one epoch length after the first release, then
 * loops: count deep intruders per depth-s subtree, descend to the fullest
 * anchor, sweep its subtree, return to the root.  Epochs are back-to-back and
 * each lasts exactly epoch_length().  delta^s-competitive for
 * v <= cass_speed_bound. */
class CompareSubtreeSweepPolicy : public Policy {
 public:
  CompareSubtreeSweepPolicy(const Environment& env, const Speed& v,
                            const CassParams& params,
                            bool allow_out_of_regime = false);
  PolicyDecision decide(const PolicyContext& ctx) override;
  std::string name() const override { return "cass"; }

  const std::vector<CassEpoch>& epochs() const { return epochs_; }
  const Rat& epoch_length() const { return epoch_len_; }

 private:
  PolicyDecision start_epoch(const PolicyContext& ctx);

  CassParams params_;
  VertexId anchor_first_ = 0;
  Rat epoch_len_;
  bool seen_release_ = false;
  std::optional<Rat> wake_;      // set only while waiting for the first epoch
  std::deque<VertexId> queue_;   // pending goals of the running epoch
  std::vector<CassEpoch> epochs_;
};

/* One leg of a scripted tour: be at `where` until time `until`. */
struct ScriptStep {
  Location where;
  Rat until;
};

/* Follows a fixed timetable of locations; used to pit hand-built defender
 * tours (including offline-optimal witnesses) against instances.  After the
 * last step the defender parks wherever it stands. */
class ScriptPolicy : public Policy {
 public:
  ScriptPolicy(const Environment& env, std::vector<ScriptStep> steps);
  PolicyDecision decide(const PolicyContext& ctx) override;
  std::string name() const override { return "script"; }

 private:
  std::vector<ScriptStep> steps_;
  std::size_t idx_ = 0;
};

struct PolicySpec {
  std::string name;  // hold | sweeping | sap | cass | script
  int cass_s = 1;
  bool allow_out_of_regime = false;
  std::vector<ScriptStep> script;
};

std::unique_ptr<Policy> make_policy(const Environment& env, const Speed& v,
                                    const PolicySpec& spec);

}  // namespace tpd

#endif
