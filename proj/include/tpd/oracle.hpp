#ifndef TPD_ORACLE_HPP
#define TPD_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "tpd/engine.hpp"
#include "tpd/instance.hpp"

namespace tpd {

/* Offline-optimal defender: knows the whole instance up front and maximizes
 * captures.  The denominator of every competitive ratio. */

struct CaptureLeg {
  std::int64_t intruder_id;
  Rat time;
  Location where;
};

/* Witness tour: legs in capture order.  Times are non-decreasing, each hop is
 * reachable at defender speed, and each capture beats its loss time. */
struct CaptureSchedule {
  std::vector<CaptureLeg> legs;
  std::int64_t value = 0;  // == legs.size(): one leg per intruder
};

struct OracleOptions {
  int node_cap = 8;  // distinct (time, leaf) trajectories worth searching
  std::int64_t expansion_budget = 1'000'000;  // best-first pops before giving up
};

struct OracleResult {
  std::int64_t captures = 0;
  CaptureSchedule schedule;
  /* False when a budget stopped the search, in which case `captures` is the
   * best lower bound found.  All-captured results are exact regardless. */
  bool exact = true;
  std::int64_t expanded = 0;
};

/* Exact maximum captures by best-first branch-and-bound over capture orders.
 * For a fixed order the earliest interception per leg is optimal (capturing
 * sooner only frees the defender earlier), so orders are the whole search
 * space.  Releases sharing (time, leaf) ride one trajectory and fall in one
 * capture. */
OracleResult optimal_offline(const Environment& env, const Speed& v,
                             const InputInstance& inst,
                             const OracleOptions& options = {});

/* Fast lower bound: repeatedly intercept the earliest-loss intruder still
 * interceptable (ties to the earlier release entry). */
std::int64_t greedy_offline(const Environment& env, const Speed& v,
                            const InputInstance& inst);

}  // namespace tpd

#endif
