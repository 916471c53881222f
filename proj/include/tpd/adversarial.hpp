#ifndef TPD_ADVERSARIAL_HPP
#define TPD_ADVERSARIAL_HPP

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "tpd/engine.hpp"
#include "tpd/oracle.hpp"

namespace tpd {

/* Instance generators realizing the lower-bound constructions behind the
 * thm1/thm2/thm3 speed thresholds, plus a capture-order feasibility checker
 * for three-release instances. */

struct StreamSpec {
  VertexId leaf;
  Rat period;
  Rat start, end;  // first and last scheduled release
};

struct BurstSpec {
  VertexId leaf;
  std::int64_t n;
  Rat time;
};

/* Reactive source for the fast regime v > (d-rho)/(2*rho): feeds a slow
 * stream of single intruders at one leaf, watches the perimeter vertex above
 * it, and the first time the defender touches that vertex cancels the rest of
 * the stream and drops a burst of c+1 intruders down the far branch.  Bound
 * to one simulation, like a policy. */
class BurstStreamAdversary : public AdaptiveSource {
 public:
  BurstStreamAdversary(const Environment& env, const Speed& v, std::int64_t c);

  std::optional<Release> next_release() const override;
  void pop_release() override;
  std::optional<VertexId> watching() const override;
  void on_defender_at(const Rat& time) override;

  VertexId watch_vertex() const { return watch_; }
  const StreamSpec& stream() const { return stream_; }
  /* Set once the watch fires. */
  const std::optional<BurstSpec>& burst() const { return burst_; }

 private:
  VertexId watch_;
  VertexId burst_leaf_;
  std::int64_t c_;
  StreamSpec stream_;
  std::optional<BurstSpec> burst_;
  std::deque<Release> pending_;
  bool triggered_ = false;
};

std::unique_ptr<BurstStreamAdversary> thm1_adversary(const Environment& env,
                                                     const Speed& v,
                                                     std::int64_t c);

/* The two-release mirror pair for v >= (d-rho)/(d+rho): one intruder at t = d
 * down one branch, the second at 2d + rho - (d-rho)/v down another (equal to
 * d exactly at the threshold), and the same with the branches swapped.  A
 * deterministic defender commits to one side; the mirror punishes it. */
std::pair<InputInstance, InputInstance> thm2_instances(const Environment& env,
                                                       const Speed& v);

struct Abc3Spec {
  VertexId l1, l2, l3;  // leaves under pairwise 2*rho-distant perimeter vertices
  Rat t_a, t_b, t_c;    // release times for the intruders at l1, l2, l3
  Rat epsilon;          // lateness budget: d + 3*rho - (d-rho)/v
};

struct Thm3Instance {
  Abc3Spec spec;
  InputInstance instance;
};

/* Three releases across three branches, timed so that only the two sweeps of
 * the middle intruder's window survive as capture orders.  Requires delta >=
 * 3, (d-rho)/(d+3*rho) <= v < (d-rho)/(d+rho), and the slack inequality. */
Thm3Instance thm3_instance(const Environment& env, const Speed& v);

struct FeasibilityResult {
  bool feasible = false;
  CaptureSchedule schedule;   // complete when feasible, else the prefix done
  std::int64_t failed_id = -1;  // first intruder unreachable before its loss
};

/* Can a speed-1 defender starting at the root at t = 0 capture every intruder
 * of `inst` in exactly the order given (earliest interception each leg)? */
FeasibilityResult capture_order_feasible(const Environment& env, const Speed& v,
                                         const InputInstance& inst,
                                         const std::vector<std::int64_t>& order);

}  // namespace tpd

#endif
