#include "tpd/adversarial.hpp"

#include <algorithm>

#include "tpd/regimes.hpp"

namespace tpd {

namespace {

/* Leftmost perimeter vertex inside the subtree of the root's j-th child. */
VertexId perimeter_under_branch(const Environment& env, int j) {
  VertexId p = env.child(0, j);
  for (int depth = 1; depth < env.perimeter_depth(); ++depth) p = env.child(p, 0);
  return p;
}

}  // namespace

BurstStreamAdversary::BurstStreamAdversary(const Environment& env,
                                           const Speed& v, std::int64_t c)
    : watch_(perimeter_under_branch(env, 0)),
      burst_leaf_(env.leftmost_leaf(perimeter_under_branch(env, 1))),
      c_(c),
      stream_{env.leftmost_leaf(watch_), Rat(2 * env.depth()), Rat(env.depth()),
              Rat(0)} {
  if (c_ < 1) throw ValidationError("c must be a positive integer");
  if (v.value() <= thm1_bound(env.depth(), env.perimeter_depth()))
    throw ValidationError("v must exceed (d-rho)/(2*rho)");
  // Long enough that a defender milking the stream still concedes ratio c+1,
  // yet finite so that runs against a never-triggering policy terminate.
  std::int64_t periods = std::max<std::int64_t>(c_ + 2, 6);
  for (std::int64_t k = 0; k < periods; ++k)
    pending_.push_back({Rat(stream_.start + k * stream_.period), stream_.leaf, 1});
  stream_.end = pending_.back().t;
}

std::optional<Release> BurstStreamAdversary::next_release() const {
  if (pending_.empty()) return std::nullopt;
  return pending_.front();
}

void BurstStreamAdversary::pop_release() { pending_.pop_front(); }

std::optional<VertexId> BurstStreamAdversary::watching() const {
  if (triggered_) return std::nullopt;
  return watch_;
}

void BurstStreamAdversary::on_defender_at(const Rat& time) {
  triggered_ = true;
  while (!pending_.empty() && pending_.back().t > time) pending_.pop_back();
  pending_.push_back({time, burst_leaf_, c_ + 1});
  burst_ = BurstSpec{burst_leaf_, c_ + 1, time};
}

std::unique_ptr<BurstStreamAdversary> thm1_adversary(const Environment& env,
                                                     const Speed& v,
                                                     std::int64_t c) {
  return std::make_unique<BurstStreamAdversary>(env, v, c);
}

std::pair<InputInstance, InputInstance> thm2_instances(const Environment& env,
                                                       const Speed& v) {
  if (v.value() < thm2_bound(env.depth(), env.perimeter_depth()))
    throw ValidationError("v must be at least (d-rho)/(d+rho)");
  int d = env.depth(), rho = env.perimeter_depth();
  VertexId li = env.leftmost_leaf(perimeter_under_branch(env, 0));
  VertexId lj = env.leftmost_leaf(perimeter_under_branch(env, 1));
  Rat second = 2 * d + rho - Rat(d - rho) / v.value();
  InputInstance a{{{Rat(d), li, 1}, {second, lj, 1}}};
  InputInstance b{{{Rat(d), lj, 1}, {second, li, 1}}};
  canonicalize(a);
  canonicalize(b);
  return {a, b};
}

Thm3Instance thm3_instance(const Environment& env, const Speed& v) {
  int d = env.depth(), rho = env.perimeter_depth();
  if (env.branching() < 3)
    throw ValidationError(
        "three pairwise 2*rho-distant perimeter vertices require delta >= 3");
  if (v.value() < thm3_lower_bound(d, rho) || v.value() >= thm2_bound(d, rho))
    throw ValidationError(
        "v must satisfy (d-rho)/(d+3*rho) <= v < (d-rho)/(d+rho)");
  if (!eq2_holds(d, rho, v.value()))
    throw ValidationError("the three-release slack inequality fails at this v");
  Abc3Spec spec{env.leftmost_leaf(perimeter_under_branch(env, 0)),
                env.leftmost_leaf(perimeter_under_branch(env, 1)),
                env.leftmost_leaf(perimeter_under_branch(env, 2)),
                Rat(d + 3 * rho),
                Rat(0),
                Rat(0),
                d + 3 * rho - Rat(d - rho) / v.value()};
  spec.t_b = d + rho + spec.epsilon;
  spec.t_c = spec.t_a + spec.epsilon;
  InputInstance inst{{{spec.t_a, spec.l1, 1},
                      {spec.t_b, spec.l2, 1},
                      {spec.t_c, spec.l3, 1}}};
  canonicalize(inst);
  return {spec, inst};
}

FeasibilityResult capture_order_feasible(const Environment& env, const Speed& v,
                                         const InputInstance& inst,
                                         const std::vector<std::int64_t>& order) {
  InputInstance canon = inst;
  canonicalize(canon);
  std::vector<Intruder> intruders = expand_intruders(env, canon);
  std::vector<bool> seen(intruders.size(), false);
  if (order.size() != intruders.size())
    throw ValidationError("order must be a permutation of the intruder ids");
  for (std::int64_t id : order) {
    if (id < 0 || id >= static_cast<std::int64_t>(intruders.size()) || seen[id])
      throw ValidationError("order must be a permutation of the intruder ids");
    seen[id] = true;
  }

  FeasibilityResult res;
  Location loc = Location::at_vertex(0);
  Rat now(0);
  for (std::int64_t id : order) {
    auto ic = intercept_time(env, loc, now, intruders[id], v);
    if (!ic) {
      res.failed_id = id;
      return res;
    }
    res.schedule.legs.push_back({id, ic->time, ic->where});
    ++res.schedule.value;
    loc = ic->where;
    now = ic->time;
  }
  res.feasible = true;
  return res;
}

}  // namespace tpd
