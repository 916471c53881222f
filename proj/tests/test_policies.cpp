#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "tpd/engine.hpp"
#include "tpd/policies.hpp"

using namespace tpd;

namespace {

ObservedIntruder at(std::int64_t id, Location where) { return {id, where}; }

InputInstance releases(std::vector<Release> rs) {
  InputInstance inst;
  inst.releases = std::move(rs);
  canonicalize(inst);
  return inst;
}

}  // namespace

TEST_CASE("band counts split intruders by distance to their station") {
  Environment env(3, 2, 1);
  Rat v(1, 4);  // bands below each station: near [0,1/2], mid (1/2,1], far (1,3/2]
  std::vector<ObservedIntruder> obs{
      at(0, Location::on_edge(env, 3, Rat(1, 2))),   // 1/2 to go: boundary joins near
      at(1, Location::at_vertex(3)),                 // 1 to go: boundary joins mid
      at(2, Location::on_edge(env, 7, Rat(3, 4))),   // 7/4 to go: beyond every band
      at(3, Location::on_edge(env, 7, Rat(1, 4))),   // 5/4 to go: far
      at(4, Location::at_vertex(5)),                 // station 2's subtree, 1 to go
      at(5, Location::at_vertex(2)),                 // station 2 itself
  };
  SapRegionCounts counts = sap_region_counts(env, v, obs);
  REQUIRE(counts.size() == 2);
  CHECK(counts[0] == SapBandCounts{1, 1, 1});
  CHECK(counts[1] == SapBandCounts{1, 1, 0});
}

TEST_CASE("sap parks at the loaded station and never leaves it") {
  Environment env(2, 2, 1);
  Speed v(Rat(1, 8));
  std::vector<Release> rs;
  for (int k = 0; k <= 40; ++k) rs.push_back({Rat(k, 2), (k % 2) ? 6 : 5, 1});
  StayAtPerimeterPolicy sap(env, v);
  Trace tr = simulate(env, v, releases(std::move(rs)), sap);

  CHECK(tr.captured == 41);
  CHECK(tr.lost == 0);
  const auto& epochs = sap.epochs();
  REQUIRE(epochs.size() >= 10);
  CHECK(epochs.front().start == 6);
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const SapEpoch& e = epochs[i];
    CHECK(e.end == e.start + (e.moved ? 4 : 2));
    if (i > 0) CHECK(e.start == epochs[i - 1].end);
    // while the stream is live the station keeps scoring; once the board is
    // empty the all-zero tie may drift the defender, which is fine
    if (e.start < 28) {
      CHECK_FALSE(e.moved);
      CHECK(e.from_k == 1);
      CHECK(e.to_k == 1);
    }
  }
}

TEST_CASE("sap relocates once its station dries up") {
  Environment env(2, 2, 1);
  Speed v(Rat(1, 8));
  std::vector<Release> rs{{Rat(0), 5, 1}};  // one early bird below station 2
  for (int k = 0; k <= 32; ++k) rs.push_back({Rat(4) + Rat(k, 2), (k % 2) ? 4 : 3, 1});
  StayAtPerimeterPolicy sap(env, v);
  Trace tr = simulate(env, v, releases(std::move(rs)), sap);

  CHECK(tr.captured == 34);
  CHECK(tr.lost == 0);
  const auto& epochs = sap.epochs();
  REQUIRE(epochs.size() >= 3);

  // boundary at 6: the candidate's mid band is empty, the guard holds it back
  CHECK(epochs[0].start == 6);
  CHECK(epochs[0].end == 8);
  CHECK_FALSE(epochs[0].moved);
  CHECK(epochs[0].from_k == 1);

  // boundary at 8: the early bird was just captured, the stream wins
  CHECK(epochs[1].start == 8);
  CHECK(epochs[1].end == 12);
  CHECK(epochs[1].moved);
  CHECK(epochs[1].from_k == 1);
  CHECK(epochs[1].to_k == 0);

  for (std::size_t i = 2; i < epochs.size(); ++i) {
    const SapEpoch& e = epochs[i];
    CHECK_FALSE(e.moved);
    CHECK(e.from_k == 0);
    CHECK(e.to_k == 0);
    CHECK(e.end == e.start + 2);
    CHECK(e.start == epochs[i - 1].end);
  }
}

TEST_CASE("sap refuses speeds outside its guarantee unless overridden") {
  Environment env(2, 2, 1);
  CHECK_THROWS_WITH(StayAtPerimeterPolicy(env, Speed(Rat(1, 5))),
                    "sap regime violated: need 6*rho*v <= d - rho");
  StayAtPerimeterPolicy forced(env, Speed(Rat(1, 5)), true);
  CHECK(forced.name() == "sap");
  StayAtPerimeterPolicy inside(env, Speed(Rat(1, 6)));
  CHECK(inside.epochs().empty());
}

TEST_CASE("capture region counts require depth at least halfway past the perimeter") {
  Environment env(5, 2, 1);
  CassParams params;  // s = 1: region is depth >= 3 under anchors 1 and 2
  std::vector<ObservedIntruder> obs{
      at(0, Location::at_vertex(7)),
      at(1, Location::on_edge(env, 7, Rat(1, 2))),   // depth 5/2: too shallow
      at(2, Location::on_edge(env, 15, Rat(1, 4))),  // depth 13/4
      at(3, Location::at_vertex(2)),                 // the anchor itself: too shallow
      at(4, Location::at_vertex(env.leftmost_leaf(2))),
  };
  auto counts = cass_capture_region_counts(env, params, obs);
  CHECK(counts == std::vector<std::int64_t>{2, 1});

  CHECK_THROWS_WITH(cass_capture_region_counts(env, CassParams{0}, obs),
                    "s must satisfy 1 <= s <= rho");
  CHECK_THROWS_WITH(cass_capture_region_counts(env, CassParams{2}, obs),
                    "s must satisfy 1 <= s <= rho");
}

TEST_CASE("cass sweeps the fullest subtree in back-to-back epochs") {
  Environment env(2, 2, 1);
  Speed v(Rat(1, 16));
  CompareSubtreeSweepPolicy cass(env, v, CassParams{1});
  CHECK(cass.epoch_length() == 6);

  Trace tr = simulate(env, v, releases({{Rat(1), 3, 1}, {Rat(1), 5, 1}, {Rat(3, 2), 6, 1}}),
                      cass);
  CHECK(tr.captured == 3);
  CHECK(tr.lost == 0);

  std::vector<Rat> capture_times;
  for (const auto& e : tr.events)
    if (e.kind == EventKind::Capture) capture_times.push_back(e.time);
  CHECK(capture_times == std::vector<Rat>{Rat(145, 17), Rat(355, 34), Rat(241, 17)});

  const auto& epochs = cass.epochs();
  REQUIRE(epochs.size() >= 2);
  CHECK(epochs[0].start == 7);  // one epoch length after the first release
  CHECK(epochs[0].chosen == 1);
  CHECK(epochs[0].counts == std::vector<std::int64_t>{1, 2});
  CHECK(epochs[1].start == 13);
  CHECK(epochs[1].chosen == 0);  // empty board: ties fall to the lowest anchor
  CHECK(epochs[1].counts == std::vector<std::int64_t>{0, 0});
  for (std::size_t i = 1; i < epochs.size(); ++i)
    CHECK(epochs[i].start == epochs[i - 1].start + 6);
}

TEST_CASE("cass stays put until the first release shows up") {
  Environment env(2, 2, 1);
  Speed v(Rat(1, 16));
  CompareSubtreeSweepPolicy cass(env, v, CassParams{1});
  Trace tr = simulate(env, v, releases({{Rat(5), 4, 1}}), cass);
  CHECK(cass.epochs().front().start == 11);
  CHECK(tr.captured == 1);
  // nothing moves before the first epoch
  for (const auto& seg : tr.defender_path)
    if (seg.t1 <= 11) CHECK(seg.from == Location::at_vertex(0));
}

TEST_CASE("cass validates the anchor depth and its speed regime") {
  Environment env(2, 2, 1);
  CHECK_THROWS_WITH(CompareSubtreeSweepPolicy(env, Speed(Rat(1, 16)), CassParams{0}),
                    "s must satisfy 1 <= s <= rho");
  CHECK_THROWS_WITH(CompareSubtreeSweepPolicy(env, Speed(Rat(1, 16)), CassParams{2}),
                    "s must satisfy 1 <= s <= rho");
  CHECK_THROWS_AS(CompareSubtreeSweepPolicy(env, Speed(Rat(1, 4)), CassParams{1}),
                  ValidationError);
  CompareSubtreeSweepPolicy forced(env, Speed(Rat(1, 4)), CassParams{1}, true);
  CHECK(forced.name() == "cass");
}

TEST_CASE("scripts are validated up front") {
  Environment env(2, 2, 1);
  CHECK_THROWS_WITH(
      ScriptPolicy(env, {{Location::at_vertex(3), Rat(5)}, {Location::at_vertex(1), Rat(3)}}),
      "script step times must be nondecreasing");
  CHECK_THROWS_WITH(ScriptPolicy(env, {{Location::at_vertex(99), Rat(5)}}),
                    "script step outside the environment");
}

TEST_CASE("the factory spells out every policy it knows") {
  Environment env(2, 2, 1);
  Speed v(Rat(1, 16));
  for (const char* name : {"hold", "sweeping", "sap", "cass"}) {
    PolicySpec spec;
    spec.name = name;
    CHECK(make_policy(env, v, spec)->name() == name);
  }
  PolicySpec script;
  script.name = "script";
  script.script = {{Location::at_vertex(1), Rat(4)}};
  CHECK(make_policy(env, v, script)->name() == "script");

  PolicySpec bogus;
  bogus.name = "zigzag";
  CHECK_THROWS_WITH(make_policy(env, v, bogus), "unknown policy: zigzag");
}
