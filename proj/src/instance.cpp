#include "tpd/instance.hpp"

#include <algorithm>
#include <tuple>

#include <nlohmann/json.hpp>

namespace tpd {

using ojson = nlohmann::ordered_json;

void canonicalize(InputInstance& inst) {
  // exact-time bookkeeping downstream assumes reduced fractions, so repair
  // whatever a programmatic caller handed us before ordering by value
  for (auto& r : inst.releases) r.t.canonicalize();
  std::sort(inst.releases.begin(), inst.releases.end(), [](const Release& a, const Release& b) {
    return std::tie(a.t, a.leaf) < std::tie(b.t, b.leaf);
  });
  std::vector<Release> merged;
  for (auto& r : inst.releases) {
    if (!merged.empty() && merged.back().t == r.t && merged.back().leaf == r.leaf)
      merged.back().count += r.count;
    else
      merged.push_back(std::move(r));
  }
  inst.releases = std::move(merged);
}

void validate_instance(const Environment& env, const InputInstance& inst) {
  for (std::size_t i = 0; i < inst.releases.size(); ++i) {
    const Release& r = inst.releases[i];
    if (r.t < 0) throw ValidationError("release time must be >= 0");
    if (!env.valid_vertex(r.leaf) || !env.is_leaf(r.leaf))
      throw ValidationError("release leaf " + std::to_string(r.leaf) + " is not an entrance");
    if (r.count < 1) throw ValidationError("release count must be >= 1");
    if (i > 0 && std::tie(inst.releases[i - 1].t, inst.releases[i - 1].leaf) >=
                     std::tie(r.t, r.leaf))
      throw ValidationError("releases must be sorted by (t, leaf) with no duplicates");
  }
}

std::vector<Intruder> expand_intruders(const Environment& env, const InputInstance& inst) {
  validate_instance(env, inst);
  std::vector<Intruder> out;
  std::int64_t id = 0;
  for (const Release& r : inst.releases)
    for (std::int64_t k = 0; k < r.count; ++k) out.push_back({id++, r.leaf, r.t});
  return out;
}

namespace {

Rat json_rat(const ojson& j, const char* field) {
  if (!j.is_string()) throw ValidationError(std::string(field) + " must be a rational string");
  return parse_rat(j.get<std::string>());
}

std::int64_t json_int(const ojson& j, const char* field) {
  if (!j.is_number_integer()) throw ValidationError(std::string(field) + " must be an integer");
  return j.get<std::int64_t>();
}

}  // namespace

ScenarioFile parse_scenario(const std::string& json_text) {
  ojson j = ojson::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("instance file is not valid JSON");
  if (!j.is_object()) throw ValidationError("instance file must be a JSON object");
  for (const char* field : {"d", "delta", "rho", "v", "releases"})
    if (!j.contains(field)) throw ValidationError(std::string("missing field ") + field);

  ScenarioFile sc;
  sc.d = static_cast<int>(json_int(j["d"], "d"));
  sc.delta = static_cast<int>(json_int(j["delta"], "delta"));
  sc.rho = static_cast<int>(json_int(j["rho"], "rho"));
  sc.v = json_rat(j["v"], "v");
  if (sc.v <= 0 || sc.v >= 1) throw ValidationError("v must lie strictly in (0, 1)");
  if (!j["releases"].is_array()) throw ValidationError("releases must be an array");
  for (const auto& e : j["releases"]) {
    if (!e.is_object()) throw ValidationError("each release must be an object");
    for (const char* field : {"t", "leaf", "count"})
      if (!e.contains(field)) throw ValidationError(std::string("release missing field ") + field);
    Release r;
    r.t = json_rat(e["t"], "t");
    r.leaf = json_int(e["leaf"], "leaf");
    r.count = json_int(e["count"], "count");
    sc.instance.releases.push_back(std::move(r));
  }
  canonicalize(sc.instance);
  validate_instance(environment_of(sc), sc.instance);
  return sc;
}

std::string scenario_to_json(const ScenarioFile& sc) {
  ojson j;
  j["d"] = sc.d;
  j["delta"] = sc.delta;
  j["rho"] = sc.rho;
  j["v"] = rat_str(sc.v);
  j["releases"] = ojson::array();
  for (const Release& r : sc.instance.releases) {
    ojson e;
    e["t"] = rat_str(r.t);
    e["leaf"] = r.leaf;
    e["count"] = r.count;
    j["releases"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

Environment environment_of(const ScenarioFile& sc) {
  return Environment(sc.d, sc.delta, sc.rho);
}

InputInstance random_instance(const Environment& env, std::mt19937_64& rng,
                              const RandomInstanceParams& params) {
  if (params.max_events < 1 || params.max_count < 1 || params.t_max < 0 ||
      params.denom_log2 < 0 || params.denom_log2 > 30)
    throw ValidationError("random instance parameters out of range");
  const auto& leaves = env.leaf_entrances();
  std::int64_t denom = std::int64_t(1) << params.denom_log2;
  // Plain modulo on mt19937_64 output: portable and deterministic, unlike
  // std::uniform_int_distribution.
  std::uint64_t events = 1 + rng() % static_cast<std::uint64_t>(params.max_events);
  InputInstance inst;
  for (std::uint64_t i = 0; i < events; ++i) {
    Release r;
    std::uint64_t grid = static_cast<std::uint64_t>(params.t_max) * denom + 1;
    r.t = Rat(static_cast<long>(rng() % grid), static_cast<long>(denom));
    r.t.canonicalize();
    r.leaf = leaves[rng() % leaves.size()];
    r.count = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(params.max_count));
    inst.releases.push_back(std::move(r));
  }
  canonicalize(inst);
  return inst;
}

}  // namespace tpd
