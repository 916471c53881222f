/* tpd: command-line front end for the perimeter-defense simulator.
 *
 * Subcommands: simulate, compete, oracle, adversary, regimes, validate,
 * plotdata.  All quantities are exact rationals written as "p/q" (or a bare
 * integer); outputs are deterministic byte-for-byte given the same arguments
 * and TPD_SEED.
 *
 * Exit codes: 0 success, 2 invalid input or configuration, 3 oracle budget
 * exhausted (oracle subcommand only), 4 internal or policy-contract failure.
 */

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tpd/adversarial.hpp"
#include "tpd/engine.hpp"
#include "tpd/instance.hpp"
#include "tpd/kinematics.hpp"
#include "tpd/oracle.hpp"
#include "tpd/policies.hpp"
#include "tpd/rational.hpp"
#include "tpd/regimes.hpp"
#include "tpd/tree_env.hpp"

namespace {

using namespace tpd;
using ojson = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << content;
  out.flush();
  if (!out) throw ValidationError("cannot write " + path);
}

nlohmann::json parse_json(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(what + ": " + e.what());
  }
}

/* Seed precedence: --seed flag, then TPD_SEED, then 0. */
std::uint64_t env_seed() {
  const char* s = std::getenv("TPD_SEED");
  if (s == nullptr || *s == '\0') return 0;
  const std::string str(s);
  if (str.find_first_not_of("0123456789") != std::string::npos)
    throw ValidationError("TPD_SEED must be a nonnegative integer");
  try {
    return std::stoull(str);
  } catch (const std::exception&) {
    throw ValidationError("TPD_SEED must be a nonnegative integer");
  }
}

std::string trace_csv(const Trace& tr) {
  std::ostringstream out;
  out << "#format=1\n";
  out << "time,kind,intruder_id,vertex_or_edge,offset\n";
  for (const auto& e : tr.events) {
    out << rat_str(e.time) << ',' << event_kind_name(e.kind) << ',';
    if (e.intruder_id >= 0) out << e.intruder_id;
    out << ',' << e.where.edge_child() << ',' << rat_str(e.where.offset()) << '\n';
  }
  return out.str();
}

std::string oracle_report(const OracleResult& res) {
  std::ostringstream out;
  out << "#format=1\n";
  out << "captures=" << res.captures << '\n';
  out << "exact=" << (res.exact ? "true" : "false") << '\n';
  out << "order,intruder_id,time,vertex_or_edge,offset\n";
  std::int64_t order = 1;
  for (const auto& leg : res.schedule.legs) {
    out << order++ << ',' << leg.intruder_id << ',' << rat_str(leg.time) << ','
        << leg.where.edge_child() << ',' << rat_str(leg.where.offset()) << '\n';
  }
  return out.str();
}

ojson base_summary(const ScenarioFile& sc, const std::string& policy, const Trace& tr) {
  ojson j;
  j["d"] = sc.d;
  j["delta"] = sc.delta;
  j["rho"] = sc.rho;
  j["v"] = rat_str(sc.v);
  j["policy"] = policy;
  j["released"] = tr.released;
  j["captured"] = tr.captured;
  j["lost"] = tr.lost;
  j["horizon"] = rat_str(tr.horizon);
  j["events"] = static_cast<std::int64_t>(tr.events.size());
  return j;
}

Rat json_rat(const nlohmann::json& val, const std::string& what) {
  if (val.is_string()) return parse_rat(val.get<std::string>());
  if (val.is_number_integer()) return rat_of(val.get<std::int64_t>());
  throw ValidationError(what + " must be an integer or a \"p/q\" string");
}

std::vector<ScriptStep> parse_script_steps(const Environment& env,
                                           const std::string& text) {
  nlohmann::json doc = parse_json(text, "script file");
  if (!doc.is_array())
    throw ValidationError("script file must hold a json array of steps");
  std::vector<ScriptStep> steps;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("until"))
      throw ValidationError("script step needs an until time");
    Rat until = json_rat(item.at("until"), "script until");
    if (item.contains("vertex")) {
      if (!item.at("vertex").is_number_integer())
        throw ValidationError("script vertex must be an integer id");
      steps.push_back({Location::at_vertex(item.at("vertex").get<std::int64_t>()), until});
    } else if (item.contains("edge_child")) {
      if (!item.at("edge_child").is_number_integer())
        throw ValidationError("script edge_child must be an integer id");
      if (!item.contains("offset"))
        throw ValidationError("script step on an edge needs an offset");
      Rat off = json_rat(item.at("offset"), "script offset");
      if (off < 0 || off > 1)
        throw ValidationError("script offset must lie in [0, 1]");
      steps.push_back(
          {Location::on_edge(env, item.at("edge_child").get<std::int64_t>(), off), until});
    } else {
      throw ValidationError("script step needs a vertex or an edge_child with offset");
    }
  }
  return steps;
}

/* ---- option bundles shared between subcommands ---- */

struct EnvOpts {
  int d = 0, delta = 0, rho = 0;
  std::string v;
  CLI::Option *od = nullptr, *odelta = nullptr, *orho = nullptr, *ov = nullptr;

  bool all_set() const {
    return od->count() && odelta->count() && orho->count() && ov->count();
  }
};

CLI::Option* last_wins(CLI::Option* o) {
  return o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

void add_env_opts(CLI::App* sub, EnvOpts& e) {
  e.od = last_wins(sub->add_option("--d", e.d, "tree depth"));
  e.odelta = last_wins(sub->add_option("--delta", e.delta, "branching factor"));
  e.orho = last_wins(sub->add_option("--rho", e.rho, "perimeter depth"));
  e.ov = last_wins(sub->add_option("--v", e.v, "intruder speed, p/q in (0, 1)"));
}

struct PolicyOpts {
  std::string policy;
  int s = 1;
  bool allow_out_of_regime = false;
  std::string script_file;
};

void add_policy_opts(CLI::App* sub, PolicyOpts& p, bool required) {
  auto* o = last_wins(
      sub->add_option("--policy", p.policy, "hold | sweeping | sap | cass | script"));
  if (required) o->required();
  last_wins(sub->add_option("--s", p.s, "cass anchor depth (default 1)"));
  sub->add_flag("--allow-out-of-regime", p.allow_out_of_regime,
                "run sap/cass even when v violates their speed regime");
  last_wins(sub->add_option("--script", p.script_file,
                            "json step file for the script policy"));
}

PolicySpec build_policy_spec(const Environment& env, const PolicyOpts& p) {
  PolicySpec spec;
  spec.name = p.policy;
  spec.cass_s = p.s;
  spec.allow_out_of_regime = p.allow_out_of_regime;
  if (!p.script_file.empty()) {
    if (spec.name != "script")
      throw ValidationError("--script applies only to the script policy");
    spec.script = parse_script_steps(env, read_file(p.script_file));
  } else if (spec.name == "script") {
    throw ValidationError("the script policy requires --script");
  }
  return spec;
}

struct OracleFlags {
  bool with_oracle = false;
  int node_cap = 8;
  std::int64_t budget = 1'000'000;
};

void add_oracle_opts(CLI::App* sub, OracleFlags& o, bool with_flag) {
  if (with_flag)
    sub->add_flag("--with-oracle", o.with_oracle,
                  "add offline optimum and competitive ratio to the summary");
  last_wins(sub->add_option("--node-cap", o.node_cap,
                            "max distinct release trajectories the oracle searches exactly"));
  last_wins(sub->add_option("--budget", o.budget,
                            "max best-first expansions before the oracle settles for a bound"));
}

void add_oracle_fields(ojson& j, const Environment& env, const Speed& v,
                       const InputInstance& inst, const OracleFlags& f,
                       std::int64_t online) {
  OracleResult res = optimal_offline(env, v, inst, OracleOptions{f.node_cap, f.budget});
  j["offline"] = res.captures;
  j["offline_exact"] = res.exact;
  j["ratio"] = ratio_str(competitive_ratio(res.captures, online));
}

struct SourceOpts {
  std::string instance_file;
  std::string generate;
  std::uint64_t seed = 0;
  CLI::Option* oseed = nullptr;
  RandomInstanceParams params;
};

void add_source_opts(CLI::App* sub, SourceOpts& s) {
  last_wins(sub->add_option("--instance", s.instance_file, "scenario json file"));
  last_wins(sub->add_option("--generate", s.generate,
                            "built-in generator: random | thm2a | thm2b | thm3"));
  s.oseed = last_wins(sub->add_option("--seed", s.seed,
                                      "rng seed for random generation (default TPD_SEED, then 0)"));
  last_wins(sub->add_option("--max-events", s.params.max_events,
                            "random: distinct (time, leaf) draws"));
  last_wins(sub->add_option("--max-count", s.params.max_count,
                            "random: max burst size per draw"));
  last_wins(sub->add_option("--t-max", s.params.t_max,
                            "random: releases fall in [0, t-max]"));
  last_wins(sub->add_option("--denom-log2", s.params.denom_log2,
                            "random: release times on a 2^-denom-log2 grid"));
}

std::uint64_t effective_seed(const SourceOpts& s) {
  return s.oseed->count() ? s.seed : env_seed();
}

void check_env_conflicts(const EnvOpts& e, const ScenarioFile& sc) {
  if (e.od->count() && e.d != sc.d)
    throw ValidationError("--d conflicts with the instance file");
  if (e.odelta->count() && e.delta != sc.delta)
    throw ValidationError("--delta conflicts with the instance file");
  if (e.orho->count() && e.rho != sc.rho)
    throw ValidationError("--rho conflicts with the instance file");
  if (e.ov->count() && parse_rat(e.v) != sc.v)
    throw ValidationError("--v conflicts with the instance file");
}

ScenarioFile generated_scenario(const SourceOpts& s, const EnvOpts& e) {
  if (!e.all_set())
    throw ValidationError("--generate requires --d, --delta, --rho and --v");
  ScenarioFile sc;
  sc.d = e.d;
  sc.delta = e.delta;
  sc.rho = e.rho;
  sc.v = parse_rat(e.v);
  Environment env = environment_of(sc);
  Speed v(sc.v);
  if (s.generate == "random") {
    std::mt19937_64 rng(effective_seed(s));
    sc.instance = random_instance(env, rng, s.params);
  } else if (s.generate == "thm2a") {
    sc.instance = thm2_instances(env, v).first;
  } else if (s.generate == "thm2b") {
    sc.instance = thm2_instances(env, v).second;
  } else if (s.generate == "thm3") {
    sc.instance = thm3_instance(env, v).instance;
  } else {
    throw ValidationError("unknown generator: " + s.generate);
  }
  return sc;
}

ScenarioFile resolve_scenario(const SourceOpts& s, const EnvOpts& e) {
  const bool have_file = !s.instance_file.empty();
  const bool have_gen = !s.generate.empty();
  if (have_file == have_gen)
    throw ValidationError("provide exactly one instance source (--instance or --generate)");
  if (have_file) {
    ScenarioFile sc = parse_scenario(read_file(s.instance_file));
    check_env_conflicts(e, sc);
    return sc;
  }
  return generated_scenario(s, e);
}

std::optional<Rat> parse_horizon(const std::string& text) {
  if (text.empty()) return std::nullopt;
  Rat h = parse_rat(text);
  if (h < 0) throw ValidationError("horizon must be nonnegative");
  return h;
}

/* ---- simulate ---- */

struct SimulateOpts {
  EnvOpts env;
  PolicyOpts pol;
  SourceOpts src;
  OracleFlags oracle;
  std::string horizon, trace_file, summary_file, save_instance;
};

int run_simulate(const SimulateOpts& o) {
  ScenarioFile sc = resolve_scenario(o.src, o.env);
  Environment env = environment_of(sc);
  Speed v(sc.v);
  auto pol = make_policy(env, v, build_policy_spec(env, o.pol));
  SimOptions sopt;
  sopt.horizon = parse_horizon(o.horizon);
  Trace tr = simulate(env, v, sc.instance, *pol, sopt);
  if (!o.trace_file.empty()) write_file(o.trace_file, trace_csv(tr));
  if (!o.save_instance.empty()) write_file(o.save_instance, scenario_to_json(sc));
  ojson j = base_summary(sc, pol->name(), tr);
  if (o.oracle.with_oracle)
    add_oracle_fields(j, env, v, sc.instance, o.oracle, tr.captured);
  const std::string text = j.dump(2) + "\n";
  if (!o.summary_file.empty()) write_file(o.summary_file, text);
  std::cout << text;
  return 0;
}

/* ---- compete ---- */

struct CompeteOpts {
  EnvOpts env;
  PolicyOpts pol;
  OracleFlags oracle;
  std::string family;
  int count = 50;
  std::uint64_t seed = 0;
  CLI::Option* oseed = nullptr;
  RandomInstanceParams params;
  std::vector<std::string> instance_files;
  std::string out_file;
};

struct LabeledScenario {
  std::string label;
  ScenarioFile sc;
};

std::vector<LabeledScenario> compete_family(const CompeteOpts& o) {
  std::vector<LabeledScenario> rows;
  if (!o.family.empty() && !o.instance_files.empty())
    throw ValidationError("provide exactly one family source (--family or --instances)");
  if (o.family.empty() && o.instance_files.empty())
    throw ValidationError("provide exactly one family source (--family or --instances)");
  if (!o.family.empty()) {
    if (!o.env.all_set())
      throw ValidationError("--family requires --d, --delta, --rho and --v");
    ScenarioFile base;
    base.d = o.env.d;
    base.delta = o.env.delta;
    base.rho = o.env.rho;
    base.v = parse_rat(o.env.v);
    Environment env = environment_of(base);
    Speed v(base.v);
    if (o.family == "random") {
      if (o.count < 0) throw ValidationError("count must be nonnegative");
      std::uint64_t seed = o.oseed->count() ? o.seed : env_seed();
      std::mt19937_64 rng(seed);
      for (int k = 0; k < o.count; ++k) {
        ScenarioFile sc = base;
        sc.instance = random_instance(env, rng, o.params);
        rows.push_back({"random-" + std::to_string(k), sc});
      }
    } else if (o.family == "thm2") {
      auto pair = thm2_instances(env, v);
      ScenarioFile a = base, b = base;
      a.instance = pair.first;
      b.instance = pair.second;
      rows.push_back({"thm2-a", a});
      rows.push_back({"thm2-b", b});
    } else if (o.family == "thm3") {
      ScenarioFile sc = base;
      sc.instance = thm3_instance(env, v).instance;
      rows.push_back({"thm3", sc});
    } else {
      throw ValidationError("unknown family: " + o.family);
    }
  } else {
    for (const auto& path : o.instance_files) {
      if (path.find(',') != std::string::npos || path.find('\n') != std::string::npos)
        throw ValidationError("instance path must not contain commas or newlines");
      rows.push_back({path, parse_scenario(read_file(path))});
    }
  }
  return rows;
}

int run_compete(const CompeteOpts& o) {
  std::vector<LabeledScenario> rows = compete_family(o);
  std::ostringstream out;
  out << "instance,d,delta,rho,v,policy,online,offline,offline_exact,ratio\n";
  bool any = false, all_exact = true, mixed_env = false;
  Ratio sup{false, Rat(0)};
  std::string policy_name;
  ScenarioFile first;
  for (const auto& row : rows) {
    const ScenarioFile& sc = row.sc;
    Environment env = environment_of(sc);
    Speed v(sc.v);
    auto pol = make_policy(env, v, build_policy_spec(env, o.pol));
    policy_name = pol->name();
    Trace tr = simulate(env, v, sc.instance, *pol, {});
    OracleResult res =
        optimal_offline(env, v, sc.instance, OracleOptions{o.oracle.node_cap, o.oracle.budget});
    Ratio r = competitive_ratio(res.captures, tr.captured);
    if (!any) {
      first = sc;
      sup = r;
    } else {
      if (sc.d != first.d || sc.delta != first.delta || sc.rho != first.rho ||
          sc.v != first.v)
        mixed_env = true;
      if (ratio_less(sup, r)) sup = r;
    }
    any = true;
    all_exact = all_exact && res.exact;
    out << row.label << ',' << sc.d << ',' << sc.delta << ',' << sc.rho << ','
        << rat_str(sc.v) << ',' << policy_name << ',' << tr.captured << ','
        << res.captures << ',' << (res.exact ? "true" : "false") << ','
        << ratio_str(r) << '\n';
  }
  if (any) {
    /* offline_exact false marks the sup as a lower bound only. */
    out << "sup,";
    if (!mixed_env)
      out << first.d << ',' << first.delta << ',' << first.rho << ','
          << rat_str(first.v);
    else
      out << ",,,";
    out << ',' << policy_name << ",,," << (all_exact ? "true" : "false") << ','
        << ratio_str(sup) << '\n';
  }
  const std::string text = out.str();
  if (!o.out_file.empty())
    write_file(o.out_file, text);
  else
    std::cout << text;
  return 0;
}

/* ---- oracle ---- */

struct OracleCmdOpts {
  std::string instance_file;
  OracleFlags oracle;
};

int run_oracle(const OracleCmdOpts& o) {
  ScenarioFile sc = parse_scenario(read_file(o.instance_file));
  Environment env = environment_of(sc);
  Speed v(sc.v);
  OracleResult res =
      optimal_offline(env, v, sc.instance, OracleOptions{o.oracle.node_cap, o.oracle.budget});
  std::cout << oracle_report(res);
  return res.exact ? 0 : 3;
}

/* ---- adversary ---- */

struct AdversaryOpts {
  EnvOpts env;
  PolicyOpts pol;
  OracleFlags oracle;
  int theorem = 0;
  std::int64_t c = 4;
  std::string variant = "a";
  std::string horizon, trace_file, summary_file, save_instance;
};

int run_adversary(const AdversaryOpts& o) {
  if (!o.env.all_set())
    throw ValidationError("adversary requires --d, --delta, --rho and --v");
  ScenarioFile sc;
  sc.d = o.env.d;
  sc.delta = o.env.delta;
  sc.rho = o.env.rho;
  sc.v = parse_rat(o.env.v);
  Environment env = environment_of(sc);
  Speed v(sc.v);
  auto pol = make_policy(env, v, build_policy_spec(env, o.pol));
  SimOptions sopt;
  sopt.horizon = parse_horizon(o.horizon);

  std::unique_ptr<BurstStreamAdversary> adv;
  InputInstance inst;
  if (o.theorem == 1) {
    adv = thm1_adversary(env, v, o.c);
    sopt.adversary = adv.get();
  } else if (o.theorem == 2) {
    if (o.variant != "a" && o.variant != "b")
      throw ValidationError("variant must be a or b");
    auto pair = thm2_instances(env, v);
    inst = o.variant == "a" ? pair.first : pair.second;
  } else if (o.theorem == 3) {
    inst = thm3_instance(env, v).instance;
  } else {
    throw ValidationError("theorem must be 1, 2 or 3");
  }

  Trace tr = simulate(env, v, inst, *pol, sopt);
  sc.instance = tr.realized;
  if (!o.save_instance.empty()) write_file(o.save_instance, scenario_to_json(sc));
  if (!o.trace_file.empty()) write_file(o.trace_file, trace_csv(tr));
  ojson j = base_summary(sc, pol->name(), tr);
  j["theorem"] = o.theorem;
  if (o.theorem == 2) j["variant"] = o.variant;
  if (o.oracle.with_oracle)
    add_oracle_fields(j, env, v, sc.instance, o.oracle, tr.captured);
  const std::string text = j.dump(2) + "\n";
  if (!o.summary_file.empty()) write_file(o.summary_file, text);
  std::cout << text;
  return 0;
}

/* ---- regimes ---- */

struct RegimesOpts {
  int d = 0, delta = 0;
  std::string out_file;
};

int run_regimes(const RegimesOpts& o) {
  const std::string csv = regime_csv(o.d, o.delta, regime_table(o.d, o.delta));
  if (!o.out_file.empty())
    write_file(o.out_file, csv);
  else
    std::cout << csv;
  return 0;
}

/* ---- validate ---- */

int run_validate(const std::string& instance_file) {
  ScenarioFile sc = parse_scenario(read_file(instance_file));
  Speed v(sc.v);
  (void)v;
  std::cout << "ok\n";
  return 0;
}

/* ---- plotdata ---- */

struct PlotdataOpts {
  std::string regimes_file, compete_file, out_file;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string join_from(const std::vector<std::string>& fields, std::size_t start) {
  std::string out;
  for (std::size_t i = start; i < fields.size(); ++i) {
    if (i > start) out.push_back(',');
    out += fields[i];
  }
  return out;
}

/* Appends the rho-level threshold columns (the cass_s = 1 regime row) to each
 * compete data row, keyed on (d, delta, rho).  The sup row is an aggregate
 * and is dropped. */
int run_plotdata(const PlotdataOpts& o) {
  const auto rlines = csv_lines(read_file(o.regimes_file));
  const auto clines = csv_lines(read_file(o.compete_file));
  if (rlines.empty()) throw ValidationError("regimes csv is empty");
  if (clines.empty()) throw ValidationError("compete csv is empty");

  const auto rheader = split_csv(rlines[0]);
  if (rheader.size() < 4 || rheader[0] != "d" || rheader[1] != "delta" ||
      rheader[2] != "rho")
    throw ValidationError("unrecognized regimes csv header");
  const auto cass_it = std::find(rheader.begin(), rheader.end(), "cass_s");
  if (cass_it == rheader.end())
    throw ValidationError("unrecognized regimes csv header");
  const std::size_t cass_col = static_cast<std::size_t>(cass_it - rheader.begin());

  const auto cheader = split_csv(clines[0]);
  const std::vector<std::string> expected = {"instance", "d",      "delta",
                                             "rho",      "v",      "policy",
                                             "online",   "offline", "offline_exact",
                                             "ratio"};
  if (cheader.size() < expected.size() ||
      !std::equal(expected.begin(), expected.end(), cheader.begin()))
    throw ValidationError("unrecognized compete csv header");

  std::map<std::string, std::vector<std::string>> by_key;
  for (std::size_t i = 1; i < rlines.size(); ++i) {
    auto fields = split_csv(rlines[i]);
    if (fields.size() != rheader.size())
      throw ValidationError("regimes csv row has the wrong number of columns");
    if (fields[cass_col] != "1") continue;
    by_key[fields[0] + ',' + fields[1] + ',' + fields[2]] = fields;
  }

  std::ostringstream out;
  out << join_from(cheader, 0) << ',' << join_from(rheader, 3) << '\n';
  for (std::size_t i = 1; i < clines.size(); ++i) {
    auto fields = split_csv(clines[i]);
    if (fields.size() != cheader.size())
      throw ValidationError("compete csv row has the wrong number of columns");
    if (fields[0] == "sup") continue;
    const std::string key = fields[1] + ',' + fields[2] + ',' + fields[3];
    auto it = by_key.find(key);
    if (it == by_key.end())
      throw ValidationError("no regime row for d=" + fields[1] + " delta=" + fields[2] +
                            " rho=" + fields[3]);
    out << clines[i] << ',' << join_from(it->second, 3) << '\n';
  }
  const std::string text = out.str();
  if (!o.out_file.empty())
    write_file(o.out_file, text);
  else
    std::cout << text;
  return 0;
}

/* ---- --config expansion ---- */

std::vector<std::string> config_tokens(const nlohmann::json& doc) {
  if (!doc.is_object())
    throw ValidationError("config file must hold a json object");
  std::vector<std::string> out;
  auto push_scalar = [&out](const std::string& flag, const nlohmann::json& val) {
    if (val.is_string()) {
      out.push_back(flag);
      out.push_back(val.get<std::string>());
    } else if (val.is_number_integer()) {
      out.push_back(flag);
      out.push_back(std::to_string(val.get<long long>()));
    } else if (val.is_number_unsigned()) {
      out.push_back(flag);
      out.push_back(std::to_string(val.get<unsigned long long>()));
    } else {
      throw ValidationError("config values must be strings, integers, booleans or arrays");
    }
  };
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string flag = "--" + it.key();
    const auto& val = it.value();
    if (val.is_boolean()) {
      if (val.get<bool>()) out.push_back(flag);
    } else if (val.is_array()) {
      for (const auto& elem : val) push_scalar(flag, elem);
    } else {
      push_scalar(flag, val);
    }
  }
  return out;
}

/* Splices each "--config FILE" into the flags the file holds, in place, so
 * explicit flags given after it still win (options take the last value). */
std::vector<std::string> preprocess_args(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string file;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ValidationError("--config needs a file path");
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      out.push_back(args[i]);
      continue;
    }
    auto tokens = config_tokens(parse_json(read_file(file), "config file"));
    out.insert(out.end(), tokens.begin(), tokens.end());
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);

  CLI::App app{"exact simulator and analysis toolkit for tree perimeter defense"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tpd 0.1.0");
  std::string config_dummy;
  app.add_option("--config", config_dummy,
                 "json file whose keys stand in for flags (explicit flags win)");

  SimulateOpts sim;
  auto* sim_cmd = app.add_subcommand("simulate", "run a policy on one instance");
  add_env_opts(sim_cmd, sim.env);
  add_policy_opts(sim_cmd, sim.pol, /*required=*/true);
  add_source_opts(sim_cmd, sim.src);
  add_oracle_opts(sim_cmd, sim.oracle, /*with_flag=*/true);
  last_wins(sim_cmd->add_option("--horizon", sim.horizon, "hard stop time, p/q"));
  last_wins(sim_cmd->add_option("--trace", sim.trace_file, "write the event trace csv here"));
  last_wins(sim_cmd->add_option("--summary", sim.summary_file,
                                "also write the summary json here"));
  last_wins(sim_cmd->add_option("--save-instance", sim.save_instance,
                                "write the scenario json here"));
  sim_cmd->add_option("--config", config_dummy,
                      "json file whose keys stand in for flags (explicit flags win)");

  CompeteOpts comp;
  auto* comp_cmd =
      app.add_subcommand("compete", "ratio of a policy against the offline optimum over a family");
  add_env_opts(comp_cmd, comp.env);
  add_policy_opts(comp_cmd, comp.pol, /*required=*/true);
  add_oracle_opts(comp_cmd, comp.oracle, /*with_flag=*/false);
  last_wins(comp_cmd->add_option("--family", comp.family,
                                 "built-in family: random | thm2 | thm3"));
  last_wins(comp_cmd->add_option("--count", comp.count, "random family size (default 50)"));
  comp.oseed = last_wins(comp_cmd->add_option(
      "--seed", comp.seed, "rng seed for the random family (default TPD_SEED, then 0)"));
  last_wins(comp_cmd->add_option("--max-events", comp.params.max_events,
                                 "random: distinct (time, leaf) draws"));
  last_wins(comp_cmd->add_option("--max-count", comp.params.max_count,
                                 "random: max burst size per draw"));
  last_wins(comp_cmd->add_option("--t-max", comp.params.t_max,
                                 "random: releases fall in [0, t-max]"));
  last_wins(comp_cmd->add_option("--denom-log2", comp.params.denom_log2,
                                 "random: release times on a 2^-denom-log2 grid"));
  comp_cmd->add_option("--instances", comp.instance_files, "scenario json files")
      ->take_all();
  last_wins(comp_cmd->add_option("--out", comp.out_file, "write the report csv here"));
  comp_cmd->add_option("--config", config_dummy,
                       "json file whose keys stand in for flags (explicit flags win)");

  OracleCmdOpts orc;
  auto* orc_cmd = app.add_subcommand("oracle", "offline-optimal capture schedule for an instance");
  last_wins(orc_cmd->add_option("--instance", orc.instance_file, "scenario json file"))
      ->required();
  add_oracle_opts(orc_cmd, orc.oracle, /*with_flag=*/false);
  orc_cmd->add_option("--config", config_dummy,
                      "json file whose keys stand in for flags (explicit flags win)");

  AdversaryOpts adv;
  auto* adv_cmd =
      app.add_subcommand("adversary", "run a policy against a lower-bound construction");
  last_wins(adv_cmd->add_option("--theorem", adv.theorem, "construction: 1, 2 or 3"))
      ->required();
  add_env_opts(adv_cmd, adv.env);
  add_policy_opts(adv_cmd, adv.pol, /*required=*/true);
  add_oracle_opts(adv_cmd, adv.oracle, /*with_flag=*/true);
  last_wins(adv_cmd->add_option("--c", adv.c, "burst size parameter (construction 1)"));
  last_wins(adv_cmd->add_option("--variant", adv.variant,
                                "mirror side for construction 2: a | b"));
  last_wins(adv_cmd->add_option("--horizon", adv.horizon, "hard stop time, p/q"));
  last_wins(adv_cmd->add_option("--trace", adv.trace_file, "write the event trace csv here"));
  last_wins(adv_cmd->add_option("--summary", adv.summary_file,
                                "also write the summary json here"));
  last_wins(adv_cmd->add_option("--save-instance", adv.save_instance,
                                "write the realized scenario json here"));
  adv_cmd->add_option("--config", config_dummy,
                      "json file whose keys stand in for flags (explicit flags win)");

  RegimesOpts reg;
  auto* reg_cmd = app.add_subcommand("regimes", "speed thresholds and guarantees as csv");
  last_wins(reg_cmd->add_option("--d", reg.d, "tree depth"))->required();
  last_wins(reg_cmd->add_option("--delta", reg.delta, "branching factor"))->required();
  last_wins(reg_cmd->add_option("--out", reg.out_file, "write the csv here"));
  reg_cmd->add_option("--config", config_dummy,
                      "json file whose keys stand in for flags (explicit flags win)");

  std::string validate_file;
  auto* val_cmd = app.add_subcommand("validate", "check a scenario json file");
  last_wins(val_cmd->add_option("--instance", validate_file, "scenario json file"))
      ->required();
  val_cmd->add_option("--config", config_dummy,
                      "json file whose keys stand in for flags (explicit flags win)");

  PlotdataOpts plot;
  auto* plot_cmd =
      app.add_subcommand("plotdata", "join a compete csv with the matching regime thresholds");
  last_wins(plot_cmd->add_option("--regimes", plot.regimes_file, "regimes csv file"))
      ->required();
  last_wins(plot_cmd->add_option("--compete", plot.compete_file, "compete csv file"))
      ->required();
  last_wins(plot_cmd->add_option("--out", plot.out_file, "write the joined csv here"));
  plot_cmd->add_option("--config", config_dummy,
                       "json file whose keys stand in for flags (explicit flags win)");

  try {
    auto tokens = preprocess_args(argc, argv);
    std::reverse(tokens.begin(), tokens.end());
    app.parse(std::move(tokens));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sim_cmd->parsed()) return run_simulate(sim);
    if (comp_cmd->parsed()) return run_compete(comp);
    if (orc_cmd->parsed()) return run_oracle(orc);
    if (adv_cmd->parsed()) return run_adversary(adv);
    if (reg_cmd->parsed()) return run_regimes(reg);
    if (val_cmd->parsed()) return run_validate(validate_file);
    if (plot_cmd->parsed()) return run_plotdata(plot);
    std::cerr << "error: a subcommand is required\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const PolicyContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const InvariantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
