#ifndef TPD_INSTANCE_HPP
#define TPD_INSTANCE_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tpd/kinematics.hpp"
#include "tpd/tree_env.hpp"

namespace tpd {

struct Release {
  Rat t;
  VertexId leaf;
  std::int64_t count = 1;
};

/* Timed release events. Canonical form: sorted by (t, leaf), one entry per
 * distinct (t, leaf) with counts merged. */
struct InputInstance {
  std::vector<Release> releases;
};

void canonicalize(InputInstance& inst);

/* Throws ValidationError unless every release has t >= 0, a leaf entrance of
 * env, and count >= 1.  Expects canonical order. */
void validate_instance(const Environment& env, const InputInstance& inst);

/* One Intruder per unit of count, ids 0,1,2,... in canonical release order. */
std::vector<Intruder> expand_intruders(const Environment& env, const InputInstance& inst);

/* A full scenario as stored on disk: environment, speed and releases. */
struct ScenarioFile {
  int d = 0;
  int delta = 0;
  int rho = 0;
  Rat v;
  InputInstance instance;
};

ScenarioFile parse_scenario(const std::string& json_text);
std::string scenario_to_json(const ScenarioFile& sc);
Environment environment_of(const ScenarioFile& sc);

struct RandomInstanceParams {
  int max_events = 6;          // distinct (t, leaf) draws per instance
  std::int64_t max_count = 2;  // burst size per draw
  std::int64_t t_max = 20;     // releases fall in [0, t_max]
  int denom_log2 = 3;          // release times on a 2^-denom_log2 grid
};

InputInstance random_instance(const Environment& env, std::mt19937_64& rng,
                              const RandomInstanceParams& params);

}  // namespace tpd

#endif
