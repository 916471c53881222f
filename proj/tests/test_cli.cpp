// End-to-end checks against the installed binary: every subcommand, the pinned
// file formats, exit codes, and determinism of seeded runs.  Golden strings
// here are frozen bytes; regenerating them requires bumping #format.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cmd(const std::string& cmd) {
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

RunResult tpd(const std::string& args) {
  return run_cmd(std::string(TPD_CLI_PATH) + " " + args);
}

const fs::path& work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("tpd_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string stash(const std::string& name, const std::string& content) {
  fs::path p = work_dir() / name;
  std::ofstream(p, std::ios::binary) << content;
  return p.string();
}

std::string tmp_path(const std::string& name) { return (work_dir() / name).string(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

const char* kOneRelease =
    R"({"d":2,"delta":2,"rho":1,"v":"1/3","releases":[{"t":"2","leaf":3,"count":1}]})";

const char* kTrio =
    R"({"d":5,"delta":3,"rho":1,"v":"1/2","releases":[)"
    R"({"t":"6","leaf":202,"count":1},)"
    R"({"t":"8","leaf":121,"count":1},)"
    R"({"t":"8","leaf":283,"count":1}]})";

}  // namespace

TEST_CASE("version and top-level errors") {
  RunResult v = tpd("--version");
  CHECK(v.code == 0);
  CHECK(v.out == "tpd 0.1.0\n");

  RunResult none = tpd("");
  CHECK(none.code == 2);
  CHECK(contains(none.out, "error:"));

  RunResult unknown = tpd("frobnicate");
  CHECK(unknown.code == 2);
  CHECK(contains(unknown.out, "error:"));
}

TEST_CASE("simulate prints the run summary") {
  std::string inst = stash("one.json", kOneRelease);
  RunResult r = tpd("simulate --instance " + inst + " --policy sweeping --with-oracle");
  CHECK(r.code == 0);
  CHECK(r.out ==
        "{\n"
        "  \"d\": 2,\n"
        "  \"delta\": 2,\n"
        "  \"rho\": 1,\n"
        "  \"v\": \"1/3\",\n"
        "  \"policy\": \"sweeping\",\n"
        "  \"released\": 1,\n"
        "  \"captured\": 1,\n"
        "  \"lost\": 0,\n"
        "  \"horizon\": \"7\",\n"
        "  \"events\": 17,\n"
        "  \"offline\": 1,\n"
        "  \"offline_exact\": true,\n"
        "  \"ratio\": \"1\"\n"
        "}\n");

  RunResult hold = tpd("simulate --instance " + inst + " --policy hold");
  CHECK(hold.code == 0);
  CHECK(contains(hold.out, "\"captured\": 0"));
  CHECK(contains(hold.out, "\"lost\": 1"));
  CHECK(contains(hold.out, "\"events\": 5"));

  RunResult cut = tpd("simulate --instance " + inst + " --policy hold --horizon 3");
  CHECK(cut.code == 0);
  CHECK(contains(cut.out, "\"lost\": 0"));
  CHECK(contains(cut.out, "\"horizon\": \"3\""));
  CHECK(contains(cut.out, "\"events\": 3"));
}

TEST_CASE("simulate trace and summary files carry the pinned formats") {
  std::string inst = stash("one.json", kOneRelease);
  std::string trace = tmp_path("one_trace.csv");
  std::string summary = tmp_path("one_summary.json");
  RunResult r = tpd("simulate --instance " + inst + " --policy sweeping --trace " + trace +
                    " --summary " + summary);
  CHECK(r.code == 0);
  CHECK(slurp(summary) == r.out);
  CHECK(slurp(trace) ==
        "#format=1\n"
        "time,kind,intruder_id,vertex_or_edge,offset\n"
        "0,decision,,0,1\n"
        "1,arrival,,1,1\n"
        "1,decision,,1,1\n"
        "2,release,0,3,1\n"
        "2,capture,0,3,1\n"
        "2,arrival,,3,1\n"
        "2,decision,,3,1\n"
        "3,arrival,,1,1\n"
        "3,decision,,1,1\n"
        "4,arrival,,4,1\n"
        "4,decision,,4,1\n"
        "5,arrival,,1,1\n"
        "5,decision,,1,1\n"
        "6,arrival,,0,1\n"
        "6,decision,,0,1\n"
        "7,arrival,,2,1\n"
        "7,decision,,2,1\n");
}

TEST_CASE("save-instance writes the canonical scenario json") {
  std::string inst = stash("one.json", kOneRelease);
  std::string saved = tmp_path("saved.json");
  RunResult r = tpd("simulate --instance " + inst + " --policy hold --save-instance " + saved);
  CHECK(r.code == 0);
  CHECK(slurp(saved) ==
        "{\n"
        "  \"d\": 2,\n"
        "  \"delta\": 2,\n"
        "  \"rho\": 1,\n"
        "  \"v\": \"1/3\",\n"
        "  \"releases\": [\n"
        "    {\n"
        "      \"t\": \"2\",\n"
        "      \"leaf\": 3,\n"
        "      \"count\": 1\n"
        "    }\n"
        "  ]\n"
        "}\n");
}

TEST_CASE("script policy runs from a step file") {
  std::string inst = stash("one.json", kOneRelease);
  std::string steps = stash("script.json",
                            R"([{"vertex":3,"until":"5"},{"vertex":0,"until":"9"}])");
  RunResult r = tpd("simulate --instance " + inst + " --policy script --script " + steps);
  CHECK(r.code == 0);
  CHECK(contains(r.out, "\"captured\": 1"));
  CHECK(contains(r.out, "\"events\": 8"));

  RunResult wrong = tpd("simulate --instance " + inst + " --policy hold --script " + steps);
  CHECK(wrong.code == 2);
  CHECK(contains(wrong.out, "--script applies only to the script policy"));

  RunResult missing = tpd("simulate --instance " + inst + " --policy script");
  CHECK(missing.code == 2);
  CHECK(contains(missing.out, "the script policy requires --script"));
}

TEST_CASE("policy and regime validation surface as exit 2") {
  std::string inst = stash("one.json", kOneRelease);

  RunResult bad = tpd("simulate --instance " + inst + " --policy zigzag");
  CHECK(bad.code == 2);
  CHECK(contains(bad.out, "unknown policy: zigzag"));

  RunResult deep = tpd("simulate --instance " + inst + " --policy cass --s 2");
  CHECK(deep.code == 2);
  CHECK(contains(deep.out, "s must satisfy 1 <= s <= rho"));

  RunResult fast = tpd("simulate --instance " + inst + " --policy cass");
  CHECK(fast.code == 2);
  CHECK(contains(fast.out, "cass regime violated"));

  RunResult forced = tpd("simulate --instance " + inst + " --policy cass --allow-out-of-regime");
  CHECK(forced.code == 0);
  CHECK(contains(forced.out, "\"policy\": \"cass\""));
}

TEST_CASE("validate reports ok or the first defect") {
  std::string inst = stash("one.json", kOneRelease);
  RunResult ok = tpd("validate --instance " + inst);
  CHECK(ok.code == 0);
  CHECK(ok.out == "ok\n");

  std::string bad = stash("bad.json", R"({"d":2,"delta":2,"rho":2,"v":"1/3","releases":[]})");
  RunResult r = tpd("validate --instance " + bad);
  CHECK(r.code == 2);
  CHECK(r.out == "error: rho must satisfy 1 <= rho < d\n");
}

TEST_CASE("oracle report format and fallback exit code") {
  std::string trio = stash("trio.json", kTrio);
  RunResult exact = tpd("oracle --instance " + trio);
  CHECK(exact.code == 0);
  CHECK(exact.out ==
        "#format=1\n"
        "captures=3\n"
        "exact=true\n"
        "order,intruder_id,time,vertex_or_edge,offset\n"
        "1,1,8,121,1\n"
        "2,0,14,2,1\n"
        "3,2,16,3,1\n");

  RunResult bounded = tpd("oracle --instance " + trio + " --budget 0");
  CHECK(bounded.code == 3);
  CHECK(bounded.out ==
        "#format=1\n"
        "captures=2\n"
        "exact=false\n"
        "order,intruder_id,time,vertex_or_edge,offset\n"
        "1,0,6,202,1\n"
        "2,1,40/3,13,1/3\n");
}

TEST_CASE("compete emits per-instance rows and a sup row") {
  RunResult r = tpd("compete --family thm2 --d 2 --delta 2 --rho 1 --v 1/3 --policy sweeping");
  CHECK(r.code == 0);
  CHECK(r.out ==
        "instance,d,delta,rho,v,policy,online,offline,offline_exact,ratio\n"
        "thm2-a,2,2,1,1/3,sweeping,1,2,true,2\n"
        "thm2-b,2,2,1,1/3,sweeping,1,2,true,2\n"
        "sup,2,2,1,1/3,sweeping,,,true,2\n");

  std::string out_file = tmp_path("compete.csv");
  RunResult f = tpd("compete --family thm2 --d 2 --delta 2 --rho 1 --v 1/3 --policy sweeping"
                    " --out " + out_file);
  CHECK(f.code == 0);
  CHECK(slurp(out_file) == r.out);

  RunResult empty = tpd("compete --family random --count 0 --d 2 --delta 2 --rho 1 --v 1/3"
                        " --policy hold");
  CHECK(empty.code == 0);
  CHECK(empty.out == "instance,d,delta,rho,v,policy,online,offline,offline_exact,ratio\n");
}

TEST_CASE("compete accepts scenario files and blanks the sup env on a mix") {
  std::string one = stash("one.json", kOneRelease);
  std::string trio = stash("trio.json", kTrio);
  RunResult r = tpd("compete --instances " + one + " " + trio + " --policy hold");
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string header, row1, row2, sup;
  std::getline(lines, header);
  std::getline(lines, row1);
  std::getline(lines, row2);
  std::getline(lines, sup);
  CHECK(header == "instance,d,delta,rho,v,policy,online,offline,offline_exact,ratio");
  CHECK(row1 == one + ",2,2,1,1/3,hold,0,1,true,inf");
  CHECK(row2 == trio + ",5,3,1,1/2,hold,0,3,true,inf");
  CHECK(sup == "sup,,,,,hold,,,true,inf");
}

TEST_CASE("regimes table rows are exact") {
  RunResult shallow = tpd("regimes --d 1 --delta 2");
  CHECK(shallow.code == 2);
  CHECK(contains(shallow.out, "d must satisfy d >= 2"));

  RunResult r = tpd("regimes --d 5 --delta 2");
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line ==
        "d,delta,rho,rho_over_d,thm1,thm2,thm3_lo,thm3_applies,sweep_bound,sap_bound,"
        "sap_ratio,cass_s,cass_bound,cass_ratio,rho_over_d_dec,thm1_dec,thm2_dec,"
        "thm3_lo_dec,sweep_bound_dec,sap_bound_dec,sap_ratio_dec,cass_bound_dec");
  int rows = 0;
  bool saw_rho1 = false;
  while (std::getline(lines, line)) {
    ++rows;
    if (line.rfind("5,2,1,", 0) == 0) {
      saw_rho1 = true;
      CHECK(line ==
            "5,2,1,1/5,2,2/3,1/2,false,1/30,2/3,5/2,1,1/32,2,0.2,2,0.666666666667,0.5,"
            "0.0333333333333,0.666666666667,2.5,0.03125");
    }
  }
  CHECK(rows == 10);  // one row per (rho, s) pair: 1 + 2 + 3 + 4
  CHECK(saw_rho1);
}

TEST_CASE("plotdata joins compete rows with their regime columns") {
  std::string reg = tmp_path("reg.csv");
  std::string comp = tmp_path("comp.csv");
  CHECK(tpd("regimes --d 3 --delta 2 --out " + reg).code == 0);
  CHECK(tpd("compete --family thm2 --d 3 --delta 2 --rho 1 --v 1/2 --policy sweeping --out " +
            comp).code == 0);
  RunResult r = tpd("plotdata --regimes " + reg + " --compete " + comp);
  CHECK(r.code == 0);
  CHECK(r.out ==
        "instance,d,delta,rho,v,policy,online,offline,offline_exact,ratio,rho_over_d,"
        "thm1,thm2,thm3_lo,thm3_applies,sweep_bound,sap_bound,sap_ratio,cass_s,"
        "cass_bound,cass_ratio,rho_over_d_dec,thm1_dec,thm2_dec,thm3_lo_dec,"
        "sweep_bound_dec,sap_bound_dec,sap_ratio_dec,cass_bound_dec\n"
        "thm2-a,3,2,1,1/2,sweeping,1,2,true,2,1/3,1,1/2,1/3,false,1/13,1/3,5/2,1,1/16,2,"
        "0.333333333333,1,0.5,0.333333333333,0.0769230769231,0.333333333333,2.5,0.0625\n"
        "thm2-b,3,2,1,1/2,sweeping,1,2,true,2,1/3,1,1/2,1/3,false,1/13,1/3,5/2,1,1/16,2,"
        "0.333333333333,1,0.5,0.333333333333,0.0769230769231,0.333333333333,2.5,0.0625\n");
}

TEST_CASE("adversary summaries name the construction") {
  RunResult t1 = tpd("adversary --theorem 1 --d 2 --delta 2 --rho 1 --v 2/3 --c 4"
                     " --policy sweeping");
  CHECK(t1.code == 0);
  CHECK(t1.out ==
        "{\n"
        "  \"d\": 2,\n"
        "  \"delta\": 2,\n"
        "  \"rho\": 1,\n"
        "  \"v\": \"2/3\",\n"
        "  \"policy\": \"sweeping\",\n"
        "  \"released\": 5,\n"
        "  \"captured\": 0,\n"
        "  \"lost\": 5,\n"
        "  \"horizon\": \"11/2\",\n"
        "  \"events\": 22,\n"
        "  \"theorem\": 1\n"
        "}\n");

  RunResult t2 = tpd("adversary --theorem 2 --d 2 --delta 2 --rho 1 --v 1/3 --variant b"
                     " --policy hold");
  CHECK(t2.code == 0);
  CHECK(contains(t2.out, "\"theorem\": 2"));
  CHECK(contains(t2.out, "\"variant\": \"b\""));
  CHECK(contains(t2.out, "\"released\": 2"));

  RunResult t4 = tpd("adversary --theorem 4 --d 2 --delta 2 --rho 1 --v 1/3 --policy hold");
  CHECK(t4.code == 2);
  CHECK(contains(t4.out, "theorem must be 1, 2 or 3"));

  RunResult side = tpd("adversary --theorem 2 --d 2 --delta 2 --rho 1 --v 1/3 --variant c"
                       " --policy hold");
  CHECK(side.code == 2);
  CHECK(contains(side.out, "variant"));

  RunResult narrow = tpd("adversary --theorem 3 --d 5 --delta 2 --rho 1 --v 1/2 --policy hold");
  CHECK(narrow.code == 2);
  CHECK(contains(narrow.out, "delta >= 3"));
}

TEST_CASE("seeded generation is reproducible and env-seeded") {
  std::string gen = "simulate --generate random --d 3 --delta 2 --rho 1 --v 1/4"
                    " --policy sweeping --max-events 6";
  RunResult a = tpd(gen + " --seed 7");
  RunResult b = tpd(gen + " --seed 7");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  RunResult env_seeded = run_cmd("TPD_SEED=7 " + std::string(TPD_CLI_PATH) + " " + gen);
  CHECK(env_seeded.code == 0);
  CHECK(env_seeded.out == a.out);

  RunResult junk = run_cmd("TPD_SEED=abc " + std::string(TPD_CLI_PATH) + " " + gen);
  CHECK(junk.code == 2);
  CHECK(contains(junk.out, "TPD_SEED must be a nonnegative integer"));
}

TEST_CASE("config files stand in for flags and explicit flags win") {
  std::string cfg = stash("cfg.json",
                          R"({"generate":"random","d":2,"delta":2,"rho":1,)"
                          R"("v":"1/3","policy":"hold","seed":5})");
  RunResult base = tpd("simulate --config " + cfg);
  CHECK(base.code == 0);
  CHECK(contains(base.out, "\"policy\": \"hold\""));

  RunResult over = tpd("simulate --config " + cfg + " --policy sweeping");
  CHECK(over.code == 0);
  CHECK(contains(over.out, "\"policy\": \"sweeping\""));
}

TEST_CASE("thm3 generator saves the canonical trio") {
  std::string saved = tmp_path("thm3.json");
  RunResult r = tpd("simulate --generate thm3 --d 5 --delta 3 --rho 1 --v 1/2 --policy hold"
                    " --save-instance " + saved);
  CHECK(r.code == 0);
  CHECK(slurp(saved) ==
        "{\n"
        "  \"d\": 5,\n"
        "  \"delta\": 3,\n"
        "  \"rho\": 1,\n"
        "  \"v\": \"1/2\",\n"
        "  \"releases\": [\n"
        "    {\n"
        "      \"t\": \"6\",\n"
        "      \"leaf\": 202,\n"
        "      \"count\": 1\n"
        "    },\n"
        "    {\n"
        "      \"t\": \"8\",\n"
        "      \"leaf\": 121,\n"
        "      \"count\": 1\n"
        "    },\n"
        "    {\n"
        "      \"t\": \"8\",\n"
        "      \"leaf\": 283,\n"
        "      \"count\": 1\n"
        "    }\n"
        "  ]\n"
        "}\n");
}
