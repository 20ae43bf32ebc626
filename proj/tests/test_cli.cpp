#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(SFL_BIN_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string models_dir() { return SFL_MODELS_DIR; }

std::string tmp(const std::string& name) { return "/tmp/sfl_test_" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("dim prints the classification of the bundled models") {
  RunResult r = run("dim --model " + models_dir() + "/example3.json");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("p = 1") != std::string::npos);
  CHECK(r.output.find("dissipative") != std::string::npos);
  CHECK(r.output.find("torsion[i=2] = {4}") != std::string::npos);

  RunResult n = run("dim --model " + models_dir() + "/nadkarni.json");
  CHECK(n.exit_code == 0);
  CHECK(n.output.find("p = 2") != std::string::npos);
  CHECK(n.output.find("conservative") != std::string::npos);

  RunResult a = run("dim --model " + models_dir() + "/nadkarni_alt_gamma0.json");
  CHECK(a.exit_code == 0);
  CHECK(a.output.find("p = 1") != std::string::npos);
  CHECK(a.output.find("dissipative") != std::string::npos);
}

TEST_CASE("dim exit codes: malformed JSON is 1, p = 0 is 2") {
  spit(tmp("cli_broken.json"), "{\"d\": 3,, }");
  RunResult r = run("dim --model " + tmp("cli_broken.json"));
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("line") != std::string::npos);

  spit(tmp("cli_torsion.json"),
       "{\"d\": 1, \"D\": 1, \"gamma0\": [[{\"a\": \"1\"}]], "
       "\"rotation\": [[\"1/2\"]]}");
  RunResult t = run("dim --model " + tmp("cli_torsion.json"));
  CHECK(t.exit_code == 2);

  RunResult missing = run("dim --model no_such_file.json");
  CHECK(missing.exit_code == 1);
}

TEST_CASE("dim works on purely algebraic models without alpha") {
  spit(tmp("cli_algebraic.json"),
       "{\"d\": 3, \"D\": 1, \"translation\": [[{\"a\":\"1\"},{\"a\":\"-1\"},{\"a\":\"0\"}]], "
       "\"rotation\": [[\"0\",\"0\",\"1\"]]}");
  RunResult r = run("dim --model " + tmp("cli_algebraic.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("p = 1") != std::string::npos);
  CHECK(r.output.find("predicted_exponent = 1/alpha") != std::string::npos);
}

TEST_CASE("simulate is deterministic and row-complete") {
  std::string model = models_dir() + "/example3.json";
  RunResult a = run("simulate --model " + model +
                    " --out " + tmp("cli_a.csv") + " --t-ladder 2,4 --level 1 --reps 2 --seed 31");
  CHECK(a.exit_code == 0);
  RunResult b = run("simulate --model " + model +
                    " --out " + tmp("cli_b.csv") + " --t-ladder 2,4 --level 1 --reps 2 --seed 31");
  CHECK(b.exit_code == 0);
  std::string csv_a = slurp(tmp("cli_a.csv"));
  CHECK(csv_a == slurp(tmp("cli_b.csv")));
  // header plus R x |ladder| rows plus two comment lines
  int lines = 0;
  for (char c : csv_a)
    if (c == '\n') ++lines;
  CHECK(lines == 2 + 1 + 2 * 2);
  CHECK(csv_a.find("t,replication,m_t,seed,method,level") != std::string::npos);
}

TEST_CASE("simulate refuses oversized grids before any work") {
  RunResult r = run("simulate --model " + models_dir() +
                    "/example3.json --out " + tmp("cli_huge.csv") + " --t-ladder 1000000 --level 2 --reps 1");
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("budget") != std::string::npos);
}

TEST_CASE("STABLE_FIELD_LAB_BUDGET overrides the point guard") {
  setenv("STABLE_FIELD_LAB_BUDGET", "4", 1);
  RunResult tight = run("simulate --model " + models_dir() +
                        "/example3.json --out " + tmp("cli_env.csv") + " --t-ladder 4 --level 1 --reps 1");
  CHECK(tight.exit_code == 3);
  setenv("STABLE_FIELD_LAB_BUDGET", "100000", 1);
  RunResult ok = run("simulate --model " + models_dir() +
                     "/example3.json --out " + tmp("cli_env.csv") + " --t-ladder 4 --level 1 --reps 1");
  CHECK(ok.exit_code == 0);
  unsetenv("STABLE_FIELD_LAB_BUDGET");
}

TEST_CASE("simulate reports the skeleton-level diagnostic on request") {
  RunResult r = run("simulate --model " + models_dir() +
                    "/example3.json --out " + tmp("cli_diag.csv") + " --t-ladder 2,4 --level 1 --reps 50 "
                    "--seed 8 --diagnose-level");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("level diagnostic (n=1 vs n=2)") != std::string::npos);
  CHECK(r.output.find("median ratio") != std::string::npos);
}

TEST_CASE("verdict matches the predicted branch for both bundled fields") {
  std::string ex3 = models_dir() + "/example3.json";
  RunResult s1 = run("simulate --model " + ex3 +
                     " --out " + tmp("cli_v1.csv") + " --t-ladder 8,16,32,64 --level 2 --reps 200 --seed 1");
  REQUIRE(s1.exit_code == 0);
  RunResult v1 = run("verdict --model " + ex3 + " --data " + tmp("cli_v1.csv") + " --out " + tmp("cli_v1.json"));
  CHECK(v1.exit_code == 0);
  CHECK(v1.output.find("dissipative-consistent") != std::string::npos);

  std::string nad = models_dir() + "/nadkarni.json";
  RunResult s2 = run("simulate --model " + nad +
                     " --out " + tmp("cli_v2.csv") + " --t-ladder 8,16,32,64 --level 2 --reps 200 --seed 1");
  REQUIRE(s2.exit_code == 0);
  RunResult v2 = run("verdict --model " + nad + " --data " + tmp("cli_v2.csv") + " --out " + tmp("cli_v2.json"));
  CHECK(v2.exit_code == 0);
  CHECK(v2.output.find("conservative-consistent") != std::string::npos);

  // the report itself is reproducible byte for byte
  RunResult again = run("verdict --model " + ex3 + " --data " + tmp("cli_v1.csv") +
                        " --out " + tmp("cli_v1_again.json"));
  CHECK(again.exit_code == 0);
  CHECK(slurp(tmp("cli_v1.json")) == slurp(tmp("cli_v1_again.json")));
}

TEST_CASE("verdict rejects a dataset from a different model") {
  std::string ex3 = models_dir() + "/example3.json";
  std::string nad = models_dir() + "/nadkarni.json";
  RunResult s = run("simulate --model " + nad +
                    " --out " + tmp("cli_nad.csv") + " --t-ladder 2,4,8 --level 1 --reps 60 --seed 5");
  REQUIRE(s.exit_code == 0);
  RunResult v = run("verdict --model " + ex3 + " --data " + tmp("cli_nad.csv") + " --out " + tmp("cli_nad.json"));
  CHECK(v.exit_code == 4);
}

TEST_CASE("covering finds the constant for the example model") {
  RunResult r = run("covering --model " + models_dir() +
                    "/example3.json --n-probe 2 --m-probe 1 --M-max 8");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("covering constant M = 1") != std::string::npos);
}

TEST_CASE("bt falls back to the numeric path for multi-box kernels") {
  spit(tmp("cli_multibox.json"),
       "{\"d\": 3, \"D\": 1, \"translation\": [[{\"a\":\"1\"},{\"a\":\"-1\"},{\"a\":\"0\"}]], "
       "\"rotation\": [[\"0\",\"0\",\"1\"]], \"alpha\": 1.5, "
       "\"kernel\": [{\"w\": 1.0, \"a\": [\"0\"], \"b\": [\"1\"]}, "
       "{\"w\": 0.5, \"a\": [\"2\"], \"b\": [\"3\"]}]}");
  RunResult r = run("bt --model " + tmp("cli_multibox.json") + " --T-ladder 1,2 --mesh 0.05 --bt-level 2");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("path = numeric") != std::string::npos);
}

TEST_CASE("bt prints the scaled column and the apparent limit") {
  RunResult r = run("bt --model " + models_dir() + "/example3.json --T-ladder 1,10,100");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("T,b_T,b_T_scaled") != std::string::npos);
  CHECK(r.output.find("apparent limit") != std::string::npos);
  RunResult one = run("bt --model " + models_dir() + "/example3.json --T-ladder 7");
  CHECK(one.exit_code == 0);
  CHECK(one.output.find("apparent limit") == std::string::npos);
}
