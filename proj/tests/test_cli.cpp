#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "nlohmann/json.hpp"

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Scratch directory shared by the whole binary; per-test files carry
// distinct names so cases stay independent.
const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("zicure-cli-tests-" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CmdResult run_cli(const std::string& args) {
  const fs::path out_file = work_dir() / "stdout.txt";
  const fs::path err_file = work_dir() / "stderr.txt";
  const std::string command = std::string(ZICURE_CLI_PATH) + " " + args + " >" +
                              out_file.string() + " 2>" + err_file.string();
  const int status = std::system(command.c_str());
  CmdResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

// Three-level portfolio with deterministic zero fractions per level.
std::string categorical_csv() {
  std::ostringstream out;
  out << "t,delta,x\n";
  for (int level = 1; level <= 3; ++level) {
    for (int z = 0; z < level; ++z) out << "0,1," << level << "\n";  // zeros
    for (int e = 0; e < 5; ++e) {
      out << (1.0 + 0.7 * e + 0.1 * level) << ",1," << level << "\n";
    }
    for (int c = 0; c < 3; ++c) {
      out << (5.0 + 0.5 * c + 0.1 * level) << ",0," << level << "\n";
    }
  }
  return out.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version and help exit cleanly") {
  CHECK(run_cli("--version").exit_code == 0);
  const CmdResult help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
  CHECK(help.out.find("mc-study") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(run_cli("frobnicate").exit_code == 1);
  CHECK(run_cli("simulate --scenario 2 --n 50").exit_code == 1);  // no --out
  CHECK(run_cli("simulate --scenario 9 --n 50 --out " +
                (work_dir() / "x.csv").string())
            .exit_code == 1);
  CHECK(run_cli("fit --data nope.csv").exit_code == 1);  // no --out
}

TEST_CASE("config errors exit with 1 and name the problem") {
  const fs::path bad = work_dir() / "bad.json";
  spit(bad, "{ not json");
  CHECK(run_cli("simulate --config " + bad.string() + " --out " +
                (work_dir() / "y.csv").string())
            .exit_code == 1);

  const fs::path unknown = work_dir() / "unknown.json";
  spit(unknown, "{\"scenari\": 2}");
  const CmdResult r = run_cli("simulate --config " + unknown.string() +
                              " --n 20 --out " + (work_dir() / "z.csv").string());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("scenari") != std::string::npos);
}

TEST_CASE("simulate writes a labeled dataset with provenance comments") {
  const fs::path out = work_dir() / "sim.csv";
  const CmdResult r =
      run_cli("simulate --scenario 2 --n 80 --seed 11 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const std::string text = slurp(out);
  CHECK(text.find("# seed: 11") != std::string::npos);
  CHECK(text.find("# config: ") != std::string::npos);
  CHECK(text.find("t,delta,x,label") != std::string::npos);
  CHECK(text.find("fraudster") != std::string::npos);

  // Same seed, same bytes.
  const fs::path again = work_dir() / "sim-again.csv";
  REQUIRE(run_cli("simulate --scenario 2 --n 80 --seed 11 --out " +
                  again.string())
              .exit_code == 0);
  CHECK(slurp(again) == text);

  // Different seed, different draw.
  const fs::path other = work_dir() / "sim-other.csv";
  REQUIRE(run_cli("simulate --scenario 2 --n 80 --seed 12 --out " +
                  other.string())
              .exit_code == 0);
  CHECK(slurp(other) != text);
}

TEST_CASE("data validation failures exit with 2") {
  const fs::path missing = work_dir() / "missing.csv";
  const CmdResult gone = run_cli("fit --data " + missing.string() + " --out " +
                                 (work_dir() / "m.json").string());
  CHECK(gone.exit_code == 2);

  const fs::path no_delta = work_dir() / "no-delta.csv";
  spit(no_delta, "t,x\n1,0\n");
  const CmdResult r = run_cli("fit --data " + no_delta.string() + " --out " +
                              (work_dir() / "m.json").string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("delta") != std::string::npos);

  const fs::path neg = work_dir() / "neg.csv";
  spit(neg, "t,delta\n1,1\n-2,0\n");
  const CmdResult neg_r = run_cli("fit --data " + neg.string() + " --out " +
                                  (work_dir() / "m.json").string());
  CHECK(neg_r.exit_code == 2);
  CHECK(neg_r.err.find("line 3") != std::string::npos);
}

TEST_CASE("fit round trip: model file, report, determinism") {
  const fs::path data = work_dir() / "fit-data.csv";
  REQUIRE(run_cli("simulate --scenario 2 --n 400 --seed 3 --out " +
                  data.string())
              .exit_code == 0);

  const fs::path model = work_dir() / "model.json";
  const fs::path report = work_dir() / "report.txt";
  const CmdResult r = run_cli("fit --data " + data.string() + " --out " +
                              model.string() + " --report " + report.string());
  REQUIRE(r.exit_code == 0);

  const nlohmann::json parsed = nlohmann::json::parse(slurp(model));
  CHECK(parsed.at("format") == "zicure-model");
  CHECK(parsed.at("converged") == true);
  CHECK(parsed.at("estimates").size() == 8);
  CHECK(parsed.at("n") == 400);
  CHECK(parsed.at("parameter_names")[0] == "g0.intercept");

  const std::string report_text = slurp(report);
  CHECK(report_text.find("log-likelihood") != std::string::npos);
  CHECK(report_text.find("g0.intercept") != std::string::npos);
  CHECK(report_text.find("linked parameters by profile") != std::string::npos);

  // Byte-identical on rerun.
  const fs::path model2 = work_dir() / "model2.json";
  const fs::path report2 = work_dir() / "report2.txt";
  REQUIRE(run_cli("fit --data " + data.string() + " --out " + model2.string() +
                  " --report " + report2.string())
              .exit_code == 0);
  CHECK(slurp(model2) == slurp(model));
  CHECK(slurp(report2) == report_text);
}

TEST_CASE("non-convergence exits with 3 but still writes the model") {
  const fs::path data = work_dir() / "nc-data.csv";
  REQUIRE(run_cli("simulate --scenario 1 --n 150 --seed 9 --out " +
                  data.string())
              .exit_code == 0);
  const fs::path config = work_dir() / "nc.json";
  spit(config,
       "{\"controls\": {\"max_iterations\": 2, \"gradient_tol\": 1e-14, "
       "\"objective_tol\": 1e-16}}");
  const fs::path model = work_dir() / "nc-model.json";
  const CmdResult r = run_cli("fit --config " + config.string() + " --data " +
                              data.string() + " --out " + model.string());
  CHECK(r.exit_code == 3);
  const nlohmann::json parsed = nlohmann::json::parse(slurp(model));
  CHECK(parsed.at("converged") == false);
  CHECK(parsed.at("termination") == "max-iterations");
}

TEST_CASE("categorical fit, report profiles, and scoring") {
  const fs::path data = work_dir() / "cat.csv";
  spit(data, categorical_csv());
  const fs::path config = work_dir() / "cat.json";
  spit(config,
       "{\"categoricals\": [{\"column\": \"x\", \"levels\": [1, 2, 3]}],\n"
       " \"design\": {\"gamma0\": [\"x\"], \"gamma1\": [\"x\"],\n"
       "             \"shape\": true, \"scale\": true}}");

  const fs::path model = work_dir() / "cat-model.json";
  const fs::path report = work_dir() / "cat-report.txt";
  const CmdResult r =
      run_cli("fit --config " + config.string() + " --data " + data.string() +
              " --out " + model.string() + " --report " + report.string());
  REQUIRE(r.exit_code == 0);

  const nlohmann::json parsed = nlohmann::json::parse(slurp(model));
  CHECK(parsed.at("columns") ==
        nlohmann::json(std::vector<std::string>{"x=1", "x=2"}));
  CHECK(parsed.at("estimates").size() == 8);  // 3 + 3 + 1 + 1

  const std::string report_text = slurp(report);
  CHECK(report_text.find("x=1") != std::string::npos);
  CHECK(report_text.find("x=3") != std::string::npos);  // reference profile

  // Scoring the training data picks up the same expansion from the model.
  const fs::path scored = work_dir() / "cat-scored.csv";
  const CmdResult s =
      run_cli("score --data " + data.string() + " --model " + model.string() +
              " --horizons 2,5 --out " + scored.string());
  REQUIRE(s.exit_code == 0);
  const std::string scored_text = slurp(scored);
  CHECK(scored_text.find("t,delta,x,gamma0,gamma1,shape,scale,surv_2,surv_5") !=
        std::string::npos);

  // A dataset whose columns cannot be matched to the model is rejected.
  const fs::path wrong = work_dir() / "wrong.csv";
  spit(wrong, "t,delta,y\n1,1,0\n2,0,1\n");
  const CmdResult w = run_cli("score --data " + wrong.string() + " --model " +
                              model.string() + " --horizons 2 --out " +
                              (work_dir() / "w.csv").string());
  CHECK(w.exit_code == 2);

  // Undeclared level in a fresh record.
  const fs::path bad_level = work_dir() / "bad-level.csv";
  spit(bad_level, "t,delta,x\n1,1,1\n2,1,7\n");
  const CmdResult b = run_cli("score --data " + bad_level.string() +
                              " --model " + model.string() +
                              " --horizons 2 --out " +
                              (work_dir() / "b.csv").string());
  CHECK(b.exit_code == 2);
  CHECK(b.err.find("record 2") != std::string::npos);
}

TEST_CASE("km overlays fitted survival when a model is given") {
  const fs::path data = work_dir() / "km-data.csv";
  REQUIRE(run_cli("simulate --scenario 2 --n 200 --seed 21 --out " +
                  data.string())
              .exit_code == 0);

  const fs::path plain = work_dir() / "km-plain.csv";
  REQUIRE(run_cli("km --data " + data.string() + " --out " + plain.string())
              .exit_code == 0);
  CHECK(slurp(plain).find("stratum,t,at_risk,events,km_before,km_after") !=
        std::string::npos);

  const fs::path model = work_dir() / "km-model.json";
  REQUIRE(run_cli("fit --data " + data.string() + " --out " + model.string())
              .exit_code == 0);
  const fs::path overlay = work_dir() / "km-overlay.csv";
  REQUIRE(run_cli("km --data " + data.string() + " --model " + model.string() +
                  " --grid 1,2,4 --out " + overlay.string())
              .exit_code == 0);
  CHECK(slurp(overlay).find("stratum,t,km_surv,fitted_surv") !=
        std::string::npos);

  // Grid points beyond the observed range are a data error.
  const CmdResult far = run_cli("km --data " + data.string() +
                                " --grid 1e9 --out " +
                                (work_dir() / "far.csv").string());
  CHECK(far.exit_code == 2);
}

TEST_CASE("mc-study flags override the config") {
  const fs::path config = work_dir() / "mc.json";
  spit(config, "{\"scenario\": 1, \"replications\": 50}");
  const fs::path csv = work_dir() / "mc.csv";
  const fs::path table = work_dir() / "mc-table.txt";
  // Flags take scenario 2 and a small replication count over the config.
  const CmdResult r = run_cli("mc-study --config " + config.string() +
                              " --scenario 2 --n 60,90 --replications 4" +
                              " --seed 5 --out " + csv.string() + " --table " +
                              table.string());
  REQUIRE(r.exit_code == 0);
  const std::string text = slurp(csv);
  CHECK(text.find("scenario,n,parameter,metric,value") != std::string::npos);
  CHECK(text.find("\n2,60,") != std::string::npos);
  CHECK(text.find("\n2,90,") != std::string::npos);
  CHECK(text.find("\n1,") == std::string::npos);  // config scenario overridden
  CHECK(slurp(table).find("scenario 2, n = 60") != std::string::npos);

  // Determinism across reruns.
  const fs::path csv2 = work_dir() / "mc2.csv";
  const fs::path table2 = work_dir() / "mc-table2.txt";
  REQUIRE(run_cli("mc-study --config " + config.string() +
                  " --scenario 2 --n 60,90 --replications 4 --seed 5 --out " +
                  csv2.string() + " --table " + table2.string())
              .exit_code == 0);
  CHECK(slurp(csv2) == text);
  CHECK(slurp(table2) == slurp(table));
}

}  // TEST_SUITE
