#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

using nlohmann::ordered_json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string cli_path() {
  const char* p = std::getenv("PHIDIV_CLI");
  REQUIRE(p != nullptr);
  return p;
}

std::string wavy_path() {
  const char* p = std::getenv("PHIDIV_WAVY_CSV");
  REQUIRE(p != nullptr);
  return p;
}

RunResult run(const std::string& args, bool merge_stderr = false) {
  std::string cmd = cli_path() + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

ordered_json parse(const RunResult& r) {
  ordered_json doc = ordered_json::parse(r.out, nullptr, false);
  REQUIRE(!doc.is_discarded());
  return doc;
}

}  // namespace

TEST_CASE("div computes the divergence with a stable schema") {
  auto r = run("div --phi exp --p 0.5,0.5 --q 0.25,0.75");
  CHECK(r.exit_code == 0);
  auto doc = parse(r);
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["command"] == "div");
  CHECK(doc["phi"] == "exp");
  CHECK(doc["value"].get<double>() == doctest::Approx(0.14384103622589042).epsilon(1e-12));
  CHECK(!doc.contains("terms"));

  auto rt = run("div --phi qexp:0.5 --p 0.5,0.5 --q 0.25,0.75 --terms");
  CHECK(rt.exit_code == 0);
  auto dt = parse(rt);
  CHECK(dt["value"].get<double>() ==
        doctest::Approx(0.068148347421863487).epsilon(1e-12));
  REQUIRE(dt.contains("terms"));
  CHECK(dt["terms"].size() == 2);
  double s = 0.0;
  for (const auto& t : dt["terms"]) s += t.get<double>();
  CHECK(s == doctest::Approx(dt["value"].get<double>()).epsilon(1e-12));
}

TEST_CASE("distributions load from files as well as inline lists") {
  std::string path = "/tmp/phidiv_e2e_p.txt";
  {
    std::ofstream f(path);
    f << "0.5\n0.5\n";
  }
  auto r = run("div --phi exp --p " + path + " --q 0.25,0.75");
  CHECK(r.exit_code == 0);
  CHECK(parse(r)["value"].get<double>() ==
        doctest::Approx(0.14384103622589042).epsilon(1e-12));
  std::remove(path.c_str());
}

TEST_CASE("family normalize reports the normalizer and its residual") {
  auto r = run("family normalize --phi exp --p 0.5,0.5 --u 1,-1");
  CHECK(r.exit_code == 0);
  auto doc = parse(r);
  CHECK(doc["command"] == "family normalize");
  CHECK(doc["psi"].get<double>() == doctest::Approx(0.4337808304830271).epsilon(1e-10));
  REQUIRE(doc["q"].size() == 2);
  CHECK(doc["u_projected"][0].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(doc["u_projected"][1].get<double>() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(doc["u0"][0].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(doc["dphi_residual"].get<double>() < 1e-8);
  CHECK(doc["iterations"].get<int>() >= 1);
  double mass = doc["q"][0].get<double>() + doc["q"][1].get<double>();
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("check superadd passes the exponential and fails the wavy table") {
  auto ok = run("check superadd --phi exp --grid 80 --delta 0.001");
  CHECK(ok.exit_code == 0);
  auto dok = parse(ok);
  CHECK(dok["verdict"] == "Pass");
  CHECK(dok["grid"]["grid_n"] == 80);

  auto bad = run("check superadd --phi table:" + wavy_path() + " --grid 120 --delta 0.001");
  CHECK(bad.exit_code == 2);
  auto dbad = parse(bad);
  CHECK(dbad["verdict"] == "Fail");
  CHECK(dbad["worst_margin"].get<double>() < -0.1);
  CHECK(dbad["witness"].contains("x"));
}

TEST_CASE("check concave mirrors the library verdicts") {
  auto ok = run("check concave --phi qexp:0.7 --grid 80");
  CHECK(ok.exit_code == 0);
  CHECK(parse(ok)["verdict"] == "Pass");
  auto bad = run("check concave --phi table:" + wavy_path() + " --grid 120 --delta 0.001");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("identical seeds give byte-identical reports") {
  std::string cmd = "check partition --phi exp --n 4 --trials 10 --seed 7";
  auto a = run(cmd);
  auto b = run(cmd);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(parse(a)["seed"] == 7);

  std::string pin = "check pinsker --phi qexp:0.5 --c 0.25 --trials 300 --seed 3";
  auto c = run(pin);
  auto d = run(pin);
  CHECK(c.exit_code == 0);
  CHECK(c.out == d.out);
}

TEST_CASE("check pinsker in auto mode estimates then verifies") {
  auto r = run("check pinsker --phi qexp:0.5 --c auto --trials 300 --seed 1");
  CHECK(r.exit_code == 0);
  auto doc = parse(r);
  CHECK(doc["verdict"] == "Pass");
  REQUIRE(doc.contains("estimate"));
  CHECK(doc["estimate"]["c_hat"].get<double>() == doctest::Approx(0.25).epsilon(5e-3));
  CHECK(doc["c"].get<double>() == doc["estimate"]["c_hat"].get<double>());
}

TEST_CASE("check pinsker fails above the sharp constant with a witness") {
  auto r = run("check pinsker --phi exp --c 0.6 --trials 4000 --seed 0");
  CHECK(r.exit_code == 2);
  auto doc = parse(r);
  CHECK(doc["verdict"] == "Fail");
  CHECK(doc["worst_margin"].get<double>() < 0.0);
  CHECK(doc["witness"].contains("p"));
  CHECK(doc["witness"].contains("q"));
}

TEST_CASE("check characterize is inconclusive on two outcomes") {
  auto r = run("check characterize --phi qexp:0.5 --n 2 --grid 100");
  CHECK(r.exit_code == 0);
  auto doc = parse(r);
  CHECK(doc["verdict"] == "Inconclusive");
  CHECK(doc.contains("reason"));

  auto full = run("check characterize --phi qexp:0.5 --grid 100");
  CHECK(full.exit_code == 0);
  auto dfull = parse(full);
  CHECK(dfull["verdict"] == "Pass");
  CHECK(dfull["q_fit"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));

  auto bad = run("check characterize --phi table:" + wavy_path() + " --grid 120 --delta 0.001");
  CHECK(bad.exit_code == 2);
  CHECK(parse(bad)["verdict"] == "Fail");
}

TEST_CASE("scan g emits CSV with one row per grid point") {
  auto r = run("scan g --phi exp --grid 50 --delta 0.01");
  CHECK(r.exit_code == 0);
  REQUIRE(r.out.rfind("x,g\n", 0) == 0);
  int lines = 0;
  for (char ch : r.out) lines += ch == '\n';
  CHECK(lines == 51);
  // For the exponential the tabulated ratio is the identity map.
  std::size_t second = r.out.find('\n') + 1;
  std::size_t comma = r.out.find(',', second);
  double x = std::stod(r.out.substr(second, comma - second));
  double g = std::stod(r.out.substr(comma + 1, r.out.find('\n', comma) - comma - 1));
  CHECK(x == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(g == doctest::Approx(x).epsilon(1e-9));
}

TEST_CASE("out flag duplicates the document into a file") {
  std::string path = "/tmp/phidiv_e2e_out.json";
  auto r = run("div --phi exp --p 0.5,0.5 --q 0.25,0.75 --out " + path);
  CHECK(r.exit_code == 0);
  std::ifstream f(path);
  REQUIRE(f.good());
  std::string file_body((std::istreambuf_iterator<char>(f)),
                        std::istreambuf_iterator<char>());
  CHECK(file_body == r.out);
  std::remove(path.c_str());
}

TEST_CASE("batch aggregates runs and keeps going past malformed lines") {
  std::string path = "/tmp/phidiv_e2e_suite.jsonl";
  {
    std::ofstream f(path);
    f << R"({"args":["div","--phi","exp","--p","0.5,0.5","--q","0.25,0.75"]})" << "\n";
    f << "this is not json\n";
    f << R"({"args":["check","superadd","--phi","table:)" << wavy_path()
      << R"(","--grid","100","--delta","0.001"]})" << "\n";
  }
  auto r = run("batch --file " + path);
  CHECK(r.exit_code == 2);  // one Fail dominates
  auto doc = parse(r);
  CHECK(doc["command"] == "batch");
  CHECK(doc["counts"]["pass"] == 1);
  CHECK(doc["counts"]["fail"] == 1);
  CHECK(doc["counts"]["error"] == 1);
  REQUIRE(doc["runs"].size() == 3);
  CHECK(doc["runs"][0]["exit"] == 0);
  CHECK(doc["runs"][0]["output"]["value"].get<double>() ==
        doctest::Approx(0.14384103622589042).epsilon(1e-12));
  CHECK(doc["runs"][1].contains("error"));
  CHECK(doc["runs"][2]["exit"] == 2);
  std::remove(path.c_str());
}

TEST_CASE("an empty batch reports no runs and exits cleanly") {
  std::string path = "/tmp/phidiv_e2e_empty.jsonl";
  { std::ofstream f(path); }
  auto r = run("batch --file " + path);
  CHECK(r.exit_code == 0);
  auto doc = parse(r);
  CHECK(doc["runs"].empty());
  CHECK(doc["counts"]["pass"] == 0);
  std::remove(path.c_str());
}

TEST_CASE("usage errors exit 1 and echo the accepted grammar") {
  auto r = run("div --phi watt:3 --p 0.5,0.5 --q 0.5,0.5", true);
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("qexp:<q>") != std::string::npos);

  auto missing = run("div --phi exp --p 0.5,0.5");
  CHECK(missing.exit_code == 1);

  auto unknown = run("frobnicate");
  CHECK(unknown.exit_code == 1);

  auto badn = run("div --phi exp --p 0.5,0.4 --q 0.5,0.5");
  CHECK(badn.exit_code == 1);
}
