#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int rc = -1;
  std::string out;
  std::string err;
};

struct ScratchDir {
  fs::path path;
  ScratchDir() : path(fs::temp_directory_path() / ("eqv_cli_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

fs::path scratch() {
  static const ScratchDir dir;
  return dir.path;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write(const std::string &name, const std::string &text) {
  auto p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

Run run(const std::string &args, const std::string &env = "") {
  const auto err = scratch() / "stderr.txt";
  const std::string cmd =
      env + " '" + std::string(EQV_CLI_PATH) + "' " + args + " 2>'" + err.string() + "'";
  Run r;
  FILE *pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0)
    r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

const char *kA5 = R"({"name": "A5", "degree": 5, "generators": [[1,2,0,3,4],[1,2,3,4,0]]})";

}  // namespace

TEST_CASE("group report") {
  auto spec = write("a5.json", kA5);
  auto r = run("group --group " + spec.string());
  CHECK(r.rc == 0);
  CHECK(r.out.find("order 60") != std::string::npos);
  CHECK(r.out.find("transitive, faithful, not regular") != std::string::npos);

  auto triv = write("triv.json", R"({"degree": 3, "generators": []})");
  r = run("group --group " + triv.string());
  CHECK(r.rc == 0);
  CHECK(r.out.find("order 1\n") != std::string::npos);
  CHECK(r.out.find("orbits 3\n") != std::string::npos);

  auto bad = write("bad.json", R"({"degree": 3, "generators": [[0, 1]]})");
  r = run("group --group " + bad.string());
  CHECK(r.rc == 2);
  CHECK(r.out.empty());
  CHECK(r.err.find("generators") != std::string::npos);

  auto junk = write("junk.json", "{not json");
  CHECK(run("group --group " + junk.string()).rc == 2);
}

TEST_CASE("marks") {
  auto spec = write("a5.json", kA5);
  auto r = run("marks --group " + spec.string());
  REQUIRE(r.rc == 0);
  auto j = json::parse(r.out);
  CHECK(j["matrix"][7] == json::array({5, 1, 2, 1, 0, 0, 0, 1, 0}));
  CHECK(j["matrix"][0][0] == 60);
  CHECK(j["classes"].size() == 9);
  CHECK(run("marks --group " + spec.string()).out == r.out);

  r = run("marks --builtin cyclic:2");
  CHECK(json::parse(r.out)["matrix"] == json::parse("[[2,0],[1,1]]"));
  auto triv = write("triv.json", R"({"degree": 3, "generators": []})");
  CHECK(json::parse(run("marks --group " + triv.string()).out)["matrix"] ==
        json::parse("[[1]]"));

  auto out = scratch() / "marks.json";
  r = run("marks --builtin alternating:5 -o " + out.string());
  CHECK(r.rc == 0);
  CHECK(json::parse(slurp(out))["matrix"] == j["matrix"]);
  CHECK(r.out.find("A4\\G") != std::string::npos);
}

TEST_CASE("decompose") {
  auto r = run("decompose --builtin alternating:5 --subgroup-class A4 --power 3 --regular-order");
  REQUIRE(r.rc == 0);
  auto j = json::parse(r.out);
  CHECK(j["multiplicities"] == json::parse(R"({"A4": 1, "C3": 3, "e": 1})"));
  CHECK(j["regular_orbit"] == true);
  CHECK(j["regular_orbit_order"]["minimal_D"] == 3);
  CHECK(j["regular_orbit_order"]["log_bound"] == 4);
  CHECK(j["regular_orbit_order"]["stirling_bound"] == 5);

  auto e = run("decompose --builtin alternating:5 --subgroup-class A4 --power 3 --explicit");
  REQUIRE(e.rc == 0);
  CHECK(json::parse(e.out)["multiplicities"] == j["multiplicities"]);

  r = run("decompose --builtin dihedral:4 --subgroup-class e --power 1");
  CHECK(json::parse(r.out)["regular_orbit"] == true);
  r = run("decompose --builtin symmetric:4 --subgroup-class S3 --power 2");
  CHECK(json::parse(r.out)["orbits"] == 2);
}

TEST_CASE("exit codes for caps and faithfulness") {
  CHECK(run("group --builtin symmetric:5", "EQV_ORDER_CAP=100").rc == 3);
  CHECK(run("marks --builtin symmetric:5", "EQV_LATTICE_CAP=100").rc == 3);
  CHECK(run("decompose --builtin alternating:5 --subgroup-class A4 --power 3 --explicit",
            "EQV_POWER_CAP=100")
            .rc == 4);
  auto r = run("decompose --builtin symmetric:4 --subgroup-class A4 --regular-order");
  CHECK(r.rc == 5);
  CHECK(r.out.empty());
  CHECK_FALSE(r.err.empty());
  CHECK(run("frobnicate").rc == 2);
  CHECK(run("group --builtin cyclic:3 --bogus").rc == 2);
  CHECK(run("group").rc == 2);
  CHECK(run("decompose --builtin cyclic:4 --subgroup-class Q8").rc == 2);
  CHECK(run("--help").rc == 0);
}

TEST_CASE("pattern, instantiate and verify") {
  auto pat = scratch() / "c3.json";
  auto r = run("pattern --builtin cyclic:3 -o " + pat.string());
  REQUIRE(r.rc == 0);
  CHECK(json::parse(slurp(pat))["num_orbits"] == 3);
  auto r2 = run("pattern --builtin cyclic:3");
  CHECK(r2.out == slurp(pat));

  auto mat = scratch() / "m.json";
  REQUIRE(run("instantiate --pattern " + pat.string() + " --seed 4 -o " + mat.string()).rc == 0);
  r = run("verify --builtin cyclic:3 --matrix " + mat.string());
  CHECK(r.rc == 0);
  CHECK(json::parse(r.out)["ok"] == true);

  auto bad = write("bad_matrix.json", R"({"matrix": [[1, 2, 3], [0, 0, 0], [0, 0, 1]]})");
  r = run("verify --builtin cyclic:3 --matrix " + bad.string());
  CHECK(r.rc == 1);
  auto j = json::parse(r.out);
  CHECK(j["ok"] == false);
  CHECK(j["worst_generator"] == 0);
  CHECK(j["max_deviation"].get<double>() > 0);

  auto s4 = run("pattern --builtin symmetric:4 --in power:2 --out-action power:2");
  CHECK(json::parse(s4.out)["num_orbits"] == 15);
  auto pool = run("pattern --builtin symmetric:4 --out-action trivial");
  CHECK(json::parse(pool.out)["num_orbits"] == 1);
  auto coset = run("pattern --builtin alternating:5 --in coset:A4 --out-action natural");
  CHECK(json::parse(coset.out)["num_orbits"] == 2);
  auto warn = run("pattern --builtin symmetric:3 --in trivial:2");
  CHECK(warn.rc == 0);
  CHECK(warn.err.find("warning") != std::string::npos);
}

TEST_CASE("fit") {
  auto report = scratch() / "fit.json";
  auto ckpt = scratch() / "ckpt.json";
  const std::string args = "fit --builtin cyclic:6 --target square_plus_next --channels 64 "
                           "--epochs 200 --seed 7 --lr 0.01 --box 3 --log-every 50 --report " +
                           report.string();
  auto r = run(args + " --checkpoint " + ckpt.string());
  REQUIRE(r.rc == 0);
  auto j = json::parse(slurp(report));
  CHECK(j["final_mse"].get<double>() < 1e-2);
  CHECK(j["heldout_mse"].get<double>() < 1e-2);
  CHECK(j["curve"].size() == 5);
  CHECK(j["config"]["seed"] == 7);
  CHECK(r.out.find("epoch  train_mse") != std::string::npos);
  CHECK(json::parse(slurp(ckpt))["layers"].size() == 3);
  const auto first = slurp(report);
  REQUIRE(run(args).rc == 0);
  CHECK(slurp(report) == first);

  CHECK(run("fit --builtin dihedral:6 --epochs 1").rc == 2);
  CHECK(run("fit --builtin cyclic:4 --in trivial:4 --epochs 1").rc == 5);
}
