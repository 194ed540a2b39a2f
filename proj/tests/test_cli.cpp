#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kBin = JETLAB_BIN;
const fs::path kConfigs = JETLAB_CONFIG_DIR;

int run(const std::string& args) {
  std::string cmd = kBin + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  fs::path d = fs::temp_directory_path() / ("jetlab_cli_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("verify on the rotation config passes and writes a full report") {
  fs::path dir = fresh_dir("verify_rotation");
  REQUIRE(run("verify " + (kConfigs / "rotation.json").string() + " --out " +
              dir.string()) == 0);
  json rep = json::parse(slurp(dir / "report.json"));
  CHECK(rep["name"] == "rotation");
  CHECK(rep["samples"] == 100);
  CHECK(rep["seed"] == 7);
  CHECK(rep["all_pass"] == true);
  CHECK(rep.contains("checks"));
  CHECK(rep.contains("maxwell_eq2_max_residual"));

  // the sign-consistency findings name a resolved sign with a residual
  // within the configured tolerance
  const json& f = rep["findings"];
  for (std::string base : {"drift_sign", "connection_sign"}) {
    int sign = f.at(base).get<int>();
    CHECK((sign == 1 || sign == -1));
    CHECK(f.at(base + "_residual").get<double>() <= 1e-9);
  }
}

TEST_CASE("verify accepts the non-closed pfaffian system") {
  fs::path dir = fresh_dir("verify_pfaff");
  CHECK(run("verify " + (kConfigs / "pfaff_nonclosed.json").string() +
            " --out " + dir.string()) == 0);
}

TEST_CASE("analyze is deterministic and reports the rotation 2-form") {
  fs::path d1 = fresh_dir("analyze_1"), d2 = fresh_dir("analyze_2");
  std::string cfg = (kConfigs / "rotation.json").string();
  REQUIRE(run("analyze " + cfg + " --samples 1 --seed 7 --out " +
              d1.string()) == 0);
  REQUIRE(run("analyze " + cfg + " --samples 1 --seed 7 --out " +
              d2.string()) == 0);
  std::string a1 = slurp(d1 / "analysis.json");
  CHECK(a1 == slurp(d2 / "analysis.json"));

  json doc = json::parse(a1);
  CHECK(doc["samples"] == 1);
  bool found = false;
  for (const auto& e : doc["em_field"])
    if (e["index"] == json::array({1, 1, 2})) {
      found = true;
      CHECK(e["value"] == -1.0);
    }
  CHECK(found);
}

TEST_CASE("solve recovers the circular orbit on a smaller grid") {
  fs::path dir = fresh_dir("solve_rotation");
  json cfg = json::parse(slurp(kConfigs / "rotation.json"));
  cfg["grid"] = {101};
  fs::path cpath = dir / "rotation_small.json";
  spit(cpath, cfg.dump(2));

  REQUIRE(run("solve " + cpath.string() + " --out " + dir.string()) == 0);
  json sum = json::parse(slurp(dir / "summary.json"));
  CHECK(sum["converged"] == true);
  CHECK(sum["final_energy"].get<double>() <
        sum["initial_energy"].get<double>());

  std::ifstream csv(dir / "map.csv");
  std::string header, first;
  REQUIRE(std::getline(csv, header));
  CHECK(header == "t1,x1,x2,L");
  REQUIRE(std::getline(csv, first));
  double t, x1, x2, L;
  char c;
  std::istringstream row(first);
  row >> t >> c >> x1 >> c >> x2 >> c >> L;
  CHECK(t == 0.0);
  CHECK(x1 == 1.0);  // pinned initial node
  CHECK(x2 == 0.0);
  CHECK(std::abs(L) <= 1e-3);
}

TEST_CASE("reduce emits a loadable first-order config with the figures") {
  fs::path dir = fresh_dir("reduce_osc");
  REQUIRE(run("reduce " + (kConfigs / "oscillator_order2.json").string() +
              " --out " + dir.string()) == 0);
  fs::path emitted = dir / "oscillator_order2_reduced.json";
  json red = json::parse(slurp(emitted));
  CHECK(red["reduction"]["n_tilde"] == 2);
  CHECK(red["reduction"]["dim_j1"] == 5);
  CHECK(red["reduction"]["distinct_index_dimension"] == 3);
  CHECK(red["coordinates"] == json::array({"x1", "x1_1"}));
  CHECK(!red.contains("scenario"));

  // the emitted config must load and analyze as a plain first-order system
  fs::path dir2 = fresh_dir("reduce_osc_analyze");
  CHECK(run("analyze " + emitted.string() + " --samples 2 --out " +
            dir2.string()) == 0);
}

TEST_CASE("malformed input is rejected with exit code 2") {
  fs::path dir = fresh_dir("bad_inputs");

  fs::path broken = dir / "broken.json";
  spit(broken, "{ this is not json");
  CHECK(run("verify " + broken.string()) == 2);

  json cfg = json::parse(slurp(kConfigs / "pfaff_closed.json"));
  cfg["metric_h"] = {{"1", "t1"}, {"0", "1"}};
  fs::path asym = dir / "asym.json";
  spit(asym, cfg.dump(2));
  CHECK(run("verify " + asym.string()) == 2);

  CHECK(run("solve " + (dir / "missing.json").string()) == 2);
}
