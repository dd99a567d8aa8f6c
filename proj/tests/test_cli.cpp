#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dcxlab/error.hpp"
#include "dcxlab/experiment.hpp"
#include "dcxlab/svg_plot.hpp"

using namespace dcx;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int status = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / "dcxlab_cli_test" / name;
  fs::remove_all(d);
  fs::create_directories(d.parent_path());
  return d;
}

// Runs the command-line tool with the given argument string (shell syntax).
Result cli(const std::string& args) {
  const char* bin = std::getenv("DCXLAB_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "DCXLAB_BIN must point at the dcxlab executable");
  const auto dir = fs::temp_directory_path() / "dcxlab_cli_test";
  fs::create_directories(dir);
  const std::string cmd = std::string("'") + bin + "' " + args + " >'" + (dir / "stdout").string() + "' 2>'" +
                          (dir / "stderr").string() + "'";
  const int raw = std::system(cmd.c_str());
  Result r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(dir / "stdout");
  r.err = slurp(dir / "stderr");
  return r;
}

std::size_t occurrences(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version flag") {
  const auto r = cli("--version");
  CHECK(r.status == 0);
  CHECK(r.out.find(kVersion) != std::string::npos);
}

TEST_CASE("the replication kernel chain is ordered") {
  const auto out = scratch("chain");
  const auto r = cli("cx-chain --seed 1 --law 'hgeo(12,6,2)' --law 'bin(2,0.5)' --law 'poi(1)' "
                     "--law 'nbin(2,0.3333333333333333)' --law 'geo(0.5)' --out '" + out.string() + "'");
  CHECK(r.status == 0);
  const auto doc = json::parse(slurp(out / "cx_chain.json"));
  REQUIRE(doc["pairs"].size() == 4);
  for (const auto& p : doc["pairs"]) CHECK(p["verdict"] == "ordered");
  const auto csv = slurp(out / "stop_loss.csv");
  CHECK(csv.rfind("a,", 0) == 0);
}

TEST_CASE("poisson input cannot be classified") {
  const auto out = scratch("classify");
  const auto r = cli("classify --seed 2 --reps 2000 --gen 'lattice(poi(1),shift=1)' --out '" + out.string() + "'");
  CHECK(r.status == kExitInconclusive);
  const auto doc = json::parse(slurp(out / "classify.json"));
  const std::string overall = doc["results"][0]["overall"];
  CHECK(overall != "weakly_sub");
  CHECK(overall != "weakly_super");
}

TEST_CASE("percolation sweep writes one curve per generator") {
  const auto out = scratch("sweep");
  const auto r = cli("perc-sweep --seed 3 --reps 10 --r 0.3,0.5,0.7 --lower 0,0 --upper 8,8 "
                     "--gen 'lattice(bin(2,0.5),shift=1)' --gen 'poisson(1)' --gen 'lattice(geo(0.5),shift=1)' "
                     "--out '" + out.string() + "'");
  CHECK(r.status == 0);
  const auto svg = slurp(out / "sweep_f1.svg");
  CHECK(occurrences(svg, "class=\"legend\"") == 3);
  CHECK(occurrences(svg, "<polyline") == 3);
  const auto csv = slurp(out / "sweep.csv");
  CHECK(csv.rfind("generator,r,rep_count,f1_mean,f1_se,f2_mean,f2_se\r\n", 0) == 0);
  CHECK(occurrences(csv, "\r\n") == 1 + 3 * 3);
  CHECK(fs::exists(out / "threshold.json"));
}

TEST_CASE("invalid input exits with status 2 and names the field") {
  const auto out = scratch("bad");
  auto r = cli("cx-chain --law 'poi(1)' --law 'geo(0.5)' --out '" + out.string() + "'");
  CHECK(r.status == kExitPrecondition);
  CHECK(r.err.find("seed") != std::string::npos);

  r = cli("cx-chain --seed 1 --law 'poi(1)' --law 'zeta(2)' --out '" + out.string() + "'");
  CHECK(r.status == kExitPrecondition);
  CHECK(r.err.find("laws[1]") != std::string::npos);

  {
    std::ofstream blocker(out.string() + "_file");
    blocker << "x";
  }
  r = cli("cx-chain --seed 1 --law 'poi(1)' --law 'geo(0.5)' --out '" + out.string() + "_file/sub'");
  CHECK(r.status == kExitPrecondition);
  CHECK(r.err.find("out") != std::string::npos);

  r = cli("cx-chain --seed 1 --bogus");
  CHECK(r.status == kExitPrecondition);
}

TEST_CASE("config files") {
  ExperimentConfig c;
  c.experiment = "coverage";
  c.generators = {"poisson(1)", "lattice(geo(0.5),shift=1)"};
  c.radii = {0.6};
  c.ks = {1, 2, 3};
  c.seed = 9;
  c.reps = 50;
  CHECK(ExperimentConfig::from_json(c.to_json()) == c);

  auto j = c.to_json();
  j["colour"] = "red";
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ParseError);
  j = c.to_json();
  j["reps"] = "many";
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j), doctest::Contains("reps"), ParseError);

  const auto path = scratch("config").string() + ".json";
  {
    std::ofstream f(path);
    f << c.to_json().dump(2);
  }
  const auto out = scratch("config_run");
  const auto r = cli("coverage --config '" + path + "' --probes 32 --out '" + out.string() + "'");
  CHECK((r.status == 0 || r.status == kExitInconclusive));
  CHECK(fs::exists(out / "coverage_0.csv"));
  CHECK(fs::exists(out / "crossing.json"));

  const auto wrong = cli("spectral --config '" + path + "'");
  CHECK(wrong.status == kExitPrecondition);
}

TEST_CASE("manifests hash every output") {
  CHECK(sha256_file([] {
          const auto p = scratch("abc");
          std::ofstream(p, std::ios::binary) << "abc";
          return p;
        }()) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

  ExperimentConfig c;
  c.experiment = "spectral";
  c.radii = {0.5, 1.0};
  c.seed = 1;
  c.out = scratch("spectral").string();
  const auto res = run(c);
  REQUIRE(res.exit_code == kExitOk);
  const auto manifest = json::parse(slurp(res.manifest));
  CHECK(manifest["seed"] == 1);
  CHECK(manifest["version"] == kVersion);
  CHECK(manifest["files"].size() >= 8);
  for (const auto& f : manifest["files"]) {
    const fs::path p = fs::path(c.out) / f["path"].get<std::string>();
    CHECK(sha256_file(p) == f["sha256"]);
    CHECK(fs::file_size(p) == f["bytes"]);
  }
}

TEST_CASE("results do not depend on the thread count") {
  ExperimentConfig c;
  c.experiment = "perc-sweep";
  c.generators = {"poisson(1)"};
  c.radii = {0.3, 0.6};
  c.reps = 12;
  c.seed = 5;
  c.window_upper = {6.0, 6.0};
  c.out = scratch("threads1").string();
  REQUIRE(run(c).exit_code == kExitOk);
  const auto one = slurp(fs::path(c.out) / "sweep.csv");
  c.threads = 3;
  c.out = scratch("threads3").string();
  REQUIRE(run(c).exit_code == kExitOk);
  CHECK(slurp(fs::path(c.out) / "sweep.csv") == one);
}

TEST_CASE("svg plots") {
  const PlotSeries s{"poisson", {0.1, 0.2, 0.3}, {0.2, 0.5, 0.9}, {0.01, 0.02, 0.01}};
  PlotStyle style;
  style.title = "f1";
  const auto svg = render_plot({s}, style);
  CHECK(occurrences(svg, "<polyline") == 1);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(render_plot({s}, style) == svg);

  const auto path = scratch("plot").string() + ".svg";
  emit_plot({s}, style, path);
  CHECK(slurp(path) == svg);

  CHECK_THROWS_AS(render_plot({}, style), PreconditionError);
  CHECK_THROWS_AS(render_plot({PlotSeries{"x", {}, {}, {}}}, style), PreconditionError);
  CHECK_THROWS_AS(render_plot({PlotSeries{"x", {1.0}, {1.0, 2.0}, {}}}, style), PreconditionError);
}

}  // TEST_SUITE
