#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "champ/cli.hpp"
#include "champ/io.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace champ;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run champ_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "champ");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string p(const fs::path& path) { return path.string(); }

// synth -> build-map -> replay -> evaluate inside `dir`; returns the report.
std::string pipeline(const fs::path& dir, const std::string& scenario,
                     const std::string& seed) {
  REQUIRE(champ_cli({"synth", "--scenario", scenario, "--seed", seed,
                     "--out-dir", p(dir)})
              .code == 0);
  const std::string id = scenario + "_s" + seed + "_test";
  REQUIRE(champ_cli({"build-map", "--logs", p(dir / "train"), "--out",
                     p(dir / "map.json")})
              .code == 0);
  REQUIRE(champ_cli({"replay", "--map", p(dir / "map.json"), "--log",
                     p(dir / "test" / (id + ".jsonl")), "--out",
                     p(dir / "adv.json")})
              .code == 0);
  const Run r = champ_cli({"evaluate", "--advisories", p(dir / "adv.json"),
                           "--ground-truth", p(dir / (id + ".gt.json")),
                           "--out", p(dir / "report.json"), "--csv"});
  REQUIRE(r.code == 0);
  return read_file(dir / "report.json");
}

}  // namespace

TEST_CASE("help exits 0 and replay help names every symbol") {
  const Run top = champ_cli({"--help"});
  CHECK(top.code == 0);
  for (const char* sub : {"build-map", "merge-maps", "replay", "evaluate",
                          "synth", "export-geojson"}) {
    CHECK(top.out.find(sub) != std::string::npos);
    const Run r = champ_cli({sub, "--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("Usage") != std::string::npos);
  }
  const std::string help = champ_cli({"replay", "--help"}).out;
  for (const char* sym : {"K:", "t:", "f:", "G:", "b:", "theta", " v "}) {
    CHECK_MESSAGE(help.find(sym) != std::string::npos, sym);
  }
}

TEST_CASE("usage errors exit 2") {
  CHECK(champ_cli({}).code == 2);
  CHECK(champ_cli({"frobnicate"}).code == 2);
  const Run r = champ_cli({"replay", "--map", "m.json"});
  CHECK(r.code == 2);
  CHECK(r.err.find("required") != std::string::npos);
  CHECK(champ_cli({"replay", "--map", "a", "--log", "b", "--out", "c",
                   "--sampling-distance", "two"})
            .code == 2);
  CHECK(champ_cli({"synth", "--scenario", "occlusion", "--seed", "1",
                   "--out-dir", "x", "--unknown"})
            .code == 2);
  // Scenario names are checked while parsing flags.
  CHECK(champ_cli({"synth", "--scenario", "rainy", "--seed", "1", "--out-dir",
                   "x"})
            .code == 2);
}

TEST_CASE("data errors exit 1") {
  testing::TempDir dir("cli_err");
  CHECK(champ_cli({"build-map", "--logs", p(dir.path() / "missing.jsonl"),
                   "--out", p(dir.path() / "m.json")})
            .code == 1);
  write_file(dir.path() / "bad.csv", "type,t,lat,lon,speed_kmh,count\nfix,0,95,0,,\n");
  const Run r = champ_cli({"build-map", "--logs", p(dir.path() / "bad.csv"),
                           "--out", p(dir.path() / "m.json")});
  CHECK(r.code == 1);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("evaluate with mismatched clip ids exits 1") {
  testing::TempDir dir("cli_mismatch");
  pipeline(dir.path(), "straight-pass", "3");
  write_file(dir.path() / "other.gt.json",
             save_ground_truth(GroundTruth{"someone_else", {{1, 2, "x"}}}));
  const Run r = champ_cli({"evaluate", "--advisories", p(dir.path() / "adv.json"),
                           "--ground-truth", p(dir.path() / "other.gt.json"),
                           "--out", p(dir.path() / "r.json")});
  CHECK(r.code == 1);
  CHECK(r.err.find("someone_else") != std::string::npos);
}

TEST_CASE("occlusion seed 7 report matches the golden file") {
  testing::TempDir dir("cli_golden");
  const std::string report = pipeline(dir.path(), "occlusion", "7");
  const auto doc = nlohmann::json::parse(report);
  CHECK(doc["precision"] == 1.0);
  CHECK(doc["recall"] == 1.0);
  CHECK(report == read_file(fs::path(CHAMP_GOLDEN_DIR) / "occlusion_s7_report.json"));
  const std::string csv = read_file(dir.path() / "report.csv");
  CHECK(csv.find("occlusion_s7_test") != std::string::npos);
}

TEST_CASE("every subcommand rewrites byte-identical outputs") {
  testing::TempDir dir("cli_idem");
  const fs::path d = dir.path();
  pipeline(d, "blind-turn", "4");
  const std::string id = "blind-turn_s4_test";

  std::vector<std::pair<std::vector<std::string>, std::vector<fs::path>>> cmds = {
      {{"synth", "--scenario", "blind-turn", "--seed", "4", "--out-dir", p(d)},
       {d / "test" / (id + ".jsonl"), d / (id + ".gt.json")}},
      {{"build-map", "--logs", p(d / "train"), "--out", p(d / "map.json")},
       {d / "map.json"}},
      {{"merge-maps", p(d / "map.json"), p(d / "map.json"), "--out",
        p(d / "merged.json")},
       {d / "merged.json"}},
      {{"replay", "--map", p(d / "map.json"), "--log",
        p(d / "test" / (id + ".jsonl")), "--out", p(d / "adv.json"),
        "--sampling-distance", "5", "--offset", "1.2"},
       {d / "adv.json"}},
      {{"evaluate", "--advisories", p(d / "adv.json"), "--ground-truth",
        p(d / (id + ".gt.json")), "--out", p(d / "report.json"), "--csv"},
       {d / "report.json", d / "report.csv"}},
      {{"export-geojson", "--map", p(d / "map.json"), "--advisories",
        p(d / "adv.json"), "--out", p(d / "view.geojson")},
       {d / "view.geojson"}},
  };
  for (const auto& [args, outputs] : cmds) {
    REQUIRE(champ_cli(args).code == 0);
    std::vector<std::string> first;
    for (const auto& f : outputs) first.push_back(read_file(f));
    REQUIRE(champ_cli(args).code == 0);
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      CHECK_MESSAGE(read_file(outputs[i]) == first[i], args[0]);
    }
  }
}

TEST_CASE("replay flags reach the advisory parameters") {
  testing::TempDir dir("cli_params");
  const fs::path d = dir.path();
  pipeline(d, "straight-pass", "2");
  auto params = nlohmann::json::parse(read_file(d / "adv.json"))["params"];
  const AdvisoryParams defaults;
  CHECK(params == nlohmann::json::parse(params_to_json(defaults).dump()));

  REQUIRE(champ_cli({"replay", "--map", p(d / "map.json"), "--log",
                     p(d / "test" / "straight-pass_s2_test.jsonl"), "--out",
                     p(d / "adv2.json"), "--sampling-distance", "5",
                     "--reaction-time", "2", "--friction", "0.4", "--grade",
                     "0.05", "--offset", "1.1", "--fov", "60", "--min-weight",
                     "3"})
              .code == 0);
  params = nlohmann::json::parse(read_file(d / "adv2.json"))["params"];
  AdvisoryParams want;
  want.sampling_distance_m = 5;
  want.reaction_time_s = 2;
  want.friction = 0.4;
  want.grade = 0.05;
  want.offset = 1.1;
  want.fov_half_angle_deg = 60;
  want.min_weight = 3;
  CHECK(params == nlohmann::json::parse(params_to_json(want).dump()));
}

TEST_CASE("evaluate pools several clips") {
  testing::TempDir dir("cli_multi");
  const fs::path a = dir.path() / "a";
  const fs::path b = dir.path() / "b";
  pipeline(a, "straight-pass", "1");
  pipeline(b, "occlusion", "2");
  const Run r = champ_cli(
      {"evaluate", "--advisories", p(a / "adv.json"), "--advisories",
       p(b / "adv.json"), "--ground-truth", p(b / "occlusion_s2_test.gt.json"),
       "--ground-truth", p(a / "straight-pass_s1_test.gt.json"), "--out",
       p(dir.path() / "all.json"), "--csv"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(read_file(dir.path() / "all.json"));
  CHECK(doc["clips"].size() == 2);
  CHECK(doc["aggregate"]["clip_id"] == "ALL");
  CHECK(doc["aggregate"]["covered_windows"] == 3);
  const std::string csv = read_file(dir.path() / "all.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("build-map accepts CSV and JSONL files together") {
  testing::TempDir dir("cli_mixed");
  const fs::path d = dir.path();
  REQUIRE(champ_cli({"synth", "--scenario", "occlusion", "--seed", "9",
                     "--out-dir", p(d)})
              .code == 0);
  const fs::path j0 = d / "train" / "occlusion_s9_train0.jsonl";
  const fs::path j1 = d / "train" / "occlusion_s9_train1.jsonl";
  const fs::path c1 = d / "occlusion_s9_train1.csv";
  write_file(c1, to_csv(load_drive_log(j1)));
  REQUIRE(champ_cli({"build-map", "--logs", p(j0), p(c1), "--out",
                     p(d / "mixed.json")})
              .code == 0);
  REQUIRE(champ_cli({"build-map", "--logs", p(d / "train"), "--out",
                     p(d / "dir.json")})
              .code == 0);
  CHECK(read_file(d / "mixed.json") == read_file(d / "dir.json"));
}

TEST_CASE("export-geojson writes points and episode lines") {
  testing::TempDir dir("cli_geo");
  const fs::path d = dir.path();
  pipeline(d, "occlusion", "3");
  REQUIRE(champ_cli({"export-geojson", "--map", p(d / "map.json"), "--out",
                     p(d / "map.geojson")})
              .code == 0);
  REQUIRE(champ_cli({"export-geojson", "--map", p(d / "map.json"),
                     "--advisories", p(d / "adv.json"), "--out",
                     p(d / "all.geojson")})
              .code == 0);
  const auto pts = nlohmann::json::parse(read_file(d / "map.geojson"));
  const auto all = nlohmann::json::parse(read_file(d / "all.geojson"));
  CHECK(pts["type"] == "FeatureCollection");
  CHECK(pts["features"].size() == 2);
  std::size_t lines = 0;
  for (const auto& f : all["features"]) {
    lines += f["geometry"]["type"] == "LineString" ? 1 : 0;
  }
  CHECK(lines == 2);
}
