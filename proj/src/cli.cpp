#include "champ/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <future>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "champ/advisory.hpp"
#include "champ/errors.hpp"
#include "champ/evaluation.hpp"
#include "champ/hotspot_map.hpp"
#include "champ/io.hpp"
#include "champ/scenario.hpp"

namespace champ {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::vector<fs::path> collect_logs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> paths;
  for (const std::string& input : inputs) {
    const fs::path p(input);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        const auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".jsonl" || ext == ".csv")) {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      paths.insert(paths.end(), found.begin(), found.end());
    } else {
      paths.push_back(p);
    }
  }
  if (paths.empty()) throw Error("no drive logs found");
  return paths;
}

struct BuildMapArgs {
  std::vector<std::string> logs;
  std::string out;
  double cluster_radius = kDefaultClusterRadiusM;
};

void build_map_cmd(const BuildMapArgs& a, std::ostream& out) {
  const auto paths = collect_logs(a.logs);
  std::vector<std::future<DriveLog>> pending;
  for (const fs::path& p : paths) {
    pending.push_back(
        std::async(std::launch::async, [p] { return load_drive_log(p); }));
  }
  std::vector<DriveLog> logs;
  for (auto& f : pending) logs.push_back(f.get());
  const HotspotMap map = build_map(logs, a.cluster_radius);
  write_file(a.out, save_map(map));
  out << "wrote " << a.out << ": " << map.nodes.size() << " nodes from "
      << logs.size() << " logs\n";
}

struct MergeArgs {
  std::string a;
  std::string b;
  std::string out;
};

void merge_cmd(const MergeArgs& a, std::ostream& out) {
  const HotspotMap merged =
      merge_maps(load_map(read_file(a.a)), load_map(read_file(a.b)));
  write_file(a.out, save_map(merged));
  out << "wrote " << a.out << ": " << merged.nodes.size() << " nodes\n";
}

struct ReplayArgs {
  std::string map;
  std::string log;
  std::string out;
  AdvisoryParams params;
};

void replay_cmd(const ReplayArgs& a, std::ostream& out) {
  const HotspotMap map = load_map(read_file(a.map));
  const DriveLog log = load_drive_log(a.log);
  const ReplayResult result = replay(log, map, a.params);
  write_file(a.out, save_advisories(result));
  out << "wrote " << a.out << ": " << result.samples.size() << " samples, "
      << result.episodes.size() << " episodes\n";
}

struct EvaluateArgs {
  std::vector<std::string> advisories;
  std::vector<std::string> ground_truth;
  std::string out;
  bool csv = false;
};

void evaluate_cmd(const EvaluateArgs& a, std::ostream& out) {
  std::map<std::string, GroundTruth> truths;
  for (const std::string& path : a.ground_truth) {
    GroundTruth gt = load_ground_truth(read_file(path));
    std::string id = gt.clip_id;
    truths.emplace(std::move(id), std::move(gt));
  }
  std::vector<EvalReport> reports;
  for (const std::string& path : a.advisories) {
    const ReplayResult run = load_advisories(read_file(path));
    const auto it = truths.find(run.clip_id);
    if (it == truths.end()) {
      // A single pair is compared directly so the mismatch names both ids.
      if (a.advisories.size() == 1 && truths.size() == 1) {
        evaluate_run(run, truths.begin()->second);
      }
      throw ClipMismatch("no ground truth for clip '" + run.clip_id + "'");
    }
    reports.push_back(evaluate_run(run, it->second));
  }

  json doc;
  if (reports.size() == 1) {
    doc = report_to_json(reports.front());
  } else {
    doc["clips"] = json::array();
    for (const EvalReport& r : reports) doc["clips"].push_back(report_to_json(r));
    doc["aggregate"] = report_to_json(aggregate(reports));
  }
  write_file(a.out, doc.dump(2) + "\n");
  if (a.csv) {
    std::vector<EvalReport> rows = reports;
    if (reports.size() > 1) rows.push_back(aggregate(reports));
    write_file(fs::path(a.out).replace_extension(".csv"), reports_to_csv(rows));
  }
  const EvalReport summary =
      reports.size() == 1 ? reports.front() : aggregate(reports);
  out << "precision " << format_double(summary.precision) << ", recall "
      << format_double(summary.recall) << "\n";
}

struct SynthArgs {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string out_dir;
  double noise = 0.0;
};

void synth_cmd(const SynthArgs& a, std::ostream& out) {
  const auto kind = parse_scenario_kind(a.scenario);
  if (!kind) throw InvalidParams("unknown scenario '" + a.scenario + "'");
  const Scenario s = generate(default_scenario(*kind, a.seed, a.noise));
  const fs::path dir(a.out_dir);
  for (const DriveLog& log : s.train_logs) {
    const fs::path p = dir / "train" / (log.clip_id + ".jsonl");
    write_file(p, to_jsonl(log));
    out << "wrote " << p.string() << "\n";
  }
  const fs::path test = dir / "test" / (s.test_log.clip_id + ".jsonl");
  write_file(test, to_jsonl(s.test_log));
  const fs::path gt = dir / (s.test_log.clip_id + ".gt.json");
  write_file(gt, save_ground_truth(s.ground_truth));
  out << "wrote " << test.string() << "\nwrote " << gt.string() << "\n";
}

struct ExportArgs {
  std::string map;
  std::string advisories;
  std::string out;
};

void export_cmd(const ExportArgs& a, std::ostream& out) {
  json collection = map_to_geojson(load_map(read_file(a.map)));
  if (!a.advisories.empty()) {
    for (json& f : episode_features(load_advisories(read_file(a.advisories)))) {
      collection["features"].push_back(std::move(f));
    }
  }
  write_file(a.out, collection.dump(1) + "\n");
  out << "wrote " << a.out << ": " << collection["features"].size()
      << " features\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Pedestrian hotspot maps and vigilance advisories from drive logs",
               "champ"};
  app.require_subcommand(1);

  BuildMapArgs build_args;
  auto* build = app.add_subcommand(
      "build-map", "Cluster ego positions where pedestrians were seen into a map");
  build->add_option("--logs", build_args.logs,
                    "Drive logs (.jsonl/.csv) or directories containing them")
      ->required()
      ->expected(1, -1);
  build->add_option("--out", build_args.out, "Output map JSON")->required();
  build->add_option("--cluster-radius", build_args.cluster_radius,
                    "Cluster radius epsilon in meters")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  MergeArgs merge_args;
  auto* merge = app.add_subcommand(
      "merge-maps", "Merge two maps (fleet or repeat drives) by re-clustering");
  merge->add_option("a", merge_args.a, "First map JSON")->required();
  merge->add_option("b", merge_args.b, "Second map JSON")->required();
  merge->add_option("--out", merge_args.out, "Output map JSON")->required();

  ReplayArgs replay_args;
  auto* rep = app.add_subcommand(
      "replay",
      "Replay a drive against a map; advise when d < s and theta < FOV. "
      "Vehicle speed v (km/h) comes from the log's speed channel or from "
      "consecutive fixes");
  rep->add_option("--map", replay_args.map, "Map JSON")->required();
  rep->add_option("--log", replay_args.log, "Drive log to replay")->required();
  rep->add_option("--out", replay_args.out, "Output advisory JSON")->required();
  AdvisoryParams& p = replay_args.params;
  rep->add_option("--sampling-distance", p.sampling_distance_m,
                  "K: meters travelled between advisory evaluations")
      ->capture_default_str();
  rep->add_option("--reaction-time", p.reaction_time_s,
                  "t: driver reaction time in seconds")
      ->capture_default_str();
  rep->add_option("--friction", p.friction,
                  "f: tyre-road friction coefficient")
      ->capture_default_str();
  rep->add_option("--grade", p.grade, "G: road slope")->capture_default_str();
  rep->add_option("--offset", p.offset,
                  "b: multiplicative safety factor on stopping distance s")
      ->capture_default_str();
  rep->add_option("--fov", p.fov_half_angle_deg,
                  "theta bound: advise only if the heading angle to the "
                  "nearest hotspot is below this many degrees")
      ->capture_default_str();
  rep->add_option("--min-weight", p.min_weight,
                  "Ignore hotspots with fewer pedestrian sightings")
      ->capture_default_str();

  EvaluateArgs eval_args;
  auto* eval = app.add_subcommand(
      "evaluate", "Score advisory episodes against ground-truth windows");
  eval->add_option("--advisories", eval_args.advisories,
                   "Advisory JSON from replay (repeatable)")
      ->required()
      ->expected(1, -1);
  eval->add_option("--ground-truth", eval_args.ground_truth,
                   "Ground-truth JSON (repeatable; matched by clip_id)")
      ->required()
      ->expected(1, -1);
  eval->add_option("--out", eval_args.out, "Output report JSON")->required();
  eval->add_flag("--csv", eval_args.csv,
                 "Also write a table-style CSV next to the report");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand(
      "synth", "Generate synthetic training drives, a test drive and ground truth");
  synth->add_option("--scenario", synth_args.scenario, "Scenario kind")
      ->required()
      ->check(CLI::IsMember({"straight-pass", "blind-turn", "occlusion"}));
  synth->add_option("--seed", synth_args.seed, "Random seed")
      ->capture_default_str();
  synth->add_option("--out-dir", synth_args.out_dir, "Output directory")
      ->required();
  synth->add_option("--noise", synth_args.noise,
                    "GPS jitter standard deviation in meters")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);

  ExportArgs export_args;
  auto* exp = app.add_subcommand(
      "export-geojson", "Export hotspots and advisory episodes as GeoJSON");
  exp->add_option("--map", export_args.map, "Map JSON")->required();
  exp->add_option("--advisories", export_args.advisories,
                  "Advisory JSON whose episodes become LineStrings");
  exp->add_option("--out", export_args.out, "Output GeoJSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*build) build_map_cmd(build_args, out);
    if (*merge) merge_cmd(merge_args, out);
    if (*rep) replay_cmd(replay_args, out);
    if (*eval) evaluate_cmd(eval_args, out);
    if (*synth) synth_cmd(synth_args, out);
    if (*exp) export_cmd(export_args, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitOk;
}

}  // namespace champ
