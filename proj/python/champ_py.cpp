#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "champ/advisory.hpp"
#include "champ/cli.hpp"
#include "champ/errors.hpp"
#include "champ/evaluation.hpp"
#include "champ/scenario.hpp"

namespace py = pybind11;
using namespace champ;

namespace {

std::string point_repr(const GeoPoint& p) {
  std::ostringstream os;
  os.precision(10);
  os << "GeoPoint(" << p.lat_deg << ", " << p.lon_deg << ")";
  return os.str();
}

py::tuple cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"champ"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pedestrian hotspot maps and vigilance advisories";

  // Base first so every subclass can derive from it on the Python side.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<FormatError>(m, "FormatError", base);
  py::register_exception<CoincidentPoints>(m, "CoincidentPoints", base);
  py::register_exception<OutOfRange>(m, "OutOfRange", base);
  py::register_exception<NoNodes>(m, "NoNodes", base);
  py::register_exception<RadiusMismatch>(m, "RadiusMismatch", base);
  py::register_exception<InvalidParams>(m, "InvalidParams", base);
  py::register_exception<ClipMismatch>(m, "ClipMismatch", base);

  m.attr("EARTH_RADIUS_M") = kEarthRadiusM;

  py::class_<GeoPoint>(m, "GeoPoint")
      .def(py::init<double, double>(), py::arg("lat_deg"), py::arg("lon_deg"))
      .def_readwrite("lat_deg", &GeoPoint::lat_deg)
      .def_readwrite("lon_deg", &GeoPoint::lon_deg)
      .def(py::self == py::self)
      .def("__repr__", &point_repr);

  m.def("haversine_distance", &haversine_distance, py::arg("a"), py::arg("b"));
  m.def(
      "initial_bearing",
      [](const GeoPoint& a, const GeoPoint& b) { return initial_bearing(a, b).value(); },
      py::arg("a"), py::arg("b"));
  m.def(
      "destination_point",
      [](const GeoPoint& start, double bearing_deg, double distance_m) {
        return destination_point(start, BearingDeg::normalized(bearing_deg),
                                 distance_m);
      },
      py::arg("start"), py::arg("bearing_deg"), py::arg("distance_m"));
  m.def(
      "heading_angle",
      [](double a, double b) {
        return heading_angle(BearingDeg::normalized(a), BearingDeg::normalized(b));
      },
      py::arg("a_deg"), py::arg("b_deg"));

  py::class_<GpsFix>(m, "GpsFix")
      .def(py::init([](double t, const GeoPoint& pos, std::optional<double> v) {
             return GpsFix{t, pos, v};
           }),
           py::arg("t"), py::arg("pos"), py::arg("speed_kmh") = py::none())
      .def_readwrite("t", &GpsFix::t)
      .def_readwrite("pos", &GpsFix::pos)
      .def_readwrite("speed_kmh", &GpsFix::speed_kmh);

  py::class_<DetectionFrame>(m, "DetectionFrame")
      .def(py::init([](double t, std::int64_t n) { return DetectionFrame{t, n}; }),
           py::arg("t"), py::arg("ped_count"))
      .def_readwrite("t", &DetectionFrame::t)
      .def_readwrite("ped_count", &DetectionFrame::ped_count);

  py::class_<DriveLog>(m, "DriveLog")
      .def(py::init<>())
      .def_readwrite("clip_id", &DriveLog::clip_id)
      .def_readwrite("fixes", &DriveLog::fixes)
      .def_readwrite("detections", &DriveLog::detections)
      .def(py::self == py::self);

  m.def("load_drive_log", &load_drive_log, py::arg("path"));
  m.def(
      "parse_drive_log",
      [](const std::string& text, const std::string& fmt, std::string clip_id) {
        LogFormat f;
        if (fmt == "csv") {
          f = LogFormat::kCsv;
        } else if (fmt == "jsonl") {
          f = LogFormat::kJsonl;
        } else {
          throw InvalidParams("format must be 'csv' or 'jsonl'");
        }
        return parse_drive_log(text, f, std::move(clip_id));
      },
      py::arg("text"), py::arg("format"), py::arg("clip_id"));
  m.def("to_jsonl", &to_jsonl);
  m.def("to_csv", &to_csv);
  m.def("estimate_speed_kmh", &estimate_speed_kmh, py::arg("log"), py::arg("t"));

  py::class_<HotspotNode>(m, "HotspotNode")
      .def(py::init([](const GeoPoint& pos, std::int64_t w, std::int64_t s) {
             return HotspotNode{pos, w, s};
           }),
           py::arg("pos"), py::arg("weight"), py::arg("samples") = 1)
      .def_readwrite("pos", &HotspotNode::pos)
      .def_readwrite("weight", &HotspotNode::weight)
      .def_readwrite("samples", &HotspotNode::samples);

  py::class_<HotspotMap>(m, "HotspotMap")
      .def(py::init<>())
      .def_readwrite("nodes", &HotspotMap::nodes)
      .def_readwrite("cluster_radius_m", &HotspotMap::cluster_radius_m)
      .def_readwrite("source_clips", &HotspotMap::source_clips)
      .def("total_weight", &HotspotMap::total_weight)
      .def(py::self == py::self);

  m.def(
      "build_map",
      [](const std::vector<DriveLog>& logs, double eps) {
        return build_map(logs, eps);
      },
      py::arg("logs"), py::arg("cluster_radius_m") = kDefaultClusterRadiusM);
  m.def("merge_maps", &merge_maps);
  m.def("filter_by_weight", &filter_by_weight, py::arg("map"),
        py::arg("min_weight"));
  m.def("save_map", &save_map);
  m.def("load_map", [](const std::string& s) { return load_map(s); });
  m.def("map_to_geojson",
        [](const HotspotMap& map) { return map_to_geojson(map).dump(); });

  py::class_<NearestResult>(m, "NearestResult")
      .def_readonly("node_index", &NearestResult::node_index)
      .def_readonly("distance_m", &NearestResult::distance_m)
      .def(py::self == py::self);

  py::class_<SpatialIndex>(m, "SpatialIndex")
      .def(py::init([](const std::vector<GeoPoint>& pts, std::size_t leaf) {
             return SpatialIndex::build(pts, leaf);
           }),
           py::arg("points"), py::arg("leaf_capacity") = 16)
      .def("__len__", &SpatialIndex::size)
      .def(
          "nearest",
          [](const SpatialIndex& idx, const GeoPoint& q) { return idx.nearest(q); },
          py::arg("query"))
      .def(
          "nearest_with_stats",
          [](const SpatialIndex& idx, const GeoPoint& q) {
            QueryStats stats;
            const NearestResult r = idx.nearest(q, &stats);
            return py::make_tuple(r, stats.distance_evaluations);
          },
          py::arg("query"));
  m.def(
      "brute_force_nearest",
      [](const std::vector<GeoPoint>& pts, const GeoPoint& q) {
        return brute_force_nearest(pts, q);
      },
      py::arg("points"), py::arg("query"));

  py::class_<AdvisoryParams>(m, "AdvisoryParams")
      .def(py::init([](double t, double f, double g, double b, double k,
                       double fov, std::int64_t w) {
             AdvisoryParams p{t, f, g, b, k, fov, w};
             p.validate();
             return p;
           }),
           py::arg("reaction_time_s") = 1.5, py::arg("friction") = 0.7,
           py::arg("grade") = 0.0, py::arg("offset") = 1.5,
           py::arg("sampling_distance_m") = 2.0,
           py::arg("fov_half_angle_deg") = 90.0, py::arg("min_weight") = 1)
      .def_readwrite("reaction_time_s", &AdvisoryParams::reaction_time_s)
      .def_readwrite("friction", &AdvisoryParams::friction)
      .def_readwrite("grade", &AdvisoryParams::grade)
      .def_readwrite("offset", &AdvisoryParams::offset)
      .def_readwrite("sampling_distance_m", &AdvisoryParams::sampling_distance_m)
      .def_readwrite("fov_half_angle_deg", &AdvisoryParams::fov_half_angle_deg)
      .def_readwrite("min_weight", &AdvisoryParams::min_weight)
      .def(py::self == py::self);

  m.def("stopping_distance", &stopping_distance, py::arg("v_kmh"),
        py::arg("params") = AdvisoryParams{});

  py::class_<AdvisorySample>(m, "AdvisorySample")
      .def_readonly("t", &AdvisorySample::t)
      .def_readonly("pos", &AdvisorySample::pos)
      .def_readonly("speed_kmh", &AdvisorySample::speed_kmh)
      .def_readonly("stopping_distance_m", &AdvisorySample::stopping_distance_m)
      .def_readonly("nearest", &AdvisorySample::nearest)
      .def_readonly("heading_angle_deg", &AdvisorySample::heading_angle_deg)
      .def_readonly("active", &AdvisorySample::active);

  py::class_<AdvisoryEpisode>(m, "AdvisoryEpisode")
      .def(py::init([](double a, double b, std::int64_t n) {
             return AdvisoryEpisode{a, b, n};
           }),
           py::arg("t_start"), py::arg("t_end"), py::arg("sample_count") = 1)
      .def_readonly("t_start", &AdvisoryEpisode::t_start)
      .def_readonly("t_end", &AdvisoryEpisode::t_end)
      .def_readonly("sample_count", &AdvisoryEpisode::sample_count);

  py::class_<ReplayResult>(m, "ReplayResult")
      .def_readonly("clip_id", &ReplayResult::clip_id)
      .def_readonly("params", &ReplayResult::params)
      .def_readonly("samples", &ReplayResult::samples)
      .def_readonly("episodes", &ReplayResult::episodes)
      .def(py::self == py::self);

  m.def(
      "replay",
      [](const DriveLog& log, const HotspotMap& map, const AdvisoryParams& p) {
        py::gil_scoped_release release;
        return replay(log, map, p);
      },
      py::arg("log"), py::arg("map"), py::arg("params") = AdvisoryParams{});
  m.def("save_advisories", &save_advisories);
  m.def("load_advisories", [](const std::string& s) { return load_advisories(s); });

  py::class_<GroundTruthWindow>(m, "GroundTruthWindow")
      .def(py::init([](double a, double b, std::string label) {
             return GroundTruthWindow{a, b, std::move(label)};
           }),
           py::arg("t_start"), py::arg("t_end"), py::arg("label") = "")
      .def_readwrite("t_start", &GroundTruthWindow::t_start)
      .def_readwrite("t_end", &GroundTruthWindow::t_end)
      .def_readwrite("label", &GroundTruthWindow::label);

  py::class_<GroundTruth>(m, "GroundTruth")
      .def(py::init([](std::string id, std::vector<GroundTruthWindow> w) {
             return GroundTruth{std::move(id), std::move(w)};
           }),
           py::arg("clip_id"), py::arg("windows") = std::vector<GroundTruthWindow>{})
      .def_readwrite("clip_id", &GroundTruth::clip_id)
      .def_readwrite("windows", &GroundTruth::windows);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("clip_id", &EvalReport::clip_id)
      .def_readonly("sampling_distance_m", &EvalReport::sampling_distance_m)
      .def_readonly("duration_min", &EvalReport::duration_min)
      .def_readonly("scenario", &EvalReport::scenario)
      .def_readonly("correct", &EvalReport::correct)
      .def_readonly("false_advisories", &EvalReport::false_advisories)
      .def_readonly("missed", &EvalReport::missed)
      .def_readonly("covered_windows", &EvalReport::covered_windows)
      .def_readonly("precision", &EvalReport::precision)
      .def_readonly("recall", &EvalReport::recall)
      .def("to_json", [](const EvalReport& r) { return report_to_json(r).dump(); });

  m.def("precision", &precision, py::arg("correct"), py::arg("false_advisories"));
  m.def("recall", &recall, py::arg("covered_windows"), py::arg("missed"));
  m.def("evaluate_run", &evaluate_run, py::arg("advisories"), py::arg("truth"));
  m.def("aggregate",
        [](const std::vector<EvalReport>& reports) { return aggregate(reports); });
  m.def("save_ground_truth", &save_ground_truth);
  m.def("load_ground_truth",
        [](const std::string& s) { return load_ground_truth(s); });

  py::enum_<ScenarioKind>(m, "ScenarioKind")
      .value("STRAIGHT_PASS", ScenarioKind::kStraightPass)
      .value("BLIND_TURN", ScenarioKind::kBlindTurn)
      .value("OCCLUSION", ScenarioKind::kOcclusion);

  py::class_<ScenarioSpec>(m, "ScenarioSpec")
      .def_readwrite("kind", &ScenarioSpec::kind)
      .def_readwrite("seed", &ScenarioSpec::seed)
      .def_readwrite("origin", &ScenarioSpec::origin)
      .def_readwrite("speed_kmh", &ScenarioSpec::speed_kmh)
      .def_readwrite("gps_hz", &ScenarioSpec::gps_hz)
      .def_readwrite("ped_seconds", &ScenarioSpec::ped_seconds)
      .def_readwrite("noise_m", &ScenarioSpec::noise_m)
      .def_readwrite("train_drives", &ScenarioSpec::train_drives)
      .def_readwrite("test_start_offset_m", &ScenarioSpec::test_start_offset_m);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("train_logs", &Scenario::train_logs)
      .def_readonly("test_log", &Scenario::test_log)
      .def_readonly("ground_truth", &Scenario::ground_truth)
      .def_readonly("pedestrian_sites", &Scenario::pedestrian_sites);

  m.def(
      "default_scenario",
      [](const std::string& kind, std::uint64_t seed, double noise) {
        const auto k = parse_scenario_kind(kind);
        if (!k) throw InvalidParams("unknown scenario '" + kind + "'");
        return default_scenario(*k, seed, noise);
      },
      py::arg("kind"), py::arg("seed"), py::arg("noise_m") = 0.0);
  m.def("generate", &generate, py::arg("spec"));

  m.def("run_cli", &cli, py::arg("args"),
        "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
