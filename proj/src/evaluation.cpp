#include "champ/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "champ/errors.hpp"
#include "champ/io.hpp"

namespace champ {

namespace {

using json = nlohmann::ordered_json;

bool overlaps(double a_start, double a_end, double b_start, double b_end) {
  return a_start <= b_end && b_start <= a_end;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void finish(EvalReport& r) {
  r.precision = precision(r.correct, r.false_advisories);
  r.recall = recall(r.covered_windows, r.missed);
}

}  // namespace

MatchCounts match_episodes(std::span<const AdvisoryEpisode> episodes,
                           std::span<const GroundTruthWindow> windows) {
  MatchCounts counts;
  for (const AdvisoryEpisode& e : episodes) {
    const bool hit = std::any_of(
        windows.begin(), windows.end(), [&](const GroundTruthWindow& w) {
          return overlaps(e.t_start, e.t_end, w.t_start, w.t_end);
        });
    ++(hit ? counts.correct : counts.false_advisories);
  }
  for (const GroundTruthWindow& w : windows) {
    const bool hit = std::any_of(
        episodes.begin(), episodes.end(), [&](const AdvisoryEpisode& e) {
          return overlaps(e.t_start, e.t_end, w.t_start, w.t_end);
        });
    ++(hit ? counts.covered_windows : counts.missed);
  }
  return counts;
}

double precision(std::int64_t correct, std::int64_t false_advisories) {
  const std::int64_t total = correct + false_advisories;
  if (total == 0) return 1.0;
  return static_cast<double>(correct) / static_cast<double>(total);
}

double recall(std::int64_t covered_windows, std::int64_t missed) {
  const std::int64_t total = covered_windows + missed;
  if (total == 0) return 1.0;
  return static_cast<double>(covered_windows) / static_cast<double>(total);
}

EvalReport evaluate_run(const ReplayResult& advisories,
                        const GroundTruth& truth) {
  if (advisories.clip_id != truth.clip_id) {
    throw ClipMismatch("advisories are for clip '" + advisories.clip_id +
                       "' but ground truth is for '" + truth.clip_id + "'");
  }
  const MatchCounts counts = match_episodes(advisories.episodes, truth.windows);

  EvalReport report;
  report.clip_id = truth.clip_id;
  report.sampling_distance_m = advisories.params.sampling_distance_m;
  if (advisories.samples.size() >= 2) {
    report.duration_min =
        (advisories.samples.back().t - advisories.samples.front().t) / 60.0;
  }
  std::set<std::string> labels;
  for (const GroundTruthWindow& w : truth.windows) {
    if (!w.label.empty()) labels.insert(w.label);
  }
  for (const std::string& label : labels) {
    if (!report.scenario.empty()) report.scenario += '+';
    report.scenario += label;
  }
  report.correct = counts.correct;
  report.false_advisories = counts.false_advisories;
  report.missed = counts.missed;
  report.covered_windows = counts.covered_windows;
  finish(report);
  return report;
}

EvalReport aggregate(std::span<const EvalReport> reports) {
  EvalReport total;
  total.clip_id = "ALL";
  std::set<std::string> scenarios;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const EvalReport& r = reports[i];
    total.correct += r.correct;
    total.false_advisories += r.false_advisories;
    total.missed += r.missed;
    total.covered_windows += r.covered_windows;
    total.duration_min += r.duration_min;
    if (!r.scenario.empty()) scenarios.insert(r.scenario);
    if (i == 0) {
      total.sampling_distance_m = r.sampling_distance_m;
    } else if (r.sampling_distance_m != total.sampling_distance_m) {
      total.sampling_distance_m = std::numeric_limits<double>::quiet_NaN();
    }
  }
  for (const std::string& s : scenarios) {
    if (!total.scenario.empty()) total.scenario += '+';
    total.scenario += s;
  }
  finish(total);
  return total;
}

std::string save_ground_truth(const GroundTruth& truth) {
  json doc;
  doc["clip_id"] = truth.clip_id;
  doc["windows"] = json::array();
  for (const GroundTruthWindow& w : truth.windows) {
    doc["windows"].push_back(
        {{"t_start", w.t_start}, {"t_end", w.t_end}, {"label", w.label}});
  }
  return doc.dump(2) + "\n";
}

GroundTruth load_ground_truth(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("ground-truth file: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("ground-truth file: not an object");
  GroundTruth truth;
  const auto clip = doc.find("clip_id");
  if (clip == doc.end() || !clip->is_string()) {
    throw FormatError("ground-truth file: missing 'clip_id'");
  }
  truth.clip_id = clip->get<std::string>();
  const auto windows = doc.find("windows");
  if (windows == doc.end() || !windows->is_array()) {
    throw FormatError("ground-truth file: missing 'windows' array");
  }
  for (const json& row : *windows) {
    if (!row.is_object() || !row.contains("t_start") ||
        !row.contains("t_end") || !row["t_start"].is_number() ||
        !row["t_end"].is_number()) {
      throw FormatError("ground-truth file: window needs numeric t_start/t_end");
    }
    GroundTruthWindow w;
    w.t_start = row["t_start"].get<double>();
    w.t_end = row["t_end"].get<double>();
    if (row.contains("label") && row["label"].is_string()) {
      w.label = row["label"].get<std::string>();
    }
    if (!(w.t_start < w.t_end)) {
      throw FormatError("ground-truth file: window with t_start >= t_end");
    }
    truth.windows.push_back(std::move(w));
  }
  return truth;
}

json report_to_json(const EvalReport& r) {
  json out;
  out["clip_id"] = r.clip_id;
  out["sampling_distance_m"] = std::isnan(r.sampling_distance_m)
                                   ? json(nullptr)
                                   : json(r.sampling_distance_m);
  out["duration_min"] = r.duration_min;
  out["scenario"] = r.scenario;
  out["correct"] = r.correct;
  out["false_advisories"] = r.false_advisories;
  out["missed"] = r.missed;
  out["covered_windows"] = r.covered_windows;
  out["precision"] = r.precision;
  out["recall"] = r.recall;
  return out;
}

std::string reports_to_csv(std::span<const EvalReport> reports) {
  std::string out =
      "clip,duration_min,scenario,sampling_distance_m,precision,recall\n";
  for (const EvalReport& r : reports) {
    out += csv_field(r.clip_id) + ',' + format_double(r.duration_min) + ',' +
           csv_field(r.scenario) + ',' +
           (std::isnan(r.sampling_distance_m)
                ? std::string()
                : format_double(r.sampling_distance_m)) +
           ',' + format_double(r.precision) + ',' + format_double(r.recall) +
           '\n';
  }
  return out;
}

}  // namespace champ
