#include "champ/drive_log.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "champ/errors.hpp"
#include "champ/io.hpp"
#include "json.hpp"

namespace champ {

namespace {

using json = nlohmann::ordered_json;

constexpr std::string_view kCsvHeader = "type,t,lat,lon,speed_kmh,count";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= content.size()) {
    const std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(content.substr(start));
      break;
    }
    lines.push_back(content.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

double parse_real(std::string_view field, std::size_t line,
                  const char* name) {
  field = trim(field);
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw ParseError(line, std::string("bad number in field '") + name + "'");
  }
  return value;
}

std::int64_t parse_count(std::string_view field, std::size_t line) {
  field = trim(field);
  std::int64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(line, "bad integer in field 'count'");
  }
  return value;
}

void parse_csv(std::string_view content, DriveLog& log) {
  const auto lines = split_lines(content);
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kCsvHeader) {
        throw ParseError(line_no, "expected header '" +
                                      std::string(kCsvHeader) + "'");
      }
      header_seen = true;
      continue;
    }

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 6) {
      throw ParseError(line_no, "expected 6 fields, got " +
                                    std::to_string(fields.size()));
    }

    const std::string_view type = fields[0];
    const double t = parse_real(fields[1], line_no, "t");
    if (type == "fix") {
      if (!fields[5].empty()) throw ParseError(line_no, "fix row with count");
      GpsFix fix;
      fix.t = t;
      fix.pos.lat_deg = parse_real(fields[2], line_no, "lat");
      fix.pos.lon_deg = parse_real(fields[3], line_no, "lon");
      if (!fields[4].empty()) {
        fix.speed_kmh = parse_real(fields[4], line_no, "speed_kmh");
      }
      log.fixes.push_back(fix);
    } else if (type == "det") {
      if (!fields[2].empty() || !fields[3].empty() || !fields[4].empty()) {
        throw ParseError(line_no, "det row with position or speed");
      }
      log.detections.push_back({t, parse_count(fields[5], line_no)});
    } else {
      throw ParseError(line_no, "unknown row type '" + std::string(type) + "'");
    }
  }
  if (!header_seen) throw ParseError(1, "missing CSV header");
}

double json_real(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw ParseError(line, std::string("missing or non-numeric '") + key + "'");
  }
  return it->get<double>();
}

void parse_jsonl(std::string_view content, DriveLog& log) {
  const auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view line = trim(lines[i]);
    if (line.empty()) continue;

    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error&) {
      throw ParseError(line_no, "invalid JSON");
    }
    if (!row.is_object()) throw ParseError(line_no, "row is not an object");
    const auto type_it = row.find("type");
    if (type_it == row.end() || !type_it->is_string()) {
      throw ParseError(line_no, "missing 'type'");
    }
    const std::string& type = type_it->get_ref<const std::string&>();

    if (type == "fix") {
      GpsFix fix;
      fix.t = json_real(row, "t", line_no);
      fix.pos.lat_deg = json_real(row, "lat", line_no);
      fix.pos.lon_deg = json_real(row, "lon", line_no);
      const auto speed = row.find("speed_kmh");
      if (speed != row.end() && !speed->is_null()) {
        if (!speed->is_number()) {
          throw ParseError(line_no, "non-numeric 'speed_kmh'");
        }
        fix.speed_kmh = speed->get<double>();
      }
      log.fixes.push_back(fix);
    } else if (type == "det") {
      const auto count = row.find("count");
      if (count == row.end() || !count->is_number_integer()) {
        throw ParseError(line_no, "missing or non-integer 'count'");
      }
      log.detections.push_back(
          {json_real(row, "t", line_no), count->get<std::int64_t>()});
    } else {
      throw ParseError(line_no, "unknown row type '" + type + "'");
    }
  }
}

std::string describe_time(double t) { return "t=" + format_double(t); }

}  // namespace

void validate(const DriveLog& log) {
  if (log.fixes.empty()) throw ValidationError("drive log has no GPS fixes");

  for (std::size_t i = 0; i < log.fixes.size(); ++i) {
    const GpsFix& fix = log.fixes[i];
    if (!std::isfinite(fix.t) || fix.t < 0.0) {
      throw ValidationError("fix time must be finite and >= 0 at " +
                            describe_time(fix.t));
    }
    if (!is_valid(fix.pos)) {
      throw ValidationError("coordinates out of range at " +
                            describe_time(fix.t));
    }
    if (fix.speed_kmh &&
        (!std::isfinite(*fix.speed_kmh) || *fix.speed_kmh < 0.0)) {
      throw ValidationError("negative or non-finite speed at " +
                            describe_time(fix.t));
    }
    if (i > 0) {
      const double prev = log.fixes[i - 1].t;
      if (fix.t <= prev) {
        throw ValidationError("fix times not strictly increasing at " +
                              describe_time(fix.t));
      }
      if (fix.t - prev > kMaxFixGapS) {
        throw ValidationError("GPS gap of " + format_double(fix.t - prev) +
                              " s exceeds 5 s at " + describe_time(fix.t));
      }
    }
  }

  for (std::size_t i = 0; i < log.detections.size(); ++i) {
    const DetectionFrame& frame = log.detections[i];
    if (!std::isfinite(frame.t) || frame.t < 0.0) {
      throw ValidationError("frame time must be finite and >= 0 at " +
                            describe_time(frame.t));
    }
    if (frame.ped_count < 0) {
      throw ValidationError("negative pedestrian count at " +
                            describe_time(frame.t));
    }
    if (i > 0 && frame.t <= log.detections[i - 1].t) {
      throw ValidationError("frame times not strictly increasing at " +
                            describe_time(frame.t));
    }
  }
}

DriveLog parse_drive_log(std::string_view content, LogFormat format,
                         std::string clip_id) {
  DriveLog log;
  log.clip_id = std::move(clip_id);
  if (format == LogFormat::kCsv) {
    parse_csv(content, log);
  } else {
    parse_jsonl(content, log);
  }
  std::stable_sort(log.fixes.begin(), log.fixes.end(),
                   [](const GpsFix& a, const GpsFix& b) { return a.t < b.t; });
  std::stable_sort(
      log.detections.begin(), log.detections.end(),
      [](const DetectionFrame& a, const DetectionFrame& b) { return a.t < b.t; });
  validate(log);
  return log;
}

DriveLog load_drive_log(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  LogFormat format;
  if (ext == ".csv") {
    format = LogFormat::kCsv;
  } else if (ext == ".jsonl") {
    format = LogFormat::kJsonl;
  } else {
    throw Error("unrecognized drive-log extension '" + ext + "' for " +
                path.string());
  }
  try {
    return parse_drive_log(read_file(path), format, path.stem().string());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.reason());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string to_jsonl(const DriveLog& log) {
  std::string out;
  for (const GpsFix& fix : log.fixes) {
    json row;
    row["type"] = "fix";
    row["t"] = fix.t;
    row["lat"] = fix.pos.lat_deg;
    row["lon"] = fix.pos.lon_deg;
    if (fix.speed_kmh) row["speed_kmh"] = *fix.speed_kmh;
    out += row.dump();
    out += '\n';
  }
  for (const DetectionFrame& frame : log.detections) {
    json row;
    row["type"] = "det";
    row["t"] = frame.t;
    row["count"] = frame.ped_count;
    out += row.dump();
    out += '\n';
  }
  return out;
}

std::string to_csv(const DriveLog& log) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const GpsFix& fix : log.fixes) {
    out += "fix," + format_double(fix.t) + ',' +
           format_double(fix.pos.lat_deg) + ',' +
           format_double(fix.pos.lon_deg) + ',' +
           (fix.speed_kmh ? format_double(*fix.speed_kmh) : std::string()) +
           ",\n";
  }
  for (const DetectionFrame& frame : log.detections) {
    out += "det," + format_double(frame.t) + ",,,," +
           std::to_string(frame.ped_count) + '\n';
  }
  return out;
}

std::vector<AssociationInterval> split_intervals(const DriveLog& log) {
  double last_t = 0.0;
  if (!log.fixes.empty()) last_t = log.fixes.back().t;
  if (!log.detections.empty()) {
    last_t = std::max(last_t, log.detections.back().t);
  }
  if (log.fixes.empty() && log.detections.empty()) return {};

  const auto count = static_cast<std::size_t>(std::floor(last_t)) + 1;
  std::vector<AssociationInterval> intervals(count);
  for (std::size_t k = 0; k < count; ++k) {
    intervals[k].k = static_cast<std::int64_t>(k);
  }
  for (const GpsFix& fix : log.fixes) {
    intervals[static_cast<std::size_t>(std::floor(fix.t))]
        .fixes_in_interval.push_back(fix);
  }
  for (const DetectionFrame& frame : log.detections) {
    auto& interval = intervals[static_cast<std::size_t>(std::floor(frame.t))];
    interval.ped_count = std::max(interval.ped_count, frame.ped_count);
  }
  return intervals;
}

double estimate_speed_kmh(const DriveLog& log, double t) {
  const auto& fixes = log.fixes;
  if (fixes.size() < 2) {
    throw ValidationError("speed estimate needs at least two fixes");
  }
  if (!(t >= fixes.front().t && t <= fixes.back().t)) {
    throw OutOfRange("time " + format_double(t) + " outside the drive log");
  }

  // First fix with time >= t; the bracketing segment is [upper-1, upper].
  auto upper = std::lower_bound(
      fixes.begin(), fixes.end(), t,
      [](const GpsFix& fix, double value) { return fix.t < value; });
  const auto latest = (upper->t == t) ? upper : std::prev(upper);
  if (latest->speed_kmh) return *latest->speed_kmh;

  if (upper == fixes.begin()) ++upper;
  const GpsFix& a = *std::prev(upper);
  const GpsFix& b = *upper;
  const double meters = haversine_distance(a.pos, b.pos);
  return std::max(0.0, meters / (b.t - a.t) * 3.6);
}

}  // namespace champ
