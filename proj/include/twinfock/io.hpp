// Deterministic text I/O: number formatting, the key=value experiment config
// format, CSV (RFC 4180 quoting) and JSON Lines writers, and run manifests.
//
// Every float is printed with %.17g so that round-tripping through text is
// exact and identical inputs produce byte-identical outputs on any platform
// with IEEE-754 doubles. Manifest timestamps are the one deliberate exception
// to byte-stability, and data files never contain them.

#pragma once

#include <cctype>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "twinfock/measurement.hpp"

namespace twinfock::io {

// ---------------------------------------------------------------------------
// formatting

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline std::string format_u64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%" PRIu64, v);
  return std::string(buf);
}

// RFC 4180: quote fields containing commas, quotes, or line breaks; double
// any embedded quotes. Current column sets never trigger this, but the writer
// should not silently produce broken CSV if a future column does.
inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i != 0) out += ',';
    out += csv_escape(fields[i]);
  }
  out += '\n';
  return out;
}

inline std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// experiment config format
//
// Plain text, one `key = value` pair per line. Blank lines and lines starting
// with '#' are ignored, as is a trailing '# comment' after a value. Keys:
//
//   n_up         initial up-mode count (required, >= 0)
//   n_down       initial down-mode count (required, >= 0)
//   detections   number of detection steps (required, >= 0)
//   angle        analyzer angle theta in radians (default 0)
//   schedule     per-step detection modes, e.g. "u,d,i*8" (default: all i)
//   master_seed  uint64 ensemble seed (optional; CLI --seed overrides)
//   trajectories ensemble size (default 1)
//
// Schedule tokens: i = indistinguishable, u = which-path up, d = which-path
// down; an optional "*<count>" repeats the token. The expanded schedule must
// either be empty or match `detections` exactly.

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline long long parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": expected an integer, got \"" + value + "\"");
  }
  if (used != value.size()) {
    throw std::invalid_argument(key + ": expected an integer, got \"" + value + "\"");
  }
  return v;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  if (!value.empty() && value[0] == '-') {
    throw std::invalid_argument(key + ": expected a non-negative integer, got \"" + value + "\"");
  }
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": expected a 64-bit unsigned integer, got \"" + value + "\"");
  }
  if (used != value.size()) {
    throw std::invalid_argument(key + ": expected a 64-bit unsigned integer, got \"" + value + "\"");
  }
  return static_cast<std::uint64_t>(v);
}

inline double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": expected a number, got \"" + value + "\"");
  }
  if (used != value.size()) {
    throw std::invalid_argument(key + ": expected a number, got \"" + value + "\"");
  }
  return v;
}

}  // namespace detail

inline std::vector<DetectionMode> parse_schedule(const std::string& text) {
  std::vector<DetectionMode> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    token = detail::trim(token);
    if (token.empty()) {
      throw std::invalid_argument("schedule: empty token");
    }
    std::string symbol = token;
    long long count = 1;
    const std::size_t star = token.find('*');
    if (star != std::string::npos) {
      symbol = detail::trim(token.substr(0, star));
      count = detail::parse_int("schedule", detail::trim(token.substr(star + 1)));
      if (count < 1) {
        throw std::invalid_argument("schedule: repeat count must be >= 1 in \"" + token + "\"");
      }
    }
    DetectionMode mode;
    if (symbol == "i") mode = DetectionMode::indistinguishable;
    else if (symbol == "u") mode = DetectionMode::which_path_up;
    else if (symbol == "d") mode = DetectionMode::which_path_down;
    else throw std::invalid_argument("schedule: unknown token \"" + token + "\" (use i, u, or d)");
    out.insert(out.end(), static_cast<std::size_t>(count), mode);
  }
  return out;
}

inline std::string schedule_to_string(const std::vector<DetectionMode>& schedule) {
  // Re-encode with run-length compression; parse(schedule_to_string(s)) == s.
  std::string out;
  std::size_t i = 0;
  while (i < schedule.size()) {
    std::size_t j = i;
    while (j < schedule.size() && schedule[j] == schedule[i]) ++j;
    const char symbol = schedule[i] == DetectionMode::indistinguishable   ? 'i'
                        : schedule[i] == DetectionMode::which_path_up ? 'u'
                                                                          : 'd';
    if (!out.empty()) out += ',';
    out += symbol;
    if (j - i > 1) out += "*" + std::to_string(j - i);
    i = j;
  }
  return out;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  bool seen_n_up = false, seen_n_down = false, seen_detections = false;
  std::vector<std::string> seen_keys;

  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value, got \"" + line + "\"");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    }
    for (const std::string& prev : seen_keys) {
      if (prev == key) {
        throw std::invalid_argument("duplicate config key: " + key);
      }
    }
    seen_keys.push_back(key);

    if (key == "n_up") {
      config.n_up = detail::parse_int(key, value);
      seen_n_up = true;
    } else if (key == "n_down") {
      config.n_down = detail::parse_int(key, value);
      seen_n_down = true;
    } else if (key == "detections") {
      config.detections = static_cast<int>(detail::parse_int(key, value));
      seen_detections = true;
    } else if (key == "angle") {
      config.angle = detail::parse_double(key, value);
    } else if (key == "schedule") {
      config.schedule = parse_schedule(value);
    } else if (key == "master_seed") {
      config.master_seed = detail::parse_u64(key, value);
    } else if (key == "trajectories") {
      config.trajectories = static_cast<int>(detail::parse_int(key, value));
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }

  if (!seen_n_up) throw std::invalid_argument("n_up: missing required key");
  if (!seen_n_down) throw std::invalid_argument("n_down: missing required key");
  if (!seen_detections) throw std::invalid_argument("detections: missing required key");

  const std::vector<std::string> problems = config.validate();
  if (!problems.empty()) throw std::invalid_argument(problems.front());
  return config;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

// ---------------------------------------------------------------------------
// trajectory serialization (JSON Lines)
//
// Records and the trailing summary are emitted as single-line JSON objects
// built by hand so field order and float formatting stay fixed. A "type"
// field distinguishes the two.

inline std::string detection_record_line(const DetectionRecord& record) {
  std::string out = "{\"type\":\"detection\",\"step\":";
  out += std::to_string(record.step);
  out += ",\"mode\":\"";
  out += mode_name(record.mode);
  out += "\",\"angle\":";
  out += format_double(record.angle);
  out += ",\"outcome\":";
  out += std::to_string(record.outcome);
  out += ",\"probability\":";
  out += format_double(record.probability);
  out += "}";
  return out;
}

inline std::string state_json(const SectorState& state) {
  std::string out = "{\"total_n\":";
  out += std::to_string(state.total_n);
  if (state.rotation_angle) {
    out += ",\"rotation_angle\":";
    out += format_double(*state.rotation_angle);
  }
  out += ",\"amplitudes\":[";
  for (int k = 0; k <= state.total_n; ++k) {
    if (k != 0) out += ',';
    out += '[';
    out += format_double(state.amplitudes[static_cast<std::size_t>(k)].real());
    out += ',';
    out += format_double(state.amplitudes[static_cast<std::size_t>(k)].imag());
    out += ']';
  }
  out += "]}";
  return out;
}

inline std::string trajectory_summary_line(const Trajectory& trajectory) {
  const TrajectorySummary& s = trajectory.summary;
  std::string out = "{\"type\":\"summary\",\"seed\":";
  out += format_u64(trajectory.seed);
  out += ",\"detections\":";
  out += std::to_string(trajectory.records.size());
  out += ",\"estimated_phase\":";
  out += format_double(s.estimated_phase);
  out += ",\"phase_fidelity\":";
  out += format_double(s.phase_fidelity);
  out += ",\"sx\":";
  out += format_double(s.spin.sx);
  out += ",\"sy\":";
  out += format_double(s.spin.sy);
  out += ",\"sz\":";
  out += format_double(s.spin.sz);
  out += ",\"transverse_magnitude\":";
  out += format_double(s.spin.transverse_magnitude);
  out += ",\"final_state\":";
  out += state_json(trajectory.final_state);
  out += "}";
  return out;
}

inline std::string trajectory_jsonl(const Trajectory& trajectory) {
  std::string out;
  for (const DetectionRecord& record : trajectory.records) {
    out += detection_record_line(record);
    out += '\n';
  }
  out += trajectory_summary_line(trajectory);
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------
// manifests

inline nlohmann::json config_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["n_up"] = config.n_up;
  j["n_down"] = config.n_down;
  j["detections"] = config.detections;
  j["angle"] = config.angle;
  j["schedule"] = schedule_to_string(config.schedule);
  if (config.master_seed) {
    j["master_seed"] = *config.master_seed;
  } else {
    j["master_seed"] = nullptr;
  }
  j["trajectories"] = config.trajectories;
  return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

// The manifest is written next to every data output so a run can be replayed:
// same tool version + same config + same seed => byte-identical data files.
inline void write_manifest(const std::string& path, const std::string& command,
                           const nlohmann::json& parameters,
                           const std::vector<std::string>& outputs,
                           const std::string& tool_version) {
  nlohmann::json j;
  j["command"] = command;
  j["parameters"] = parameters;
  j["outputs"] = outputs;
  j["tool_version"] = tool_version;
  j["created_utc"] = iso8601_utc_now();
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace twinfock::io
