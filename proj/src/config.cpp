#include "centrinet/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "centrinet/errors.hpp"

namespace centrinet {

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig cfg;
  if (name == "paper") return cfg;
  if (name == "desk") {
    cfg.preset = "desk";
    cfg.num_nodes = 50;
    cfg.radio_range_m = 22.0;
    cfg.sim_time_s = 60.0;
    cfg.num_runs = 10;
    cfg.num_connections = 10;
    cfg.packet_rate_per_ms = 0.05;
    cfg.bandwidth_bps = 5'000'000;
    cfg.anomaly_size_bytes = 50'000;
    cfg.anomaly_inject_time_s = 10.0;
    return cfg;
  }
  throw ConfigError("preset: unknown preset '" + std::string(name) + "' (expected paper or desk)");
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError(key + ": cannot parse '" + text + "' as a number");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError(key + ": value must be finite");
  }
  return value;
}

std::string format_value(double v) {
  // Shortest text that parses back to the same double.
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

struct KeySpec {
  std::string name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
KeySpec numeric_key(std::string name, T ExperimentConfig::*member) {
  KeySpec spec;
  spec.name = name;
  spec.set = [name, member](ExperimentConfig& cfg, const std::string& text) {
    cfg.*member = parse_number<T>(name, text);
  };
  spec.get = [member](const ExperimentConfig& cfg) {
    if constexpr (std::is_floating_point_v<T>) {
      return format_value(cfg.*member);
    } else {
      return std::to_string(cfg.*member);
    }
  };
  return spec;
}

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = [] {
    std::vector<KeySpec> s;
    s.push_back({"preset", [](ExperimentConfig& c, const std::string& v) { c.preset = v; },
                 [](const ExperimentConfig& c) { return c.preset; }});
    s.push_back(numeric_key("num_nodes", &ExperimentConfig::num_nodes));
    s.push_back(numeric_key("area_width_m", &ExperimentConfig::area_width_m));
    s.push_back(numeric_key("area_height_m", &ExperimentConfig::area_height_m));
    s.push_back(numeric_key("radio_range_m", &ExperimentConfig::radio_range_m));
    s.push_back(numeric_key("sim_time_s", &ExperimentConfig::sim_time_s));
    s.push_back(numeric_key("num_runs", &ExperimentConfig::num_runs));
    s.push_back(numeric_key("num_connections", &ExperimentConfig::num_connections));
    s.push_back(numeric_key("packet_rate_per_ms", &ExperimentConfig::packet_rate_per_ms));
    s.push_back(numeric_key("packet_size_bytes", &ExperimentConfig::packet_size_bytes));
    s.push_back(numeric_key("queue_capacity", &ExperimentConfig::queue_capacity));
    s.push_back(numeric_key("bandwidth_bps", &ExperimentConfig::bandwidth_bps));
    s.push_back(numeric_key("per_hop_latency_ms", &ExperimentConfig::per_hop_latency_ms));
    s.push_back(numeric_key("anomaly_size_bytes", &ExperimentConfig::anomaly_size_bytes));
    s.push_back(numeric_key("anomaly_origin_fraction", &ExperimentConfig::anomaly_origin_fraction));
    s.push_back(numeric_key("anomaly_inject_time_s", &ExperimentConfig::anomaly_inject_time_s));
    s.push_back(
        numeric_key("detector_threshold_factor", &ExperimentConfig::detector_threshold_factor));
    s.push_back(numeric_key("central_fraction", &ExperimentConfig::central_fraction));
    s.push_back(numeric_key("ic_k_paths", &ExperimentConfig::ic_k_paths));
    s.push_back(numeric_key("ic_len_slack", &ExperimentConfig::ic_len_slack));
    s.push_back(numeric_key("seed", &ExperimentConfig::seed));
    return s;
  }();
  return specs;
}

const KeySpec& find_key(const std::string& key) {
  for (const KeySpec& spec : key_specs()) {
    if (spec.name == key) return spec;
  }
  throw ConfigError(key + ": unknown configuration key");
}

/// Ordered (key, value) pairs from `key = value` text.
std::vector<std::pair<std::string, std::string>> parse_lines(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": missing key");
    }
    find_key(key);
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

void require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError(std::string(key) + ": " + what);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const KeySpec& spec : key_specs()) k.push_back(spec.name);
    return k;
  }();
  return keys;
}

ExperimentConfig parse_config(std::string_view file_text,
                              const std::map<std::string, std::string>& overrides) {
  const auto file_entries = parse_lines(file_text);
  for (const auto& [key, value] : overrides) find_key(key);

  std::string preset = "paper";
  for (const auto& [key, value] : file_entries) {
    if (key == "preset") preset = value;
  }
  if (auto it = overrides.find("preset"); it != overrides.end()) preset = it->second;

  ExperimentConfig cfg = preset_config(preset);
  for (const auto& [key, value] : file_entries) {
    if (key != "preset") find_key(key).set(cfg, value);
  }
  for (const auto& [key, value] : overrides) {
    if (key != "preset") find_key(key).set(cfg, value);
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file,
                             const std::map<std::string, std::string>& overrides) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), overrides);
}

void validate(const ExperimentConfig& c) {
  require(c.preset == "paper" || c.preset == "desk", "preset", "must be paper or desk");
  require(c.num_nodes >= 2, "num_nodes", "must be at least 2");
  require(c.area_width_m > 0, "area_width_m", "must be positive");
  require(c.area_height_m > 0, "area_height_m", "must be positive");
  require(c.radio_range_m > 0, "radio_range_m", "must be positive");
  require(c.sim_time_s > 0, "sim_time_s", "must be positive");
  require(c.sim_time_s <= 1e7, "sim_time_s", "must be at most 1e7 seconds");
  require(c.num_runs >= 1, "num_runs", "must be at least 1");
  require(c.num_connections >= 1, "num_connections", "must be at least 1");
  require(c.num_connections <= c.num_nodes * (c.num_nodes - 1), "num_connections",
          "exceeds the number of ordered node pairs");
  require(c.packet_rate_per_ms >= 1e-6, "packet_rate_per_ms", "must be at least 1e-6");
  require(c.packet_size_bytes >= 1, "packet_size_bytes", "must be positive");
  require(c.queue_capacity >= 1, "queue_capacity", "must be at least 1");
  require(c.bandwidth_bps >= 1, "bandwidth_bps", "must be positive");
  require(c.per_hop_latency_ms >= 0, "per_hop_latency_ms", "must not be negative");
  require(c.anomaly_size_bytes >= 1, "anomaly_size_bytes", "must be positive");
  require(c.anomaly_origin_fraction > 0 && c.anomaly_origin_fraction < 1,
          "anomaly_origin_fraction", "must lie in (0, 1)");
  require(c.anomaly_inject_time_s >= 0 && c.anomaly_inject_time_s < c.sim_time_s,
          "anomaly_inject_time_s", "must lie in [0, sim_time_s)");
  require(c.detector_threshold_factor > 0, "detector_threshold_factor", "must be positive");
  require(c.central_fraction > 0 && c.central_fraction <= 1, "central_fraction",
          "must lie in (0, 1]");
}

std::string to_config_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const KeySpec& spec : key_specs()) out += spec.name + " = " + spec.get(cfg) + "\n";
  return out;
}

}  // namespace centrinet
