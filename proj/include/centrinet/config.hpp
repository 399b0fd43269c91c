#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace centrinet {

/// Every tunable of an experiment, in the units named by its key.
struct ExperimentConfig {
  std::string preset = "paper";
  std::size_t num_nodes = 200;
  double area_width_m = 100.0;
  double area_height_m = 100.0;
  double radio_range_m = 15.0;
  double sim_time_s = 900.0;
  std::size_t num_runs = 100;
  std::size_t num_connections = 35;
  double packet_rate_per_ms = 2.0;
  std::uint64_t packet_size_bytes = 500;
  std::size_t queue_capacity = 1000;
  std::uint64_t bandwidth_bps = 250'000;
  double per_hop_latency_ms = 1.0;
  std::uint64_t anomaly_size_bytes = 10'000'000;
  double anomaly_origin_fraction = 0.05;
  double anomaly_inject_time_s = 80.0;
  double detector_threshold_factor = 10.0;
  double central_fraction = 0.20;
  std::size_t ic_k_paths = 5;
  std::size_t ic_len_slack = 2;
  std::uint64_t seed = 1;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// "paper" (200 nodes, 900 s, 100 runs) or "desk" (50 nodes, 60 s, 10 runs).
ExperimentConfig preset_config(std::string_view name);

/// Recognized keys in canonical order.
const std::vector<std::string>& config_keys();

/// Layers: preset defaults < `file_text` < `overrides`. The preset itself may
/// be chosen in either layer. Unknown keys and bad values throw ConfigError
/// naming the key.
ExperimentConfig parse_config(std::string_view file_text,
                              const std::map<std::string, std::string>& overrides = {});

ExperimentConfig load_config(const std::filesystem::path& file,
                             const std::map<std::string, std::string>& overrides = {});

/// Range checks; throws ConfigError naming the first offending key.
void validate(const ExperimentConfig& cfg);

/// `key = value` lines for every key, parseable by parse_config.
std::string to_config_text(const ExperimentConfig& cfg);

}  // namespace centrinet
