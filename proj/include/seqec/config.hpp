#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqec/maze.hpp"
#include "seqec/memory.hpp"
#include "seqec/mfec.hpp"
#include "seqec/sec.hpp"

namespace seqec {

enum class AgentKind { Sec, Nsec, Mfec };

std::string_view to_string(AgentKind kind);
std::string_view to_string(Retention retention);

/// Full description of an experiment. Every field is reachable through a
/// string key (see keys()) so config files and CLI flags share one path.
struct ExperimentConfig {
  AgentKind agent = AgentKind::Sec;
  SecConfig sec;
  MfecConfig mfec;
  EnvConfig env;
  std::size_t buffer_capacity = 50;
  std::size_t ec_capacity = 500;
  Retention retention = Retention::Fixed;
  std::size_t episodes = 5000;
  std::size_t runs = 20;
  std::uint64_t master_seed = 2021;
  std::string map = "default";
  std::string output_dir = "results";
  std::size_t jobs = 1;
  std::size_t smoothing_window = 50;
  double final_window_fraction = 0.1;
  std::vector<std::size_t> capacities{125, 250, 500, 1000};
  bool dump_ec = false;
  /// 0 selects the SEC couplet budget split across actions:
  /// ec_capacity * buffer_capacity / action_count.
  std::size_t mfec_capacity = 0;

  static std::span<const std::string_view> keys();

  /// Throws InputError for unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;
  /// Every key with its current value, in keys() order.
  std::vector<std::pair<std::string, std::string>> entries() const;

  /// Throws InputError describing the first invalid field.
  void validate() const;

  /// Sub-configs with derived fields resolved (sequential flag, MFEC budget).
  SecConfig resolved_sec() const;
  MfecConfig resolved_mfec() const;
  /// Episodes in the final-performance window (at least 1).
  std::size_t final_window() const;
  MazeMap load_maze() const;
};

/// Applies `key = value` lines; blank lines and `#` comments are ignored.
void apply_config_text(ExperimentConfig& cfg, std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace seqec
