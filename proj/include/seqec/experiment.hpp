#pragma once

// Simulation runner: episodes, per-run seeding, parallel scheduling with
// deterministic merge, and the metrics CSV format.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqec/config.hpp"
#include "seqec/maze.hpp"
#include "seqec/policy.hpp"

namespace seqec {

struct MetricsRow {
  std::size_t run_id = 0;
  std::size_t episode = 0;  // 1-based
  double reward = 0.0;
  int steps = 0;
  double mean_entropy = 0.0;
  std::size_t ec_sequence_count = 0;
  bool memory_filled = false;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

inline constexpr std::string_view kCsvHeader =
    "run_id,episode,reward,steps,mean_entropy,ec_sequence_count,memory_filled";

/// Seed of run `run_id`: derive_seed(master_seed, run_id). The agent and the
/// environment draw from derive_seed(run_seed, 1) and derive_seed(run_seed, 2).
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_id);
inline constexpr std::string_view kSeedRule =
    "run_seed=splitmix64(master_seed^splitmix64(run_id)); "
    "agent_stream=splitmix64(run_seed^splitmix64(1)); env_stream=splitmix64(run_seed^splitmix64(2))";

std::unique_ptr<Agent> make_agent(const ExperimentConfig& cfg);

struct EpisodeStats {
  double reward = 0.0;
  int steps = 0;
  double mean_entropy = 0.0;
};

/// Resets the environment and alternates agent decisions with environment
/// steps until the episode ends. Every step's reward is reported to the
/// agent; the mean entropy averages over all decisions.
EpisodeStats run_episode(Agent& agent, MazeEnv& env, Rng& agent_rng, Rng& env_rng);

/// One independent simulation (fresh agent and environment) of cfg.episodes
/// episodes. With a non-empty dump_dir and cfg.dump_ec, the final episodic
/// memory is written there as text.
std::vector<MetricsRow> run_simulation(const ExperimentConfig& cfg, const MazeMap& map,
                                       std::size_t run_id,
                                       const std::filesystem::path& dump_dir = {});

/// All runs of every config, scheduled over `jobs` threads. Results are
/// returned per config with rows ordered by (run_id, episode) regardless of
/// scheduling.
std::vector<std::vector<MetricsRow>> run_batch(std::span<const ExperimentConfig> configs,
                                               const MazeMap& map, std::size_t jobs,
                                               const std::filesystem::path& dump_dir = {});

std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg, const MazeMap& map);

/// File stem for a config's results, e.g. "sec_ec500_fixed".
std::string result_label(const ExperimentConfig& cfg);

/// CSV with `#` metadata lines (config echo, seed rule, per-run seeds)
/// followed by kCsvHeader and one row per MetricsRow. LF line endings.
std::string format_csv(const ExperimentConfig& cfg, std::span<const MetricsRow> rows);
void write_csv(const std::filesystem::path& path, const ExperimentConfig& cfg,
               std::span<const MetricsRow> rows);

struct MetricsTable {
  std::map<std::string, std::string> metadata;
  std::vector<MetricsRow> rows;
};

/// Parses a metrics CSV. Throws InputError naming the offending column on a
/// header mismatch, and rejects files without data rows.
MetricsTable parse_csv(std::string_view text);
MetricsTable read_csv(const std::filesystem::path& path);

}  // namespace seqec
