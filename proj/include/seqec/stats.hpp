#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "seqec/experiment.hpp"
#include "seqec/policy.hpp"

namespace seqec {

enum class Metric { Reward, Steps, Entropy };

double metric_value(const MetricsRow& row, Metric metric);

/// Number of runs and episodes covered by `rows` (max id + 1, max episode).
std::size_t run_count(std::span<const MetricsRow> rows);
std::size_t episode_count(std::span<const MetricsRow> rows);

/// Per-episode mean across runs (index 0 = episode 1).
std::vector<double> episode_means(std::span<const MetricsRow> rows, Metric metric);

/// Centered moving average of odd-or-even width `window`; windows are
/// truncated at the edges.
std::vector<double> moving_average(std::span<const double> series, std::size_t window);

/// episode_means followed by moving_average.
std::vector<double> aggregate(std::span<const MetricsRow> rows, std::size_t window,
                              Metric metric = Metric::Reward);

/// Mean of `metric` over each run's last `window` episodes, one value per run.
std::vector<double> final_window_means(std::span<const MetricsRow> rows, Metric metric,
                                       std::size_t window);

struct Interval {
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;

  bool below(const Interval& other) const { return high < other.low; }
};

/// Percentile bootstrap interval of the mean.
Interval bootstrap_mean_ci(std::span<const double> samples, std::size_t resamples = 10000,
                           std::uint64_t seed = 7, double level = 0.95);

/// First episode (1-based) at which `series` reaches `level`.
std::optional<std::size_t> first_reach_episode(std::span<const double> series, double level);

/// Per run: first episode whose row reports a full memory.
std::vector<std::optional<std::size_t>> fill_episodes(std::span<const MetricsRow> rows);

/// Mean over runs that filled their memory; nullopt if none did.
std::optional<double> mean_fill_episode(std::span<const MetricsRow> rows);

struct RatioTable {
  std::vector<std::size_t> sec_capacities;   // rows
  std::vector<std::size_t> nsec_capacities;  // columns
  std::vector<std::vector<std::optional<double>>> cells;
};

/// cell(i, j) = final-window mean reward of SEC at capacity i divided by that
/// of NSEC at capacity j; an NSEC mean of zero leaves the cell empty.
RatioTable performance_matrix(std::span<const std::vector<MetricsRow>> sec_results,
                              std::span<const std::size_t> sec_capacities,
                              std::span<const std::vector<MetricsRow>> nsec_results,
                              std::span<const std::size_t> nsec_capacities, std::size_t window);

}  // namespace seqec
