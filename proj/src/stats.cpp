#include "seqec/stats.hpp"

#include <algorithm>
#include <cmath>

#include "seqec/error.hpp"
#include "seqec/random.hpp"

namespace seqec {

double metric_value(const MetricsRow& row, Metric metric) {
  switch (metric) {
    case Metric::Reward: return row.reward;
    case Metric::Steps: return static_cast<double>(row.steps);
    case Metric::Entropy: return row.mean_entropy;
  }
  return 0.0;
}

std::size_t run_count(std::span<const MetricsRow> rows) {
  std::size_t n = 0;
  for (const auto& r : rows) n = std::max(n, r.run_id + 1);
  return n;
}

std::size_t episode_count(std::span<const MetricsRow> rows) {
  std::size_t n = 0;
  for (const auto& r : rows) n = std::max(n, r.episode);
  return n;
}

std::vector<double> episode_means(std::span<const MetricsRow> rows, Metric metric) {
  const std::size_t episodes = episode_count(rows);
  std::vector<double> sum(episodes, 0.0);
  std::vector<std::size_t> count(episodes, 0);
  for (const auto& r : rows) {
    require(r.episode >= 1, "episode numbers are 1-based");
    sum[r.episode - 1] += metric_value(r, metric);
    ++count[r.episode - 1];
  }
  for (std::size_t e = 0; e < episodes; ++e) {
    if (count[e] > 0) sum[e] /= static_cast<double>(count[e]);
  }
  return sum;
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
  require(window >= 1, "moving_average: window must be at least 1");
  if (window == 1) return std::vector<double>(series.begin(), series.end());
  const std::size_t n = series.size();
  const std::size_t before = (window - 1) / 2;
  const std::size_t after = window - 1 - before;
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + series[i];
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= before ? i - before : 0;
    const std::size_t hi = std::min(n, i + after + 1);
    out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  return out;
}

std::vector<double> aggregate(std::span<const MetricsRow> rows, std::size_t window, Metric metric) {
  return moving_average(episode_means(rows, metric), window);
}

std::vector<double> final_window_means(std::span<const MetricsRow> rows, Metric metric,
                                       std::size_t window) {
  const std::size_t runs = run_count(rows);
  const std::size_t episodes = episode_count(rows);
  const std::size_t first = episodes > window ? episodes - window + 1 : 1;
  std::vector<double> sum(runs, 0.0);
  std::vector<std::size_t> count(runs, 0);
  for (const auto& r : rows) {
    if (r.episode < first) continue;
    sum[r.run_id] += metric_value(r, metric);
    ++count[r.run_id];
  }
  for (std::size_t i = 0; i < runs; ++i) {
    if (count[i] > 0) sum[i] /= static_cast<double>(count[i]);
  }
  return sum;
}

Interval bootstrap_mean_ci(std::span<const double> samples, std::size_t resamples,
                           std::uint64_t seed, double level) {
  require(!samples.empty(), "bootstrap: no samples");
  require(resamples > 0 && level > 0.0 && level < 1.0, "bootstrap: bad parameters");
  Interval out;
  for (double s : samples) out.mean += s;
  out.mean /= static_cast<double>(samples.size());

  Rng rng(seed);
  std::vector<double> means(resamples);
  for (double& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) sum += samples[rng.index(samples.size())];
    m = sum / static_cast<double>(samples.size());
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - level) / 2.0;
  const auto at = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(resamples - 1)));
    return means[std::min(idx, resamples - 1)];
  };
  out.low = at(tail);
  out.high = at(1.0 - tail);
  return out;
}

std::optional<std::size_t> first_reach_episode(std::span<const double> series, double level) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i] >= level) return i + 1;
  }
  return std::nullopt;
}

std::vector<std::optional<std::size_t>> fill_episodes(std::span<const MetricsRow> rows) {
  std::vector<std::optional<std::size_t>> out(run_count(rows));
  for (const auto& r : rows) {
    auto& slot = out[r.run_id];
    if (r.memory_filled && (!slot || r.episode < *slot)) slot = r.episode;
  }
  return out;
}

std::optional<double> mean_fill_episode(std::span<const MetricsRow> rows) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& e : fill_episodes(rows)) {
    if (e) {
      sum += static_cast<double>(*e);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

RatioTable performance_matrix(std::span<const std::vector<MetricsRow>> sec_results,
                              std::span<const std::size_t> sec_capacities,
                              std::span<const std::vector<MetricsRow>> nsec_results,
                              std::span<const std::size_t> nsec_capacities, std::size_t window) {
  require(sec_results.size() == sec_capacities.size() &&
              nsec_results.size() == nsec_capacities.size(),
          "performance_matrix: results do not cover the capacity lists");
  const auto overall = [window](const std::vector<MetricsRow>& rows) {
    const auto per_run = final_window_means(rows, Metric::Reward, window);
    double sum = 0.0;
    for (double v : per_run) sum += v;
    return per_run.empty() ? 0.0 : sum / static_cast<double>(per_run.size());
  };
  RatioTable table;
  table.sec_capacities.assign(sec_capacities.begin(), sec_capacities.end());
  table.nsec_capacities.assign(nsec_capacities.begin(), nsec_capacities.end());
  std::vector<double> nsec_means;
  for (const auto& rows : nsec_results) nsec_means.push_back(overall(rows));
  for (const auto& rows : sec_results) {
    const double sec_mean = overall(rows);
    auto& line = table.cells.emplace_back();
    for (double nsec_mean : nsec_means) {
      line.push_back(nsec_mean > 0.0 ? std::optional(sec_mean / nsec_mean) : std::nullopt);
    }
  }
  return table;
}

}  // namespace seqec
