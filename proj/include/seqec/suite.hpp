#pragma once

// The four experiments as reusable batches: single config, agent
// comparison, capacity sweep (with the SEC/NSEC ratio table) and the
// forgetting ablation. Each writes its CSVs and SVGs under output_dir.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqec/config.hpp"
#include "seqec/experiment.hpp"
#include "seqec/stats.hpp"

namespace seqec {

struct SummaryRow {
  std::string label;
  Interval reward;
  Interval steps;
  Interval entropy;
  std::optional<double> fill_episode;
  /// First episode where the smoothed reward reaches 90% of the final-window mean.
  std::optional<std::size_t> reach90;
};

SummaryRow summarize(const ExperimentConfig& cfg, std::span<const MetricsRow> rows);

/// Rows keyed by the config echo, so suites sharing a config run it once.
using ResultCache = std::map<std::string, std::vector<MetricsRow>>;

struct SuiteResult {
  std::vector<ExperimentConfig> configs;
  std::vector<std::vector<MetricsRow>> results;  // parallel to configs
  std::vector<SummaryRow> summary;
  std::optional<RatioTable> ratio;
  std::vector<std::filesystem::path> files;

  const std::vector<MetricsRow>& rows(std::string_view label) const;
  const SummaryRow& row(std::string_view label) const;
};

struct SuiteOptions {
  bool write_files = true;
  ResultCache* cache = nullptr;
};

SuiteResult run_single(const ExperimentConfig& base, const SuiteOptions& opts = {});
/// SEC, NSEC and MFEC on the base config.
SuiteResult run_compare(const ExperimentConfig& base, const SuiteOptions& opts = {});
/// SEC and NSEC with Fixed retention at every entry of base.capacities.
SuiteResult run_sweep(const ExperimentConfig& base, const SuiteOptions& opts = {});
/// SEC and NSEC under Fixed and Fifo retention, plus MFEC for reference.
SuiteResult run_forgetting(const ExperimentConfig& base, const SuiteOptions& opts = {});

std::string format_summary(std::span<const SummaryRow> rows);

}  // namespace seqec
