#pragma once

// Standalone SVG charts for learning curves and the SEC/NSEC ratio table.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqec/stats.hpp"

namespace seqec {

struct Series {
  std::string label;
  std::vector<double> values;  // x = 1..n
};

/// Vertical bar drawn across a panel (memory-fill episodes).
struct Marker {
  double x = 0.0;
  std::string label;
};

struct Panel {
  std::string title;
  std::string x_label = "episode";
  std::string y_label;
  std::vector<Series> series;
  std::vector<Marker> markers;
};

std::string render_panels(std::span<const Panel> panels, std::size_t columns,
                          std::string_view title);
std::string render_ratio_table(const RatioTable& table, std::string_view title);

enum class Figure { Comparison, Sweep, Forgetting };

Figure parse_figure(std::string_view name);

/// Reads every CSV (all must parse before anything is written) and renders
/// the figure's panels into `out_dir`. Returns the SVG paths written.
///   Comparison: reward.svg, steps.svg
///   Forgetting: reward.svg, entropy.svg
///   Sweep:      sweep.svg (SEC/NSEC reward and entropy, fill markers)
std::vector<std::filesystem::path> emit_plots(std::span<const std::filesystem::path> csv_paths,
                                              const std::filesystem::path& out_dir, Figure figure,
                                              std::size_t smoothing_window);

void write_ratio_table_csv(const std::filesystem::path& path, const RatioTable& table);
RatioTable read_ratio_table_csv(const std::filesystem::path& path);

}  // namespace seqec
