#include "seqec/plot.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "seqec/error.hpp"

namespace seqec {

namespace {

constexpr std::array<std::string_view, 8> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

constexpr double kPanelWidth = 520.0;
constexpr double kPanelHeight = 340.0;
constexpr double kMarginLeft = 62.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 34.0;
constexpr double kMarginBottom = 46.0;
constexpr double kTitleHeight = 30.0;

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Roughly five round tick values covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  double step = magnitude;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * magnitude;
    if (span / step <= 6.0) break;
  }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
  }
  return out;
}

std::string render_panel(const Panel& panel, double ox, double oy) {
  double x_max = 1.0;
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -std::numeric_limits<double>::infinity();
  for (const Series& s : panel.series) {
    x_max = std::max(x_max, static_cast<double>(s.values.size()));
    for (double v : s.values) {
      y_lo = std::min(y_lo, v);
      y_hi = std::max(y_hi, v);
    }
  }
  if (!std::isfinite(y_lo)) {
    y_lo = 0.0;
    y_hi = 1.0;
  }
  y_lo = std::min(y_lo, 0.0);
  if (y_hi - y_lo < 1e-9) y_hi = y_lo + 1.0;
  y_hi += 0.05 * (y_hi - y_lo);

  const double plot_w = kPanelWidth - kMarginLeft - kMarginRight;
  const double plot_h = kPanelHeight - kMarginTop - kMarginBottom;
  const double left = ox + kMarginLeft;
  const double top = oy + kMarginTop;
  const auto px = [&](double x) { return left + (x - 1.0) / std::max(1.0, x_max - 1.0) * plot_w; };
  const auto py = [&](double y) { return top + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h; };

  std::string svg;
  svg += fmt::format(R"(<g class="panel"><text x="{:.1f}" y="{:.1f}" font-size="14" text-anchor="middle">{}</text>)",
                     ox + kPanelWidth / 2.0, oy + 20.0, escape(panel.title));
  svg += '\n';
  svg += fmt::format(R"(<rect x="{:.1f}" y="{:.1f}" width="{:.1f}" height="{:.1f}" fill="none" stroke="#333"/>)",
                     left, top, plot_w, plot_h);
  svg += '\n';
  for (double t : ticks(y_lo, y_hi)) {
    if (t < y_lo || t > y_hi) continue;
    svg += fmt::format(
        R"(<line x1="{:.1f}" y1="{:.1f}" x2="{:.1f}" y2="{:.1f}" stroke="#ddd"/><text x="{:.1f}" y="{:.1f}" font-size="10" text-anchor="end">{:g}</text>)",
        left, py(t), left + plot_w, py(t), left - 4.0, py(t) + 3.0, t);
    svg += '\n';
  }
  for (double t : ticks(1.0, x_max)) {
    if (t < 1.0 || t > x_max) continue;
    svg += fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-size="10" text-anchor="middle">{:g}</text>)",
                       px(t), top + plot_h + 14.0, t);
    svg += '\n';
  }
  svg += fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-size="11" text-anchor="middle">{}</text>)",
                     left + plot_w / 2.0, oy + kPanelHeight - 8.0, escape(panel.x_label));
  svg += fmt::format(
      R"svg(<text x="{:.1f}" y="{:.1f}" font-size="11" text-anchor="middle" transform="rotate(-90 {:.1f} {:.1f})">{}</text>)svg",
      ox + 14.0, top + plot_h / 2.0, ox + 14.0, top + plot_h / 2.0, escape(panel.y_label));
  svg += '\n';

  for (std::size_t k = 0; k < panel.markers.size(); ++k) {
    const Marker& m = panel.markers[k];
    const std::string_view color = kPalette[k % kPalette.size()];
    svg += fmt::format(
        R"(<line class="marker" x1="{:.1f}" y1="{:.1f}" x2="{:.1f}" y2="{:.1f}" stroke="{}" stroke-dasharray="4 3"><title>{}</title></line>)",
        px(m.x), top, px(m.x), top + plot_h, color, escape(m.label));
    svg += '\n';
  }

  for (std::size_t k = 0; k < panel.series.size(); ++k) {
    const Series& s = panel.series[k];
    const std::string_view color = kPalette[k % kPalette.size()];
    std::string points;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      points += fmt::format("{:.1f},{:.1f} ", px(static_cast<double>(i + 1)), py(s.values[i]));
    }
    svg += fmt::format(R"(<polyline class="series" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>)",
                       color, points);
    svg += '\n';
    const double ly = top + 14.0 + 14.0 * static_cast<double>(k);
    svg += fmt::format(
        R"(<line x1="{:.1f}" y1="{:.1f}" x2="{:.1f}" y2="{:.1f}" stroke="{}" stroke-width="2"/><text x="{:.1f}" y="{:.1f}" font-size="10">{}</text>)",
        left + plot_w - 120.0, ly - 3.0, left + plot_w - 104.0, ly - 3.0, color,
        left + plot_w - 100.0, ly, escape(s.label));
    svg += '\n';
  }
  svg += "</g>\n";
  return svg;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

std::string label_of(const MetricsTable& table, const std::filesystem::path& path) {
  auto it = table.metadata.find("label");
  return it != table.metadata.end() ? it->second : path.stem().string();
}

std::string meta(const MetricsTable& table, const std::string& key) {
  auto it = table.metadata.find(key);
  return it != table.metadata.end() ? it->second : std::string();
}

}  // namespace

std::string render_panels(std::span<const Panel> panels, std::size_t columns,
                          std::string_view title) {
  require(!panels.empty(), "render_panels: nothing to draw");
  columns = std::max<std::size_t>(1, std::min(columns, panels.size()));
  const std::size_t rows = (panels.size() + columns - 1) / columns;
  const double width = kPanelWidth * static_cast<double>(columns);
  const double height = kTitleHeight + kPanelHeight * static_cast<double>(rows);
  std::string svg = fmt::format(
      R"(<svg xmlns="http://www.w3.org/2000/svg" width="{0:.0f}" height="{1:.0f}" viewBox="0 0 {0:.0f} {1:.0f}" font-family="sans-serif">)",
      width, height);
  svg += '\n';
  svg += fmt::format(R"(<rect width="{:.0f}" height="{:.0f}" fill="white"/>)", width, height);
  svg += fmt::format(R"(<text x="{:.1f}" y="20" font-size="16" text-anchor="middle">{}</text>)",
                     width / 2.0, escape(title));
  svg += '\n';
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const double ox = kPanelWidth * static_cast<double>(i % columns);
    const double oy = kTitleHeight + kPanelHeight * static_cast<double>(i / columns);
    svg += render_panel(panels[i], ox, oy);
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_ratio_table(const RatioTable& table, std::string_view title) {
  const double cell = 72.0;
  const double left = 110.0;
  const double top = 80.0;
  const double width = left + cell * static_cast<double>(table.nsec_capacities.size()) + 20.0;
  const double height = top + cell * static_cast<double>(table.sec_capacities.size()) + 20.0;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& row : table.cells) {
    for (const auto& v : row) {
      if (v) {
        lo = std::min(lo, *v);
        hi = std::max(hi, *v);
      }
    }
  }
  if (!std::isfinite(lo)) lo = hi = 1.0;

  std::string svg = fmt::format(
      R"(<svg xmlns="http://www.w3.org/2000/svg" width="{0:.0f}" height="{1:.0f}" viewBox="0 0 {0:.0f} {1:.0f}" font-family="sans-serif">)",
      width, height);
  svg += '\n';
  svg += fmt::format(R"(<rect width="{:.0f}" height="{:.0f}" fill="white"/>)", width, height);
  svg += fmt::format(R"(<text x="{:.1f}" y="22" font-size="15" text-anchor="middle">{}</text>)",
                     width / 2.0, escape(title));
  svg += fmt::format(R"(<text x="{:.1f}" y="52" font-size="11" text-anchor="middle">NSEC capacity</text>)",
                     left + cell * static_cast<double>(table.nsec_capacities.size()) / 2.0);
  svg += fmt::format(R"(<text x="14" y="{:.1f}" font-size="11">SEC capacity</text>)", top - 6.0);
  svg += '\n';
  for (std::size_t j = 0; j < table.nsec_capacities.size(); ++j) {
    svg += fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-size="11" text-anchor="middle">{}</text>)",
                       left + cell * (static_cast<double>(j) + 0.5), top - 8.0,
                       table.nsec_capacities[j]);
  }
  for (std::size_t i = 0; i < table.sec_capacities.size(); ++i) {
    const double y = top + cell * static_cast<double>(i);
    svg += fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-size="11" text-anchor="end">{}</text>)",
                       left - 8.0, y + cell / 2.0 + 4.0, table.sec_capacities[i]);
    for (std::size_t j = 0; j < table.nsec_capacities.size(); ++j) {
      const double x = left + cell * static_cast<double>(j);
      const auto& v = table.cells[i][j];
      std::string fill = "#cccccc";
      std::string text = "n/a";
      if (v) {
        const double t = hi > lo ? (*v - lo) / (hi - lo) : 0.5;
        const int red = static_cast<int>(255.0 - 120.0 * t);
        const int green = static_cast<int>(245.0 - 60.0 * t);
        const int blue = static_cast<int>(235.0 - 200.0 * t);
        fill = fmt::format("#{:02x}{:02x}{:02x}", red, green, blue);
        text = fmt::format("{:.2f}", *v);
      }
      svg += fmt::format(
          R"(<rect class="cell" x="{:.1f}" y="{:.1f}" width="{:.1f}" height="{:.1f}" fill="{}" stroke="white"/><text x="{:.1f}" y="{:.1f}" font-size="12" text-anchor="middle">{}</text>)",
          x, y, cell, cell, fill, x + cell / 2.0, y + cell / 2.0 + 4.0, text);
      svg += '\n';
    }
  }
  svg += "</svg>\n";
  return svg;
}

Figure parse_figure(std::string_view name) {
  if (name == "comparison" || name == "compare") return Figure::Comparison;
  if (name == "sweep") return Figure::Sweep;
  if (name == "forgetting") return Figure::Forgetting;
  throw InputError(fmt::format("unknown figure '{}' (comparison, sweep, forgetting)", name));
}

std::vector<std::filesystem::path> emit_plots(std::span<const std::filesystem::path> csv_paths,
                                              const std::filesystem::path& out_dir, Figure figure,
                                              std::size_t smoothing_window) {
  if (csv_paths.empty()) throw InputError("plot: no CSV inputs");
  std::vector<MetricsTable> tables;
  for (const auto& p : csv_paths) tables.push_back(read_csv(p));

  const auto curve = [&](const MetricsTable& t, Metric m) {
    return aggregate(t.rows, smoothing_window, m);
  };
  const auto single = [&](std::string title, std::string y_label, Metric m) {
    Panel panel{std::move(title), "episode", std::move(y_label), {}, {}};
    for (std::size_t i = 0; i < tables.size(); ++i) {
      panel.series.push_back({label_of(tables[i], csv_paths[i]), curve(tables[i], m)});
    }
    return panel;
  };

  std::vector<std::pair<std::filesystem::path, std::string>> outputs;
  switch (figure) {
    case Figure::Comparison: {
      const Panel reward = single("Average performance", "reward", Metric::Reward);
      const Panel steps = single("Average steps per episode", "steps", Metric::Steps);
      outputs.emplace_back(out_dir / "reward.svg", render_panels(std::span(&reward, 1), 1, "Agent comparison"));
      outputs.emplace_back(out_dir / "steps.svg", render_panels(std::span(&steps, 1), 1, "Agent comparison"));
      break;
    }
    case Figure::Forgetting: {
      const Panel reward = single("Average performance", "reward", Metric::Reward);
      const Panel entropy = single("Policy entropy", "entropy (nats)", Metric::Entropy);
      outputs.emplace_back(out_dir / "reward.svg", render_panels(std::span(&reward, 1), 1, "Forgetting"));
      outputs.emplace_back(out_dir / "entropy.svg", render_panels(std::span(&entropy, 1), 1, "Forgetting"));
      break;
    }
    case Figure::Sweep: {
      // Panels keyed by agent kind; series per capacity with fill markers.
      std::map<std::string, std::pair<Panel, Panel>> by_agent;
      for (std::size_t i = 0; i < tables.size(); ++i) {
        std::string agent = meta(tables[i], "agent");
        if (agent.empty()) agent = label_of(tables[i], csv_paths[i]);
        auto [it, inserted] = by_agent.try_emplace(agent);
        auto& [reward, entropy] = it->second;
        if (inserted) {
          std::string upper = agent;
          std::transform(upper.begin(), upper.end(), upper.begin(),
                         [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
          reward = Panel{upper + " reward", "episode", "reward", {}, {}};
          entropy = Panel{upper + " entropy", "episode", "entropy (nats)", {}, {}};
        }
        const std::string cap = meta(tables[i], "ec_capacity");
        const std::string name = cap.empty() ? label_of(tables[i], csv_paths[i]) : "EC " + cap;
        reward.series.push_back({name, curve(tables[i], Metric::Reward)});
        entropy.series.push_back({name, curve(tables[i], Metric::Entropy)});
        if (const auto fill = mean_fill_episode(tables[i].rows)) {
          reward.markers.push_back({*fill, name + " filled"});
          entropy.markers.push_back({*fill, name + " filled"});
        }
      }
      std::vector<Panel> panels;
      for (auto& [agent, pair] : by_agent) panels.push_back(pair.first);
      for (auto& [agent, pair] : by_agent) panels.push_back(pair.second);
      outputs.emplace_back(out_dir / "sweep.svg",
                           render_panels(panels, by_agent.size(), "Memory capacity sweep"));
      break;
    }
  }

  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [path, text] : outputs) {
    write_text(path, text);
    written.push_back(path);
  }
  return written;
}

void write_ratio_table_csv(const std::filesystem::path& path, const RatioTable& table) {
  std::string out = "sec_capacity";
  for (std::size_t c : table.nsec_capacities) out += fmt::format(",nsec_{}", c);
  out += '\n';
  for (std::size_t i = 0; i < table.sec_capacities.size(); ++i) {
    out += fmt::format("{}", table.sec_capacities[i]);
    for (const auto& v : table.cells[i]) out += v ? fmt::format(",{:.6f}", *v) : std::string(",NA");
    out += '\n';
  }
  write_text(path, out);
}

RatioTable read_ratio_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  const auto split = [](const std::string& line) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    return cols;
  };
  const auto number = [&](const std::string& s, std::string_view column) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw InputError(fmt::format("{}: column '{}' has malformed value '{}'", path.string(), column, s));
    }
    return v;
  };
  RatioTable table;
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty ratio table");
  const auto header = split(line);
  if (header.empty() || header[0] != "sec_capacity") {
    throw InputError(path.string() + ": first column must be 'sec_capacity'");
  }
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j].rfind("nsec_", 0) != 0) {
      throw InputError(fmt::format("{}: unexpected column '{}'", path.string(), header[j]));
    }
    table.nsec_capacities.push_back(number(header[j].substr(5), header[j]));
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cols = split(line);
    if (cols.size() != header.size()) {
      throw InputError(path.string() + ": ragged ratio table row");
    }
    table.sec_capacities.push_back(number(cols[0], "sec_capacity"));
    auto& row = table.cells.emplace_back();
    for (std::size_t j = 1; j < cols.size(); ++j) {
      if (cols[j] == "NA") {
        row.emplace_back();
      } else {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(cols[j].data(), cols[j].data() + cols[j].size(), v);
        if (ec != std::errc{}) throw InputError(fmt::format("{}: bad cell '{}'", path.string(), cols[j]));
        row.emplace_back(v);
      }
    }
  }
  return table;
}

}  // namespace seqec
