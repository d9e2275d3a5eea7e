// Command-line front end: run, compare, sweep, forgetting, plot.

#include <cstdio>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "seqec/config.hpp"
#include "seqec/error.hpp"
#include "seqec/plot.hpp"
#include "seqec/suite.hpp"

namespace {

struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::optional<std::string>> overrides;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    for (std::string_view key : seqec::ExperimentConfig::keys()) {
      auto& slot = overrides[std::string(key)];
      app.add_option("--" + std::string(key), slot, "override '" + std::string(key) + "'");
    }
  }

  seqec::ExperimentConfig resolve() const {
    seqec::ExperimentConfig cfg = config_path.empty() ? seqec::ExperimentConfig{}
                                                      : seqec::load_config(config_path);
    for (std::string_view key : seqec::ExperimentConfig::keys()) {
      const auto& v = overrides.at(std::string(key));
      if (v) cfg.set(key, *v);
    }
    cfg.validate();
    return cfg;
  }
};

void report(const seqec::SuiteResult& r) {
  fmt::print("{}", seqec::format_summary(r.summary));
  if (r.ratio) {
    fmt::print("\nSEC/NSEC ratio (rows SEC capacity, columns NSEC capacity)\n");
    for (std::size_t i = 0; i < r.ratio->sec_capacities.size(); ++i) {
      fmt::print("{:>6}", r.ratio->sec_capacities[i]);
      for (const auto& v : r.ratio->cells[i]) {
        fmt::print(" {:>7}", v ? fmt::format("{:.3f}", *v) : std::string("NA"));
      }
      fmt::print("\n");
    }
  }
  for (const auto& f : r.files) fmt::print(stderr, "wrote {}\n", f.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential episodic control workbench"};
  app.require_subcommand(1);

  struct Command {
    CLI::App* app;
    ConfigFlags flags;
    seqec::SuiteResult (*fn)(const seqec::ExperimentConfig&, const seqec::SuiteOptions&);
  };
  std::vector<Command> commands(4);
  const std::pair<const char*, const char*> names[] = {
      {"run", "single configuration"},
      {"compare", "SEC, NSEC and MFEC side by side"},
      {"sweep", "SEC/NSEC over the capacity list with the ratio table"},
      {"forgetting", "Fixed versus Fifo retention"}};
  decltype(Command::fn) fns[] = {seqec::run_single, seqec::run_compare, seqec::run_sweep,
                                 seqec::run_forgetting};
  for (std::size_t i = 0; i < commands.size(); ++i) {
    commands[i].app = app.add_subcommand(names[i].first, names[i].second);
    commands[i].flags.attach(*commands[i].app);
    commands[i].fn = fns[i];
  }

  auto* plot = app.add_subcommand("plot", "render SVG charts from metrics CSVs");
  std::vector<std::string> csvs;
  std::string figure = "comparison";
  std::string out_dir = "plots";
  std::size_t window = 50;
  plot->add_option("csv", csvs, "metrics CSV files")->required();
  plot->add_option("--figure", figure, "comparison, sweep or forgetting");
  plot->add_option("--output_dir", out_dir, "directory for SVG files");
  plot->add_option("--smoothing_window", window, "moving-average width")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto& c : commands) {
      if (c.app->parsed()) {
        report(c.fn(c.flags.resolve(), {}));
        return 0;
      }
    }
    if (plot->parsed()) {
      std::vector<std::filesystem::path> paths(csvs.begin(), csvs.end());
      for (const auto& f : seqec::emit_plots(paths, out_dir, seqec::parse_figure(figure), window)) {
        fmt::print("wrote {}\n", f.string());
      }
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
