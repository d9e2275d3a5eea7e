#include "seqec/suite.hpp"

#include <fstream>
#include <system_error>

#include <fmt/format.h>

#include "seqec/error.hpp"
#include "seqec/plot.hpp"

namespace seqec {

namespace {

std::string cache_key(const ExperimentConfig& cfg) {
  std::string key;
  for (const auto& [k, v] : cfg.entries()) {
    if (k == "jobs" || k == "output_dir" || k == "dump_ec") continue;
    key += k + "=" + v + ";";
  }
  return key;
}

void prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw InputError(fmt::format("cannot create output directory '{}'", dir.string()));
  }
  const auto probe = dir / ".seqec_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw InputError(fmt::format("output directory '{}' is not writable", dir.string()));
  }
  std::filesystem::remove(probe, ec);
}

std::string optional_text(const std::optional<double>& v) {
  return v ? fmt::format("{:.1f}", *v) : std::string("NA");
}

SuiteResult execute(std::vector<ExperimentConfig> configs, const ExperimentConfig& base,
                    const SuiteOptions& opts) {
  base.validate();
  const MazeMap map = base.load_maze();
  const std::filesystem::path out_dir = base.output_dir;
  if (opts.write_files) prepare_output_dir(out_dir);

  SuiteResult result;
  result.results.resize(configs.size());
  std::vector<ExperimentConfig> pending;
  std::vector<std::size_t> pending_index;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (opts.cache) {
      if (auto it = opts.cache->find(cache_key(configs[i])); it != opts.cache->end()) {
        result.results[i] = it->second;
        continue;
      }
    }
    pending.push_back(configs[i]);
    pending_index.push_back(i);
  }
  auto fresh = run_batch(pending, map, base.jobs, opts.write_files ? out_dir : std::filesystem::path{});
  for (std::size_t k = 0; k < pending.size(); ++k) {
    if (opts.cache) (*opts.cache)[cache_key(pending[k])] = fresh[k];
    result.results[pending_index[k]] = std::move(fresh[k]);
  }

  for (std::size_t i = 0; i < configs.size(); ++i) {
    result.summary.push_back(summarize(configs[i], result.results[i]));
    if (opts.write_files) {
      const auto path = out_dir / (result_label(configs[i]) + ".csv");
      write_csv(path, configs[i], result.results[i]);
      result.files.push_back(path);
    }
  }
  result.configs = std::move(configs);
  if (opts.write_files) {
    const auto path = out_dir / "summary.csv";
    std::ofstream out(path, std::ios::binary);
    out << format_summary(result.summary);
    if (!out) throw InputError("failed writing " + path.string());
    result.files.push_back(path);
  }
  return result;
}

std::vector<std::filesystem::path> csv_files(const SuiteResult& r, const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& cfg : r.configs) out.push_back(dir / (result_label(cfg) + ".csv"));
  return out;
}

void add_plots(SuiteResult& r, const ExperimentConfig& base, Figure figure) {
  const auto csvs = csv_files(r, base.output_dir);
  for (auto& p : emit_plots(csvs, base.output_dir, figure, base.smoothing_window)) {
    r.files.push_back(std::move(p));
  }
}

}  // namespace

const std::vector<MetricsRow>& SuiteResult::rows(std::string_view label) const {
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (result_label(configs[i]) == label) return results[i];
  }
  throw ContractViolation(fmt::format("no result labelled '{}'", label));
}

const SummaryRow& SuiteResult::row(std::string_view label) const {
  for (const auto& s : summary) {
    if (s.label == label) return s;
  }
  throw ContractViolation(fmt::format("no summary labelled '{}'", label));
}

SummaryRow summarize(const ExperimentConfig& cfg, std::span<const MetricsRow> rows) {
  const std::size_t window = cfg.final_window();
  SummaryRow s;
  s.label = result_label(cfg);
  const auto reward = final_window_means(rows, Metric::Reward, window);
  s.reward = bootstrap_mean_ci(reward);
  s.steps = bootstrap_mean_ci(final_window_means(rows, Metric::Steps, window));
  s.entropy = bootstrap_mean_ci(final_window_means(rows, Metric::Entropy, window));
  s.fill_episode = mean_fill_episode(rows);
  const auto curve = aggregate(rows, cfg.smoothing_window, Metric::Reward);
  if (s.reward.mean > 0.0) s.reach90 = first_reach_episode(curve, 0.9 * s.reward.mean);
  return s;
}

std::string format_summary(std::span<const SummaryRow> rows) {
  std::string out =
      "label,reward_mean,reward_low,reward_high,steps_mean,steps_low,steps_high,"
      "entropy_mean,entropy_low,entropy_high,fill_episode,reach90_episode\n";
  for (const auto& s : rows) {
    out += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.3f},{:.3f},{:.3f},{:.6f},{:.6f},{:.6f},{},{}\n",
                       s.label, s.reward.mean, s.reward.low, s.reward.high, s.steps.mean,
                       s.steps.low, s.steps.high, s.entropy.mean, s.entropy.low, s.entropy.high,
                       optional_text(s.fill_episode),
                       s.reach90 ? fmt::format("{}", *s.reach90) : std::string("NA"));
  }
  return out;
}

SuiteResult run_single(const ExperimentConfig& base, const SuiteOptions& opts) {
  return execute({base}, base, opts);
}

SuiteResult run_compare(const ExperimentConfig& base, const SuiteOptions& opts) {
  std::vector<ExperimentConfig> configs;
  for (AgentKind kind : {AgentKind::Sec, AgentKind::Nsec, AgentKind::Mfec}) {
    ExperimentConfig c = base;
    c.agent = kind;
    configs.push_back(c);
  }
  SuiteResult r = execute(std::move(configs), base, opts);
  if (opts.write_files) add_plots(r, base, Figure::Comparison);
  return r;
}

SuiteResult run_sweep(const ExperimentConfig& base, const SuiteOptions& opts) {
  if (base.capacities.empty()) throw InputError("sweep: capacity list is empty");
  std::vector<ExperimentConfig> configs;
  for (AgentKind kind : {AgentKind::Sec, AgentKind::Nsec}) {
    for (std::size_t cap : base.capacities) {
      ExperimentConfig c = base;
      c.agent = kind;
      c.ec_capacity = cap;
      c.retention = Retention::Fixed;
      configs.push_back(c);
    }
  }
  SuiteResult r = execute(std::move(configs), base, opts);

  const std::size_t n = base.capacities.size();
  std::span<const std::vector<MetricsRow>> all(r.results);
  r.ratio = performance_matrix(all.first(n), base.capacities, all.subspan(n), base.capacities,
                               base.final_window());
  if (opts.write_files) {
    const std::filesystem::path dir = base.output_dir;
    std::string fills = "agent,ec_capacity,run_id,fill_episode\n";
    for (std::size_t i = 0; i < r.configs.size(); ++i) {
      const auto per_run = fill_episodes(r.results[i]);
      for (std::size_t run = 0; run < per_run.size(); ++run) {
        fills += fmt::format("{},{},{},{}\n", to_string(r.configs[i].agent), r.configs[i].ec_capacity,
                             run, per_run[run] ? fmt::format("{}", *per_run[run]) : "NA");
      }
    }
    {
      std::ofstream out(dir / "fill_episodes.csv", std::ios::binary);
      out << fills;
    }
    r.files.push_back(dir / "fill_episodes.csv");
    write_ratio_table_csv(dir / "ratio_table.csv", *r.ratio);
    r.files.push_back(dir / "ratio_table.csv");
    add_plots(r, base, Figure::Sweep);
    std::ofstream svg(dir / "ratio_table.svg", std::ios::binary);
    svg << render_ratio_table(*r.ratio, "SEC / NSEC final reward");
    r.files.push_back(dir / "ratio_table.svg");
  }
  return r;
}

SuiteResult run_forgetting(const ExperimentConfig& base, const SuiteOptions& opts) {
  std::vector<ExperimentConfig> configs;
  for (AgentKind kind : {AgentKind::Sec, AgentKind::Nsec}) {
    for (Retention retention : {Retention::Fixed, Retention::Fifo}) {
      ExperimentConfig c = base;
      c.agent = kind;
      c.retention = retention;
      configs.push_back(c);
    }
  }
  ExperimentConfig mfec = base;
  mfec.agent = AgentKind::Mfec;
  configs.push_back(mfec);
  SuiteResult r = execute(std::move(configs), base, opts);
  if (opts.write_files) add_plots(r, base, Figure::Forgetting);
  return r;
}

}  // namespace seqec
