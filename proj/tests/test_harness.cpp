#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "seqec/config.hpp"
#include "seqec/error.hpp"
#include "seqec/experiment.hpp"
#include "seqec/plot.hpp"
#include "seqec/sec.hpp"
#include "seqec/stats.hpp"
#include "seqec/suite.hpp"

using namespace seqec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("seqec_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small(AgentKind kind = AgentKind::Sec) {
  ExperimentConfig c;
  c.agent = kind;
  c.runs = 2;
  c.episodes = 30;
  return c;
}

std::vector<MetricsRow> constant_rows(std::size_t runs, std::size_t episodes, double reward) {
  std::vector<MetricsRow> rows;
  for (std::size_t r = 0; r < runs; ++r) {
    for (std::size_t e = 1; e <= episodes; ++e) rows.push_back({r, e, reward, 10, 0.5, 0, false});
  }
  return rows;
}

}  // namespace

TEST(Config, DefaultsMatchTheReferenceHyperparameters) {
  const ExperimentConfig c;
  EXPECT_EQ(c.buffer_capacity, 50u);
  EXPECT_EQ(c.ec_capacity, 500u);
  EXPECT_EQ(c.sec.tau, 0.9);
  EXPECT_EQ(c.sec.theta_prop, 0.98);
  EXPECT_EQ(c.sec.theta_abs, 0.995);
  EXPECT_EQ(c.sec.bias_decay, 0.0005);
  EXPECT_EQ(c.sec.bias_increase, 0.1);
  EXPECT_EQ(c.episodes, 5000u);
  EXPECT_EQ(c.runs, 20u);
  EXPECT_EQ(c.env.max_steps, 1000);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, KeysRoundTripAndUnknownKeysFail) {
  ExperimentConfig c;
  for (const auto& [key, value] : c.entries()) {
    ExperimentConfig d;
    d.set(key, value);
    EXPECT_EQ(d.get(key), value) << key;
  }
  EXPECT_THROW(c.set("theta_absolute", "0.9"), InputError);
  EXPECT_THROW(c.set("episodes", "many"), InputError);
  EXPECT_THROW(c.set("agent", "dqn"), InputError);
}

TEST(Config, TextFileParsing) {
  ExperimentConfig c;
  apply_config_text(c, "# comment\nagent = nsec\n\nretention=fifo  # inline\ncapacities = 10, 20\n");
  EXPECT_EQ(c.agent, AgentKind::Nsec);
  EXPECT_EQ(c.retention, Retention::Fifo);
  EXPECT_EQ(c.capacities, (std::vector<std::size_t>{10, 20}));
  EXPECT_THROW(apply_config_text(c, "bogus = 1\n"), InputError);
  EXPECT_THROW(apply_config_text(c, "no equals sign\n"), InputError);
}

TEST(Config, ResolvedSubconfigs) {
  ExperimentConfig c;
  c.agent = AgentKind::Nsec;
  EXPECT_FALSE(c.resolved_sec().sequential_bias);
  c.agent = AgentKind::Sec;
  EXPECT_TRUE(c.resolved_sec().sequential_bias);
  EXPECT_EQ(c.resolved_mfec().capacity_per_action, 500u * 50u / 4u);
  c.episodes = 2000;
  EXPECT_EQ(c.final_window(), 200u);
  c.runs = 0;
  EXPECT_THROW(c.validate(), InputError);
}

TEST(RunEpisode, FirstEpisodeIsUniformThroughout) {
  ExperimentConfig cfg = small();
  const auto rows = run_simulation(cfg, default_map(), 0);
  EXPECT_EQ(rows.front().mean_entropy, std::log(4.0));
}

TEST(RunEpisode, TimeoutRowsReportTheCap) {
  ExperimentConfig cfg = small();
  cfg.env.max_steps = 5;
  cfg.env.reward_decay_per_step = 0.0;
  const auto rows = run_simulation(cfg, default_map(), 0);
  for (const auto& r : rows) {
    EXPECT_EQ(r.reward, 0.0);
    EXPECT_EQ(r.steps, 5);
  }
}

TEST(RunEpisode, RowsRespectTheirBounds) {
  for (AgentKind kind : {AgentKind::Sec, AgentKind::Nsec, AgentKind::Mfec}) {
    const auto rows = run_experiment(small(kind), default_map());
    ASSERT_EQ(rows.size(), 60u);
    for (const auto& r : rows) {
      EXPECT_GE(r.reward, 0.0);
      EXPECT_LE(r.steps, 1000);
      EXPECT_GE(r.mean_entropy, 0.0);
      EXPECT_LE(r.mean_entropy, std::log(4.0) + 1e-12);
    }
  }
}

TEST(RunExperiment, RowCountAndOrdering) {
  ExperimentConfig cfg = small(AgentKind::Mfec);
  cfg.runs = 3;
  cfg.episodes = 7;
  const auto rows = run_experiment(cfg, default_map());
  ASSERT_EQ(rows.size(), 21u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].run_id, i / 7);
    EXPECT_EQ(rows[i].episode, i % 7 + 1);
  }
}

TEST(RunExperiment, SerialAndParallelAreIdentical) {
  ExperimentConfig cfg = small();
  const auto serial = format_csv(cfg, run_experiment(cfg, default_map()));
  cfg.jobs = 2;
  const auto parallel = format_csv(cfg, run_experiment(cfg, default_map()));
  EXPECT_EQ(serial, parallel);
}

TEST(RunExperiment, RunsAreIsolatedFromEachOther) {
  ExperimentConfig cfg = small();
  cfg.runs = 3;
  const auto three = run_experiment(cfg, default_map());
  const auto alone = run_simulation(cfg, default_map(), 1);
  const std::vector<MetricsRow> middle(three.begin() + 30, three.begin() + 60);
  EXPECT_EQ(middle, alone);
  ExperimentConfig other = cfg;
  other.master_seed = cfg.master_seed + 1;
  EXPECT_NE(run_simulation(other, default_map(), 1), alone);
}

TEST(Csv, HeaderMetadataAndRoundTrip) {
  ExperimentConfig cfg = small();
  const auto rows = run_experiment(cfg, default_map());
  const std::string text = format_csv(cfg, rows);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_NE(text.find("\nrun_id,episode,reward,steps,mean_entropy,ec_sequence_count,memory_filled\n"),
            std::string::npos);
  EXPECT_NE(text.find("# seed_rule="), std::string::npos);
  EXPECT_NE(text.find("# smoothing_window=50"), std::string::npos);
  const MetricsTable t = parse_csv(text);
  EXPECT_EQ(t.metadata.at("agent"), "sec");
  ASSERT_EQ(t.rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(t.rows[i].steps, rows[i].steps);
    EXPECT_NEAR(t.rows[i].reward, rows[i].reward, 1e-6);
  }
}

TEST(Csv, ParseErrorsNameTheColumn) {
  try {
    parse_csv("run_id,episode,reward,stepz,mean_entropy,ec_sequence_count,memory_filled\n0,1,0,1,0,0,0\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("stepz"), std::string::npos);
  }
  try {
    parse_csv("run_id,episode,reward,steps,mean_entropy,ec_sequence_count\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("memory_filled"), std::string::npos);
  }
  EXPECT_THROW(parse_csv(""), InputError);
  EXPECT_THROW(parse_csv(std::string(kCsvHeader) + "\n"), InputError);
}

TEST(Stats, AggregateExamples) {
  std::vector<MetricsRow> rows;
  const double values[] = {0, 0, 3};
  for (std::size_t e = 0; e < 3; ++e) rows.push_back({0, e + 1, values[e], 1, 0, 0, false});
  EXPECT_DOUBLE_EQ(aggregate(rows, 3)[1], 1.0);
  EXPECT_EQ(aggregate(rows, 1), (std::vector<double>{0, 0, 3}));
  for (double v : aggregate(constant_rows(3, 40, 2.5), 7)) EXPECT_DOUBLE_EQ(v, 2.5);

  std::vector<MetricsRow> two_runs{{0, 1, 1.0, 1, 0, 0, false}, {1, 1, 3.0, 1, 0, 0, false}};
  EXPECT_EQ(aggregate(two_runs, 1), std::vector<double>{2.0});
}

TEST(Stats, MovingAverageTruncatesAtTheEdges) {
  const std::vector<double> s{1, 2, 3, 4, 5};
  const auto m = moving_average(s, 3);
  EXPECT_DOUBLE_EQ(m[0], 1.5);
  EXPECT_DOUBLE_EQ(m[2], 3.0);
  EXPECT_DOUBLE_EQ(m[4], 4.5);
  EXPECT_THROW(moving_average(s, 0), ContractViolation);
}

TEST(Stats, RatioTable) {
  const std::vector<std::vector<MetricsRow>> sec{constant_rows(2, 20, 2.5), constant_rows(2, 20, 2.0)};
  const std::vector<std::vector<MetricsRow>> nsec{constant_rows(2, 20, 1.25), constant_rows(2, 20, 0.0)};
  const std::vector<std::size_t> caps{125, 250};
  const RatioTable t = performance_matrix(sec, caps, nsec, caps, 2);
  ASSERT_EQ(t.cells.size(), 2u);
  ASSERT_EQ(t.cells[0].size(), 2u);
  EXPECT_DOUBLE_EQ(*t.cells[0][0], 2.0);
  EXPECT_FALSE(t.cells[0][1].has_value());

  const RatioTable self = performance_matrix(sec, caps, sec, caps, 5);
  EXPECT_DOUBLE_EQ(*self.cells[0][0], 1.0);
  EXPECT_DOUBLE_EQ(*self.cells[1][1], 1.0);

  const std::vector<std::vector<MetricsRow>> four(4, constant_rows(1, 10, 1.0));
  const std::vector<std::size_t> caps4{125, 250, 500, 1000};
  const RatioTable grid = performance_matrix(four, caps4, four, caps4, 1);
  std::size_t cells = 0;
  for (const auto& row : grid.cells) cells += row.size();
  EXPECT_EQ(cells, 16u);
}

TEST(Stats, BootstrapIntervalBracketsTheMean) {
  const std::vector<double> same(10, 2.0);
  const Interval flat = bootstrap_mean_ci(same);
  EXPECT_EQ(flat.low, 2.0);
  EXPECT_EQ(flat.high, 2.0);
  const std::vector<double> spread{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const Interval ci = bootstrap_mean_ci(spread);
  EXPECT_DOUBLE_EQ(ci.mean, 5.5);
  EXPECT_LT(ci.low, 5.5);
  EXPECT_GT(ci.high, 5.5);
  EXPECT_GT(ci.low, 3.0);
  EXPECT_LT(ci.high, 8.0);
}

TEST(Stats, FillEpisodes) {
  std::vector<MetricsRow> rows = constant_rows(2, 5, 1.0);
  rows[2].memory_filled = rows[3].memory_filled = rows[4].memory_filled = true;  // run 0 at ep 3
  EXPECT_EQ(fill_episodes(rows)[0], 3u);
  EXPECT_FALSE(fill_episodes(rows)[1].has_value());
  EXPECT_DOUBLE_EQ(*mean_fill_episode(rows), 3.0);
}

TEST(Sweep, CapacityOneFillsOnTheFirstRewardedEpisode) {
  ExperimentConfig cfg = small();
  cfg.ec_capacity = 1;
  cfg.episodes = 20;
  const auto rows = run_simulation(cfg, default_map(), 0);
  std::size_t first_reward = 0;
  for (const auto& r : rows) {
    if (r.reward > 0.0) {
      first_reward = r.episode;
      break;
    }
  }
  ASSERT_GT(first_reward, 0u);
  EXPECT_EQ(fill_episodes(rows)[0], first_reward);
}

TEST(Sweep, WritesEightResultFilesAndTheRatioTable) {
  ExperimentConfig cfg = small();
  cfg.episodes = 20;
  cfg.runs = 1;
  cfg.output_dir = scratch("sweep").string();
  const SuiteResult r = run_sweep(cfg);
  std::size_t metric_files = 0;
  for (const auto& f : r.files) {
    if (f.extension() == ".csv" && f.stem().string().find("_ec") != std::string::npos) ++metric_files;
  }
  EXPECT_EQ(metric_files, 8u);
  ASSERT_TRUE(r.ratio);
  const RatioTable back = read_ratio_table_csv(fs::path(cfg.output_dir) / "ratio_table.csv");
  EXPECT_EQ(back.sec_capacities, r.ratio->sec_capacities);
  EXPECT_EQ(back.nsec_capacities, r.ratio->nsec_capacities);
  EXPECT_TRUE(fs::exists(fs::path(cfg.output_dir) / "fill_episodes.csv"));
  const std::string svg = slurp(fs::path(cfg.output_dir) / "sweep.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  std::size_t panels = 0;
  for (auto pos = svg.find("class=\"panel\""); pos != std::string::npos;
       pos = svg.find("class=\"panel\"", pos + 1)) {
    ++panels;
  }
  EXPECT_EQ(panels, 4u);
}

TEST(Plot, ComparisonProducesRewardAndStepCharts) {
  ExperimentConfig cfg = small();
  cfg.output_dir = scratch("compare").string();
  const SuiteResult r = run_compare(cfg);
  const fs::path dir = cfg.output_dir;
  for (const char* name : {"reward.svg", "steps.svg"}) {
    const std::string svg = slurp(dir / name);
    EXPECT_EQ(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    std::size_t series = 0;
    for (auto pos = svg.find("class=\"series\""); pos != std::string::npos;
         pos = svg.find("class=\"series\"", pos + 1)) {
      ++series;
    }
    EXPECT_EQ(series, 3u);
    for (const char* label : {"sec_ec500_fixed", "nsec_ec500_fixed", "mfec"}) {
      EXPECT_NE(svg.find(std::string(">") + label + "<"), std::string::npos) << label;
    }
  }
}

TEST(Plot, BadInputWritesNothing) {
  const fs::path dir = scratch("plot_bad");
  const fs::path good = dir / "good.csv";
  const fs::path empty = dir / "empty.csv";
  {
    ExperimentConfig cfg = small(AgentKind::Mfec);
    write_csv(good, cfg, run_experiment(cfg, default_map()));
    std::ofstream(empty) << "";
  }
  const fs::path out = dir / "out";
  const std::vector<fs::path> inputs{good, empty};
  EXPECT_THROW(emit_plots(inputs, out, Figure::Comparison, 5), InputError);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_THROW(parse_figure("histogram"), InputError);
}

TEST(Plot, RatioHeatTableIsAStandaloneDocument) {
  RatioTable t{{125, 250}, {125, 250}, {{1.0, 2.0}, {std::nullopt, 0.5}}};
  const std::string svg = render_ratio_table(t, "ratio");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("n/a"), std::string::npos);
  EXPECT_NE(svg.find(">2.00<"), std::string::npos);
}

TEST(Suite, UnwritableOutputDirectoryIsAStartupError) {
  const fs::path dir = scratch("blocked");
  const fs::path file = dir / "plain_file";
  std::ofstream(file) << "x";
  ExperimentConfig cfg = small();
  cfg.output_dir = (file / "sub").string();
  EXPECT_THROW(run_single(cfg), InputError);
  cfg.output_dir = dir.string();
  cfg.map = (dir / "missing.txt").string();
  EXPECT_THROW(run_single(cfg), InputError);
}

TEST(Suite, CacheReusesIdenticalConfigs) {
  ExperimentConfig cfg = small();
  ResultCache cache;
  const SuiteResult a = run_compare(cfg, {false, &cache});
  EXPECT_EQ(cache.size(), 3u);
  const SuiteResult f = run_forgetting(cfg, {false, &cache});
  EXPECT_EQ(cache.size(), 5u);
  EXPECT_EQ(f.rows("sec_ec500_fixed"), a.rows("sec_ec500_fixed"));
}

TEST(Cli, CompareIsByteIdenticalAcrossExecutionsAndJobCounts) {
  const fs::path dir = scratch("cli");
  const std::string base = std::string(SEQEC_CLI) + " compare --runs 2 --episodes 25 --master_seed 7";
  ASSERT_EQ(std::system((base + " --output_dir " + (dir / "a").string() + " > /dev/null 2>&1").c_str()), 0);
  ASSERT_EQ(std::system((base + " --output_dir " + (dir / "b").string() + " > /dev/null 2>&1").c_str()), 0);
  ASSERT_EQ(std::system((base + " --jobs 2 --output_dir " + (dir / "c").string() + " > /dev/null 2>&1").c_str()), 0);
  for (const char* f : {"sec_ec500_fixed.csv", "nsec_ec500_fixed.csv", "mfec.csv"}) {
    const std::string a = slurp(dir / "a" / f);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(dir / "b" / f)) << f;
    EXPECT_EQ(a, slurp(dir / "c" / f)) << f;
  }
}

TEST(Cli, ConfigFileAndFlagOverride) {
  const fs::path dir = scratch("cli_cfg");
  std::ofstream(dir / "exp.cfg") << "agent = nsec\nruns = 1\nepisodes = 5\n";
  const std::string cmd = std::string(SEQEC_CLI) + " run --config " + (dir / "exp.cfg").string() +
                          " --episodes 4 --output_dir " + dir.string() + " > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  const MetricsTable t = read_csv(dir / "nsec_ec500_fixed.csv");
  EXPECT_EQ(t.rows.size(), 4u);
  std::ofstream(dir / "bad.cfg") << "unknown_key = 3\n";
  const std::string bad = std::string(SEQEC_CLI) + " run --config " + (dir / "bad.cfg").string() +
                          " --output_dir " + dir.string() + " > /dev/null 2>&1";
  EXPECT_NE(std::system(bad.c_str()), 0);
}
