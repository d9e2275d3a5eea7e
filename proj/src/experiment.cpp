#include "seqec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "seqec/error.hpp"
#include "seqec/mfec.hpp"
#include "seqec/sec.hpp"

namespace seqec {

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_id) {
  return derive_seed(master_seed, run_id);
}

std::unique_ptr<Agent> make_agent(const ExperimentConfig& cfg) {
  if (cfg.agent == AgentKind::Mfec) return std::make_unique<MfecAgent>(cfg.resolved_mfec());
  return std::make_unique<SecAgent>(cfg.resolved_sec(), cfg.buffer_capacity, cfg.ec_capacity,
                                    cfg.retention);
}

EpisodeStats run_episode(Agent& agent, MazeEnv& env, Rng& agent_rng, Rng& env_rng) {
  agent.begin_episode();
  StateVector obs = env.reset(env_rng);
  // Accumulated as offsets from the first value so a constant series averages exactly.
  double entropy_first = 0.0;
  double entropy_offset = 0.0;
  std::size_t decisions = 0;
  EpisodeStats stats;
  for (;;) {
    const Decision d = agent.act(obs, agent_rng);
    if (decisions == 0) entropy_first = d.entropy;
    entropy_offset += d.entropy - entropy_first;
    ++decisions;
    StepOutcome out = env.step(d.action);
    agent.observe_outcome(out.reward, out.done);
    if (out.done) {
      stats.reward = out.reward;
      break;
    }
    obs = std::move(out.observation);
  }
  stats.steps = env.state().t;
  stats.mean_entropy = entropy_first + entropy_offset / static_cast<double>(decisions);
  return stats;
}

std::vector<MetricsRow> run_simulation(const ExperimentConfig& cfg, const MazeMap& map,
                                       std::size_t run_id, const std::filesystem::path& dump_dir) {
  const std::uint64_t seed = run_seed(cfg.master_seed, run_id);
  Rng agent_rng(derive_seed(seed, 1));
  Rng env_rng(derive_seed(seed, 2));
  MazeEnv env(map, cfg.env);
  std::unique_ptr<Agent> agent = make_agent(cfg);

  std::vector<MetricsRow> rows;
  rows.reserve(cfg.episodes);
  for (std::size_t e = 1; e <= cfg.episodes; ++e) {
    const EpisodeStats s = run_episode(*agent, env, agent_rng, env_rng);
    rows.push_back(MetricsRow{run_id, e, s.reward, s.steps, s.mean_entropy,
                              agent->stored_count(), agent->memory_full()});
  }

  if (cfg.dump_ec && !dump_dir.empty()) {
    if (const auto* sec = dynamic_cast<const SecAgent*>(agent.get())) {
      std::ofstream out(dump_dir / fmt::format("{}_run{}_ec.txt", result_label(cfg), run_id));
      sec->memory().dump(out);
    }
  }
  return rows;
}

std::vector<std::vector<MetricsRow>> run_batch(std::span<const ExperimentConfig> configs,
                                               const MazeMap& map, std::size_t jobs,
                                               const std::filesystem::path& dump_dir) {
  struct Task {
    std::size_t config;
    std::size_t run;
  };
  std::vector<Task> tasks;
  std::vector<std::vector<std::vector<MetricsRow>>> slots(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    configs[c].validate();
    slots[c].resize(configs[c].runs);
    for (std::size_t r = 0; r < configs[c].runs; ++r) tasks.push_back({c, r});
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      try {
        const Task& task = tasks[t];
        slots[task.config][task.run] = run_simulation(configs[task.config], map, task.run, dump_dir);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, tasks.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::vector<MetricsRow>> merged(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (auto& run_rows : slots[c]) {
      merged[c].insert(merged[c].end(), run_rows.begin(), run_rows.end());
    }
  }
  return merged;
}

std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg, const MazeMap& map) {
  return std::move(run_batch(std::span(&cfg, 1), map, cfg.jobs).front());
}

std::string result_label(const ExperimentConfig& cfg) {
  if (cfg.agent == AgentKind::Mfec) return "mfec";
  return fmt::format("{}_ec{}_{}", to_string(cfg.agent), cfg.ec_capacity, to_string(cfg.retention));
}

std::string format_csv(const ExperimentConfig& cfg, std::span<const MetricsRow> rows) {
  std::string out;
  out += fmt::format("# label={}\n", result_label(cfg));
  for (const auto& [key, value] : cfg.entries()) {
    // Scheduling never changes results, so it stays out of the file.
    if (key == "jobs" || key == "output_dir") continue;
    out += fmt::format("# {}={}\n", key, value);
  }
  out += fmt::format("# seed_rule={}\n", kSeedRule);
  for (std::size_t r = 0; r < cfg.runs; ++r) {
    out += fmt::format("# run_seed[{}]={}\n", r, run_seed(cfg.master_seed, r));
  }
  out += kCsvHeader;
  out += '\n';
  for (const MetricsRow& row : rows) {
    out += fmt::format("{},{},{:.6f},{},{:.6f},{},{}\n", row.run_id, row.episode, row.reward,
                       row.steps, row.mean_entropy, row.ec_sequence_count,
                       row.memory_filled ? 1 : 0);
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const ExperimentConfig& cfg,
               std::span<const MetricsRow> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << format_csv(cfg, rows);
  if (!out) throw InputError("failed writing " + path.string());
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    parts.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T field(std::string_view text, std::string_view column, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InputError(fmt::format("line {}: column '{}' has malformed value '{}'", line_no, column,
                                 text));
  }
  return value;
}

}  // namespace

MetricsTable parse_csv(std::string_view text) {
  static const std::vector<std::string_view> expected = split(kCsvHeader, ',');
  MetricsTable table;
  bool header_seen = false;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = std::string_view(line).substr(1);
      const auto eq = body.find('=');
      if (eq != std::string_view::npos) {
        std::string key(body.substr(0, eq));
        key.erase(0, key.find_first_not_of(' '));
        table.metadata[key] = std::string(body.substr(eq + 1));
      }
      continue;
    }
    const auto cols = split(line, ',');
    if (!header_seen) {
      for (std::size_t i = 0; i < std::max(cols.size(), expected.size()); ++i) {
        if (i >= cols.size()) {
          throw InputError(fmt::format("CSV header: missing column '{}'", expected[i]));
        }
        if (i >= expected.size() || cols[i] != expected[i]) {
          throw InputError(fmt::format("CSV header: unexpected column '{}' at position {}",
                                       cols[i], i + 1));
        }
      }
      header_seen = true;
      continue;
    }
    if (cols.size() != expected.size()) {
      throw InputError(fmt::format("line {}: expected {} columns, got {}", line_no,
                                   expected.size(), cols.size()));
    }
    MetricsRow row;
    row.run_id = field<std::size_t>(cols[0], expected[0], line_no);
    row.episode = field<std::size_t>(cols[1], expected[1], line_no);
    row.reward = field<double>(cols[2], expected[2], line_no);
    row.steps = field<int>(cols[3], expected[3], line_no);
    row.mean_entropy = field<double>(cols[4], expected[4], line_no);
    row.ec_sequence_count = field<std::size_t>(cols[5], expected[5], line_no);
    row.memory_filled = field<int>(cols[6], expected[6], line_no) != 0;
    table.rows.push_back(row);
  }
  if (!header_seen) throw InputError("CSV has no header row");
  if (table.rows.empty()) throw InputError("CSV has no data rows");
  return table;
}

MetricsTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_csv(text.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace seqec
