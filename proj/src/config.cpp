#include "seqec/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "seqec/error.hpp"

namespace seqec {

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::Sec: return "sec";
    case AgentKind::Nsec: return "nsec";
    case AgentKind::Mfec: return "mfec";
  }
  return "?";
}

std::string_view to_string(Retention retention) {
  return retention == Retention::Fixed ? "fixed" : "fifo";
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view what) {
  throw InputError(fmt::format("config key '{}': cannot parse '{}' as {}", key, value, what));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    bad_value(key, value, std::is_floating_point_v<T> ? "a number" : "an unsigned integer");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "a boolean");
}

struct Field {
  std::string_view key;
  std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T, typename Member>
Field number_field(std::string_view key, Member member) {
  return Field{key,
               [member](ExperimentConfig& c, std::string_view k, std::string_view v) {
                 std::invoke(member, c) = parse_number<T>(k, v);
               },
               [member](const ExperimentConfig& c) {
                 return fmt::format("{}", std::invoke(member, c));
               }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"agent",
                 [](ExperimentConfig& c, std::string_view k, std::string_view v) {
                   if (v == "sec") c.agent = AgentKind::Sec;
                   else if (v == "nsec") c.agent = AgentKind::Nsec;
                   else if (v == "mfec") c.agent = AgentKind::Mfec;
                   else bad_value(k, v, "one of sec, nsec, mfec");
                 },
                 [](const ExperimentConfig& c) { return std::string(to_string(c.agent)); }});
    f.push_back(number_field<double>("theta_abs", [](auto& c) -> auto& { return c.sec.theta_abs; }));
    f.push_back(number_field<double>("theta_prop", [](auto& c) -> auto& { return c.sec.theta_prop; }));
    f.push_back(number_field<double>("tau", [](auto& c) -> auto& { return c.sec.tau; }));
    f.push_back(number_field<double>("bias_increase", [](auto& c) -> auto& { return c.sec.bias_increase; }));
    f.push_back(number_field<double>("bias_decay", [](auto& c) -> auto& { return c.sec.bias_decay; }));
    f.push_back(number_field<std::size_t>("buffer_capacity", [](auto& c) -> auto& { return c.buffer_capacity; }));
    f.push_back(number_field<std::size_t>("ec_capacity", [](auto& c) -> auto& { return c.ec_capacity; }));
    f.push_back({"retention",
                 [](ExperimentConfig& c, std::string_view k, std::string_view v) {
                   if (v == "fixed") c.retention = Retention::Fixed;
                   else if (v == "fifo") c.retention = Retention::Fifo;
                   else bad_value(k, v, "one of fixed, fifo");
                 },
                 [](const ExperimentConfig& c) { return std::string(to_string(c.retention)); }});
    f.push_back(number_field<std::size_t>("episodes", [](auto& c) -> auto& { return c.episodes; }));
    f.push_back(number_field<std::size_t>("runs", [](auto& c) -> auto& { return c.runs; }));
    f.push_back(number_field<std::uint64_t>("master_seed", [](auto& c) -> auto& { return c.master_seed; }));
    f.push_back({"map",
                 [](ExperimentConfig& c, std::string_view, std::string_view v) { c.map = v; },
                 [](const ExperimentConfig& c) { return c.map; }});
    f.push_back({"output_dir",
                 [](ExperimentConfig& c, std::string_view, std::string_view v) { c.output_dir = v; },
                 [](const ExperimentConfig& c) { return c.output_dir; }});
    f.push_back(number_field<double>("reward_base", [](auto& c) -> auto& { return c.env.reward_base; }));
    f.push_back(number_field<double>("reward_decay_per_step",
                                     [](auto& c) -> auto& { return c.env.reward_decay_per_step; }));
    f.push_back(number_field<int>("max_steps", [](auto& c) -> auto& { return c.env.max_steps; }));
    f.push_back(number_field<int>("action_repeat", [](auto& c) -> auto& { return c.env.action_repeat; }));
    f.push_back(number_field<std::size_t>("mfec_k", [](auto& c) -> auto& { return c.mfec.k; }));
    f.push_back(number_field<double>("mfec_epsilon", [](auto& c) -> auto& { return c.mfec.epsilon; }));
    f.push_back(number_field<double>("mfec_gamma", [](auto& c) -> auto& { return c.mfec.gamma; }));
    f.push_back(number_field<std::size_t>("mfec_capacity", [](auto& c) -> auto& { return c.mfec_capacity; }));
    f.push_back(number_field<std::size_t>("jobs", [](auto& c) -> auto& { return c.jobs; }));
    f.push_back(number_field<std::size_t>("smoothing_window", [](auto& c) -> auto& { return c.smoothing_window; }));
    f.push_back(number_field<double>("final_window_fraction",
                                     [](auto& c) -> auto& { return c.final_window_fraction; }));
    f.push_back({"capacities",
                 [](ExperimentConfig& c, std::string_view k, std::string_view v) {
                   std::vector<std::size_t> caps;
                   std::string_view rest = v;
                   while (!rest.empty()) {
                     const auto comma = rest.find(',');
                     caps.push_back(parse_number<std::size_t>(k, trim(rest.substr(0, comma))));
                     if (comma == std::string_view::npos) break;
                     rest = rest.substr(comma + 1);
                   }
                   if (caps.empty()) bad_value(k, v, "a comma-separated capacity list");
                   c.capacities = std::move(caps);
                 },
                 [](const ExperimentConfig& c) { return fmt::format("{}", fmt::join(c.capacities, ",")); }});
    f.push_back({"dump_ec",
                 [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.dump_ec = parse_bool(k, v); },
                 [](const ExperimentConfig& c) { return std::string(c.dump_ec ? "true" : "false"); }});
    return f;
  }();
  return table;
}

const Field& find_field(std::string_view key) {
  const auto& table = fields();
  auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
  if (it == table.end()) throw InputError(fmt::format("unknown config key '{}'", key));
  return *it;
}

}  // namespace

std::span<const std::string_view> ExperimentConfig::keys() {
  static const std::vector<std::string_view> names = [] {
    std::vector<std::string_view> out;
    for (const Field& f : fields()) out.push_back(f.key);
    return out;
  }();
  return names;
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  find_field(key).set(*this, key, trim(value));
}

std::string ExperimentConfig::get(std::string_view key) const { return find_field(key).get(*this); }

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Field& f : fields()) out.emplace_back(std::string(f.key), f.get(*this));
  return out;
}

void ExperimentConfig::validate() const {
  try {
    resolved_sec().validate();
    resolved_mfec().validate();
    env.validate();
  } catch (const ContractViolation& e) {
    throw InputError(std::string("invalid config: ") + e.what());
  }
  const auto fail = [](std::string_view what) {
    throw InputError(fmt::format("invalid config: {}", what));
  };
  if (buffer_capacity == 0) fail("buffer_capacity must be positive");
  if (ec_capacity == 0) fail("ec_capacity must be positive");
  if (episodes == 0) fail("episodes must be positive");
  if (runs == 0) fail("runs must be positive");
  if (jobs == 0) fail("jobs must be positive");
  if (smoothing_window == 0) fail("smoothing_window must be positive");
  if (!(final_window_fraction > 0.0 && final_window_fraction <= 1.0)) {
    fail("final_window_fraction must be in (0,1]");
  }
  if (capacities.empty() ||
      std::any_of(capacities.begin(), capacities.end(), [](std::size_t c) { return c == 0; })) {
    fail("capacities must be a non-empty list of positive values");
  }
}

SecConfig ExperimentConfig::resolved_sec() const {
  SecConfig out = sec;
  out.sequential_bias = agent != AgentKind::Nsec;
  out.action_count = kMoveCount;
  return out;
}

MfecConfig ExperimentConfig::resolved_mfec() const {
  MfecConfig out = mfec;
  out.action_count = kMoveCount;
  out.capacity_per_action =
      mfec_capacity > 0 ? mfec_capacity
                        : std::max<std::size_t>(1, ec_capacity * buffer_capacity / kMoveCount);
  return out;
}

std::size_t ExperimentConfig::final_window() const {
  const auto w = static_cast<std::size_t>(static_cast<double>(episodes) * final_window_fraction);
  return std::clamp<std::size_t>(w, 1, episodes);
}

MazeMap ExperimentConfig::load_maze() const {
  return map == "default" || map.empty() ? default_map() : load_map(map);
}

void apply_config_text(ExperimentConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = trim(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = trim(body.substr(0, hash));
    }
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw InputError(fmt::format("config line {}: expected 'key = value'", line_no));
    }
    try {
      cfg.set(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    } catch (const InputError& e) {
      throw InputError(fmt::format("config line {}: {}", line_no, e.what()));
    }
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  ExperimentConfig cfg;
  apply_config_text(cfg, text.str());
  return cfg;
}

}  // namespace seqec
