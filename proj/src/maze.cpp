#include "seqec/maze.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include "seqec/error.hpp"

namespace seqec {

namespace {

// Generated from assets/maps/double_t.txt at configure time.
constexpr std::string_view kDefaultMap =
#include "default_map.inc"
    ;

std::string where(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

GridPos apply_move(GridPos p, ActionId move) {
  switch (move) {
    case kNorth: return {p.x, p.y - 1};
    case kSouth: return {p.x, p.y + 1};
    case kEast: return {p.x + 1, p.y};
    case kWest: return {p.x - 1, p.y};
    default: throw ContractViolation("unknown move " + std::to_string(move));
  }
}

MazeMap::MazeMap(int width, int height, std::vector<Cell> cells)
    : width_(width), height_(height), cells_(std::move(cells)) {
  require(width > 0 && height > 0 &&
              cells_.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
          "maze dimensions do not match cell count");
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      const Cell c = at({x, y});
      if (c == Cell::Start) starts_.push_back({x, y});
      if (c == Cell::Goal) goals_.push_back({x, y});
    }
  }
}

std::string MazeMap::to_text() const {
  std::string out;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) out.push_back(static_cast<char>(at({x, y})));
    out.push_back('\n');
  }
  return out;
}

MazeMap parse_map(std::string_view text) {
  std::vector<std::string> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    rows.push_back(line);
  }
  while (!rows.empty() && rows.back().empty()) rows.pop_back();
  if (rows.empty()) throw InputError("map is empty");

  const std::size_t width = rows.front().size();
  if (width == 0) throw InputError("map " + where(1, 1) + ": empty row");
  std::vector<Cell> cells;
  cells.reserve(width * rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw InputError("map " + where(r + 1, std::min(rows[r].size(), width) + 1) +
                       ": ragged row (expected " + std::to_string(width) + " columns, got " +
                       std::to_string(rows[r].size()) + ")");
    }
    for (std::size_t c = 0; c < width; ++c) {
      const char ch = rows[r][c];
      if (ch != '#' && ch != '.' && ch != 'S' && ch != 'G') {
        throw InputError("map " + where(r + 1, c + 1) + ": unknown character '" +
                         std::string(1, ch) + "'");
      }
      cells.push_back(static_cast<Cell>(ch));
    }
  }

  MazeMap map(static_cast<int>(width), static_cast<int>(rows.size()), std::move(cells));
  if (map.goals().empty()) throw InputError("map: no goal cell");
  if (map.starts().empty()) throw InputError("map: no start cell");
  for (GridPos s : map.starts()) {
    if (shortest_path(map, s).empty() && !map.is_goal(s)) {
      throw InputError("map " + where(static_cast<std::size_t>(s.y) + 1,
                                      static_cast<std::size_t>(s.x) + 1) +
                       ": goal unreachable from start cell");
    }
  }
  return map;
}

MazeMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open map file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_map(text.str());
}

std::string_view default_map_text() { return kDefaultMap; }

MazeMap default_map() { return parse_map(kDefaultMap); }

std::vector<ActionId> shortest_path(const MazeMap& map, GridPos from) {
  if (!map.open(from) || map.is_goal(from)) return {};
  const auto index = [&](GridPos p) {
    return static_cast<std::size_t>(p.y) * static_cast<std::size_t>(map.width()) +
           static_cast<std::size_t>(p.x);
  };
  constexpr ActionId kNone = kMoveCount;
  std::vector<ActionId> arrived_by(static_cast<std::size_t>(map.width() * map.height()), kNone);
  std::vector<bool> seen(arrived_by.size(), false);
  std::deque<GridPos> frontier{from};
  seen[index(from)] = true;
  while (!frontier.empty()) {
    const GridPos p = frontier.front();
    frontier.pop_front();
    if (map.is_goal(p)) {
      std::vector<ActionId> path;
      for (GridPos q = p; q != from;) {
        const ActionId m = arrived_by[index(q)];
        path.push_back(m);
        // Step back against the move.
        switch (m) {
          case kNorth: q.y += 1; break;
          case kSouth: q.y -= 1; break;
          case kEast: q.x -= 1; break;
          default: q.x += 1; break;
        }
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (ActionId m = 0; m < kMoveCount; ++m) {
      const GridPos n = apply_move(p, m);
      if (map.open(n) && !seen[index(n)]) {
        seen[index(n)] = true;
        arrived_by[index(n)] = m;
        frontier.push_back(n);
      }
    }
  }
  return {};
}

void EnvConfig::validate() const {
  require(max_steps > 0, "max_steps must be positive");
  require(action_repeat > 0, "action_repeat must be positive");
  require(reward_base > 0.0, "reward_base must be positive");
  require(reward_decay_per_step >= 0.0, "reward_decay_per_step must be non-negative");
  require(reward_base - reward_decay_per_step * max_steps >= 0.0,
          "reward_base - reward_decay_per_step * max_steps must be non-negative");
}

StateVector GridWallEncoder::encode(const MazeMap& map, const EnvState& state) const {
  const GridPos p = state.pos;
  const auto scaled = [](int v, int extent) {
    return extent > 1 ? static_cast<double>(v) / static_cast<double>(extent - 1) : 0.0;
  };
  const auto wall = [&](ActionId m) { return map.open(apply_move(p, m)) ? 0.0 : 1.0; };
  return {scaled(p.x, map.width()), scaled(p.y, map.height()), wall(kNorth), wall(kSouth),
          wall(kEast), wall(kWest)};
}

MazeEnv::MazeEnv(MazeMap map, EnvConfig cfg, std::shared_ptr<const ObservationEncoder> encoder)
    : map_(std::move(map)), cfg_(cfg), encoder_(std::move(encoder)) {
  cfg_.validate();
  require(encoder_ != nullptr, "MazeEnv needs an encoder");
  state_.pos = map_.starts().front();
}

StateVector MazeEnv::reset(Rng& rng) {
  const auto& starts = map_.starts();
  return reset_at(starts[rng.index(starts.size())]);
}

StateVector MazeEnv::reset_at(GridPos start) {
  require(map_.open(start), "reset position must be an open cell");
  state_ = EnvState{start, 0, false};
  return observe();
}

StepOutcome MazeEnv::step(ActionId action) {
  require(!state_.done, "step called on a finished episode");
  require(action < kMoveCount, "action outside the move set");

  for (int r = 0; r < cfg_.action_repeat && state_.t < cfg_.max_steps; ++r) {
    const GridPos next = apply_move(state_.pos, action);
    if (map_.open(next)) state_.pos = next;
    ++state_.t;
    if (map_.is_goal(state_.pos)) break;
  }

  StepOutcome out;
  if (map_.is_goal(state_.pos)) {
    out.reward = cfg_.reward_base - cfg_.reward_decay_per_step * static_cast<double>(state_.t);
    state_.done = true;
  } else if (state_.t >= cfg_.max_steps) {
    state_.done = true;
  }
  out.done = state_.done;
  out.observation = observe();
  return out;
}

}  // namespace seqec
