#pragma once

// Discrete double T-maze: ASCII map parsing, the episodic environment with a
// time-decayed goal reward, the observation encoder and a BFS path oracle.

#include <compare>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "seqec/memory.hpp"
#include "seqec/random.hpp"

namespace seqec {

enum class Cell : char { Wall = '#', Floor = '.', Start = 'S', Goal = 'G' };

struct GridPos {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const GridPos&, const GridPos&) = default;
};

/// Cardinal moves; y grows downwards.
enum Move : ActionId { kNorth = 0, kSouth = 1, kEast = 2, kWest = 3 };
inline constexpr std::size_t kMoveCount = 4;

GridPos apply_move(GridPos p, ActionId move);

class MazeMap {
 public:
  MazeMap(int width, int height, std::vector<Cell> cells);

  int width() const { return width_; }
  int height() const { return height_; }
  Cell at(GridPos p) const { return cells_[static_cast<std::size_t>(p.y * width_ + p.x)]; }
  bool in_bounds(GridPos p) const { return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_; }
  /// In bounds and not a wall.
  bool open(GridPos p) const { return in_bounds(p) && at(p) != Cell::Wall; }

  const std::vector<GridPos>& starts() const { return starts_; }
  const std::vector<GridPos>& goals() const { return goals_; }
  bool is_goal(GridPos p) const { return in_bounds(p) && at(p) == Cell::Goal; }

  std::string to_text() const;

 private:
  int width_;
  int height_;
  std::vector<Cell> cells_;
  std::vector<GridPos> starts_;
  std::vector<GridPos> goals_;
};

/// Parses '#', '.', 'S', 'G' rows. Throws InputError naming the line and
/// column for ragged rows or unknown characters, and rejects maps without a
/// start, without a goal, or with a start that cannot reach a goal.
MazeMap parse_map(std::string_view text);
MazeMap load_map(const std::filesystem::path& path);

/// The bundled 21x21 double T-maze (identical to assets/maps/double_t.txt).
std::string_view default_map_text();
MazeMap default_map();

/// Shortest move sequence from `from` to the nearest goal (BFS, moves tried in
/// North, South, East, West order). Empty when `from` is a goal.
std::vector<ActionId> shortest_path(const MazeMap& map, GridPos from);

struct EnvConfig {
  double reward_base = 3.0;
  double reward_decay_per_step = 0.001;
  int max_steps = 1000;
  int action_repeat = 1;

  void validate() const;
};

struct EnvState {
  GridPos pos;
  int t = 0;
  bool done = false;
};

/// Maps an environment state to a feature vector in [0,1]^N.
class ObservationEncoder {
 public:
  virtual ~ObservationEncoder() = default;
  virtual std::size_t dimension() const = 0;
  virtual StateVector encode(const MazeMap& map, const EnvState& state) const = 0;
};

/// (x/(w-1), y/(h-1), wall N, wall S, wall E, wall W). Cells outside the map
/// count as walls. Carries no information about where the goal is.
class GridWallEncoder final : public ObservationEncoder {
 public:
  std::size_t dimension() const override { return 6; }
  StateVector encode(const MazeMap& map, const EnvState& state) const override;
};

struct StepOutcome {
  StateVector observation;
  double reward = 0.0;
  bool done = false;
};

class MazeEnv {
 public:
  MazeEnv(MazeMap map, EnvConfig cfg,
          std::shared_ptr<const ObservationEncoder> encoder = std::make_shared<GridWallEncoder>());

  /// Places the agent on a uniformly chosen start cell.
  StateVector reset(Rng& rng);
  /// Puts the agent on a given open cell, for scripted evaluation.
  StateVector reset_at(GridPos start);

  /// Applies the move action_repeat times (moves into walls leave the agent in
  /// place). Reaching a goal pays reward_base - reward_decay_per_step * t and
  /// ends the episode; otherwise hitting max_steps ends it with zero reward.
  StepOutcome step(ActionId action);

  StateVector observe() const { return encoder_->encode(map_, state_); }
  const EnvState& state() const { return state_; }
  const MazeMap& map() const { return map_; }
  const EnvConfig& config() const { return cfg_; }
  std::size_t action_count() const { return kMoveCount; }
  std::size_t feature_dimension() const { return encoder_->dimension(); }

 private:
  MazeMap map_;
  EnvConfig cfg_;
  std::shared_ptr<const ObservationEncoder> encoder_;
  EnvState state_;
};

}  // namespace seqec
