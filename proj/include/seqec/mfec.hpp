#pragma once

// Model-Free Episodic Control baseline: a per-action table of the best return
// seen from each state, k-nearest-neighbour estimates for unseen states and
// epsilon-greedy selection.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seqec/memory.hpp"
#include "seqec/policy.hpp"
#include "seqec/random.hpp"

namespace seqec {

struct MfecConfig {
  std::size_t k = 11;
  double epsilon = 0.005;
  double gamma = 1.0;
  std::size_t capacity_per_action = 6250;
  std::size_t action_count = 4;

  void validate() const;
};

class QMemory {
 public:
  struct Entry {
    StateVector state;
    double q = 0.0;
    std::uint64_t last_access = 0;
  };

  QMemory(std::size_t action_count, std::size_t capacity_per_action);

  /// Stored q on an exact state match; otherwise the mean q of the k entries
  /// nearest under the mean-absolute distance (all entries when fewer than k,
  /// 0 when none). Distance ties are broken by storage slot.
  double estimate(std::span<const double> state, ActionId action, std::size_t k) const;

  /// Max rule on an exact match; otherwise inserts, evicting the least
  /// recently written entry if the action's table is full.
  void update(std::span<const double> state, ActionId action, double value);

  const std::vector<Entry>& entries(ActionId action) const { return tables_.at(action).entries; }
  std::size_t size(ActionId action) const { return tables_.at(action).entries.size(); }
  std::size_t total_size() const;
  std::size_t action_count() const { return tables_.size(); }
  std::size_t capacity_per_action() const { return capacity_; }
  bool full() const;

 private:
  struct Table {
    std::vector<Entry> entries;
    std::unordered_map<StateVector, std::size_t, StateHash> lookup;
  };

  std::vector<Table> tables_;
  std::size_t capacity_;
  std::uint64_t clock_ = 0;
};

/// Backward recursion R_t = r_t + gamma * R_{t+1}.
std::vector<double> compute_returns(std::span<const double> rewards, double gamma);

/// Actions whose estimate equals the maximum, ascending.
std::vector<ActionId> greedy_actions(std::span<const double> estimates);

/// Uniform action with probability epsilon, else a greedy action; ties among
/// greedy actions are broken uniformly at random.
ActionId mfec_select(std::span<const double> estimates, double epsilon, Rng& rng);

/// The epsilon-greedy distribution mfec_select samples from.
ActionDistribution mfec_distribution(std::span<const double> estimates, double epsilon);

class MfecAgent final : public Agent {
 public:
  explicit MfecAgent(MfecConfig cfg);

  std::string_view name() const override { return "MFEC"; }
  void begin_episode() override;
  Decision act(std::span<const double> features, Rng& rng) override;
  void observe_outcome(double reward, bool done) override;
  std::size_t stored_count() const override { return memory_.total_size(); }
  bool memory_full() const override { return memory_.full(); }

  const QMemory& memory() const { return memory_; }

 private:
  MfecConfig cfg_;
  QMemory memory_;
  std::vector<Couplet> trace_;
  std::vector<double> rewards_;
  std::vector<double> estimates_;
};

}  // namespace seqec
