#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "seqec/memory.hpp"
#include "seqec/random.hpp"

namespace seqec {

/// Probability vector over the discrete action set.
struct ActionDistribution {
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
};

/// Normalizes non-negative action values into a distribution; an all-zero
/// vector maps to the uniform distribution. Negative input is a contract
/// violation.
ActionDistribution action_distribution(std::span<const double> q);

/// Inverse-CDF draw from `dist`. Zero-probability actions are never chosen.
ActionId select_action(const ActionDistribution& dist, Rng& rng);

/// Shannon entropy in nats, with 0 ln 0 = 0.
double policy_entropy(const ActionDistribution& dist);

/// What an agent decided at one timestep, plus the entropy of the
/// distribution it sampled from (for logging).
struct Decision {
  ActionId action = 0;
  double entropy = 0.0;
};

/// Common interface the harness drives. Agents own their memory and are
/// single-threaded; separate instances may run on separate threads.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::string_view name() const = 0;
  virtual void begin_episode() = 0;
  virtual Decision act(std::span<const double> features, Rng& rng) = 0;
  /// Called after every environment step with that step's reward.
  virtual void observe_outcome(double reward, bool done) = 0;
  /// Number of stored memory units (sequences for SEC, entries for MFEC).
  virtual std::size_t stored_count() const = 0;
  virtual bool memory_full() const = 0;
};

}  // namespace seqec
