#pragma once

// Sequential Episodic Control: similarity against every stored couplet,
// bias-weighted eligibility, dual-threshold gating, decayed relative-reward
// action values and a sampled policy. With the sequential bias disabled the
// same machinery is the non-sequential ablation (NSEC).

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "seqec/memory.hpp"
#include "seqec/policy.hpp"
#include "seqec/random.hpp"

namespace seqec {

struct SecConfig {
  double theta_abs = 0.995;
  double theta_prop = 0.98;
  double tau = 0.9;
  double bias_increase = 0.1;
  double bias_decay = 0.0005;
  bool sequential_bias = true;
  std::size_t action_count = 4;

  void validate() const;
};

/// Mean absolute difference between two equal-length vectors.
double distance(std::span<const double> query, std::span<const double> stored);

/// G_i = (1 - d_i) * B_i.
std::vector<double> eligibility(std::span<const double> distances, std::span<const double> bias);

struct EligibilityReport {
  std::vector<double> scores;
  std::vector<std::size_t> retrieved;  // similarity >= theta_abs, ascending
  std::vector<std::size_t> gated;      // ascending flat indices
  double g_max = 0.0;                  // max score over `retrieved`
};

/// Dual-threshold gate. A couplet is retrieved when its similarity 1 - d_i
/// reaches theta_abs; a retrieved couplet is gated when G_i / g_max reaches
/// theta_prop, with g_max taken over the retrieved couplets. Nothing retrieved
/// (or g_max = 0) gates nothing.
/// Bias never lets a dissimilar state through the absolute test.
EligibilityReport gate(std::span<const double> similarity, std::vector<double> scores,
                       const SecConfig& cfg);

/// Per-action value: sum over gated couplets with that action of
/// G_i * (r_i / r_max) * exp(-d_i / tau), with d_i = (L - 1 - position) / L.
std::vector<double> q_estimates(const EligibilityReport& report, const MemoryView& view,
                                const SecConfig& cfg);

/// Result of one retrieval against the episodic memory.
struct Retrieval {
  std::vector<std::size_t> gated;       // ascending flat indices
  std::vector<double> gated_scores;     // G for each gated index
  std::vector<double> q;
  ActionDistribution dist;
};

/// Straight evaluation of the full pipeline over every stored couplet.
Retrieval retrieve_reference(const EpisodicMemory& memory, std::span<const double> query,
                             const SecConfig& cfg);

/// Same result as retrieve_reference, but distances are computed once per
/// distinct stored state and only groups passing theta_abs are expanded.
Retrieval retrieve(const EpisodicMemory& memory, std::span<const double> query,
                   const SecConfig& cfg);

class SecAgent final : public Agent {
 public:
  SecAgent(SecConfig cfg, std::size_t buffer_capacity, std::size_t ec_capacity,
           Retention retention);

  std::string_view name() const override { return cfg_.sequential_bias ? "SEC" : "NSEC"; }
  void begin_episode() override;
  Decision act(std::span<const double> features, Rng& rng) override;
  void observe_outcome(double reward, bool done) override;
  std::size_t stored_count() const override { return memory_.size(); }
  bool memory_full() const override { return memory_.full(); }

  const SecConfig& config() const { return cfg_; }
  const EpisodicMemory& memory() const { return memory_; }
  const ShortTermBuffer& buffer() const { return buffer_; }
  /// Retrieval state of the most recent act() call.
  const Retrieval& last_retrieval() const { return last_; }

 private:
  SecConfig cfg_;
  ShortTermBuffer buffer_;
  EpisodicMemory memory_;
  Retrieval last_;
  std::vector<std::size_t> matched_;
};

}  // namespace seqec
