#include "seqec/sec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "seqec/error.hpp"

namespace seqec {

void SecConfig::validate() const {
  require(theta_abs > 0.0 && theta_abs <= 1.0, "theta_abs must be in (0,1]");
  require(theta_prop > 0.0 && theta_prop <= 1.0, "theta_prop must be in (0,1]");
  require(tau > 0.0, "tau must be positive");
  require(bias_increase >= 0.0, "bias_increase must be non-negative");
  require(bias_decay >= 0.0, "bias_decay must be non-negative");
  require(action_count > 0, "action_count must be positive");
}

double distance(std::span<const double> query, std::span<const double> stored) {
  require(query.size() == stored.size(),
          "distance: length mismatch (" + std::to_string(query.size()) + " vs " +
              std::to_string(stored.size()) + ")");
  require(!query.empty(), "distance: empty vectors");
  double sum = 0.0;
  for (std::size_t j = 0; j < query.size(); ++j) sum += std::abs(query[j] - stored[j]);
  return sum / static_cast<double>(query.size());
}

std::vector<double> eligibility(std::span<const double> distances, std::span<const double> bias) {
  require(distances.size() == bias.size(), "eligibility: distances and bias misaligned");
  std::vector<double> g(distances.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (1.0 - distances[i]) * bias[i];
  return g;
}

EligibilityReport gate(std::span<const double> similarity, std::vector<double> scores,
                       const SecConfig& cfg) {
  require(similarity.size() == scores.size(), "gate: similarity and scores misaligned");
  EligibilityReport report;
  report.scores = std::move(scores);
  for (std::size_t i = 0; i < similarity.size(); ++i) {
    if (similarity[i] >= cfg.theta_abs) {
      report.retrieved.push_back(i);
      report.g_max = std::max(report.g_max, report.scores[i]);
    }
  }
  if (report.g_max <= 0.0) return report;
  for (std::size_t i : report.retrieved) {
    if (report.scores[i] / report.g_max >= cfg.theta_prop) report.gated.push_back(i);
  }
  return report;
}

namespace {

// Sums the per-action contributions of the gated couplets in ascending flat
// order so that every retrieval path produces bit-identical values.
std::vector<double> accumulate_q(std::span<const std::size_t> gated,
                                 std::span<const double> gated_scores, const MemoryView& view,
                                 const SecConfig& cfg) {
  std::vector<double> q(cfg.action_count, 0.0);
  if (gated.empty()) return q;
  double r_max = 0.0;
  for (std::size_t i : gated) r_max = std::max(r_max, view[i].seq_reward);
  for (std::size_t k = 0; k < gated.size(); ++k) {
    const CoupletView& cv = view[gated[k]];
    require(cv.couplet->action < cfg.action_count, "stored action outside the action set");
    const double L = static_cast<double>(cv.seq_length);
    const double to_end = (L - 1.0 - static_cast<double>(cv.position)) / L;
    q[cv.couplet->action] += gated_scores[k] * (cv.seq_reward / r_max) * std::exp(-to_end / cfg.tau);
  }
  return q;
}

}  // namespace

std::vector<double> q_estimates(const EligibilityReport& report, const MemoryView& view,
                                const SecConfig& cfg) {
  require(report.scores.size() == view.size(), "q_estimates: report and view misaligned");
  std::vector<double> gated_scores;
  gated_scores.reserve(report.gated.size());
  for (std::size_t i : report.gated) gated_scores.push_back(report.scores[i]);
  return accumulate_q(report.gated, gated_scores, view, cfg);
}

Retrieval retrieve_reference(const EpisodicMemory& memory, std::span<const double> query,
                             const SecConfig& cfg) {
  const MemoryView& view = memory.view();
  std::vector<double> d(view.size());
  std::vector<double> similarity(view.size());
  for (std::size_t i = 0; i < view.size(); ++i) {
    d[i] = distance(query, view[i].couplet->state);
    similarity[i] = 1.0 - d[i];
  }
  EligibilityReport report = gate(similarity, eligibility(d, memory.bias().values()), cfg);

  Retrieval out;
  out.q = q_estimates(report, view, cfg);
  out.dist = action_distribution(out.q);
  out.gated = report.gated;
  for (std::size_t i : report.gated) out.gated_scores.push_back(report.scores[i]);
  return out;
}

Retrieval retrieve(const EpisodicMemory& memory, std::span<const double> query,
                   const SecConfig& cfg) {
  const BiasState& bias = memory.bias();

  // Similarity is a property of the stored state, so whole groups of
  // identical states pass or fail the absolute threshold together.
  std::vector<std::pair<std::size_t, double>> candidates;
  double g_max = 0.0;
  for (const auto& group : memory.state_groups()) {
    const double similarity = 1.0 - distance(query, group.state);
    if (similarity < cfg.theta_abs) continue;
    for (std::size_t i : group.flat_indices) {
      const double g = similarity * bias[i];
      candidates.emplace_back(i, g);
      g_max = std::max(g_max, g);
    }
  }

  Retrieval out;
  if (g_max > 0.0) {
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [i, g] : candidates) {
      if (g / g_max >= cfg.theta_prop) {
        out.gated.push_back(i);
        out.gated_scores.push_back(g);
      }
    }
  }
  out.q = accumulate_q(out.gated, out.gated_scores, memory.view(), cfg);
  out.dist = action_distribution(out.q);
  return out;
}

// ---------------------------------------------------------------------------

SecAgent::SecAgent(SecConfig cfg, std::size_t buffer_capacity, std::size_t ec_capacity,
                   Retention retention)
    : cfg_(cfg), buffer_(buffer_capacity), memory_(ec_capacity, retention) {
  cfg_.validate();
}

void SecAgent::begin_episode() { buffer_.clear(); }

Decision SecAgent::act(std::span<const double> features, Rng& rng) {
  for (double v : features) require(v >= 0.0 && v <= 1.0, "features must lie in [0,1]");

  last_ = retrieve(memory_, features, cfg_);
  const ActionId action = select_action(last_.dist, rng);

  if (cfg_.sequential_bias) {
    matched_.clear();
    for (std::size_t i : last_.gated) {
      if (memory_.view()[i].couplet->action == action) matched_.push_back(i);
    }
    BiasState& bias = memory_.bias();
    bias.reinforce(matched_, memory_.view(), cfg_.bias_increase);
    bias.decay(cfg_.bias_decay);
  }

  buffer_.push(Couplet{StateVector(features.begin(), features.end()), action});
  return Decision{action, policy_entropy(last_.dist)};
}

void SecAgent::observe_outcome(double reward, bool done) {
  if (reward > 0.0) memory_.store(buffer_.drain(), reward);
  if (done) buffer_.clear();
}

}  // namespace seqec
