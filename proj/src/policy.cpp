#include "seqec/policy.hpp"

#include <cmath>

#include "seqec/error.hpp"

namespace seqec {

ActionDistribution action_distribution(std::span<const double> q) {
  require(!q.empty(), "action_distribution: empty action set");
  double total = 0.0;
  for (double v : q) {
    require(v >= 0.0, "action_distribution: negative action value");
    total += v;
  }
  ActionDistribution dist;
  dist.probs.resize(q.size());
  if (total > 0.0) {
    for (std::size_t a = 0; a < q.size(); ++a) dist.probs[a] = q[a] / total;
  } else {
    const double p = 1.0 / static_cast<double>(q.size());
    for (double& v : dist.probs) v = p;
  }
  return dist;
}

ActionId select_action(const ActionDistribution& dist, Rng& rng) {
  require(!dist.probs.empty(), "select_action: empty distribution");
  const double u = rng.uniform();
  double cumulative = 0.0;
  ActionId last_positive = 0;
  for (std::size_t a = 0; a < dist.probs.size(); ++a) {
    if (dist.probs[a] <= 0.0) continue;
    last_positive = a;
    cumulative += dist.probs[a];
    if (u < cumulative) return a;
  }
  // Rounding left the cumulative sum just below u.
  return last_positive;
}

double policy_entropy(const ActionDistribution& dist) {
  double h = 0.0;
  for (double p : dist.probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace seqec
