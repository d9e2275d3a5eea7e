#include "seqec/mfec.hpp"

#include <algorithm>
#include <cmath>

#include "seqec/error.hpp"
#include "seqec/sec.hpp"

namespace seqec {

void MfecConfig::validate() const {
  require(k >= 1, "mfec k must be at least 1");
  require(epsilon >= 0.0 && epsilon <= 1.0, "mfec epsilon must be in [0,1]");
  require(gamma > 0.0 && gamma <= 1.0, "mfec gamma must be in (0,1]");
  require(capacity_per_action > 0, "mfec capacity must be positive");
  require(action_count > 0, "mfec action_count must be positive");
}

QMemory::QMemory(std::size_t action_count, std::size_t capacity_per_action)
    : tables_(action_count), capacity_(capacity_per_action) {
  require(action_count > 0 && capacity_per_action > 0, "QMemory needs actions and capacity");
}

double QMemory::estimate(std::span<const double> state, ActionId action, std::size_t k) const {
  require(k >= 1, "estimate: k must be at least 1");
  const Table& table = tables_.at(action);
  if (table.entries.empty()) return 0.0;

  auto hit = table.lookup.find(StateVector(state.begin(), state.end()));
  if (hit != table.lookup.end()) return table.entries[hit->second].q;

  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(table.entries.size());
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    ranked.emplace_back(distance(state, table.entries[i].state), i);
  }
  const std::size_t n = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n), ranked.end());
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += table.entries[ranked[j].second].q;
  return sum / static_cast<double>(n);
}

void QMemory::update(std::span<const double> state, ActionId action, double value) {
  Table& table = tables_.at(action);
  StateVector key(state.begin(), state.end());
  ++clock_;
  if (auto hit = table.lookup.find(key); hit != table.lookup.end()) {
    Entry& e = table.entries[hit->second];
    e.q = std::max(e.q, value);
    e.last_access = clock_;
    return;
  }
  if (table.entries.size() >= capacity_) {
    auto lru = std::min_element(table.entries.begin(), table.entries.end(),
                                [](const Entry& a, const Entry& b) {
                                  return a.last_access < b.last_access;
                                });
    const std::size_t slot = static_cast<std::size_t>(lru - table.entries.begin());
    table.lookup.erase(lru->state);
    *lru = Entry{key, value, clock_};
    table.lookup.emplace(std::move(key), slot);
    return;
  }
  table.lookup.emplace(key, table.entries.size());
  table.entries.push_back(Entry{std::move(key), value, clock_});
}

std::size_t QMemory::total_size() const {
  std::size_t n = 0;
  for (const Table& t : tables_) n += t.entries.size();
  return n;
}

bool QMemory::full() const {
  return std::all_of(tables_.begin(), tables_.end(),
                     [this](const Table& t) { return t.entries.size() >= capacity_; });
}

std::vector<double> compute_returns(std::span<const double> rewards, double gamma) {
  require(gamma > 0.0 && gamma <= 1.0, "compute_returns: gamma must be in (0,1]");
  std::vector<double> out(rewards.size());
  double running = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    running = rewards[t] + gamma * running;
    out[t] = running;
  }
  return out;
}

std::vector<ActionId> greedy_actions(std::span<const double> estimates) {
  require(!estimates.empty(), "greedy_actions: empty estimates");
  const double best = *std::max_element(estimates.begin(), estimates.end());
  std::vector<ActionId> out;
  for (ActionId a = 0; a < estimates.size(); ++a) {
    if (estimates[a] == best) out.push_back(a);
  }
  return out;
}

ActionId mfec_select(std::span<const double> estimates, double epsilon, Rng& rng) {
  require(!estimates.empty(), "mfec_select: empty estimates");
  require(epsilon >= 0.0 && epsilon <= 1.0, "mfec_select: epsilon must be in [0,1]");
  if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.index(estimates.size());
  const std::vector<ActionId> best = greedy_actions(estimates);
  return best.size() == 1 ? best.front() : best[rng.index(best.size())];
}

ActionDistribution mfec_distribution(std::span<const double> estimates, double epsilon) {
  const std::vector<ActionId> best = greedy_actions(estimates);
  ActionDistribution dist;
  dist.probs.assign(estimates.size(), epsilon / static_cast<double>(estimates.size()));
  for (ActionId a : best) dist.probs[a] += (1.0 - epsilon) / static_cast<double>(best.size());
  return dist;
}

// ---------------------------------------------------------------------------

MfecAgent::MfecAgent(MfecConfig cfg)
    : cfg_(cfg), memory_(cfg.action_count, cfg.capacity_per_action) {
  cfg_.validate();
}

void MfecAgent::begin_episode() {
  trace_.clear();
  rewards_.clear();
}

Decision MfecAgent::act(std::span<const double> features, Rng& rng) {
  estimates_.resize(cfg_.action_count);
  for (ActionId a = 0; a < cfg_.action_count; ++a) {
    estimates_[a] = memory_.estimate(features, a, cfg_.k);
  }
  const ActionId action = mfec_select(estimates_, cfg_.epsilon, rng);
  trace_.push_back(Couplet{StateVector(features.begin(), features.end()), action});
  rewards_.push_back(0.0);
  return Decision{action, policy_entropy(mfec_distribution(estimates_, cfg_.epsilon))};
}

void MfecAgent::observe_outcome(double reward, bool done) {
  if (!rewards_.empty()) rewards_.back() += reward;
  if (!done) return;
  const std::vector<double> returns = compute_returns(rewards_, cfg_.gamma);
  for (std::size_t t = 0; t < trace_.size(); ++t) {
    memory_.update(trace_[t].state, trace_[t].action, returns[t]);
  }
  trace_.clear();
  rewards_.clear();
}

}  // namespace seqec
