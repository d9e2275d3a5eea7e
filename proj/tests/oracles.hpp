#pragma once

// Brute-force reference implementations written independently of the
// library code: plain loops, long double accumulation, full sorts.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "seqec/maze.hpp"
#include "seqec/memory.hpp"

namespace oracle {

// Plain double, left to right: near-ties must order the same way as in the
// code under test.
inline double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double total = 0;
  for (std::size_t j = 0; j < a.size(); ++j) total += std::fabs(a[j] - b[j]);
  return total / static_cast<double>(a.size());
}

inline double eligibility(double d, double bias) { return (1.0 - d) * bias; }

// Absolute test on similarity, proportional test against the best retrieved score.
inline std::vector<std::size_t> gate(const std::vector<double>& sim, const std::vector<double>& g,
                                     double theta_abs, double theta_prop) {
  double best = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < sim.size(); ++i) {
    if (sim[i] >= theta_abs) {
      best = any ? std::max(best, g[i]) : g[i];
      any = true;
    }
  }
  std::vector<std::size_t> out;
  if (!any || best <= 0.0) return out;
  for (std::size_t i = 0; i < sim.size(); ++i) {
    const bool abs_ok = sim[i] >= theta_abs;
    const bool prop_ok = g[i] / best >= theta_prop;
    if (abs_ok && prop_ok) out.push_back(i);
  }
  return out;
}

struct FlatCouplet {
  std::vector<double> state;
  std::size_t action;
  std::size_t position;
  std::size_t length;
  double reward;
};

inline std::vector<FlatCouplet> flatten(const std::deque<seqec::Sequence>& sequences) {
  std::vector<FlatCouplet> out;
  for (const auto& s : sequences) {
    for (std::size_t p = 0; p < s.couplets.size(); ++p) {
      out.push_back({s.couplets[p].state, s.couplets[p].action, p, s.couplets.size(), s.reward});
    }
  }
  return out;
}

inline std::vector<double> q_values(const std::vector<FlatCouplet>& flat,
                                    const std::vector<std::size_t>& gated,
                                    const std::vector<double>& g, double tau,
                                    std::size_t actions) {
  std::vector<long double> q(actions, 0);
  double r_max = 0.0;
  for (std::size_t i : gated) r_max = std::max(r_max, flat[i].reward);
  for (std::size_t i : gated) {
    const long double len = flat[i].length;
    const long double to_end = (len - 1 - flat[i].position) / len;
    q[flat[i].action] += g[i] * (flat[i].reward / r_max) * std::exp(-to_end / tau);
  }
  return {q.begin(), q.end()};
}

// Exhaustive kNN over (state, q) pairs in storage order.
inline double knn(const std::vector<std::pair<std::vector<double>, double>>& entries,
                  const std::vector<double>& query, std::size_t k) {
  if (entries.empty()) return 0.0;
  for (const auto& [s, q] : entries) {
    if (s == query) return q;
  }
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    ranked.emplace_back(distance(entries[i].first, query), i);
  }
  std::sort(ranked.begin(), ranked.end());
  const std::size_t n = std::min(k, ranked.size());
  long double sum = 0;
  for (std::size_t i = 0; i < n; ++i) sum += entries[ranked[i].second].second;
  return static_cast<double>(sum / n);
}

inline std::vector<double> returns(const std::vector<double>& rewards, double gamma) {
  std::vector<double> out(rewards.size());
  for (std::size_t t = 0; t < rewards.size(); ++t) {
    long double sum = 0;
    long double w = 1;
    for (std::size_t k = t; k < rewards.size(); ++k) {
      sum += w * rewards[k];
      w *= gamma;
    }
    out[t] = static_cast<double>(sum);
  }
  return out;
}

// Shortest step count from `from` to any goal, by flood fill.
inline int bfs_distance(const seqec::MazeMap& map, seqec::GridPos from) {
  const int w = map.width();
  const int h = map.height();
  std::vector<int> dist(static_cast<std::size_t>(w * h), -1);
  std::queue<seqec::GridPos> frontier;
  dist[static_cast<std::size_t>(from.y * w + from.x)] = 0;
  frontier.push(from);
  const int dx[] = {0, 0, 1, -1};
  const int dy[] = {-1, 1, 0, 0};
  while (!frontier.empty()) {
    const auto p = frontier.front();
    frontier.pop();
    const int here = dist[static_cast<std::size_t>(p.y * w + p.x)];
    if (map.is_goal(p)) return here;
    for (int m = 0; m < 4; ++m) {
      const seqec::GridPos n{p.x + dx[m], p.y + dy[m]};
      if (n.x < 0 || n.y < 0 || n.x >= w || n.y >= h) continue;
      if (map.at(n) == seqec::Cell::Wall) continue;
      auto& slot = dist[static_cast<std::size_t>(n.y * w + n.x)];
      if (slot >= 0) continue;
      slot = here + 1;
      frontier.push(n);
    }
  }
  return -1;
}

inline bool close(double a, double b, double rel = 1e-9) {
  if (a == b) return true;
  return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace oracle
