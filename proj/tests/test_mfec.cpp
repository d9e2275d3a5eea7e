#include <gtest/gtest.h>

#include <array>
#include <map>

#include "oracles.hpp"
#include "seqec/error.hpp"
#include "seqec/mfec.hpp"

using namespace seqec;

TEST(QMemory, ExactHitAndEmptyTable) {
  QMemory m(4, 10);
  EXPECT_EQ(m.estimate(StateVector{0.1, 0.2}, 0, 11), 0.0);
  m.update(StateVector{0.1, 0.2}, 0, 2.5);
  EXPECT_EQ(m.estimate(StateVector{0.1, 0.2}, 0, 11), 2.5);
  EXPECT_EQ(m.estimate(StateVector{0.1, 0.2}, 1, 11), 0.0);
}

TEST(QMemory, NearestNeighbourMean) {
  QMemory m(1, 10);
  m.update(StateVector{0.0}, 0, 1.0);
  m.update(StateVector{0.5}, 0, 2.0);
  m.update(StateVector{0.6}, 0, 4.0);
  EXPECT_DOUBLE_EQ(m.estimate(StateVector{0.56}, 0, 2), 3.0);
  EXPECT_DOUBLE_EQ(m.estimate(StateVector{0.56}, 0, 11), 7.0 / 3.0);
}

TEST(QMemory, MaxRule) {
  QMemory m(1, 10);
  m.update(StateVector{0.3}, 0, 2.0);
  m.update(StateVector{0.3}, 0, 3.0);
  EXPECT_EQ(m.estimate(StateVector{0.3}, 0, 1), 3.0);
  m.update(StateVector{0.3}, 0, 2.0);
  EXPECT_EQ(m.estimate(StateVector{0.3}, 0, 1), 3.0);
  EXPECT_EQ(m.size(0), 1u);
}

TEST(QMemory, EvictsLeastRecentlyWritten) {
  QMemory m(1, 3);
  m.update(StateVector{0.1}, 0, 1.0);
  m.update(StateVector{0.2}, 0, 1.0);
  m.update(StateVector{0.3}, 0, 1.0);
  m.update(StateVector{0.1}, 0, 0.5);  // refreshes 0.1 even though q stays
  m.update(StateVector{0.4}, 0, 1.0);
  EXPECT_EQ(m.size(0), 3u);
  std::vector<double> kept;
  for (const auto& e : m.entries(0)) kept.push_back(e.state[0]);
  std::sort(kept.begin(), kept.end());
  EXPECT_EQ(kept, (std::vector<double>{0.1, 0.3, 0.4}));
}

TEST(QMemory, MatchesExhaustiveKnnOnRandomTables) {
  Rng rng(77);
  for (int trial = 0; trial < 1500; ++trial) {
    const std::size_t dims = 1 + rng.index(6);
    const std::size_t k = 1 + rng.index(12);
    QMemory m(1, 1000);
    std::vector<std::pair<std::vector<double>, double>> model;
    const std::size_t n = rng.index(40);
    for (std::size_t i = 0; i < n; ++i) {
      StateVector s(dims);
      for (double& v : s) v = static_cast<double>(rng.index(9)) / 8.0;
      const double q = rng.uniform() * 3.0;
      m.update(s, 0, q);
      auto it = std::find_if(model.begin(), model.end(), [&](const auto& e) { return e.first == s; });
      if (it == model.end()) model.emplace_back(s, q);
      else it->second = std::max(it->second, q);
    }
    StateVector query(dims);
    for (double& v : query) v = rng.uniform() < 0.3 ? static_cast<double>(rng.index(9)) / 8.0 : rng.uniform();
    ASSERT_TRUE(oracle::close(m.estimate(query, 0, k), oracle::knn(model, query, k)))
        << "trial " << trial;
  }
}

TEST(QMemory, CapacityAndMonotonicityUnderRandomStreams) {
  Rng rng(5);
  QMemory m(2, 7);
  std::map<std::pair<std::vector<double>, std::size_t>, double> last;
  for (int i = 0; i < 5000; ++i) {
    const StateVector s{static_cast<double>(rng.index(4)) / 3.0};
    const std::size_t a = rng.index(2);
    m.update(s, a, rng.uniform() * 3.0);
    ASSERT_LE(m.size(a), 7u);
    // 4 distinct states fit, so nothing is evicted and values only rise.
    const double now = m.estimate(s, a, 1);
    auto [it, fresh] = last.try_emplace({s, a}, now);
    if (!fresh) {
      ASSERT_GE(now, it->second);
      it->second = now;
    }
  }
  QMemory small(1, 3);
  for (int i = 0; i < 1000; ++i) {
    small.update(StateVector{rng.uniform()}, 0, rng.uniform());
    ASSERT_LE(small.size(0), 3u);
  }
  EXPECT_TRUE(small.full());
}

TEST(ComputeReturns, Examples) {
  const std::vector<double> r{0, 0, 3};
  EXPECT_EQ(compute_returns(r, 1.0), (std::vector<double>{3, 3, 3}));
  EXPECT_EQ(compute_returns(r, 0.5), (std::vector<double>{0.75, 1.5, 3}));
  EXPECT_EQ(compute_returns(std::vector<double>(5, 0.0), 0.9), std::vector<double>(5, 0.0));
}

TEST(ComputeReturns, MatchesDirectSummation) {
  Rng rng(6);
  for (int trial = 0; trial < 1500; ++trial) {
    std::vector<double> r(rng.index(60));
    for (double& v : r) v = rng.uniform() < 0.8 ? 0.0 : rng.uniform() * 3.0;
    const double gamma = rng.uniform();
    const auto got = compute_returns(r, gamma);
    const auto want = oracle::returns(r, gamma);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      ASSERT_NEAR(got[i], want[i], 1e-12);
      ASSERT_TRUE(oracle::close(got[i], want[i]));
    }
  }
}

TEST(MfecSelect, PureGreedy) {
  Rng rng(1);
  const std::vector<double> est{0, 5, 1};
  for (int i = 0; i < 100; ++i) ASSERT_EQ(mfec_select(est, 0.0, rng), 1u);
}

TEST(MfecSelect, TiesSplitEvenlyAmongMaxima) {
  Rng rng(1);
  const std::vector<double> est{2, 2, 0};
  EXPECT_EQ(greedy_actions(est), (std::vector<ActionId>{0, 1}));
  std::array<int, 3> counts{};
  for (int i = 0; i < 100000; ++i) ++counts[mfec_select(est, 0.0, rng)];
  EXPECT_EQ(counts[2], 0);
  EXPECT_NEAR(counts[0] / 100000.0, 0.5, 0.01);
  const auto dist = mfec_distribution(est, 0.0);
  EXPECT_EQ(dist.probs, (std::vector<double>{0.5, 0.5, 0.0}));
}

TEST(MfecSelect, FullExplorationIsUniform) {
  Rng rng(2);
  const std::vector<double> est{0, 9, 1, 3};
  std::array<int, 4> counts{};
  const int draws = 400000;
  for (int i = 0; i < draws; ++i) ++counts[mfec_select(est, 1.0, rng)];
  for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / draws, 0.25, 0.01);
}

TEST(MfecAgent, UpdatesEveryVisitedPairAtEpisodeEnd) {
  MfecConfig cfg;
  cfg.capacity_per_action = 100;
  MfecAgent agent(cfg);
  Rng rng(4);
  agent.begin_episode();
  std::vector<std::pair<StateVector, ActionId>> visited;
  for (int t = 0; t < 5; ++t) {
    const StateVector s{t / 10.0};
    visited.emplace_back(s, agent.act(s, rng).action);
    agent.observe_outcome(0.0, false);
    EXPECT_EQ(agent.stored_count(), 0u);
  }
  agent.act(StateVector{0.9}, rng);
  agent.observe_outcome(2.5, true);
  EXPECT_EQ(agent.stored_count(), 6u);
  for (const auto& [s, a] : visited) EXPECT_EQ(agent.memory().estimate(s, a, 1), 2.5);
}

TEST(MfecConfig, Validation) {
  MfecConfig c;
  c.k = 0;
  EXPECT_THROW(c.validate(), ContractViolation);
  c = MfecConfig{};
  c.epsilon = 1.5;
  EXPECT_THROW(c.validate(), ContractViolation);
}
