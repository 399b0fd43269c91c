#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "centrinet/errors.hpp"
#include "centrinet/traffic.hpp"
#include "test_support.hpp"

using namespace centrinet;
using centrinet::testing::complete_graph;
using centrinet::testing::make_graph;
using centrinet::testing::path_graph;

TEST(Cbr, TwoPerMsGapIs500) {
  for (std::uint64_t k = 0; k < 10; ++k) {
    EXPECT_EQ(cbr_offset(k + 1, 2.0) - cbr_offset(k, 2.0), 500u);
  }
}

TEST(Cbr, ThreePerMsGapsCarryRemainder) {
  std::vector<SimTime> gaps;
  for (std::uint64_t k = 0; k < 6; ++k) gaps.push_back(cbr_offset(k + 1, 3.0) - cbr_offset(k, 3.0));
  EXPECT_EQ(gaps, (std::vector<SimTime>{333, 333, 334, 333, 333, 334}));
  EXPECT_EQ(cbr_offset(3000, 3.0), kTicksPerSecond);
}

TEST(Cbr, OneSecondAtTwoPerMsIs2000Packets) {
  std::uint64_t k = 0;
  while (cbr_offset(k, 2.0) < kTicksPerSecond) ++k;
  EXPECT_EQ(k, 2000u);
}

TEST(CbrProperty, AnyWindowHoldsFloorOrCeilOfRateTimesWidth) {
  Rng rng(11);
  const double rates[] = {2.0, 3.0, 0.05, 0.7, 1.3, 7.0};
  for (double rate : rates) {
    std::vector<SimTime> offsets;
    for (std::uint64_t k = 0; k < 20000; ++k) offsets.push_back(cbr_offset(k, rate));
    const SimTime horizon = offsets.back();
    for (int trial = 0; trial < 200; ++trial) {
      const SimTime w = 1 + rng.below(horizon / 4);
      const SimTime a = rng.below(horizon - w);
      const auto count = std::lower_bound(offsets.begin(), offsets.end(), a + w) -
                         std::lower_bound(offsets.begin(), offsets.end(), a);
      const double expected = static_cast<double>(w) / kTicksPerMs * rate;
      ASSERT_GE(count, static_cast<long>(std::floor(expected))) << rate << " " << a << " " << w;
      ASSERT_LE(count, static_cast<long>(std::ceil(expected))) << rate << " " << a << " " << w;
    }
  }
}

TEST(SpawnFlows, TwoNodesSinglePair) {
  const auto flows = spawn_flows(path_graph(2), 1, {}, 3);
  ASSERT_EQ(flows.size(), 1u);
  EXPECT_NE(flows[0].src, flows[0].dst);
  EXPECT_LT(flows[0].src, 2u);
  EXPECT_LT(flows[0].dst, 2u);
}

TEST(SpawnFlows, SameSeedSameFlows) {
  const Topology t = path_graph(30);
  const auto a = spawn_flows(t, 10, {}, 5);
  const auto b = spawn_flows(t, 10, {}, 5);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].src, b[i].src);
    EXPECT_EQ(a[i].dst, b[i].dst);
    EXPECT_EQ(a[i].start_at, b[i].start_at);
  }
}

TEST(SpawnFlows, ThirtyFiveDistinctPairsOn200Nodes) {
  const auto flows = spawn_flows(make_graph(200, {}), 35, {}, 1);
  std::set<std::pair<NodeId, NodeId>> pairs;
  for (const Flow& f : flows) {
    EXPECT_NE(f.src, f.dst);
    EXPECT_LT(f.start_at, kTicksPerSecond);
    EXPECT_EQ(f.rate_per_ms, 2.0);
    EXPECT_EQ(f.packet_size, 500u);
    EXPECT_LT(f.start_at, f.stop_at);
    pairs.emplace(f.src, f.dst);
  }
  EXPECT_EQ(pairs.size(), 35u);
}

TEST(SpawnFlows, EveryOrderedPairWhenCountIsMaximal) {
  const auto flows = spawn_flows(complete_graph(4), 12, {}, 2);
  std::set<std::pair<NodeId, NodeId>> pairs;
  for (const Flow& f : flows) pairs.emplace(f.src, f.dst);
  EXPECT_EQ(pairs.size(), 12u);
}

TEST(SpawnFlows, Errors) {
  EXPECT_THROW(spawn_flows(path_graph(3), 7, {}, 1), ConfigError);
  EXPECT_THROW(spawn_flows(path_graph(3), 0, {}, 1), ConfigError);
  EXPECT_THROW(spawn_flows(make_graph(1, {}), 1, {}, 1), ConfigError);
}

TEST(TransmitTime, TenMegabytesAt250kbps) {
  EXPECT_EQ(transmit_time(10'000'000, 250'000, kTicksPerMs), 320 * kTicksPerSecond + kTicksPerMs);
  EXPECT_EQ(transmit_time(500, 250'000, kTicksPerMs), 16 * kTicksPerMs + kTicksPerMs);
}

TEST(TransmitTime, RoundsUpToWholeTick) {
  EXPECT_EQ(transmit_time(1, 3'000'000, 0), 3u);
  EXPECT_THROW(transmit_time(1, 0, 0), ConfigError);
}

TEST(DropTailQueue, ThirdArrivalDroppedAtCapacityTwo) {
  DropTailQueue<int> q(2);
  EXPECT_TRUE(q.push(1));
  EXPECT_TRUE(q.push(2));
  EXPECT_FALSE(q.push(3));
  EXPECT_EQ(q.size(), 2u);
  EXPECT_EQ(q.pop(), 1);
  EXPECT_TRUE(q.push(4));
  EXPECT_EQ(q.pop(), 2);
  EXPECT_EQ(q.pop(), 4);
  EXPECT_TRUE(q.empty());
}

TEST(DropTailQueueProperty, FifoAndBounded) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t cap = 1 + rng.below(8);
    DropTailQueue<int> q(cap);
    std::deque<int> model;
    for (int i = 0; i < 200; ++i) {
      if (rng.below(2) == 0) {
        const bool accepted = q.push(i);
        ASSERT_EQ(accepted, model.size() < cap);
        if (accepted) model.push_back(i);
      } else if (!model.empty()) {
        ASSERT_EQ(q.pop(), model.front());
        model.pop_front();
      }
      ASSERT_LE(q.size(), cap);
    }
  }
}

TEST(AnomalyPlan, FivePercentOf200IsTenOrigins) {
  AnomalyConfig cfg;
  const AnomalyPlan plan = build_anomaly_plan(make_graph(200, {}), cfg, 1);
  EXPECT_EQ(plan.origins.size(), 10u);
  EXPECT_EQ(std::set<NodeId>(plan.origins.begin(), plan.origins.end()).size(), 10u);
  for (std::size_t i = 0; i < plan.origins.size(); ++i) {
    EXPECT_NE(plan.origins[i], plan.destinations[i]);
  }
  const auto flows = plan.flows(35);
  ASSERT_EQ(flows.size(), 10u);
  EXPECT_EQ(flows.front().flow_id, 35u);
  for (const Flow& f : flows) {
    EXPECT_EQ(f.start_at, 80'000'000u);
    EXPECT_EQ(f.packet_size, 10'000'000u);
    EXPECT_TRUE(f.anomalous);
  }
}

TEST(AnomalyPlan, CeilingGivesOneOriginOf20) {
  EXPECT_EQ(build_anomaly_plan(make_graph(20, {}), {}, 3).origins.size(), 1u);
}

TEST(AnomalyPlan, Errors) {
  AnomalyConfig cfg;
  cfg.origin_fraction = 0.0;
  EXPECT_THROW(build_anomaly_plan(make_graph(20, {}), cfg, 1), ConfigError);
  cfg.origin_fraction = 0.05;
  cfg.anomaly_size = 0;
  EXPECT_THROW(build_anomaly_plan(make_graph(20, {}), cfg, 1), ConfigError);
}

TEST(AnomalyPlanProperty, OriginsDistinctAndDeterministic) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 2 + seed * 7;
    AnomalyConfig cfg;
    cfg.origin_fraction = 0.3;
    const Topology t = make_graph(n, {});
    const AnomalyPlan a = build_anomaly_plan(t, cfg, seed);
    const AnomalyPlan b = build_anomaly_plan(t, cfg, seed);
    ASSERT_EQ(a.origins, b.origins);
    ASSERT_EQ(a.destinations, b.destinations);
    ASSERT_EQ(a.origins.size(), static_cast<std::size_t>(std::ceil(0.3 * n - 1e-9)));
    ASSERT_EQ(std::set<NodeId>(a.origins.begin(), a.origins.end()).size(), a.origins.size());
  }
}

TEST(Detector, OversizedPacketDetectedOnce) {
  ThresholdDetector d(3, 10 * 500);
  EXPECT_FALSE(d.observe(0, 1, 500, 10).has_value());
  const auto first = d.observe(0, 2, 10'000'000, 20);
  ASSERT_TRUE(first.has_value());
  EXPECT_EQ(*first, (DetectionRecord{0, 20, 2, 10'000'000}));
  EXPECT_FALSE(d.observe(0, 3, 10'000'000, 30).has_value());
  EXPECT_TRUE(d.observe(1, 3, 5000, 30).has_value());
  EXPECT_EQ(d.records().size(), 2u);
}
