#include <gtest/gtest.h>

#include <sstream>

#include "centrinet/errors.hpp"
#include "centrinet/graph.hpp"
#include "test_support.hpp"

using namespace centrinet;
using centrinet::testing::make_graph;

TEST(RandomPositions, SingleNodeInsideArea) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pos = random_positions(1, 100, 100, seed);
    ASSERT_EQ(pos.size(), 1u);
    EXPECT_GE(pos[0].x, 0.0);
    EXPECT_LE(pos[0].x, 100.0);
    EXPECT_GE(pos[0].y, 0.0);
    EXPECT_LE(pos[0].y, 100.0);
  }
}

TEST(RandomPositions, SameSeedSameList) {
  EXPECT_EQ(random_positions(200, 100, 100, 7), random_positions(200, 100, 100, 7));
}

TEST(RandomPositions, DifferentSeedsDiffer) {
  EXPECT_NE(random_positions(200, 100, 100, 7), random_positions(200, 100, 100, 8));
}

TEST(RandomPositions, RejectsBadArea) {
  EXPECT_THROW(random_positions(5, 0, 100, 1), ConfigError);
  EXPECT_THROW(random_positions(5, 100, -1, 1), ConfigError);
  EXPECT_THROW(random_positions(0, 100, 100, 1), ConfigError);
}

TEST(UnitDisk, DistanceThreshold) {
  const Topology t = build_unit_disk({{0, 0}, {0, 5}, {0, 20}}, 10);
  EXPECT_EQ(t.edges(), (std::vector<Edge>{{0, 1}}));
}

TEST(UnitDisk, BoundaryDistanceIsLinked) {
  const Topology t = build_unit_disk({{0, 0}, {3, 4}}, 5);
  EXPECT_TRUE(t.has_edge(0, 1));
}

TEST(UnitDisk, TinyRangeNoEdges) {
  const Topology t = build_unit_disk(random_positions(30, 100, 100, 3), 0.0001);
  EXPECT_EQ(t.edge_count(), 0u);
}

TEST(UnitDisk, RejectsNonPositiveRange) {
  EXPECT_THROW(build_unit_disk({{0, 0}}, 0), ConfigError);
}

TEST(UnitDisk, TwoHundredNodesAtRange15UsuallyConnected) {
  int connected = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    connected += is_connected(build_unit_disk(random_positions(200, 100, 100, seed), 15)) ? 1 : 0;
  }
  RecordProperty("connected_of_100", connected);
  EXPECT_GE(connected, 50);
}

TEST(Connectivity, Examples) {
  EXPECT_TRUE(is_connected(make_graph(3, {{0, 1}, {1, 2}})));
  EXPECT_FALSE(is_connected(make_graph(2, {})));
  EXPECT_FALSE(is_connected(make_graph(4, {{0, 1}, {1, 2}, {0, 2}})));
}

TEST(ConnectedUnitDisk, ResamplesUntilConnected) {
  const Topology t = connected_unit_disk(50, 100, 100, 22, 1);
  EXPECT_TRUE(is_connected(t));
  EXPECT_EQ(t, connected_unit_disk(50, 100, 100, 22, 1));
}

TEST(ConnectedUnitDisk, GivesUpLoudly) {
  EXPECT_THROW(connected_unit_disk(50, 100, 100, 1, 1), ConfigError);
}

TEST(Topology, Neighbors) {
  const Topology star = centrinet::testing::star_graph(3);
  const auto hub = star.neighbors(0);
  EXPECT_EQ(std::vector<NodeId>(hub.begin(), hub.end()), (std::vector<NodeId>{1, 2, 3}));
  const auto leaf = star.neighbors(2);
  EXPECT_EQ(std::vector<NodeId>(leaf.begin(), leaf.end()), (std::vector<NodeId>{0}));
  const Topology lonely = make_graph(2, {});
  EXPECT_TRUE(lonely.neighbors(1).empty());
  EXPECT_THROW(lonely.neighbors(2), UsageError);
}

TEST(Topology, EdgesNormalizedAndSorted) {
  const Topology t = make_graph(4, {{3, 1}, {2, 0}, {1, 0}});
  EXPECT_EQ(t.edges(), (std::vector<Edge>{{0, 1}, {0, 2}, {1, 3}}));
  EXPECT_EQ(t.degree(0), 2u);
}

TEST(Topology, RejectsBadEdges) {
  EXPECT_THROW(make_graph(3, {{0, 0}}), UsageError);
  EXPECT_THROW(make_graph(3, {{0, 1}, {1, 0}}), UsageError);
  EXPECT_THROW(make_graph(3, {{0, 3}}), UsageError);
}

TEST(TopologyFile, TriangleRoundTrip) {
  const Topology t(3, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}},
                   {{0, 0}, {1.5, 0}, {0.25, 3.125}}, 4);
  std::stringstream buf;
  save_topology(t, buf);
  EXPECT_EQ(load_topology(buf), t);
}

TEST(TopologyFile, Format) {
  const Topology t(2, std::vector<Edge>{{0, 1}}, {{1, 2}, {3.5, 4}}, 15);
  std::stringstream buf;
  save_topology(t, buf);
  EXPECT_EQ(buf.str(),
            "nodes 2 range 15.000000\n"
            "pos 0 1.000000 2.000000\n"
            "pos 1 3.500000 4.000000\n"
            "edge 0 1\n");
}

TEST(TopologyFile, UnitDiskRoundTripIsExact) {
  const Topology t = connected_unit_disk(40, 100, 100, 25, 9);
  std::stringstream buf;
  save_topology(t, buf);
  EXPECT_EQ(load_topology(buf), t);
}

TEST(TopologyFile, NodeOutOfRange) {
  std::stringstream in("nodes 3 range 1\npos 0 0 0\npos 1 0 0\npos 2 0 0\nedge 0 5\n");
  try {
    load_topology(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
}

TEST(TopologyFile, EmptyEdgeSection) {
  std::stringstream in("# two nodes\nnodes 2 range 1\npos 0 0 0\npos 1 5 5\n");
  const Topology t = load_topology(in);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.edge_count(), 0u);
}

TEST(TopologyFile, RejectsMalformedInput) {
  const char* bad[] = {
      "",
      "nodes x range 1\n",
      "nodes 2 range 1\npos 0 0 0\n",
      "nodes 2 range 1\npos 0 0 0\npos 0 1 1\n",
      "nodes 2 range 1\npos 0 0 0\npos 1 1 1\nedge 1 1\n",
      "nodes 2 range 1\npos 0 0 0\npos 1 1 1\nedge 0 1\nedge 1 0\n",
      "nodes 2 range 1\npos 0 0 0\npos 1 1 1\nlink 0 1\n",
  };
  for (const char* text : bad) {
    std::stringstream in(text);
    EXPECT_THROW(load_topology(in), ParseError) << text;
  }
}
