#include <cmath>
#include <random>

#include "acat/errors.hpp"
#include "acat/tree_of_spaces.hpp"
#include "gtest/gtest.h"
#include "json.hpp"

namespace acat {
namespace {

MetricGraph cycle(int n) {
  MetricGraph g;
  for (int i = 0; i < n; ++i) g.add_vertex();
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n, 1.0);
  return g;
}

MetricGraph path(int n) {
  MetricGraph g;
  for (int i = 0; i < n; ++i) g.add_vertex();
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1, 1.0);
  return g;
}

MetricGraph point() {
  MetricGraph g;
  g.add_vertex();
  return g;
}

GluingSpec six_cycles() { return {cycle(6), cycle(6), path(2), {0, 1}, {3, 4}}; }

std::vector<VertexId> block_vertices(const TreeOfSpaces& z, bool interior_only) {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < z.owner.size(); ++v)
    if (z.owner[v] >= 0 && (!interior_only || z.blocks[z.owner[v]].depth < z.radius)) out.push_back(v);
  return out;
}

TEST(Amalgam, PointSpacesGiveSubdividedTree) {
  const GluingSpec spec{point(), point(), point(), {0}, {0}};
  const TreeOfSpaces z = build_amalgam_space(spec, 2, 2, 3);
  EXPECT_EQ(z.blocks.size(), 7u);
  EXPECT_EQ(z.graph.vertex_count(), 7u + 6u * 2u);
  EXPECT_EQ(z.graph.edge_count(), 18u);
  EXPECT_TRUE(z.graph.connected());
  EXPECT_EQ(z.blocks[1].type, BlockType::X2);
  EXPECT_EQ(z.blocks[3].type, BlockType::X1);
  // Point spaces: distance = tree distance.
  for (std::size_t a = 0; a < z.blocks.size(); ++a)
    for (std::size_t b = 0; b < z.blocks.size(); ++b) {
      const double tree = static_cast<double>(z.block_path(a, b).size() - 1);
      EXPECT_NEAR(graph_distance(z.graph, z.blocks[a].vertices[0], z.blocks[b].vertices[0]), tree, 1e-12);
      const auto rep = geodesic_decomposition_check(z, spec, z.blocks[a].vertices[0], z.blocks[b].vertices[0]);
      EXPECT_TRUE(rep.ok);
    }
}

TEST(Amalgam, PathsGluedAtMidpoint) {
  const GluingSpec spec{path(5), path(5), point(), {2}, {2}};
  const TreeOfSpaces z = build_amalgam_space(spec, 1, 1, 4);
  ASSERT_EQ(z.blocks.size(), 2u);
  for (VertexId i = 0; i < 5; ++i)
    for (VertexId j = 0; j < 5; ++j) {
      const double want = std::abs(static_cast<double>(i) - 2.0) + 1.0 + std::abs(static_cast<double>(j) - 2.0);
      EXPECT_NEAR(graph_distance(z.graph, z.blocks[0].vertices[i], z.blocks[1].vertices[j]), want, 1e-12);
    }
}

TEST(Amalgam, MetricAxiomsOnSampledTriples) {
  const GluingSpec spec = six_cycles();
  const TreeOfSpaces z = build_amalgam_space(spec, 2, 2, 2);
  EXPECT_TRUE(z.graph.connected());
  const std::vector<double> d = all_pairs(z.graph);
  const std::size_t n = z.graph.vertex_count();
  std::mt19937_64 rng(301);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
    EXPECT_LE(d[a * n + c], d[a * n + b] + d[b * n + c] + 1e-9);
    EXPECT_EQ(d[a * n + b], d[b * n + a]);
    EXPECT_EQ(d[a * n + a], 0.0);
    if (a != b) EXPECT_GT(d[a * n + b], 0.0);
  }
}

TEST(Amalgam, BlocksKeepTheirOwnMetric) {
  const GluingSpec spec = six_cycles();
  for (int steps : {1, 2, 5}) {
    const TreeOfSpaces z = build_amalgam_space(spec, 2, 2, steps);
    const std::vector<double> own = all_pairs(spec.x1);
    for (const Block& b : z.blocks)
      for (VertexId i = 0; i < 6; ++i)
        for (VertexId j = 0; j < 6; ++j)
          EXPECT_NEAR(graph_distance(z.graph, b.vertices[i], b.vertices[j]), own[i * 6 + j], 2.0 / steps);
  }
}

TEST(Amalgam, DecompositionMatchesDijkstra) {
  const GluingSpec spec = six_cycles();
  const TreeOfSpaces z = build_amalgam_space(spec, 2, 2, 3);
  const std::vector<VertexId> pts = block_vertices(z, false);
  std::mt19937_64 rng(302);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  for (int t = 0; t < 300; ++t) {
    const auto rep = geodesic_decomposition_check(z, spec, pts[pick(rng)], pts[pick(rng)]);
    EXPECT_TRUE(rep.ok) << rep.dijkstra << " vs " << rep.decomposition;
  }
  // Endpoint on the interface: the first leg vanishes.
  const VertexId iface = z.strips[0].levels.front()[0];
  const auto rep = geodesic_decomposition_check(z, spec, iface, z.blocks[1].vertices[0]);
  EXPECT_TRUE(rep.ok);
  EXPECT_EQ(rep.blocks.size(), 2u);
  EXPECT_THROW(geodesic_decomposition_check(z, spec, z.strips[0].levels[1][0], iface), DomainError);
}

TEST(Amalgam, HnnMode) {
  const GluingSpec spec{cycle(6), MetricGraph{}, path(2), {0, 1}, {3, 4}};
  const TreeOfSpaces z = build_amalgam_space(spec, 2, 2, 2, GluingMode::Hnn);
  for (const Block& b : z.blocks) EXPECT_EQ(b.type, BlockType::X1);
  EXPECT_TRUE(z.graph.connected());
  const std::vector<VertexId> pts = block_vertices(z, false);
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  for (int t = 0; t < 100; ++t) EXPECT_TRUE(geodesic_decomposition_check(z, spec, pts[pick(rng)], pts[pick(rng)]).ok);
}

TEST(Amalgam, RejectsBadEmbeddings) {
  // 0 and 2 are at distance 2 in the 6-cycle, not 1.
  GluingSpec spec{cycle(6), cycle(6), path(2), {0, 2}, {0, 1}};
  EXPECT_THROW(build_amalgam_space(spec, 2, 1, 1), DomainError);
  spec.embed1 = {0, 0};
  EXPECT_THROW(build_amalgam_space(spec, 2, 1, 1), DomainError);
  spec.embed1 = {0, 9};
  EXPECT_THROW(build_amalgam_space(spec, 2, 1, 1), DomainError);
  spec.embed1 = {0, 1};
  EXPECT_THROW(build_amalgam_space(spec, 0, 1, 1), DomainError);
  EXPECT_THROW(build_amalgam_space(spec, 2, 1, 0), DomainError);
}

TEST(FiniteEdge, SingletonOrbitIsTheSameSpace) {
  const std::vector<VertexId> o{2};
  const auto f = build_finite_edge_amalgam(cycle(6), cycle(5), o, o, 2, 2);
  EXPECT_EQ(measured_distortion(f), 0.0);
  EXPECT_EQ(f.epsilon, 2.0);
  const std::vector<VertexId> rep{4, 4};
  const auto g = build_finite_edge_amalgam(cycle(6), cycle(6), rep, rep, 2, 2);
  EXPECT_EQ(g.diameter1, 0.0);
  EXPECT_LE(measured_distortion(g), 2.0);
}

TEST(FiniteEdge, SixCyclesTwoPointOrbits) {
  const std::vector<VertexId> o{0, 3};
  const auto f = build_finite_edge_amalgam(cycle(6), cycle(6), o, o, 2, 2);
  EXPECT_EQ(f.diameter1, 3.0);
  EXPECT_EQ(f.diameter2, 3.0);
  EXPECT_EQ(f.epsilon, 8.0);
  const double dist = measured_distortion(f);
  EXPECT_LE(dist, f.epsilon);
  // 3 -> 3 across one edge: 1 in Z, 3 + 1 + 3 in Z~.
  EXPECT_EQ(dist, 6.0);
}

TEST(FiniteEdge, AsymmetricOrbitsNeedTwiceTheLargerDiameter) {
  // X1 orbit of diameter 3, X2 orbit a repeated vertex: two X1 blocks two
  // steps apart see 2 in Z and 8 in Z~.
  const std::vector<VertexId> o1{0, 3}, o2{0, 0};
  const auto f = build_finite_edge_amalgam(cycle(6), cycle(6), o1, o2, 1, 2);
  const double dist = measured_distortion(f);
  EXPECT_EQ(dist, 6.0);
  EXPECT_GT(dist, f.diameter1 + f.diameter2 + 2.0);
  EXPECT_LE(dist, f.epsilon);
}

TEST(FiniteEdge, RandomOrbitsStayWithinBudget) {
  std::mt19937_64 rng(304);
  for (int t = 0; t < 20; ++t) {
    const int n1 = 4 + t % 5, n2 = 3 + t % 4;
    std::uniform_int_distribution<VertexId> p1(0, n1 - 1), p2(0, n2 - 1);
    std::vector<VertexId> o1, o2;
    for (int k = 0; k < 1 + t % 3; ++k) {
      o1.push_back(p1(rng));
      o2.push_back(p2(rng));
    }
    const auto f = build_finite_edge_amalgam(cycle(n1), path(n2), o1, o2, 2, 2);
    EXPECT_LE(measured_distortion(f), f.epsilon);
  }
}

TEST(FiniteEdge, Errors) {
  const std::vector<VertexId> a{0, 1}, b{0}, bad{7};
  EXPECT_THROW(build_finite_edge_amalgam(cycle(6), cycle(6), a, b, 2, 1), DomainError);
  EXPECT_THROW(build_finite_edge_amalgam(cycle(6), cycle(6), bad, b, 2, 1), DomainError);
  EXPECT_THROW(build_finite_edge_amalgam(cycle(6), cycle(6), b, bad, 2, 1), DomainError);
}

TEST(Amalgam, BlockMapJson) {
  const TreeOfSpaces z = build_amalgam_space(six_cycles(), 2, 1, 2);
  const auto j = nlohmann::json::parse(block_map_json(z));
  EXPECT_EQ(j["blocks"].size(), 3u);
  EXPECT_EQ(j["blocks"][1]["type"], "X2");
  EXPECT_EQ(j["blocks"][1]["parent"], 0);
  EXPECT_EQ(j["strips"].size(), 2u);
  EXPECT_EQ(j["strips"][0]["interface0"].size(), 2u);
}

}  // namespace
}  // namespace acat
