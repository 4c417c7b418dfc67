#include <random>
#include <sstream>

#include "acat/errors.hpp"
#include "acat/metric_core.hpp"
#include "gtest/gtest.h"

namespace acat {
namespace {

MetricGraph random_connected_graph(std::mt19937_64& rng, int n, int extra) {
  std::uniform_real_distribution<double> len(0.1, 3.0);
  MetricGraph g(1);
  for (int i = 0; i < n; ++i) {
    const double c[] = {static_cast<double>(i)};
    g.add_vertex(c);
  }
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    g.add_edge(pick(rng), i, len(rng));
  }
  std::uniform_int_distribution<int> any(0, n - 1);
  for (int k = 0; k < extra; ++k) {
    int a = any(rng), b = any(rng);
    if (a != b) g.add_edge(a, b, len(rng));
  }
  return g;
}

std::vector<std::vector<double>> floyd_warshall(const MetricGraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInfinity));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (const auto& e : g.edges()) d[e.i][e.j] = d[e.j][e.i] = e.length;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

// Inserts the point as a genuine vertex by splitting its edge.
VertexId materialize(MetricGraph& g, const GraphPoint& p) {
  if (p.is_vertex()) return p.u;
  const double len = *g.edge_length(p.u, p.v);
  MetricGraph h(g.coord_dim());
  for (VertexId v = 0; v < g.vertex_count(); ++v) h.add_vertex(g.coords(v));
  for (const auto& e : g.edges()) {
    if ((e.i == p.u && e.j == p.v) || (e.i == p.v && e.j == p.u)) continue;
    h.add_edge(e.i, e.j, e.length);
  }
  const double c[] = {0.0};
  VertexId m = h.add_vertex(std::span<const double>(c, g.coord_dim()));
  h.add_edge(p.u, m, p.offset);
  h.add_edge(m, p.v, len - p.offset);
  g = std::move(h);
  return m;
}

GraphPoint random_point(std::mt19937_64& rng, const MetricGraph& g) {
  auto edges = g.edges();
  std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
  const auto& e = edges[pick(rng)];
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  return {e.i, e.j, frac(rng) * e.length};
}

TEST(MetricGraph, RejectsBadEdges) {
  MetricGraph g;
  g.add_vertex();
  g.add_vertex();
  EXPECT_THROW(g.add_edge(0, 0, 1.0), DomainError);
  EXPECT_THROW(g.add_edge(0, 1, 0.0), DomainError);
  EXPECT_THROW(g.add_edge(0, 1, -2.0), DomainError);
  EXPECT_THROW(g.add_edge(0, 5, 1.0), DomainError);
  g.add_edge(0, 1, 2.0);
  g.add_edge(1, 0, 1.5);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_DOUBLE_EQ(*g.edge_length(0, 1), 1.5);
  EXPECT_DOUBLE_EQ(*g.edge_length(1, 0), 1.5);
}

TEST(Dijkstra, MatchesFloydWarshallOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_connected_graph(rng, 25, 30);
    auto oracle = floyd_warshall(g);
    for (VertexId s = 0; s < g.vertex_count(); s += 3) {
      const PathSource src{s, 0.0};
      auto sp = dijkstra(g, {&src, 1});
      for (VertexId t = 0; t < g.vertex_count(); ++t) {
        EXPECT_NEAR(sp.dist[t], oracle[s][t], 1e-12);
        EXPECT_NEAR(graph_distance(g, s, t), oracle[s][t], 1e-12);
      }
    }
  }
}

TEST(Dijkstra, PathLengthEqualsDistance) {
  std::mt19937_64 rng(12);
  auto g = random_connected_graph(rng, 40, 60);
  const PathSource src{0, 0.0};
  auto sp = dijkstra(g, {&src, 1});
  for (VertexId t = 0; t < g.vertex_count(); ++t) {
    auto path = sp.path_to(t);
    double len = 0.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) len += *g.edge_length(path[k], path[k + 1]);
    EXPECT_NEAR(len, sp.dist[t], 1e-12);
  }
}

TEST(Dijkstra, EqualDistancesSettleSmallerIdFirst) {
  // Square 0-1-3, 0-2-3 with equal weights: parent of 3 is the smaller id.
  MetricGraph g;
  for (int i = 0; i < 4; ++i) g.add_vertex();
  g.add_edge(0, 2, 1.0);
  g.add_edge(0, 1, 1.0);
  g.add_edge(2, 3, 1.0);
  g.add_edge(1, 3, 1.0);
  const PathSource src{0, 0.0};
  auto sp = dijkstra(g, {&src, 1});
  EXPECT_EQ(sp.parent[3], 1u);
}

TEST(GraphDistance, Properties) {
  std::mt19937_64 rng(13);
  auto g = random_connected_graph(rng, 30, 20);
  std::uniform_int_distribution<VertexId> pick(0, 29);
  for (int k = 0; k < 200; ++k) {
    VertexId a = pick(rng), b = pick(rng), c = pick(rng);
    const double ab = graph_distance(g, a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_EQ(graph_distance(g, a, a), 0.0);
    EXPECT_NEAR(ab, graph_distance(g, b, a), 1e-12);
    EXPECT_LE(ab, graph_distance(g, a, c) + graph_distance(g, c, b) + kTolerance);
  }
}

TEST(GraphDistance, DisconnectedThrows) {
  MetricGraph g;
  g.add_vertex();
  g.add_vertex();
  EXPECT_FALSE(g.connected());
  EXPECT_THROW(graph_distance(g, 0, 1), UnreachableError);
}

TEST(RefineGraph, PreservesVertexDistances) {
  std::mt19937_64 rng(14);
  auto g = random_connected_graph(rng, 15, 15);
  auto fine = refine_graph(g, 0.25);
  EXPECT_LE(fine.resolution(), 0.25 + 1e-12);
  EXPECT_GT(fine.vertex_count(), g.vertex_count());
  for (VertexId a = 0; a < g.vertex_count(); ++a)
    for (VertexId b = 0; b < g.vertex_count(); ++b)
      EXPECT_NEAR(graph_distance(fine, a, b), graph_distance(g, a, b), 1e-9);
}

TEST(RefineGraph, InterpolatesCoordinates) {
  MetricGraph g(2);
  const double a[] = {0.0, 0.0}, b[] = {4.0, 2.0};
  g.add_vertex(a);
  g.add_vertex(b);
  g.add_edge(0, 1, 4.0);
  auto fine = refine_graph(g, 1.0);
  ASSERT_EQ(fine.vertex_count(), 5u);
  EXPECT_DOUBLE_EQ(fine.coords(2)[0], 1.0);
  EXPECT_DOUBLE_EQ(fine.coords(2)[1], 0.5);
}

TEST(GraphSpace, EdgePointDistancesMatchSplitGraph) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = random_connected_graph(rng, 12, 10);
    const GraphPoint p = random_point(rng, g);
    GraphPoint q = random_point(rng, g);
    if (trial % 5 == 0) q = {p.u, p.v, p.offset * 0.3};

    GraphSpace space(std::make_shared<MetricGraph>(g), "g");
    const double d = space.distance(space.point(p), space.point(q));

    MetricGraph split = g;
    VertexId mp = materialize(split, p);
    // q's edge might have been replaced when p shares it; express q on the new pieces.
    GraphPoint q2 = q;
    if (!q.is_vertex() && ((q.u == p.u && q.v == p.v) || (q.u == p.v && q.v == p.u))) {
      const double qpos = q.u == p.u ? q.offset : *g.edge_length(p.u, p.v) - q.offset;
      q2 = qpos <= p.offset ? GraphPoint{p.u, mp, qpos} : GraphPoint{mp, p.v, qpos - p.offset};
    }
    VertexId mq = materialize(split, q2);
    EXPECT_NEAR(d, graph_distance(split, mp, mq), 1e-12) << "trial " << trial;
  }
}

TEST(GraphSpace, GeodesicPointsLieOnGeodesic) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = std::make_shared<MetricGraph>(random_connected_graph(rng, 20, 15));
    GraphSpace space(g, "g");
    auto a = space.point(random_point(rng, *g));
    auto b = space.point(random_point(rng, *g));
    const double d = space.distance(a, b);
    const double ts[] = {0.0, 0.2, 0.5, 0.77, 1.0};
    auto pts = space.geodesic_points(a, b, ts);
    for (std::size_t k = 0; k < 5; ++k) {
      EXPECT_NEAR(space.distance(a, pts[k]), ts[k] * d, 1e-9);
      EXPECT_NEAR(space.distance(pts[k], b), (1 - ts[k]) * d, 1e-9);
    }
  }
}

TEST(GraphSpace, RejectsForeignPoints) {
  auto g = std::make_shared<MetricGraph>();
  g->add_vertex();
  GraphSpace space(g, "g");
  EuclideanPlane plane;
  EXPECT_THROW(space.distance(space.vertex(0), plane.point(0, 0)), DomainError);
  MetricPoint wrong{"g", GraphPoint{0, 3, 0.1}};
  EXPECT_THROW(space.distance(space.vertex(0), wrong), DomainError);
}

TEST(PolylineLength, SumsSpaceDistances) {
  EuclideanPlane plane;
  std::vector<MetricPoint> path = {plane.point(0, 0), plane.point(3, 4), plane.point(3, 0)};
  EXPECT_DOUBLE_EQ(polyline_length(plane, path), 9.0);
  path.push_back({"other", Vec2{}});
  EXPECT_THROW(polyline_length(plane, path), DomainError);
}

TEST(GraphText, RoundTrip) {
  std::mt19937_64 rng(17);
  auto g = random_connected_graph(rng, 10, 8);
  std::stringstream ss;
  write_graph(ss, g);
  auto h = read_graph(ss);
  ASSERT_EQ(h.vertex_count(), g.vertex_count());
  auto eg = g.edges(), eh = h.edges();
  ASSERT_EQ(eg.size(), eh.size());
  for (std::size_t k = 0; k < eg.size(); ++k) {
    EXPECT_EQ(eg[k].i, eh[k].i);
    EXPECT_EQ(eg[k].length, eh[k].length);
  }
  std::stringstream bad("v 0 1\nx 1 2\n");
  EXPECT_THROW(read_graph(bad), UsageError);
}

}  // namespace
}  // namespace acat
