#include <cmath>
#include <random>

#include "acat/comparison.hpp"
#include "acat/errors.hpp"
#include "gtest/gtest.h"

namespace acat {
namespace {

std::shared_ptr<MetricGraph> cycle_graph(int n) {
  auto g = std::make_shared<MetricGraph>();
  for (int i = 0; i < n; ++i) g->add_vertex();
  for (int i = 0; i < n; ++i) g->add_edge(i, (i + 1) % n, 1.0);
  return g;
}

// Star with `legs` unit legs; vertex 0 is the centre.
std::shared_ptr<MetricGraph> star_graph(int legs) {
  auto g = std::make_shared<MetricGraph>();
  g->add_vertex();
  for (int i = 1; i <= legs; ++i) {
    g->add_vertex();
    g->add_edge(0, i, 1.0);
  }
  return g;
}

TriangleSides random_sides(std::mt19937_64& rng) {
  // Sides of a random planar triangle, which always satisfy the inequality.
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  Vec2 p{u(rng), u(rng)}, q{u(rng), u(rng)}, r{u(rng), u(rng)};
  return {distance(q, r), distance(p, r), distance(p, q)};
}

TEST(ComparisonTriangle, PythagoreanPlacement) {
  auto t = comparison_triangle({5, 4, 3});
  EXPECT_DOUBLE_EQ(t.P.x, 0.0);
  EXPECT_DOUBLE_EQ(t.Q.x, 3.0);
  EXPECT_DOUBLE_EQ(t.Q.y, 0.0);
  EXPECT_NEAR(t.R.x, 0.0, 1e-15);
  EXPECT_NEAR(t.R.y, 4.0, 1e-15);
}

TEST(ComparisonTriangle, DegenerateIsCollinear) {
  auto t = comparison_triangle({1, 1, 2});
  EXPECT_DOUBLE_EQ(t.R.x, 1.0);
  EXPECT_DOUBLE_EQ(t.R.y, 0.0);
}

TEST(ComparisonTriangle, RoundTripRandom) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 100; ++k) {
    auto s = random_sides(rng);
    auto t = comparison_triangle(s);
    EXPECT_NEAR(distance(t.Q, t.R), s.a, 1e-12);
    EXPECT_NEAR(distance(t.P, t.R), s.b, 1e-12);
    EXPECT_NEAR(distance(t.P, t.Q), s.c, 1e-12);
    EXPECT_GE(t.R.y, 0.0);
  }
}

TEST(ComparisonTriangle, RejectsViolations) {
  EXPECT_THROW(comparison_triangle({1, 1, 3}), DomainError);
  EXPECT_THROW(comparison_triangle({-1, 1, 1}), DomainError);
  EXPECT_NO_THROW(comparison_triangle({1, 1, 2 + 1e-13}));
}

TEST(ComparisonPoint, Endpoints) {
  auto t = comparison_triangle({5, 4, 3});
  EXPECT_EQ(comparison_point(t, Side::PQ, 0.0), t.P);
  auto mid = comparison_point(t, Side::PQ, 0.5);
  EXPECT_DOUBLE_EQ(mid.x, 1.5);
  EXPECT_DOUBLE_EQ(mid.y, 0.0);
  EXPECT_EQ(comparison_point(t, Side::QR, 1.0), t.R);
  EXPECT_THROW(comparison_point(t, Side::RP, 1.5), DomainError);
}

TEST(TriangleDefect, EuclideanIsZero) {
  EuclideanPlane plane;
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int grid : {1, 2, 5, 17}) {
    for (int k = 0; k < 10; ++k) {
      auto r = triangle_defect(plane, plane.point(u(rng), u(rng)), plane.point(u(rng), u(rng)),
                               plane.point(u(rng), u(rng)), grid);
      EXPECT_NEAR(r.delta, 0.0, 1e-9);
      EXPECT_EQ(r.samples, static_cast<std::size_t>(3 * grid * grid));
    }
  }
}

TEST(TriangleDefect, TripodIsZero) {
  GraphSpace tree(star_graph(3), "tripod");
  auto r = triangle_defect(tree, tree.vertex(1), tree.vertex(2), tree.vertex(3), 33);
  EXPECT_NEAR(r.delta, 0.0, 1e-12);
}

TEST(TriangleDefect, SixCycle) {
  GraphSpace cyc(cycle_graph(6), "c6");
  auto r = triangle_defect(cyc, cyc.vertex(0), cyc.vertex(2), cyc.vertex(4), 3);
  // Vertex 0 against vertex 3 (midpoint of the opposite side): 3 versus sqrt(3).
  EXPECT_NEAR(r.delta, 3.0 - std::sqrt(3.0), 1e-12);
  EXPECT_DOUBLE_EQ(r.witness.t_p, 0.0);
  EXPECT_DOUBLE_EQ(r.witness.t_q, 0.5);
  // Midpoints of two sides: cycle distance 2, comparison distance 1.
  const double half[] = {0.5};
  auto p = cyc.geodesic_points(cyc.vertex(0), cyc.vertex(2), half)[0];
  auto q = cyc.geodesic_points(cyc.vertex(2), cyc.vertex(4), half)[0];
  EXPECT_NEAR(cyc.distance(p, q), 2.0, 1e-12);
  EXPECT_GE(r.delta, 1.0);
  auto fine = triangle_defect(cyc, cyc.vertex(0), cyc.vertex(2), cyc.vertex(4), 64);
  EXPECT_GE(fine.delta, 1.0 - 1e-12);
}

TEST(TriangleDefect, WitnessReproducesDelta) {
  GraphSpace cyc(cycle_graph(7), "c7");
  auto r = triangle_defect(cyc, cyc.vertex(0), cyc.vertex(2), cyc.vertex(5), 11);
  const double d01 = cyc.distance(cyc.vertex(0), cyc.vertex(2));
  const double d12 = cyc.distance(cyc.vertex(2), cyc.vertex(5));
  const double d20 = cyc.distance(cyc.vertex(5), cyc.vertex(0));
  auto tri = comparison_triangle({d12, d20, d01});
  auto side_pts = [&](Side s) -> std::pair<MetricPoint, MetricPoint> {
    if (s == Side::PQ) return {cyc.vertex(0), cyc.vertex(2)};
    if (s == Side::QR) return {cyc.vertex(2), cyc.vertex(5)};
    return {cyc.vertex(5), cyc.vertex(0)};
  };
  auto [a1, b1] = side_pts(r.witness.side_p);
  auto [a2, b2] = side_pts(r.witness.side_q);
  const double tp[] = {r.witness.t_p}, tq[] = {r.witness.t_q};
  auto p = cyc.geodesic_points(a1, b1, tp)[0];
  auto q = cyc.geodesic_points(a2, b2, tq)[0];
  const double defect = cyc.distance(p, q) - distance(comparison_point(tri, r.witness.side_p, tp[0]),
                                                      comparison_point(tri, r.witness.side_q, tq[0]));
  EXPECT_NEAR(defect, r.delta, 1e-12);
}

TEST(TriangleDefect, JsonFields) {
  DefectReport r{0.5, {Side::QR, 0.25, Side::RP, 1.0}, 12};
  const auto s = defect_report_json(r);
  EXPECT_NE(s.find("\"delta\":0.5"), std::string::npos);
  EXPECT_NE(s.find("\"samples\":12"), std::string::npos);
  EXPECT_NE(s.find("\"side_p\":\"QR\""), std::string::npos);
}

TEST(Quadrilateral, UnitSquare) {
  auto q = quadrilateral_comparison(1, 1, 1, 1, std::sqrt(2.0));
  EXPECT_TRUE(q.convex);
  EXPECT_FALSE(q.unbent);
  EXPECT_NEAR(distance(q.vertices[1], q.vertices[3]), std::sqrt(2.0), 1e-12);
}

TEST(Quadrilateral, Collinear) {
  auto q = quadrilateral_comparison(1, 1, 1, 1, 2);
  EXPECT_TRUE(q.convex);
  EXPECT_NEAR(distance(q.vertices[0], q.vertices[2]), 2.0, 1e-12);
  EXPECT_NEAR(distance(q.vertices[1], q.vertices[3]), 0.0, 1e-12);
}

TEST(Quadrilateral, ReflexHingeIsUnbent) {
  // x1 sits inside triangle x2 x3 x4.
  const Vec2 x1{0, 0.2}, x2{-2, 0}, x3{0, 3}, x4{2, 0};
  auto q = quadrilateral_comparison(distance(x1, x2), distance(x2, x3), distance(x3, x4), distance(x4, x1),
                                    distance(x1, x3));
  EXPECT_TRUE(q.unbent);
  EXPECT_TRUE(q.convex);
  EXPECT_NEAR(distance(q.vertices[1], q.vertices[3]), distance(x1, x2) + distance(x1, x4), 1e-12);
  EXPECT_GE(distance(q.vertices[0], q.vertices[2]), distance(x1, x3) - 1e-12);
}

TEST(Quadrilateral, RandomRoundTripAndMonotone) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  int unbent = 0;
  for (int k = 0; k < 200; ++k) {
    Vec2 x[4];
    for (auto& p : x) p = {u(rng), u(rng)};
    const double d12 = distance(x[0], x[1]), d23 = distance(x[1], x[2]), d34 = distance(x[2], x[3]),
                 d41 = distance(x[3], x[0]), d13 = distance(x[0], x[2]);
    auto q = quadrilateral_comparison(d12, d23, d34, d41, d13);
    const auto& v = q.vertices;
    EXPECT_NEAR(distance(v[0], v[1]), d12, 1e-12);
    EXPECT_NEAR(distance(v[1], v[2]), d23, 1e-12);
    EXPECT_NEAR(distance(v[2], v[3]), d34, 1e-12);
    EXPECT_NEAR(distance(v[3], v[0]), d41, 1e-12);
    EXPECT_TRUE(q.convex) << k;
    EXPECT_GE(distance(v[0], v[2]), d13 - 1e-12);
    EXPECT_GE(distance(v[1], v[3]), q.hinged_diagonal_24 - 1e-12);
    if (!q.unbent) EXPECT_NEAR(distance(v[0], v[2]), d13, 1e-12);
    unbent += q.unbent;
  }
  EXPECT_GT(unbent, 0);
}

TEST(FourPoint, EuclideanIsZero) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 200; ++k) {
    Vec2 x[4];
    for (auto& p : x) p = {u(rng), u(rng)};
    auto d = [&](int i, int j) { return distance(x[i], x[j]); };
    EXPECT_NEAR(four_point_defect(d(0, 1), d(0, 2), d(0, 3), d(1, 2), d(1, 3), d(2, 3)), 0.0, 1e-9);
  }
}

TEST(FourPoint, PodTipsAreZero) {
  GraphSpace pod(star_graph(4), "pod");
  auto d = [&](int i, int j) { return pod.distance(pod.vertex(i), pod.vertex(j)); };
  EXPECT_NEAR(four_point_defect(d(1, 2), d(1, 3), d(1, 4), d(2, 3), d(2, 4), d(3, 4)), 0.0, 1e-12);
}

TEST(FourPoint, SixCyclePositive) {
  GraphSpace cyc(cycle_graph(6), "c6");
  const int v[] = {0, 1, 3, 4};
  auto d = [&](int i, int j) { return cyc.distance(cyc.vertex(v[i]), cyc.vertex(v[j])); };
  EXPECT_NEAR(four_point_defect(d(0, 1), d(0, 2), d(0, 3), d(1, 2), d(1, 3), d(2, 3)), 2.0, 1e-12);
}

TEST(FourPoint, RejectsInconsistent) {
  EXPECT_THROW(four_point_defect(1, 1, 1, 1, 1, 5), DomainError);
}

TEST(CnResidual, Examples) {
  EXPECT_NEAR(cn_inequality_residual(std::sqrt(2.0), std::sqrt(2.0), 1.0, 2.0), 0.0, 1e-12);
  GraphSpace tri(star_graph(3), "tripod");
  auto d = [&](int i, int j) { return tri.distance(tri.vertex(i), tri.vertex(j)); };
  EXPECT_NEAR(cn_inequality_residual(d(1, 3), d(2, 3), d(0, 3), d(1, 2)), 4.0, 1e-12);
  GraphSpace cyc(cycle_graph(6), "c6");
  auto c = [&](int i, int j) { return cyc.distance(cyc.vertex(i), cyc.vertex(j)); };
  EXPECT_NEAR(cn_inequality_residual(c(0, 4), c(2, 4), c(1, 4), c(0, 2)), -12.0, 1e-12);
  EXPECT_THROW(cn_inequality_residual(1, 1, -1, 1), DomainError);
  EXPECT_THROW(cn_inequality_residual(1, 1, 1, std::nan("")), DomainError);
}

TEST(CnResidual, NonnegativeOnEuclideanAndTrees) {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 500; ++k) {
    Vec2 p{u(rng), u(rng)}, q{u(rng), u(rng)}, r{u(rng), u(rng)};
    Vec2 m = lerp(p, q, 0.5);
    EXPECT_GE(cn_inequality_residual(distance(p, r), distance(q, r), distance(m, r), distance(p, q)), -1e-9);
  }
  // Random points on a 5-pod with leg length 3 (refined so midpoints exist).
  auto g = std::make_shared<MetricGraph>(refine_graph(*star_graph(5), 0.25));
  GraphSpace tree(g, "tree");
  std::uniform_int_distribution<VertexId> pick(0, g->vertex_count() - 1);
  const double half[] = {0.5};
  for (int k = 0; k < 300; ++k) {
    auto p = tree.vertex(pick(rng)), q = tree.vertex(pick(rng)), r = tree.vertex(pick(rng));
    auto m = tree.geodesic_points(p, q, half)[0];
    EXPECT_GE(cn_inequality_residual(tree.distance(p, r), tree.distance(q, r), tree.distance(m, r),
                                     tree.distance(p, q)),
              -1e-9);
  }
}

// Builds the two planar figures explicitly and measures both medians.
double planar_gap(double a, double b, double c, double p, double q) {
  auto inner = comparison_triangle({c, b, a});  // P = A', Q = B', R = C'
  const double x = (c + q - p) / 2.0;
  const Vec2 m = lerp(inner.Q, inner.R, c == 0.0 ? 0.0 : x / c);
  const double hp = distance(inner.P, m);
  auto outer = comparison_triangle({p + c + q, b + q, a + p});  // P = A, Q = B, R = C
  const double h = distance(outer.P, lerp(outer.Q, outer.R, 0.5));
  return h * h - hp * hp;
}

TEST(MedianCase1, NoTailsIsApollonius) {
  auto r = median_case1(3, 4, 5, 0, 0);
  EXPECT_NEAR(r.gap, 0.0, 1e-12);
  EXPECT_NEAR(r.h, std::sqrt(2 * 9 + 2 * 16 - 25) / 2, 1e-12);
  EXPECT_NEAR(r.h_prime, r.h, 1e-12);
}

TEST(MedianCase1, WorkedExample) {
  auto r = median_case1(3, 4, 5, 1, 0);
  // h^2 = 7 (median of the 4-4-6 triangle), h'^2 = 5.8.
  EXPECT_NEAR(r.h * r.h, 7.0, 1e-12);
  EXPECT_NEAR(r.h_prime * r.h_prime, 5.8, 1e-12);
  EXPECT_NEAR(r.gap, 1.2, 1e-12);
  EXPECT_NEAR(r.gap_closed, 1.2, 1e-12);
  EXPECT_NEAR(planar_gap(3, 4, 5, 1, 0), 1.2, 1e-12);
}

TEST(MedianCase1, RandomAgainstPlanarOracle) {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    auto s = random_sides(rng);
    if (s.c < 1e-3) continue;
    const double p = 4.0 * u(rng);
    const double q = std::clamp(p + (2 * u(rng) - 1) * s.c, 0.0, p + s.c);
    auto r = median_case1(s.a, s.b, s.c, p, q);
    const double scale = std::max(1.0, r.h * r.h);
    EXPECT_GE(r.gap, -1e-9 * scale);
    EXPECT_NEAR(r.gap, planar_gap(s.a, s.b, s.c, p, q), 1e-9 * scale);
    EXPECT_NEAR(r.gap, r.gap_closed, 1e-9 * scale);
  }
}

TEST(MedianCase1, Errors) {
  EXPECT_THROW(median_case1(1, 1, 0, 1, 0), DomainError);
  EXPECT_THROW(median_case1(1, 1, 3, 0, 0), DomainError);
  EXPECT_THROW(median_case1(3, 4, 5, 0, 6), DomainError);
}

TEST(TailExtension, Examples) {
  auto z = tail_extension_check(3, 4, 5, 0);
  EXPECT_TRUE(z.ok);
  EXPECT_NEAR(z.h, z.h_prime_plus_r, 1e-12);
  auto iso = tail_extension_check(2, 2, 3, 1);
  EXPECT_TRUE(iso.ok);
  EXPECT_LE(iso.reduction_residual, 0.0);
  EXPECT_THROW(tail_extension_check(1, 1, 5, 1), DomainError);
}

TEST(TailExtension, RandomAlwaysOk) {
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int k = 0; k < 1000; ++k) {
    auto s = random_sides(rng);
    auto r = tail_extension_check(s.a, s.b, s.c, u(rng));
    EXPECT_TRUE(r.ok);
    EXPECT_LE(r.reduction_residual, 1e-9);
  }
}

}  // namespace
}  // namespace acat
