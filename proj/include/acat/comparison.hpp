#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "acat/metric_core.hpp"

namespace acat {

// Side lengths of a triangle PQR: a = |QR|, b = |PR|, c = |PQ|.
struct TriangleSides {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

// Planar realisation with P at the origin, Q on the positive first axis and
// R in the closed upper half-plane.
struct ComparisonTriangle {
  TriangleSides sides;
  Vec2 P, Q, R;
};

enum class Side { PQ, QR, RP };

// Vertices x1..x4 in cyclic order.
struct ComparisonQuadrilateral {
  std::array<Vec2, 4> vertices;
  bool convex = false;
  // True when the hinge along x1x3 was reflex and had to be straightened.
  bool unbent = false;
  double hinged_diagonal_13 = 0.0;
  double hinged_diagonal_24 = 0.0;
};

struct DefectWitness {
  Side side_p = Side::PQ;
  double t_p = 0.0;
  Side side_q = Side::QR;
  double t_q = 0.0;
};

struct DefectReport {
  double delta = 0.0;
  DefectWitness witness;
  std::size_t samples = 0;
};

struct MedianCase1 {
  double h = 0.0;
  double h_prime = 0.0;
  double gap = 0.0;         // h^2 - h'^2 from the two cosine-law expressions
  double gap_closed = 0.0;  // (p(b^2-(a-c)^2) + q(a^2-(b-c)^2)) / (2c)
};

struct TailExtension {
  double h = 0.0;
  double h_prime_plus_r = 0.0;
  bool ok = false;
  double reduction_residual = 0.0;  // (alpha-beta)^2 - gamma^2, nonpositive for valid input
};

// Slack allowed in triangle inequalities, relative to the largest side.
inline constexpr double kTriangleSlack = 1e-12;

bool satisfies_triangle_inequality(double a, double b, double c);

ComparisonTriangle comparison_triangle(const TriangleSides& sides);
Vec2 comparison_point(const ComparisonTriangle& tri, Side side, double t);

// Largest sampled d(p,q) - |p̄q̄| over grid x grid parameter pairs on each pair
// of distinct sides, clamped at 0. Vertices map x -> P, y -> Q, z -> R.
DefectReport triangle_defect(const GeodesicSpace& space, const MetricPoint& x, const MetricPoint& y,
                             const MetricPoint& z, int grid = 64);

ComparisonQuadrilateral quadrilateral_comparison(double d12, double d23, double d34, double d41,
                                                 double d13);

// Four-point test for the cyclic order (x1,x2,x3,x4).
double four_point_defect(double d12, double d13, double d14, double d23, double d24, double d34);

// dpr^2 + dqr^2 - 2 dmr^2 - dpq^2 / 2.
double cn_inequality_residual(double dpr, double dqr, double dmr, double dpq);

MedianCase1 median_case1(double a, double b, double c, double p, double q);
TailExtension tail_extension_check(double alpha, double beta, double gamma, double r);

const char* side_name(Side side);
std::string defect_report_json(const DefectReport& report);

}  // namespace acat
