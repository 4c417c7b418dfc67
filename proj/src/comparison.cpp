#include "acat/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "acat/errors.hpp"
#include "json.hpp"

namespace acat {

bool satisfies_triangle_inequality(double a, double b, double c) {
  if (!(a >= 0.0 && b >= 0.0 && c >= 0.0)) return false;
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) return false;
  const double slack = kTriangleSlack * std::max({1.0, a, b, c});
  return a <= b + c + slack && b <= a + c + slack && c <= a + b + slack;
}

ComparisonTriangle comparison_triangle(const TriangleSides& s) {
  if (!satisfies_triangle_inequality(s.a, s.b, s.c)) {
    throw DomainError("side lengths violate the triangle inequality");
  }
  ComparisonTriangle t;
  t.sides = s;
  t.P = {0.0, 0.0};
  t.Q = {s.c, 0.0};
  if (s.c == 0.0) {
    t.R = {s.b, 0.0};
    return t;
  }
  const double x = std::clamp((s.b * s.b + s.c * s.c - s.a * s.a) / (2.0 * s.c), -s.b, s.b);
  t.R = {x, std::sqrt(std::max(0.0, (s.b - x) * (s.b + x)))};
  return t;
}

Vec2 comparison_point(const ComparisonTriangle& tri, Side side, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("comparison parameter outside [0,1]");
  switch (side) {
    case Side::PQ: return lerp(tri.P, tri.Q, t);
    case Side::QR: return lerp(tri.Q, tri.R, t);
    case Side::RP: return lerp(tri.R, tri.P, t);
  }
  throw DomainError("unknown side");
}

const char* side_name(Side side) {
  switch (side) {
    case Side::PQ: return "PQ";
    case Side::QR: return "QR";
    case Side::RP: return "RP";
  }
  return "?";
}

DefectReport triangle_defect(const GeodesicSpace& space, const MetricPoint& x, const MetricPoint& y,
                             const MetricPoint& z, int grid) {
  if (grid < 1) throw DomainError("defect grid must be positive");
  std::vector<double> ts(grid);
  for (int i = 0; i < grid; ++i) ts[i] = grid == 1 ? 0.0 : static_cast<double>(i) / (grid - 1);

  const double dxy = space.distance(x, y);
  const double dyz = space.distance(y, z);
  const double dzx = space.distance(z, x);
  const auto tri = comparison_triangle({dyz, dzx, dxy});

  const std::array<Side, 3> sides = {Side::PQ, Side::QR, Side::RP};
  std::array<std::vector<MetricPoint>, 3> pts = {space.geodesic_points(x, y, ts),
                                                 space.geodesic_points(y, z, ts),
                                                 space.geodesic_points(z, x, ts)};

  DefectReport rep;
  double best = -kInfinity;
  for (int s1 = 0; s1 < 2; ++s1) {
    std::vector<MetricPoint> targets;
    std::vector<std::pair<int, int>> where;
    for (int s2 = s1 + 1; s2 < 3; ++s2) {
      for (int j = 0; j < grid; ++j) {
        targets.push_back(pts[s2][j]);
        where.emplace_back(s2, j);
      }
    }
    for (int i = 0; i < grid; ++i) {
      const Vec2 pbar = comparison_point(tri, sides[s1], ts[i]);
      const auto d = space.distances_from(pts[s1][i], targets);
      for (std::size_t k = 0; k < targets.size(); ++k) {
        const auto [s2, j] = where[k];
        const double defect = d[k] - distance(pbar, comparison_point(tri, sides[s2], ts[j]));
        ++rep.samples;
        if (defect > best) {
          best = defect;
          rep.witness = {sides[s1], ts[i], sides[s2], ts[j]};
        }
      }
    }
  }
  rep.delta = std::max(0.0, best);
  return rep;
}

namespace {

double angle_between(Vec2 u, Vec2 v) {
  return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

bool is_convex(const std::array<Vec2, 4>& v) {
  double scale = 0.0;
  for (const auto& p : v) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
  const double eps = 1e-12 * std::max(1.0, scale * scale);
  bool pos = false, neg = false;
  for (int i = 0; i < 4; ++i) {
    const Vec2 e1 = v[(i + 1) % 4] - v[i];
    const Vec2 e2 = v[(i + 2) % 4] - v[(i + 1) % 4];
    const double cr = cross(e1, e2);
    if (cr > eps) pos = true;
    if (cr < -eps) neg = true;
  }
  return !(pos && neg);
}

// Straightens the reflex hinge at vertex `hinge` (0 or 2): its two neighbours
// end up a distance d_left + d_right apart with the hinge on the segment.
std::array<Vec2, 4> unbend(int hinge, double d12, double d23, double d34, double d41) {
  std::array<Vec2, 4> v;
  if (hinge == 0) {
    const auto t = comparison_triangle({d34, d23, d12 + d41});
    v[1] = t.P;
    v[3] = t.Q;
    v[2] = t.R;
    v[0] = lerp(v[1], v[3], d12 + d41 > 0.0 ? d12 / (d12 + d41) : 0.0);
  } else {
    const auto t = comparison_triangle({d41, d12, d23 + d34});
    v[1] = t.P;
    v[3] = t.Q;
    v[0] = t.R;
    v[2] = lerp(v[1], v[3], d23 + d34 > 0.0 ? d23 / (d23 + d34) : 0.0);
  }
  return v;
}

}  // namespace

ComparisonQuadrilateral quadrilateral_comparison(double d12, double d23, double d34, double d41,
                                                 double d13) {
  if (!satisfies_triangle_inequality(d12, d23, d13) || !satisfies_triangle_inequality(d13, d34, d41)) {
    throw DomainError("quadrilateral data violates the triangle inequality");
  }
  const auto upper = comparison_triangle({d23, d12, d13});
  const auto lower = comparison_triangle({d34, d41, d13});
  ComparisonQuadrilateral q;
  q.vertices = {upper.P, upper.R, upper.Q, Vec2{lower.R.x, -lower.R.y}};
  q.hinged_diagonal_13 = d13;
  q.hinged_diagonal_24 = distance(q.vertices[1], q.vertices[3]);

  const auto& v = q.vertices;
  const double at1 = angle_between(v[1] - v[0], v[2] - v[0]) + angle_between(v[3] - v[0], v[2] - v[0]);
  const double at3 = angle_between(v[1] - v[2], v[0] - v[2]) + angle_between(v[3] - v[2], v[0] - v[2]);
  const double tol = 1e-12;
  if (d13 > 0.0 && at1 > M_PI + tol) {
    q.vertices = unbend(0, d12, d23, d34, d41);
    q.unbent = true;
  } else if (d13 > 0.0 && at3 > M_PI + tol) {
    q.vertices = unbend(2, d12, d23, d34, d41);
    q.unbent = true;
  }
  q.convex = is_convex(q.vertices);
  return q;
}

double four_point_defect(double d12, double d13, double d14, double d23, double d24, double d34) {
  if (!satisfies_triangle_inequality(d12, d23, d13) || !satisfies_triangle_inequality(d13, d34, d14) ||
      !satisfies_triangle_inequality(d12, d24, d14) || !satisfies_triangle_inequality(d23, d34, d24)) {
    throw DomainError("four-point distances are inconsistent");
  }
  const auto q = quadrilateral_comparison(d12, d23, d34, d14, d13);
  const auto& y = q.vertices;
  return std::max({0.0, d13 - distance(y[0], y[2]), d24 - distance(y[1], y[3])});
}

double cn_inequality_residual(double dpr, double dqr, double dmr, double dpq) {
  for (double d : {dpr, dqr, dmr, dpq})
    if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("distances must be finite and nonnegative");
  return dpr * dpr + dqr * dqr - 2.0 * dmr * dmr - 0.5 * dpq * dpq;
}

MedianCase1 median_case1(double a, double b, double c, double p, double q) {
  if (!satisfies_triangle_inequality(a, b, c)) throw DomainError("(a,b,c) violates the triangle inequality");
  if (!(p >= 0.0 && q >= 0.0)) throw DomainError("tail lengths must be nonnegative");
  if (c == 0.0) {
    if (p != q) throw DomainError("c = 0 with unequal tails");
  } else if (std::abs(q - p) > c * (1.0 + 1e-12)) {
    throw DomainError("|q - p| exceeds c");
  }
  const double base = (2 * a * a + 2 * b * b - c * c) / 4.0;
  const double dq = q - p;
  const double skew = c == 0.0 ? 0.0 : (dq / 2.0) * ((b * b - a * a) / c);
  const double hp2 = base + dq * dq / 4.0 + skew;
  const double h2 = base + dq * dq / 4.0 + (4 * a * p + 4 * b * q - 2 * p * c - 2 * c * q) / 4.0;
  MedianCase1 out;
  out.h = std::sqrt(std::max(0.0, h2));
  out.h_prime = std::sqrt(std::max(0.0, hp2));
  out.gap = h2 - hp2;
  out.gap_closed = c == 0.0 ? 0.0
                            : (p * (b * b - (a - c) * (a - c)) + q * (a * a - (b - c) * (b - c))) / (2.0 * c);
  return out;
}

TailExtension tail_extension_check(double alpha, double beta, double gamma, double r) {
  if (!(r >= 0.0)) throw DomainError("extension length must be nonnegative");
  const double disc = 2 * alpha * alpha + 2 * beta * beta - gamma * gamma;
  if (disc < 0.0 || !satisfies_triangle_inequality(alpha, beta, gamma)) {
    throw DomainError("(alpha, beta, gamma) violates the triangle inequality");
  }
  const double ap = alpha + r, bp = beta + r;
  TailExtension out;
  out.h_prime_plus_r = std::sqrt(disc / 4.0) + r;
  out.h = std::sqrt((2 * ap * ap + 2 * bp * bp - gamma * gamma) / 4.0);
  out.ok = out.h_prime_plus_r <= out.h + 1e-9;
  out.reduction_residual = (alpha - beta) * (alpha - beta) - gamma * gamma;
  return out;
}

std::string defect_report_json(const DefectReport& report) {
  nlohmann::json j;
  j["delta"] = report.delta;
  j["samples"] = report.samples;
  j["witness"] = {{"side_p", side_name(report.witness.side_p)},
                  {"t_p", report.witness.t_p},
                  {"side_q", side_name(report.witness.side_q)},
                  {"t_q", report.witness.t_q}};
  return j.dump();
}

}  // namespace acat
