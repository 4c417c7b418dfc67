#include "acat/circumcenter.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "acat/errors.hpp"

namespace acat {

void validate(const BoundedSet& y) {
  if (y.points.empty()) throw DomainError("bounded set is empty");
  for (const MetricPoint& p : y.points)
    if (p.space != y.points.front().space) throw DomainError("bounded set mixes spaces");
}

CenterResult circumradius(const GeodesicSpace& space, const BoundedSet& y,
                          std::span<const MetricPoint> candidates, double slack) {
  validate(y);
  if (candidates.empty()) throw DomainError("empty candidate set");
  if (!(slack > 0.0)) throw DomainError("slack must be positive");
  std::vector<double> worst(candidates.size(), 0.0);
  for (const MetricPoint& p : y.points) {
    const std::vector<double> d = space.distances_from(p, candidates);
    for (std::size_t i = 0; i < d.size(); ++i) worst[i] = std::max(worst[i], d[i]);
  }
  CenterResult out;
  out.slack = slack;
  out.radius = *std::min_element(worst.begin(), worst.end());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (worst[i] <= out.radius + slack) out.centers.push_back(candidates[i]);
  return out;
}

namespace {

Ball disc2(Vec2 a, Vec2 b) { return {0.5 * (a + b), 0.5 * distance(a, b)}; }

Ball disc3(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 ab = b - a, ac = c - a;
  const double den = 2.0 * cross(ab, ac);
  const double scale = std::max({norm(ab), norm(ac), 1.0});
  if (std::abs(den) <= 1e-14 * scale * scale) {
    // Collinear: the widest pair.
    Ball best = disc2(a, b);
    for (const Ball& cand : {disc2(a, c), disc2(b, c)})
      if (cand.radius > best.radius) best = cand;
    return best;
  }
  const double ab2 = dot(ab, ab), ac2 = dot(ac, ac);
  const Vec2 off{(ac.y * ab2 - ab.y * ac2) / den, (ab.x * ac2 - ac.x * ab2) / den};
  return {a + off, norm(off)};
}

bool outside(const Ball& b, Vec2 p) { return distance(b.center, p) > b.radius * (1.0 + 1e-14) + 1e-300; }

}  // namespace

Ball minimal_enclosing_ball(std::span<const Vec2> points) {
  if (points.empty()) throw DomainError("no points");
  std::vector<Vec2> p(points.begin(), points.end());
  std::mt19937_64 rng(0x5eed);
  std::shuffle(p.begin(), p.end(), rng);
  Ball b{p[0], 0.0};
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (!outside(b, p[i])) continue;
    b = {p[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (!outside(b, p[j])) continue;
      b = disc2(p[i], p[j]);
      for (std::size_t k = 0; k < j; ++k)
        if (outside(b, p[k])) b = disc3(p[i], p[j], p[k]);
    }
  }
  return b;
}

CenterResult circumradius(const EuclideanPlane& plane, const BoundedSet& y) {
  validate(y);
  std::vector<Vec2> pts;
  pts.reserve(y.points.size());
  for (const MetricPoint& p : y.points) pts.push_back(plane.coords(p));
  const Ball b = minimal_enclosing_ball(pts);
  CenterResult out;
  out.radius = 0.0;
  for (const Vec2& p : pts) out.radius = std::max(out.radius, distance(p, b.center));
  out.centers.push_back(plane.point(b.center.x, b.center.y));
  return out;
}

double barycenter_diameter_bound(double r, double f_r) {
  if (!(r >= 0.0) || !(f_r >= 0.0)) throw DomainError("radius and defect must be non-negative");
  if (f_r > r) throw DomainError("defect exceeds radius");
  return 2.0 * std::sqrt(std::max(0.0, 2.0 * r * f_r - f_r * f_r));
}

IterationResult iterate_barycenters(const BoundedSet& y, double a, const CenterSolver& solver,
                                    const DefectFunction& profile) {
  if (!(a > 0.0)) throw DomainError("target radius must be positive");
  validate(y);
  IterationResult out;
  BoundedSet current = y;
  out.steps.push_back(solver(current));
  const double r0 = out.steps.front().radius;
  out.cap = r0 > a ? static_cast<int>(std::ceil(std::log(r0 / a) / std::log(4.0))) + 2 : 0;
  bool profile_small = static_cast<bool>(profile);
  for (int k = 0;; ++k) {
    const CenterResult& step = out.steps.back();
    if (step.radius < a) {
      out.reached = true;
      break;
    }
    if (profile_small && !(profile(step.radius) < step.radius / 32.0)) profile_small = false;
    if (k >= out.cap) break;
    current.points = step.centers;
    out.steps.push_back(solver(current));
  }
  // Fattened center sets only promise r' <= r/4 + 2 slack, which stalls near
  // 8/3 slack; below 4 slack the target is not owed.
  double slack = 0.0;
  for (const CenterResult& s : out.steps) slack = std::max(slack, s.slack);
  if (!out.reached && profile_small && a >= 4.0 * slack)
    throw InvariantViolation("radius stayed above target although the defect profile is below r/32");
  return out;
}

CenterSolver candidate_solver(const GeodesicSpace& space, std::vector<MetricPoint> candidates, double slack) {
  return [&space, cands = std::move(candidates), slack](const BoundedSet& y) {
    return circumradius(space, y, cands, slack);
  };
}

CenterSolver euclidean_solver(const EuclideanPlane& plane) {
  return [&plane](const BoundedSet& y) { return circumradius(plane, y); };
}

double set_diameter(const GeodesicSpace& space, std::span<const MetricPoint> points) {
  double d = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::vector<double> row = space.distances_from(points[i], points.subspan(i + 1));
    for (double v : row) d = std::max(d, v);
  }
  return d;
}

ContractionCheck verify_contraction(const GeodesicSpace& space, const IterationResult& run, double a,
                                    const DefectFunction& profile) {
  ContractionCheck out;
  for (std::size_t k = 0; k < run.steps.size(); ++k) {
    const CenterResult& s = run.steps[k];
    const double f = std::min(profile(s.radius), s.radius);
    const double diam = set_diameter(space, s.centers);
    out.diameters.push_back(diam);
    const double dexcess = diam - (barycenter_diameter_bound(s.radius, f) + 2.0 * s.slack);
    out.worst_diameter_excess = k == 0 ? dexcess : std::max(out.worst_diameter_excess, dexcess);
    if (dexcess > 1e-12) out.diameter_ok = false;
    if (k + 1 < run.steps.size() && s.radius > a && f < s.radius / 32.0) {
      const double excess = run.steps[k + 1].radius - (s.radius / 4.0 + 2.0 * s.slack);
      out.worst_decay_excess = std::max(out.worst_decay_excess, excess);
      if (excess > 1e-12) out.decay_ok = false;
    }
  }
  return out;
}

}  // namespace acat
