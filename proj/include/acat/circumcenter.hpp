#pragma once

#include <functional>
#include <span>
#include <vector>

#include "acat/metric_core.hpp"

namespace acat {

struct BoundedSet {
  std::vector<MetricPoint> points;
};

// Throws DomainError when empty or when points come from different spaces.
void validate(const BoundedSet& y);

struct CenterResult {
  double radius = 0.0;
  std::vector<MetricPoint> centers;
  double slack = 0.0;
};

// Minimises the largest distance to Y over a finite candidate set; every
// candidate within slack of the minimum is kept.
CenterResult circumradius(const GeodesicSpace& space, const BoundedSet& y,
                          std::span<const MetricPoint> candidates, double slack);

struct Ball {
  Vec2 center;
  double radius = 0.0;
};

// Exact smallest enclosing disc (randomised incremental, fixed seed).
Ball minimal_enclosing_ball(std::span<const Vec2> points);

// Exact circumcenter on the plane: one center, zero slack.
CenterResult circumradius(const EuclideanPlane& plane, const BoundedSet& y);

// 2 sqrt(2 r f - f^2): bound on the diameter of the center set.
double barycenter_diameter_bound(double r, double f_r);

using CenterSolver = std::function<CenterResult(const BoundedSet&)>;
using DefectFunction = std::function<double(double)>;

struct IterationResult {
  std::vector<CenterResult> steps;  // steps[k] holds r(Y_k) and C(Y_k)
  bool reached = false;             // some radius fell below a
  int cap = 0;                      // ceil(log4(r_0 / a)) + 2
};

// Y_0 = Y, Y_{k+1} = the (fattened) center set of Y_k, until the radius drops
// below a or the step cap is exceeded. With a profile supplied, missing the
// target although f(r_k) < r_k / 32 at every visited radius and a is at
// least 4 slack is an InvariantViolation.
IterationResult iterate_barycenters(const BoundedSet& y, double a, const CenterSolver& solver,
                                    const DefectFunction& profile = {});

CenterSolver candidate_solver(const GeodesicSpace& space, std::vector<MetricPoint> candidates, double slack);
CenterSolver euclidean_solver(const EuclideanPlane& plane);

double set_diameter(const GeodesicSpace& space, std::span<const MetricPoint> points);

struct ContractionCheck {
  bool decay_ok = true;     // r_{k+1} <= r_k / 4 + 2 slack whenever f(r_k) < r_k / 32 and r_k > a
  bool diameter_ok = true;  // diam C(Y_k) <= bound(r_k, f(r_k)) + 2 slack
  double worst_decay_excess = 0.0;
  double worst_diameter_excess = 0.0;
  std::vector<double> diameters;
};

ContractionCheck verify_contraction(const GeodesicSpace& space, const IterationResult& run, double a,
                                    const DefectFunction& profile);

}  // namespace acat
