#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "acat/metric_core.hpp"

namespace acat {

// Upper half-plane model. A unit tangent vector at (x, y) with frame angle
// phi has Euclidean components y (cos phi, sin phi).

double hyp_distance(HPoint p, HPoint q);
HPoint hyp_geodesic(HPoint p, HPoint q, double t);

// Rotation of a parallel frame (relative to the coordinate frame) along the
// geodesic from p to q: the change of polar angle about the centre of the
// geodesic semicircle, 0 on vertical lines. Lies in (-pi, pi).
double geodesic_rotation(HPoint p, HPoint q);

// Unit tangent vector of the geodesic from p toward q, as a frame angle.
double geodesic_direction(HPoint p, HPoint q);

// Hyperbolic area of the geodesic triangle, by angle deficit.
double triangle_area(HPoint a, HPoint b, HPoint c);

struct TransportResult {
  double angle = 0.0;   // net frame rotation phi_end - phi_start
  bool coarse = false;  // some step longer than 0.1 in hyperbolic length
};

// Transport along the polyline whose pieces are straight in the (x, y)
// chart; each piece contributes -dx/y integrated exactly. A
// counter-clockwise loop rotates by minus its enclosed area.
TransportResult parallel_transport_angle(std::span<const HPoint> path);

// Holonomy of a closed loop, signed so a counter-clockwise loop gives its
// enclosed area.
double holonomy(std::span<const HPoint> loop);

struct UnitTangent {
  HPoint base;
  double phi = 0.0;
};

// Global section obtained by transporting a reference vector at the
// basepoint along geodesic rays.
struct Section {
  HPoint basepoint{0.0, 1.0};
  double ref_angle = 1.5707963267948966;

  double angle(HPoint x) const;
  UTPoint to_ut(const UnitTangent& v) const { return {v.base, v.phi - angle(v.base)}; }
  UnitTangent frame(const UTPoint& p) const { return {p.base, p.theta + angle(p.base)}; }
  // psi(Q) - psi(P) - rotation along [P, Q]; equals the signed area of
  // the triangle (basepoint, P, Q), so |.| < pi.
  double holonomy_correction(HPoint p, HPoint q) const;
};

double section_angle(HPoint x, HPoint basepoint, double ref_angle);

struct SasakiSample {
  double t = 0.0;
  HPoint base;
  double phi = 0.0;      // frame angle of the unit vector, unwrapped
  double alpha = 0.0;    // direction of the base velocity, unwrapped
  double base_speed = 0.0;
  double fiber_speed = 0.0;  // |covariant derivative of the unit vector|
};

struct SasakiCurve {
  std::vector<SasakiSample> samples;
  double c = 0.0;
};

// Length of a sampled curve: each step is replaced by the curve over the
// base geodesic with uniform rotation, sqrt(d^2 + r^2).
double sasaki_length(const SasakiCurve& curve);

// Adaptive length of a parametrised curve, refined until successive
// estimates differ by less than tol.
double sasaki_length(const std::function<UnitTangent(double)>& curve, double t0, double t1,
                     double tol = 1e-8);

// D-metric of the product H^2 x R.
double product_distance(const UTPoint& p, const UTPoint& q);

struct QiImage {
  HPoint base;
  double height = 0.0;
};
inline QiImage qi_map(const UTPoint& p) { return {p.base, p.theta}; }

// Integrates the geodesic equations for the unit tangent bundle written in
// hyperbolic-orthonormal complex components, from `start` with base
// direction `direction_angle` and rotation parameter c in [-1, 1] (the sign
// picks the sense of fiber rotation). Output every `step` of arclength.
SasakiCurve sasaki_geodesic_ode(const UTPoint& start, double direction_angle, double c, double length,
                                double step, const Section& section = {});

// The same geodesics via the conserved fiber charge: the base direction
// turns at rate -c - base_speed cos(alpha), the vector at c - base_speed cos(alpha).
SasakiCurve sasaki_geodesic_charge(const UTPoint& start, double direction_angle, double c, double length,
                                   double step, const Section& section = {});

enum class CurveKind { Point, Geodesic, Equidistant, Horocycle, Circle };

struct ProjectionShape {
  double kappa_mean = 0.0;
  double kappa_std = 0.0;
  CurveKind kind = CurveKind::Point;
  double fit_residual = 0.0;  // max distance of samples from the fitted Euclidean circle/line
  double speed_drift = 0.0;   // max |base^2 + fiber^2 - 1|
  double base_motion = 0.0;   // max hyperbolic distance from the first sample
};

// Geodesic curvature of the projection by finite differences of the sampled
// base curve, plus a Euclidean circle fit.
ProjectionShape classify_projection(const SasakiCurve& curve);

struct SasakiCertificate {
  double endpoint_error = 0.0;
  double upper = 0.0;  // explicit-curve bound sqrt(d^2 + (dtheta + I)^2)
  double lower = 0.0;  // base distance
  bool converged = false;
  double direction = 0.0;
  double c = 0.0;
};

struct SasakiDistance {
  double L = 0.0;
  SasakiCertificate cert;
};

struct SasakiSolverOptions {
  int directions = 32;
  int rotations = 17;
  int refine = 8;
  double tol = 1e-6;
};

SasakiDistance sasaki_distance(const UTPoint& p, const UTPoint& q, const Section& section = {},
                               const SasakiSolverOptions& options = {});

struct QiReport {
  double d = 0.0;
  double dtheta = 0.0;
  double L = 0.0;
  double D = 0.0;
  bool ok_lower = false;  // L <= D + tol
  bool ok_upper = false;  // D <= L + pi + tol
  bool converged = false;
  double endpoint_error = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double holonomy = 0.0;  // I(P, Q)
};

QiReport qi_bounds_check(const UTPoint& p, const UTPoint& q, double tol = 1e-4, const Section& section = {},
                         const SasakiSolverOptions& options = {});

// Random pairs with base points in [-3, 3] x [0.2, 4], base distance at
// most d_max, P on the section and Q at fiber offset in [-dtheta_max,
// dtheta_max].
std::vector<std::pair<UTPoint, UTPoint>> envelope_pairs(int count, double d_max, double dtheta_max,
                                                         std::uint64_t seed);

// H^2 as a geodesic space.
class HyperbolicPlane final : public GeodesicSpace {
 public:
  const std::string& tag() const override { return tag_; }
  double distance(const MetricPoint& p, const MetricPoint& q) const override;
  std::vector<MetricPoint> geodesic_points(const MetricPoint& a, const MetricPoint& b,
                                           std::span<const double> ts) const override;
  MetricPoint point(double x, double y) const;
  HPoint coords(const MetricPoint& p) const;

 private:
  std::string tag_ = "hyperbolic";
};

}  // namespace acat
