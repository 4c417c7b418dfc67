#include "acat/sasaki.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "acat/errors.hpp"

namespace acat {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a;
}

double unwrap_near(double angle, double previous) { return previous + wrap(angle - previous); }

void require_upper(HPoint p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !(p.y > 0.0))
    throw DomainError("point outside the upper half-plane");
}

struct Semicircle {
  bool vertical = true;
  double centre = 0.0;
  double radius = 0.0;
  double tau(HPoint p) const { return std::atan2(p.y, p.x - centre); }
};

Semicircle geodesic_through(HPoint p, HPoint q) {
  Semicircle g;
  const double dx = q.x - p.x;
  if (std::abs(dx) <= 1e-13 * (p.y + q.y)) return g;
  g.vertical = false;
  g.centre = 0.5 * (p.x + q.x) + (q.y - p.y) * (q.y + p.y) / (2.0 * dx);
  g.radius = std::hypot(p.x - g.centre, p.y);
  return g;
}

}  // namespace

double hyp_distance(HPoint p, HPoint q) {
  require_upper(p);
  require_upper(q);
  const double chord = std::hypot(q.x - p.x, q.y - p.y);
  return 2.0 * std::asinh(chord / (2.0 * std::sqrt(p.y * q.y)));
}

HPoint hyp_geodesic(HPoint p, HPoint q, double t) {
  require_upper(p);
  require_upper(q);
  const Semicircle g = geodesic_through(p, q);
  if (g.vertical) return {p.x + t * (q.x - p.x), p.y * std::pow(q.y / p.y, t)};
  const double up = std::log(std::tan(0.5 * g.tau(p)));
  const double uq = std::log(std::tan(0.5 * g.tau(q)));
  const double tau = 2.0 * std::atan(std::exp(up + t * (uq - up)));
  return {g.centre + g.radius * std::cos(tau), g.radius * std::sin(tau)};
}

double geodesic_rotation(HPoint p, HPoint q) {
  require_upper(p);
  require_upper(q);
  const Semicircle g = geodesic_through(p, q);
  if (g.vertical) return 0.0;
  return g.tau(q) - g.tau(p);
}

double geodesic_direction(HPoint p, HPoint q) {
  require_upper(p);
  require_upper(q);
  const Semicircle g = geodesic_through(p, q);
  if (g.vertical) return q.y >= p.y ? 0.5 * kPi : -0.5 * kPi;
  const double tp = g.tau(p);
  return g.tau(q) > tp ? tp + 0.5 * kPi : tp - 0.5 * kPi;
}

double triangle_area(HPoint a, HPoint b, HPoint c) {
  const double ta = wrap(geodesic_direction(a, c) - geodesic_direction(a, b));
  const double tb = wrap(geodesic_direction(b, a) - geodesic_direction(b, c));
  const double tc = wrap(geodesic_direction(c, b) - geodesic_direction(c, a));
  const double area = kPi - std::abs(ta) - std::abs(tb) - std::abs(tc);
  return ta >= 0.0 ? area : -area;
}

TransportResult parallel_transport_angle(std::span<const HPoint> path) {
  TransportResult out;
  for (const HPoint& p : path) require_upper(p);
  for (std::size_t i = 1; i < path.size(); ++i) {
    const HPoint a = path[i - 1], b = path[i];
    const double r = (b.y - a.y) / a.y;
    // integral of 1/y along the straight piece, per unit of x
    const double inv = std::abs(r) < 1e-8 ? (1.0 - 0.5 * r) / a.y : std::log1p(r) / (b.y - a.y);
    out.angle -= (b.x - a.x) * inv;
    if (hyp_distance(a, b) > 0.1) out.coarse = true;
  }
  return out;
}

double holonomy(std::span<const HPoint> loop) {
  if (loop.empty()) return 0.0;
  std::vector<HPoint> closed(loop.begin(), loop.end());
  if (closed.back().x != closed.front().x || closed.back().y != closed.front().y)
    closed.push_back(closed.front());
  return -parallel_transport_angle(closed).angle;
}

double section_angle(HPoint x, HPoint basepoint, double ref_angle) {
  return ref_angle + geodesic_rotation(basepoint, x);
}

double Section::angle(HPoint x) const { return section_angle(x, basepoint, ref_angle); }

double Section::holonomy_correction(HPoint p, HPoint q) const {
  return angle(q) - angle(p) - geodesic_rotation(p, q);
}

double product_distance(const UTPoint& p, const UTPoint& q) {
  return std::hypot(hyp_distance(p.base, q.base), q.theta - p.theta);
}

// ---------------------------------------------------------------------------

double sasaki_length(const SasakiCurve& curve) {
  double total = 0.0;
  const auto& s = curve.samples;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double d = hyp_distance(s[i - 1].base, s[i].base);
    const double r = s[i].phi - s[i - 1].phi - geodesic_rotation(s[i - 1].base, s[i].base);
    total += std::hypot(d, r);
  }
  return total;
}

double sasaki_length(const std::function<UnitTangent(double)>& curve, double t0, double t1, double tol) {
  auto estimate = [&](int n) {
    SasakiCurve c;
    c.samples.reserve(n + 1);
    double prev = 0.0;
    for (int i = 0; i <= n; ++i) {
      const UnitTangent u = curve(t0 + (t1 - t0) * i / n);
      const double phi = i == 0 ? u.phi : unwrap_near(u.phi, prev);
      prev = phi;
      c.samples.push_back({0.0, u.base, phi, 0.0, 0.0, 0.0});
    }
    return sasaki_length(c);
  };
  int n = 16;
  double last = estimate(n);
  while (n < (1 << 22)) {
    n *= 2;
    const double next = estimate(n);
    if (std::abs(next - last) < tol) return next;
    last = next;
  }
  throw ConvergenceError("curve length did not settle");
}

// ---------------------------------------------------------------------------

namespace {

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N, class F>
State<N> rk4_step(const F& f, const State<N>& y, double h) {
  auto axpy = [](const State<N>& a, const State<N>& b, double s) {
    State<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  const State<N> k1 = f(y);
  const State<N> k2 = f(axpy(y, k1, 0.5 * h));
  const State<N> k3 = f(axpy(y, k2, 0.5 * h));
  const State<N> k4 = f(axpy(y, k3, h));
  State<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

// Positions are compared in units of the local scale y.
template <std::size_t N>
double scaled_error(const State<N>& a, const State<N>& b) {
  double e = std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1])) / std::max(a[1], 1e-300);
  for (std::size_t i = 2; i < N; ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

template <std::size_t N>
void check_state(const State<N>& y) {
  for (double v : y)
    if (!std::isfinite(v)) throw ConvergenceError("geodesic integration produced a non-finite state");
  if (!(y[1] > 0.0)) throw ConvergenceError("geodesic integration left the upper half-plane");
}

// Advances y over [0, span] with step halving until one step and two half
// steps agree to tol per unit length.
template <std::size_t N, class F>
State<N> advance(const F& f, State<N> y, double span, double& h, double tol) {
  double done = 0.0;
  while (done < span) {
    double step = std::min(h, span - done);
    for (int tries = 0;; ++tries) {
      const State<N> one = rk4_step<N>(f, y, step);
      const State<N> two = rk4_step<N>(f, rk4_step<N>(f, y, 0.5 * step), 0.5 * step);
      // The floor keeps roundoff from shrinking tiny remainder steps forever.
      if (scaled_error<N>(one, two) <= tol * step + 1e-13 || tries > 40) {
        y = two;
        break;
      }
      step *= 0.5;
      h = step;
    }
    check_state<N>(y);
    // Land exactly on span; done + (span - done) can round below it.
    done = step >= span - done ? span : done + step;
    if (step == h) h = std::min(2.0 * h, 0.05);
  }
  return y;
}

constexpr double kOdeTol = 1e-8;

void validate_ode_args(const UTPoint& start, double c, double length, double step) {
  require_upper(start.base);
  if (!std::isfinite(start.theta)) throw DomainError("non-finite fiber coordinate");
  if (!(c >= -1.0 && c <= 1.0)) throw DomainError("c must lie in [-1, 1]");
  if (!(length >= 0.0) || !std::isfinite(length)) throw DomainError("length must be non-negative");
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("step must be positive");
}

std::vector<double> output_times(double length, double step) {
  const auto n = static_cast<std::size_t>(std::ceil(length / step - 1e-9));
  std::vector<double> ts(n + 1);
  for (std::size_t i = 0; i <= n; ++i) ts[i] = std::min(length, step * static_cast<double>(i));
  return ts;
}

}  // namespace

SasakiCurve sasaki_geodesic_ode(const UTPoint& start, double direction_angle, double c, double length,
                                double step, const Section& section) {
  validate_ode_args(start, c, length, step);
  const double c2 = c * c;
  const double s = std::sqrt(std::max(0.0, 1.0 - c2));
  const double phi0 = section.frame(start).phi;

  // x, y, V, U, W with V the velocity, U the unit vector and W its
  // covariant derivative, all in the orthonormal frame (y d/dx, y d/dy).
  // Covariant derivative of Z along the curve is Z' + i Re(V) Z.
  auto f = [c2](const State<8>& z) {
    const double x_ = z[0], y = z[1], vr = z[2], vi = z[3], ur = z[4], ui = z[5], wr = z[6], wi = z[7];
    (void)x_;
    const double a = vr * ur + vi * ui;
    const double b = vr * wr + vi * wi;
    return State<8>{y * vr,
                    y * vi,
                    b * ur - a * wr + vr * vi,
                    b * ui - a * wi - vr * vr,
                    wr + vr * ui,
                    wi - vr * ur,
                    -c2 * ur + vr * wi,
                    -c2 * ui - vr * wr};
  };

  State<8> z{start.base.x,
             start.base.y,
             s * std::cos(direction_angle),
             s * std::sin(direction_angle),
             std::cos(phi0),
             std::sin(phi0),
             -c * std::sin(phi0),
             c * std::cos(phi0)};

  SasakiCurve out;
  out.c = c;
  double phi = phi0, alpha = direction_angle, h = std::min(step, 0.01), prev_t = 0.0;
  for (double t : output_times(length, step)) {
    if (t > prev_t) z = advance<8>(f, z, t - prev_t, h, kOdeTol);
    prev_t = t;
    phi = unwrap_near(std::atan2(z[5], z[4]), phi);
    const double speed = std::hypot(z[2], z[3]);
    if (speed > 1e-9) alpha = unwrap_near(std::atan2(z[3], z[2]), alpha);
    out.samples.push_back({t, {z[0], z[1]}, phi, alpha, speed, std::hypot(z[6], z[7])});
  }
  return out;
}

namespace {

// x, y, alpha along the charged motion with base speed s and charge c: the
// base turns at -c relative to parallel transport while the vector turns at c.
struct ChargeFlow {
  double s, c;
  State<3> operator()(const State<3>& z) const {
    const double ca = std::cos(z[2]);
    return {s * z[1] * ca, s * z[1] * std::sin(z[2]), -c - s * ca};
  }
};

}  // namespace

SasakiCurve sasaki_geodesic_charge(const UTPoint& start, double direction_angle, double c, double length,
                                   double step, const Section& section) {
  validate_ode_args(start, c, length, step);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  const double phi0 = section.frame(start).phi;
  const ChargeFlow f{s, c};
  State<3> z{start.base.x, start.base.y, direction_angle};
  SasakiCurve out;
  out.c = c;
  double h = std::min(step, 0.01), prev_t = 0.0;
  for (double t : output_times(length, step)) {
    if (t > prev_t) z = advance<3>(f, z, t - prev_t, h, kOdeTol);
    prev_t = t;
    out.samples.push_back({t, {z[0], z[1]}, phi0 + z[2] - direction_angle + 2.0 * c * t, z[2], s, std::abs(c)});
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Max distance of the points from the least-squares line through them.
double line_residual(const std::vector<Vec2>& pts) {
  Vec2 m{};
  for (const Vec2& p : pts) m = m + p;
  m = (1.0 / static_cast<double>(pts.size())) * m;
  double sxx = 0, sxy = 0, syy = 0;
  for (const Vec2& p : pts) {
    const Vec2 d = p - m;
    sxx += d.x * d.x;
    sxy += d.x * d.y;
    syy += d.y * d.y;
  }
  const double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  const Vec2 normal{-std::sin(theta), std::cos(theta)};
  double worst = 0.0;
  for (const Vec2& p : pts) worst = std::max(worst, std::abs(dot(p - m, normal)));
  return worst;
}

// Algebraic circle fit x^2 + y^2 + D x + E y + F = 0 in centred coordinates.
double circle_residual(const std::vector<Vec2>& pts) {
  Vec2 m{};
  for (const Vec2& p : pts) m = m + p;
  m = (1.0 / static_cast<double>(pts.size())) * m;
  double A[3][4] = {};
  for (const Vec2& q : pts) {
    const Vec2 p = q - m;
    const double row[3] = {p.x, p.y, 1.0};
    const double rhs = -(p.x * p.x + p.y * p.y);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) A[i][j] += row[i] * row[j];
      A[i][3] += row[i] * rhs;
    }
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    if (std::abs(A[piv][col]) < 1e-300) return kInfinity;
    for (int k = 0; k < 4; ++k) std::swap(A[col][k], A[piv][k]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = A[r][col] / A[col][col];
      for (int k = 0; k < 4; ++k) A[r][k] -= f * A[col][k];
    }
  }
  const double D = A[0][3] / A[0][0], E = A[1][3] / A[1][1], F = A[2][3] / A[2][2];
  const Vec2 centre{-0.5 * D, -0.5 * E};
  const double r2 = dot(centre, centre) - F;
  if (!(r2 > 0.0)) return kInfinity;
  const double r = std::sqrt(r2);
  double worst = 0.0;
  for (const Vec2& q : pts) worst = std::max(worst, std::abs(norm(q - m - centre) - r));
  return worst;
}

}  // namespace

ProjectionShape classify_projection(const SasakiCurve& curve) {
  ProjectionShape out;
  const auto& s = curve.samples;
  if (s.empty()) return out;
  for (const SasakiSample& p : s) {
    out.base_motion = std::max(out.base_motion, hyp_distance(s.front().base, p.base));
    out.speed_drift =
        std::max(out.speed_drift, std::abs(p.base_speed * p.base_speed + p.fiber_speed * p.fiber_speed - 1.0));
  }
  if (out.base_motion < 1e-9 || s.size() < 5) return out;

  // Five-point stencils on uniformly spaced windows.
  std::vector<double> kappa;
  for (std::size_t i = 2; i + 2 < s.size(); ++i) {
    const double h = s[i + 1].t - s[i].t;
    if (h <= 0.0) continue;
    bool uniform = true;
    for (std::size_t j = i - 2; j < i + 2; ++j)
      if (std::abs(s[j + 1].t - s[j].t - h) > 1e-9 * h) uniform = false;
    if (!uniform) continue;
    const HPoint a = s[i - 2].base, b = s[i - 1].base, m = s[i].base, c = s[i + 1].base, e = s[i + 2].base;
    const double dx = (-e.x + 8 * c.x - 8 * b.x + a.x) / (12 * h);
    const double dy = (-e.y + 8 * c.y - 8 * b.y + a.y) / (12 * h);
    const double ddx = (-e.x + 16 * c.x - 30 * m.x + 16 * b.x - a.x) / (12 * h * h);
    const double ddy = (-e.y + 16 * c.y - 30 * m.y + 16 * b.y - a.y) / (12 * h * h);
    const double sp = std::hypot(dx, dy);
    if (sp < 1e-12) continue;
    const double ke = (dx * ddy - dy * ddx) / (sp * sp * sp);
    kappa.push_back(m.y * ke + dx / sp);
  }
  if (kappa.empty()) return out;
  double sum = 0.0;
  for (double k : kappa) sum += k;
  out.kappa_mean = sum / static_cast<double>(kappa.size());
  double var = 0.0;
  for (double k : kappa) var += (k - out.kappa_mean) * (k - out.kappa_mean);
  out.kappa_std = std::sqrt(var / static_cast<double>(kappa.size()));

  std::vector<Vec2> pts;
  pts.reserve(s.size());
  for (const SasakiSample& p : s) pts.push_back({p.base.x, p.base.y});
  out.fit_residual = std::min(line_residual(pts), circle_residual(pts));

  const double k = std::abs(out.kappa_mean);
  constexpr double tol = 1e-4;
  if (k < tol)
    out.kind = CurveKind::Geodesic;
  else if (k < 1.0 - tol)
    out.kind = CurveKind::Equidistant;
  else if (k <= 1.0 + tol)
    out.kind = CurveKind::Horocycle;
  else
    out.kind = CurveKind::Circle;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Target {
  HPoint base;
  double theta;
};

struct Shot {
  HPoint base;
  double theta;
};

// Fixed-step charged motion; smooth in (alpha0, c, T) for the refinement.
Shot shoot(const UTPoint& p, double phi0, const Section& section, double alpha0, double c, double T) {
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  const ChargeFlow f{s, c};
  const int n = std::max(16, static_cast<int>(std::ceil(std::abs(T) / 0.005)));
  const double h = T / n;
  State<3> z{p.base.x, p.base.y, alpha0};
  for (int i = 0; i < n; ++i) z = rk4_step<3>(f, z, h);
  check_state<3>(z);
  const HPoint b{z[0], z[1]};
  return {b, phi0 + z[2] - alpha0 + 2.0 * c * T - section.angle(b)};
}

std::array<double, 3> residual(const Shot& s, const Target& q) {
  return {(s.base.x - q.base.x) / q.base.y, std::log(s.base.y / q.base.y), s.theta - q.theta};
}

double endpoint_error(const Shot& s, const Target& q) {
  return std::hypot(hyp_distance(s.base, q.base), s.theta - q.theta);
}

struct Candidate {
  double alpha0, c, T, err;
};

// Damped Gauss-Newton on (alpha0, asin c, T).
Candidate refine(const UTPoint& p, double phi0, const Section& section, const Target& q, Candidate start) {
  std::array<double, 3> x{start.alpha0, std::asin(std::clamp(start.c, -1.0, 1.0)), start.T};
  auto eval = [&](const std::array<double, 3>& v) {
    return residual(shoot(p, phi0, section, v[0], std::sin(v[1]), std::max(v[2], 0.0)), q);
  };
  auto sq = [](const std::array<double, 3>& r) { return r[0] * r[0] + r[1] * r[1] + r[2] * r[2]; };
  std::array<double, 3> r = eval(x);
  double cost = sq(r), lambda = 1e-3;
  for (int it = 0; it < 80 && cost > 1e-26; ++it) {
    double J[3][3];
    for (int j = 0; j < 3; ++j) {
      const double eps = 1e-7;
      auto xp = x, xm = x;
      xp[j] += eps;
      xm[j] -= eps;
      const auto rp = eval(xp), rm = eval(xm);
      for (int i = 0; i < 3; ++i) J[i][j] = (rp[i] - rm[i]) / (2 * eps);
    }
    double JtJ[3][3] = {}, g[3] = {};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b)
        for (int i = 0; i < 3; ++i) JtJ[a][b] += J[i][a] * J[i][b];
      for (int i = 0; i < 3; ++i) g[a] += J[i][a] * r[i];
    }
    bool improved = false;
    for (int tries = 0; tries < 12 && !improved; ++tries) {
      double M[3][4];
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) M[a][b] = JtJ[a][b] + (a == b ? lambda * (JtJ[a][a] + 1e-12) : 0.0);
        M[a][3] = -g[a];
      }
      bool singular = false;
      for (int col = 0; col < 3 && !singular; ++col) {
        int piv = col;
        for (int rr = col + 1; rr < 3; ++rr)
          if (std::abs(M[rr][col]) > std::abs(M[piv][col])) piv = rr;
        if (std::abs(M[piv][col]) < 1e-300) singular = true;
        for (int k = 0; k < 4 && !singular; ++k) std::swap(M[col][k], M[piv][k]);
        for (int rr = 0; rr < 3 && !singular; ++rr) {
          if (rr == col) continue;
          const double f = M[rr][col] / M[col][col];
          for (int k = 0; k < 4; ++k) M[rr][k] -= f * M[col][k];
        }
      }
      if (singular) {
        lambda *= 10;
        continue;
      }
      std::array<double, 3> trial{x[0] + M[0][3] / M[0][0], x[1] + M[1][3] / M[1][1], x[2] + M[2][3] / M[2][2]};
      trial[2] = std::max(trial[2], 0.0);
      std::array<double, 3> rt;
      try {
        rt = eval(trial);
      } catch (const ConvergenceError&) {
        lambda *= 10;
        continue;
      }
      if (sq(rt) < cost) {
        x = trial;
        r = rt;
        cost = sq(rt);
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
      } else {
        lambda *= 10;
      }
    }
    if (!improved) break;
  }
  const double c = std::sin(x[1]);
  const double T = std::max(x[2], 0.0);
  return {x[0], c, T, endpoint_error(shoot(p, phi0, section, x[0], c, T), q)};
}

}  // namespace

namespace {

SasakiDistance solve(const UTPoint& p, const UTPoint& q, const Section& section,
                     const SasakiSolverOptions& options) {
  require_upper(p.base);
  require_upper(q.base);
  if (!std::isfinite(p.theta) || !std::isfinite(q.theta)) throw DomainError("non-finite fiber coordinate");
  if (options.directions < 1 || options.rotations < 2 || options.refine < 1)
    throw DomainError("solver needs at least one direction, two rotation values and one refinement");

  SasakiDistance out;
  const double d = hyp_distance(p.base, q.base);
  const double dtheta = q.theta - p.theta;
  const double I = section.holonomy_correction(p.base, q.base);
  out.cert.lower = d;
  out.cert.upper = std::hypot(d, dtheta + I);
  if (out.cert.upper < 1e-14) {
    out.cert.converged = true;
    return out;
  }

  const double phi0 = section.frame(p).phi;
  const Target target{q.base, q.theta};

  // Coarse sweep of the charged motions, recording the closest approach.
  std::vector<Candidate> starts;
  const double reach = out.cert.upper + 0.5;
  const double h = 0.02;
  const int steps = static_cast<int>(std::ceil(reach / h));
  for (int i = 0; i < options.directions; ++i) {
    const double alpha0 = 2.0 * kPi * i / options.directions;
    for (int j = 0; j < options.rotations; ++j) {
      const double c = -std::cos(kPi * j / (options.rotations - 1));
      const ChargeFlow f{std::sqrt(std::max(0.0, 1.0 - c * c)), c};
      State<3> z{p.base.x, p.base.y, alpha0};
      Candidate best{alpha0, c, 0.0, kInfinity};
      for (int k = 1; k <= steps; ++k) {
        z = rk4_step<3>(f, z, h);
        if (!std::isfinite(z[0]) || !(z[1] > 0.0)) break;
        const HPoint b{z[0], z[1]};
        const double theta = phi0 + z[2] - alpha0 + 2.0 * c * k * h - section.angle(b);
        const double e = std::hypot(hyp_distance(b, q.base), theta - q.theta);
        if (e < best.err) best = {alpha0, c, k * h, e};
      }
      starts.push_back(best);
    }
  }
  std::sort(starts.begin(), starts.end(), [](const Candidate& a, const Candidate& b) { return a.err < b.err; });
  std::vector<Candidate> picks(starts.begin(),
                               starts.begin() + std::min<std::size_t>(options.refine, starts.size()));
  // Also the shortest near-misses, which the error ordering can bury.
  std::vector<Candidate> near;
  for (const Candidate& c : starts)
    if (c.err < 0.5) near.push_back(c);
  std::sort(near.begin(), near.end(), [](const Candidate& a, const Candidate& b) { return a.T < b.T; });
  for (std::size_t i = 0; i < near.size() && i < static_cast<std::size_t>(options.refine); ++i)
    picks.push_back(near[i]);

  Candidate best{0, 0, kInfinity, kInfinity};
  Candidate closest{0, 0, kInfinity, kInfinity};
  for (const Candidate& s : picks) {
    Candidate r;
    try {
      r = refine(p, phi0, section, target, s);
    } catch (const ConvergenceError&) {
      continue;
    }
    if (r.err < closest.err) closest = r;
    if (r.err <= options.tol && r.T < best.T) best = r;
  }

  if (best.T <= out.cert.upper + options.tol) {
    out.L = best.T;
    out.cert.converged = true;
    out.cert.endpoint_error = best.err;
    out.cert.direction = best.alpha0;
    out.cert.c = best.c;
  } else {
    out.L = out.cert.upper;
    out.cert.converged = false;
    out.cert.endpoint_error = closest.err;
    out.cert.direction = closest.alpha0;
    out.cert.c = closest.c;
  }
  return out;
}

}  // namespace

SasakiDistance sasaki_distance(const UTPoint& p, const UTPoint& q, const Section& section,
                               const SasakiSolverOptions& options) {
  // Tight spirals (large fiber offsets) have narrow basins; densify the
  // sweep twice before giving up.
  SasakiSolverOptions o = options;
  SasakiDistance r = solve(p, q, section, o);
  for (int round = 0; round < 2 && !r.cert.converged; ++round) {
    o.directions *= 2;
    o.rotations = 2 * o.rotations - 1;
    r = solve(p, q, section, o);
  }
  return r;
}

QiReport qi_bounds_check(const UTPoint& p, const UTPoint& q, double tol, const Section& section,
                         const SasakiSolverOptions& options) {
  const SasakiDistance s = sasaki_distance(p, q, section, options);
  QiReport r;
  r.d = hyp_distance(p.base, q.base);
  r.dtheta = q.theta - p.theta;
  r.D = product_distance(p, q);
  r.L = s.L;
  r.converged = s.cert.converged;
  r.endpoint_error = s.cert.endpoint_error;
  r.holonomy = section.holonomy_correction(p.base, q.base);
  r.bracket_lo = s.cert.converged ? s.L : s.cert.lower;
  r.bracket_hi = s.cert.converged ? s.L : s.cert.upper;
  r.ok_lower = r.bracket_lo <= r.D + tol;
  r.ok_upper = r.D <= r.bracket_hi + kPi + tol;
  return r;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<UTPoint, UTPoint>> envelope_pairs(int count, double d_max, double dtheta_max,
                                                         std::uint64_t seed) {
  if (count < 0 || !(d_max > 0.0) || !(dtheta_max >= 0.0)) throw DomainError("bad envelope");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> x(-3.0, 3.0), y(0.2, 4.0), t(-dtheta_max, dtheta_max);
  std::vector<std::pair<UTPoint, UTPoint>> out;
  while (static_cast<int>(out.size()) < count) {
    const UTPoint p{{x(rng), y(rng)}, 0.0};
    const UTPoint q{{x(rng), y(rng)}, t(rng)};
    if (hyp_distance(p.base, q.base) <= d_max) out.emplace_back(p, q);
  }
  return out;
}

MetricPoint HyperbolicPlane::point(double x, double y) const {
  require_upper({x, y});
  return {tag_, HPoint{x, y}};
}

HPoint HyperbolicPlane::coords(const MetricPoint& p) const {
  require_own(p);
  const auto* h = std::get_if<HPoint>(&p.coords);
  if (!h) throw DomainError("hyperbolic point without half-plane coordinates");
  require_upper(*h);
  return *h;
}

double HyperbolicPlane::distance(const MetricPoint& p, const MetricPoint& q) const {
  return hyp_distance(coords(p), coords(q));
}

std::vector<MetricPoint> HyperbolicPlane::geodesic_points(const MetricPoint& a, const MetricPoint& b,
                                                          std::span<const double> ts) const {
  const HPoint pa = coords(a), pb = coords(b);
  std::vector<MetricPoint> out;
  out.reserve(ts.size());
  for (double t : ts) out.push_back({tag_, hyp_geodesic(pa, pb, t)});
  return out;
}

}  // namespace acat
