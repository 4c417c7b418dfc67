#include "acat/wrinkled.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <tuple>

#include "acat/errors.hpp"

namespace acat {

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);

double slant_width(int k) { return std::sqrt(0.5 * k * k + 1.0); }

Vec3 add(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 scale(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
double dot3(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

// Clips [a, b] against the half-planes n.p >= c (or > c when strict), returns
// the surviving parameter interval [lo, hi] (empty when lo > hi).
struct HalfPlane {
  Vec2 n;
  double c;
};

std::pair<double, double> clip_segment(Vec2 a, Vec2 b, std::initializer_list<HalfPlane> planes) {
  double lo = 0.0, hi = 1.0;
  for (const auto& h : planes) {
    const double f0 = dot(h.n, a) - h.c;
    const double f1 = dot(h.n, b) - h.c;
    if (f0 < 0.0 && f1 < 0.0) return {1.0, 0.0};
    if (f0 >= 0.0 && f1 >= 0.0) continue;
    const double t = f0 / (f0 - f1);
    if (f0 < 0.0) lo = std::max(lo, t);
    else hi = std::min(hi, t);
  }
  return {lo, hi};
}

// The developed roof: the strips 2..n_max unrolled across their ridges and
// valleys into the region |v| <= u(s) of the (s, v) plane.
struct Roof {
  int n_max = 2;
  std::vector<double> valley;  // valley[k] = s at x + y = k(k-1), k = 2..n_max+1

  explicit Roof(int n) : n_max(n), valley(n + 2, 0.0) {
    for (int k = 2; k <= n_max; ++k) valley[k + 1] = valley[k] + 2.0 * slant_width(k);
  }
  double end() const { return valley[n_max + 1]; }
  int strip(double s) const {
    int k = 2;
    while (k < n_max && s > valley[k + 1]) ++k;
    return k;
  }
  double u(double s) const {
    const int k = strip(s);
    return k * (k - 1) / kSqrt2 + (s - valley[k]) * (k / kSqrt2) / slant_width(k);
  }
  double z(double s) const {
    const int k = strip(s);
    const double t = (s - valley[k]) / slant_width(k);
    return t <= 1.0 ? t : 2.0 - t;
  }
  Vec3 position(double s, double v) const {
    const double uu = u(s);
    return {(uu - v) / kSqrt2, (uu + v) / kSqrt2, z(s)};
  }
  // Chart coordinates of the roof point over a planar point.
  Vec2 chart(Vec2 plan) const {
    const double sum = plan.x + plan.y;
    int k = 2;
    while (k < n_max && sum > k * (k + 1)) ++k;
    const double uu = sum / kSqrt2;
    const double s = valley[k] + (uu - k * (k - 1) / kSqrt2) * slant_width(k) / (k / kSqrt2);
    return {s, (plan.y - plan.x) / kSqrt2};
  }
  // A chart segment stays on the roof iff |v| <= u at its ends and at every
  // valley between them (u is convex and piecewise linear).
  bool segment_inside(Vec2 a, Vec2 b) const {
    auto ok = [&](double s, double v) { return std::abs(v) <= u(s) + 1e-9; };
    if (!ok(a.x, a.y) || !ok(b.x, b.y)) return false;
    const double lo = std::min(a.x, b.x), hi = std::max(a.x, b.x);
    for (int k = 3; k <= n_max; ++k) {
      const double s = valley[k];
      if (s > lo && s < hi) {
        const double t = (s - a.x) / (b.x - a.x);
        if (!ok(s, a.y + t * (b.y - a.y))) return false;
      }
    }
    return true;
  }
};

}  // namespace

double diagonal_distance(int n) {
  if (n < 1) throw DomainError("n must be at least 1");
  long double sum = std::sqrt(2.0L);
  for (int k = 2; k <= n; ++k) sum += 2.0L * std::sqrt(1.0L + 0.5L * k * k);
  return static_cast<double>(sum);
}

double euclidean_diagonal_distance(int n) {
  if (n < 1) throw DomainError("n must be at least 1");
  return static_cast<double>(static_cast<long double>(n) * (n + 1) * std::sqrt(2.0L) / 2.0L);
}

double gap_summand(int k) { return 4.0 / (std::sqrt(2.0 * k * k + 4.0) + k * kSqrt2); }

double gap_lower_term(int k) { return 4.0 / (k * (kSqrt2 + kSqrt3)); }

bool gap_term_dominates(int k) { return static_cast<long long>(k) * k >= 4; }

std::vector<DivergenceGap> divergence_table(int n_max) {
  if (n_max < 1) throw DomainError("n must be at least 1");
  std::vector<DivergenceGap> out(n_max);
  long double gap = 0.0L, lower = 0.0L;
  const long double c = 4.0L / (std::sqrt(2.0L) + std::sqrt(3.0L));
  for (int k = 2; k <= n_max; ++k) {
    gap += 4.0L / (std::sqrt(2.0L * k * k + 4.0L) + k * std::sqrt(2.0L));
    lower += c / k;
    out[k - 1] = {static_cast<double>(gap), static_cast<double>(lower)};
  }
  return out;
}

DivergenceGap divergence_gap(int n) {
  if (n < 2) throw DomainError("n must be at least 2");
  return divergence_table(n).back();
}

double min_crossing_length(int k, int n) {
  return (static_cast<double>(n + k) * (n + k + 1) - static_cast<double>(k) * (k + 1)) / 2.0 + k;
}

double default_resolution(int n_max) { return n_max <= 10 ? 0.05 : 0.05 * n_max / 10.0; }

// ---------------------------------------------------------------------------

Vec3 Face::position(Vec2 l) const { return add(origin, add(scale(l.x, e1), scale(l.y, e2))); }

Vec2 Face::local_of(const Vec3& p) const {
  const Vec3 d = sub(p, origin);
  return {dot3(d, e1), dot3(d, e2)};
}

bool Face::contains(Vec2 l, double tol) const {
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2 a = polygon[i], b = polygon[(i + 1) % polygon.size()];
    const Vec2 e = b - a;
    if (cross(e, l - a) < -tol * std::max(1.0, norm(e))) return false;
  }
  return true;
}

WrinkledSurface::WrinkledSurface(const WrinkledOptions& options) : opt_(options) {
  if (opt_.n_max < 2) throw DomainError("n_max must be at least 2");
  if (!(opt_.resolution > 0.0)) throw DomainError("resolution must be positive");
  if (!(opt_.stencil >= 1.5)) throw DomainError("stencil must be at least 1.5");
  if (opt_.clip_radius < 0.0) throw DomainError("clip radius must be nonnegative");
  const double outer = static_cast<double>(opt_.n_max) * (opt_.n_max + 1);
  box_ = opt_.exterior_half_width > 0.0 ? opt_.exterior_half_width : outer;
  build_faces();
  build_mesh();
}

int WrinkledSurface::face_index(FaceKind kind, int strip, int part) const {
  switch (kind) {
    case FaceKind::Corner: return 0;
    case FaceKind::Exterior:
      if (part < 0 || part > 2) throw DomainError("exterior part out of range");
      return 1 + part;
    default: break;
  }
  if (strip < 2 || strip > opt_.n_max) throw DomainError("strip out of range");
  const int base = 4 + 4 * (strip - 2);
  switch (kind) {
    case FaceKind::SlantInner: return base;
    case FaceKind::SlantOuter: return base + 1;
    case FaceKind::CapX: return base + 2;
    case FaceKind::CapY: return base + 3;
    default: return base;
  }
}

void WrinkledSurface::build_faces() {
  const double W = box_;
  const Vec3 ex{1, 0, 0}, ey{0, 1, 0}, ez{0, 0, 1};
  faces_.push_back({FaceKind::Corner, 0, {{0, 0}, {2, 0}, {0, 2}}, {0, 0, 0}, ex, ey});
  faces_.push_back({FaceKind::Exterior, 0, {{-W, 0}, {0, 0}, {0, W}, {-W, W}}, {0, 0, 0}, ex, ey});
  faces_.push_back({FaceKind::Exterior, 0, {{-W, -W}, {0, -W}, {0, 0}, {-W, 0}}, {0, 0, 0}, ex, ey});
  faces_.push_back({FaceKind::Exterior, 0, {{0, -W}, {W, -W}, {W, 0}, {0, 0}}, {0, 0, 0}, ex, ey});

  auto glue = [&](int a, int b, Vec3 p, Vec3 q) { gluings_.push_back({a, b, p, q}); };
  glue(0, 1, {0, 0, 0}, {0, 2, 0});
  glue(0, 3, {0, 0, 0}, {2, 0, 0});
  glue(1, 2, {-W, 0, 0}, {0, 0, 0});
  glue(2, 3, {0, -W, 0}, {0, 0, 0});

  const Vec3 across = scale(1.0 / kSqrt2, Vec3{-1, 1, 0});
  for (int k = 2; k <= opt_.n_max; ++k) {
    const double w = slant_width(k);
    const double lo = k * (k - 1.0), mid = double(k) * k, hi = k * (k + 1.0);
    const double ulo = lo / kSqrt2, umid = mid / kSqrt2, uhi = hi / kSqrt2;
    faces_.push_back({FaceKind::SlantInner, k, {{0, -ulo}, {w, -umid}, {w, umid}, {0, ulo}},
                      {lo / 2, lo / 2, 0}, scale(1.0 / w, Vec3{k / 2.0, k / 2.0, 1.0}), across});
    faces_.push_back({FaceKind::SlantOuter, k, {{0, -umid}, {w, -uhi}, {w, uhi}, {0, umid}},
                      {mid / 2, mid / 2, 1}, scale(1.0 / w, Vec3{k / 2.0, k / 2.0, -1.0}), across});
    faces_.push_back({FaceKind::CapX, k, {{0, 0}, {2.0 * k, 0}, {double(k), 1}}, {lo, 0, 0}, ex, ez});
    faces_.push_back({FaceKind::CapY, k, {{0, 0}, {2.0 * k, 0}, {double(k), 1}}, {0, lo, 0}, ey, ez});

    const int in = face_index(FaceKind::SlantInner, k), out = face_index(FaceKind::SlantOuter, k);
    const int cx = face_index(FaceKind::CapX, k), cy = face_index(FaceKind::CapY, k);
    glue(in, out, {mid, 0, 1}, {0, mid, 1});
    if (k == 2) glue(0, in, {2, 0, 0}, {0, 2, 0});
    else glue(face_index(FaceKind::SlantOuter, k - 1), in, {lo, 0, 0}, {0, lo, 0});
    glue(in, cx, {lo, 0, 0}, {mid, 0, 1});
    glue(out, cx, {mid, 0, 1}, {hi, 0, 0});
    glue(in, cy, {0, lo, 0}, {0, mid, 1});
    glue(out, cy, {0, mid, 1}, {0, hi, 0});
    glue(3, cx, {lo, 0, 0}, {hi, 0, 0});
    glue(1, cy, {0, lo, 0}, {0, hi, 0});
  }
}

namespace {

struct Piece {
  std::vector<Vec2> chart;
  std::vector<VertexId> ids;
  std::function<bool(Vec2, Vec2)> valid;
};

std::int64_t cell_key(std::int64_t i, std::int64_t j) { return (i << 32) ^ (j & 0xffffffffLL); }

}  // namespace

void WrinkledSurface::build_mesh() {
  const double h = opt_.resolution;
  const double W = box_;
  const double R = opt_.clip_radius;
  const int n = opt_.n_max;
  const Roof roof(n);
  mesh_ = std::make_shared<MetricGraph>(3);

  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, VertexId> ids;
  auto keep = [&](const Vec3& p) { return R <= 0.0 || std::hypot(p.x, p.y) <= R + 1e-9; };
  auto node = [&](const Vec3& p) {
    auto key = std::make_tuple(std::llround(p.x * 1e7), std::llround(p.y * 1e7), std::llround(p.z * 1e7));
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const double c[] = {p.x, p.y, p.z};
    const VertexId id = mesh_->add_vertex(c);
    ids.emplace(key, id);
    return id;
  };
  auto add = [&](Piece& piece, Vec2 chart, const Vec3& p) {
    if (!keep(p)) return;
    piece.chart.push_back(chart);
    piece.ids.push_back(node(p));
  };

  // Plane piece: everything except the open region x > 0, y > 0, x + y > 2.
  Piece plane;
  plane.valid = [](Vec2 a, Vec2 b) {
    const double e = 1e-9;
    auto [lo, hi] = clip_segment(a, b, {{{1, 0}, e}, {{0, 1}, e}, {{1, 1}, 2 + e}});
    return hi - lo <= 1e-12;
  };
  const auto span = static_cast<long long>(std::floor(W / h + 1e-9));
  for (long long i = -span; i <= span; ++i) {
    for (long long j = -span; j <= span; ++j) {
      const double x = i * h, y = j * h;
      if (x > 1e-9 && y > 1e-9 && x + y > 2 + 1e-9) continue;
      add(plane, {x, y}, {x, y, 0});
    }
  }

  Piece roofp;
  roofp.valid = [&roof](Vec2 a, Vec2 b) { return roof.segment_inside(a, b); };
  const double S = roof.end();
  for (long long i = 0; i * h <= S + 1e-9; ++i) {
    const double s = std::min(S, i * h);
    const double u = roof.u(s);
    const auto m = static_cast<long long>(std::floor(u / h + 1e-9));
    for (long long j = -m; j <= m; ++j) add(roofp, {s, j * h}, roof.position(s, j * h));
  }

  // Lines of constant s: valleys, ridges, and the outer edge. The s = 0 line
  // is shared with the plane piece.
  std::vector<double> lines;
  for (int k = 2; k <= n; ++k) {
    lines.push_back(roof.valley[k]);
    lines.push_back(roof.valley[k] + slant_width(k));
  }
  lines.push_back(S);
  for (double s : lines) {
    const double u = roof.u(s);
    auto m = static_cast<long long>(std::ceil(2 * u / h));
    m += m % 2;
    for (long long j = 0; j <= m; ++j) {
      const double v = -u + 2 * u * j / m;
      const Vec3 p = roof.position(s, v);
      add(roofp, {s, v}, p);
      if (s == 0.0) add(plane, {p.x, p.y}, p);
    }
  }

  std::vector<Piece> walls;
  for (int k = 2; k <= n; ++k) {
    const double lo = k * (k - 1.0);
    for (int axis = 0; axis < 2; ++axis) {
      Piece wall;
      wall.valid = [](Vec2, Vec2) { return true; };
      auto to3 = [&](double t, double z) { return axis == 0 ? Vec3{lo + t, 0, z} : Vec3{0, lo + t, z}; };
      auto to_plane = [&](double t) { return axis == 0 ? Vec2{lo + t, 0} : Vec2{0, lo + t}; };
      const double sign = axis == 0 ? -1.0 : 1.0;

      for (long long i = 0; i * h <= 2.0 * k + 1e-9; ++i) {
        const double t = i * h;
        const double top = t <= k ? t / k : (2.0 * k - t) / k;
        for (long long j = 0; j * h <= top + 1e-9; ++j) add(wall, {t, j * h}, to3(t, j * h));
      }
      // Base on the axis, shared with the plane.
      const auto mb = static_cast<long long>(std::ceil(2.0 * k / h));
      for (long long i = 0; i <= mb; ++i) {
        const double t = 2.0 * k * i / mb;
        const Vec3 p = to3(t, 0);
        add(wall, {t, 0}, p);
        add(plane, to_plane(t), p);
      }
      // Slanted sides, shared with the roof edge over the axis.
      const auto ms = static_cast<long long>(std::ceil(std::sqrt(k * k + 1.0) / h));
      for (int half = 0; half < 2; ++half) {
        for (long long i = 0; i <= ms; ++i) {
          const double lam = static_cast<double>(i) / ms;
          const double t = half == 0 ? lam * k : k + lam * k;
          const double z = half == 0 ? lam : 1.0 - lam;
          const double s = roof.valley[k] + (half == 0 ? lam : 1.0 + lam) * slant_width(k);
          const Vec3 p = to3(t, z);
          add(wall, {t, z}, p);
          add(roofp, {s, sign * roof.u(s)}, p);
        }
      }
      walls.push_back(std::move(wall));
    }
  }

  const double rho = opt_.stencil * h;
  auto connect = [&](const Piece& piece) {
    std::unordered_map<std::int64_t, std::vector<std::size_t>> grid;
    auto cell = [&](Vec2 c) {
      return std::make_pair(static_cast<std::int64_t>(std::floor(c.x / rho)),
                            static_cast<std::int64_t>(std::floor(c.y / rho)));
    };
    for (std::size_t i = 0; i < piece.chart.size(); ++i) {
      auto [cx, cy] = cell(piece.chart[i]);
      grid[cell_key(cx, cy)].push_back(i);
    }
    for (std::size_t i = 0; i < piece.chart.size(); ++i) {
      auto [cx, cy] = cell(piece.chart[i]);
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          auto it = grid.find(cell_key(cx + dx, cy + dy));
          if (it == grid.end()) continue;
          for (std::size_t j : it->second) {
            if (j <= i || piece.ids[i] == piece.ids[j]) continue;
            const double d = acat::distance(piece.chart[i], piece.chart[j]);
            if (d > rho || d <= 0.0) continue;
            if (!piece.valid(piece.chart[i], piece.chart[j])) continue;
            mesh_->add_edge(piece.ids[i], piece.ids[j], d);
          }
        }
      }
    }
  };
  connect(plane);
  connect(roofp);
  for (const auto& w : walls) connect(w);

  boundary_.assign(mesh_->vertex_count(), 0);
  for (VertexId v = 0; v < mesh_->vertex_count(); ++v) {
    const Vec3 p = vertex_position(v);
    const bool box = std::max(std::abs(p.x), std::abs(p.y)) >= W - 1e-9;
    const bool clip = R > 0.0 && std::hypot(p.x, p.y) > R - h;
    const bool outer = p.x >= 0 && p.y >= 0 && p.x + p.y >= n * (n + 1.0) - 1e-9;
    boundary_[v] = box || clip || outer;
  }

  cell_ = h;
  for (VertexId v = 0; v < mesh_->vertex_count(); ++v) {
    const Vec2 p = vertex_plan(v);
    cells_[cell_key(static_cast<std::int64_t>(std::floor(p.x / cell_)),
                    static_cast<std::int64_t>(std::floor(p.y / cell_)))]
        .push_back(v);
  }
  space_ = std::make_unique<GraphSpace>(mesh_, "wrinkled");
}

double WrinkledSurface::roof_length() const { return Roof(opt_.n_max).end(); }

Vec3 WrinkledSurface::roof_position(double s, double v) const { return Roof(opt_.n_max).position(s, v); }

Vec3 WrinkledSurface::position(const SurfacePoint& p) const {
  if (p.face_id < 0 || p.face_id >= static_cast<int>(faces_.size())) throw DomainError("face id out of range");
  return faces_[p.face_id].position(p.local);
}

Vec2 WrinkledSurface::project(const SurfacePoint& p) const {
  const Vec3 q = position(p);
  return {q.x, q.y};
}

SurfacePoint WrinkledSurface::above(Vec2 plan) const {
  const double x = plan.x, y = plan.y;
  if (std::abs(x) > box_ + 1e-9 || std::abs(y) > box_ + 1e-9) throw DomainError("point outside the built surface");
  if (x > 0 && y > 0 && x + y > 2) {
    const int n = opt_.n_max;
    if (x + y > n * (n + 1.0) + 1e-9) throw DomainError("point beyond the outermost strip");
    int k = 2;
    while (k < n && x + y > k * (k + 1.0)) ++k;
    const double u = (x + y) / kSqrt2, v = (y - x) / kSqrt2;
    const double rate = slant_width(k) / (k / kSqrt2);
    if (x + y <= double(k) * k) {
      return {face_index(FaceKind::SlantInner, k), {(u - k * (k - 1) / kSqrt2) * rate, v}};
    }
    return {face_index(FaceKind::SlantOuter, k), {(u - double(k) * k / kSqrt2) * rate, v}};
  }
  if (x >= 0 && y >= 0) return {0, {x, y}};
  if (x <= 0 && y >= 0) return {1, {x, y}};
  if (x <= 0 && y <= 0) return {2, {x, y}};
  return {3, {x, y}};
}

SurfacePoint WrinkledSurface::w(int n) const {
  if (n < 1 || n > opt_.n_max) throw DomainError("w_n requires 1 <= n <= n_max");
  const double c = n * (n + 1.0) / 2.0;
  return above({c, c});
}

SurfacePoint WrinkledSurface::cap_point(int k, bool x_axis, double t, double z) const {
  SurfacePoint p{face_index(x_axis ? FaceKind::CapX : FaceKind::CapY, k), {t, z}};
  if (!faces_[p.face_id].contains(p.local)) throw DomainError("point outside the end cap");
  return p;
}

Vec3 WrinkledSurface::vertex_position(VertexId v) const {
  const auto c = mesh_->coords(v);
  return {c[0], c[1], c[2]};
}

Vec2 WrinkledSurface::vertex_plan(VertexId v) const {
  const auto c = mesh_->coords(v);
  return {c[0], c[1]};
}

VertexId WrinkledSurface::nearest_vertex(const SurfacePoint& p) const { return nearest_vertex(position(p)); }

VertexId WrinkledSurface::nearest_vertex(const Vec3& p) const {
  const auto cx = static_cast<std::int64_t>(std::floor(p.x / cell_));
  const auto cy = static_cast<std::int64_t>(std::floor(p.y / cell_));
  double best = kInfinity;
  VertexId arg = 0;
  const std::int64_t max_ring = static_cast<std::int64_t>(4 * box_ / cell_) + 4;
  for (std::int64_t r = 0; r <= max_ring; ++r) {
    if (std::isfinite(best) && (r - 1) * cell_ > best) break;
    for (std::int64_t dx = -r; dx <= r; ++dx) {
      for (std::int64_t dy = -r; dy <= r; ++dy) {
        if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
        auto it = cells_.find(cell_key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (VertexId v : it->second) {
          const double d = norm3(sub(vertex_position(v), p));
          if (d < best || (d == best && v < arg)) {
            best = d;
            arg = v;
          }
        }
      }
    }
  }
  if (!std::isfinite(best)) throw DomainError("surface mesh is empty near the point");
  return arg;
}

WrinkledSurface::Distance WrinkledSurface::distance(const SurfacePoint& p, const SurfacePoint& q) const {
  const VertexId a = nearest_vertex(p), b = nearest_vertex(q);
  const PathSource src{a, 0.0};
  const VertexId stop[] = {b};
  const auto sp = dijkstra(*mesh_, {&src, 1}, stop);
  if (!std::isfinite(sp.dist[b])) throw UnreachableError("points lie in different mesh components");
  Distance out{sp.dist[b], false};
  for (VertexId v : sp.path_to(b)) out.touched_boundary = out.touched_boundary || boundary_[v];
  return out;
}

int wrinkles_crossed(int n_max, Vec2 a, Vec2 b) {
  int count = 0;
  for (int k = 2; k <= n_max; ++k) {
    auto [lo, hi] = clip_segment(a, b,
                                 {{{1, 0}, 0.0}, {{0, 1}, 0.0}, {{1, 1}, k * (k - 1.0)}, {{-1, -1}, -k * (k + 1.0)}});
    if (lo <= hi) ++count;
  }
  return count;
}

ProjectionDefect projection_defect(const WrinkledSurface& surface, const SurfacePoint& p, const SurfacePoint& q,
                                   bool enforce) {
  ProjectionDefect out;
  const Vec2 a = surface.project(p), b = surface.project(q);
  out.mesh_distance = surface.distance(p, q).value;
  out.plan_distance = acat::distance(a, b);
  out.f_pq = std::abs(out.mesh_distance - out.plan_distance);
  out.wrinkles_crossed = wrinkles_crossed(surface.n_max(), a, b);
  out.within_bound = out.f_pq <= 2.0 * out.wrinkles_crossed + 4.0 * surface.resolution();
  if (enforce && !out.within_bound) {
    throw InvariantViolation("projection defect exceeds 2 per wrinkle crossed");
  }
  return out;
}

}  // namespace acat
