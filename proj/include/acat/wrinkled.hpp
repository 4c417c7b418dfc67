#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "acat/metric_core.hpp"

namespace acat {

// Closed forms along the diagonal of the wrinkled quadrant.
double diagonal_distance(int n);
double euclidean_diagonal_distance(int n);

struct DivergenceGap {
  double gap = 0.0;
  double lower_bound = 0.0;
};

// 2 sqrt(k^2/2 + 1) - sqrt(2) k, evaluated as 4 / (sqrt(2k^2+4) + k sqrt(2)).
double gap_summand(int k);
// 4 / (k (sqrt(2) + sqrt(3))).
double gap_lower_term(int k);
// Exact integer form of gap_summand(k) >= gap_lower_term(k): k^2 >= 4.
bool gap_term_dominates(int k);

DivergenceGap divergence_gap(int n);
// Entries for n = 1..n_max (index n-1), accumulated in extended precision.
std::vector<DivergenceGap> divergence_table(int n_max);

// Least length of a path crossing the strips k..n+k: k + (k+1) + ... + (n+k).
double min_crossing_length(int k, int n);

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

enum class FaceKind { Corner, Exterior, SlantInner, SlantOuter, CapX, CapY };

// A planar face with an isometric frame: position = origin + l.x e1 + l.y e2.
struct Face {
  FaceKind kind = FaceKind::Corner;
  int strip = 0;  // prism index for slant faces and caps, 0 otherwise
  std::vector<Vec2> polygon;  // local coordinates, counter-clockwise
  Vec3 origin, e1, e2;

  Vec3 position(Vec2 local) const;
  Vec2 local_of(const Vec3& p) const;
  bool contains(Vec2 local, double tol = 1e-9) const;
};

// Two faces share the segment [from, to].
struct FaceGluing {
  int face_a = 0;
  int face_b = 0;
  Vec3 from, to;
};

struct SurfacePoint {
  int face_id = 0;
  Vec2 local;
};

struct WrinkledOptions {
  int n_max = 2;
  double resolution = 0.05;
  // Nodes of one chart closer than stencil * resolution are joined.
  double stencil = 4.2;
  // Half-width of the exterior box; 0 selects n_max (n_max + 1).
  double exterior_half_width = 0.0;
  // Keep only the part whose projection lies within this radius of the
  // origin; 0 keeps everything.
  double clip_radius = 0.0;
};

// Default mesh spacing: 0.05 up to n_max = 10, then proportional to the
// width of the outermost strip.
double default_resolution(int n_max);

class WrinkledSurface {
 public:
  explicit WrinkledSurface(const WrinkledOptions& options);

  int n_max() const { return opt_.n_max; }
  double resolution() const { return opt_.resolution; }
  double exterior_half_width() const { return box_; }
  const WrinkledOptions& options() const { return opt_; }

  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<FaceGluing>& gluings() const { return gluings_; }
  int face_index(FaceKind kind, int strip = 0, int part = 0) const;

  std::shared_ptr<const MetricGraph> mesh() const { return mesh_; }
  const GraphSpace& space() const { return *space_; }

  Vec3 position(const SurfacePoint& p) const;
  Vec2 project(const SurfacePoint& p) const;

  // The point of the surface lying over a planar point (roof over the open
  // quadrant beyond the corner, flat elsewhere).
  SurfacePoint above(Vec2 plan) const;
  SurfacePoint origin() const { return above({0.0, 0.0}); }
  // The point over (n(n+1)/2, n(n+1)/2).
  SurfacePoint w(int n) const;
  // Point on a vertical end cap: t along the axis from k(k-1), height z.
  SurfacePoint cap_point(int k, bool x_axis, double t, double z) const;

  VertexId nearest_vertex(const SurfacePoint& p) const;
  VertexId nearest_vertex(const Vec3& p) const;
  MetricPoint mesh_point(const SurfacePoint& p) const { return space_->vertex(nearest_vertex(p)); }
  Vec3 vertex_position(VertexId v) const;
  Vec2 vertex_plan(VertexId v) const;
  // True for vertices on the truncation boundary (box, clip circle or the
  // outer valley line).
  bool on_boundary(VertexId v) const { return boundary_.at(v) != 0; }

  struct Distance {
    double value = 0.0;
    bool touched_boundary = false;
  };
  Distance distance(const SurfacePoint& p, const SurfacePoint& q) const;

  // Roof chart: s is arclength across the strips measured from x + y = 2.
  double roof_length() const;
  Vec3 roof_position(double s, double v) const;

 private:
  void build_faces();
  void build_mesh();

  WrinkledOptions opt_;
  double box_ = 0.0;
  std::vector<Face> faces_;
  std::vector<FaceGluing> gluings_;
  std::shared_ptr<MetricGraph> mesh_;
  std::unique_ptr<GraphSpace> space_;
  std::vector<char> boundary_;
  std::unordered_map<std::int64_t, std::vector<VertexId>> cells_;
  double cell_ = 1.0;
};

struct ProjectionDefect {
  double f_pq = 0.0;
  int wrinkles_crossed = 0;
  double mesh_distance = 0.0;
  double plan_distance = 0.0;
  bool within_bound = false;  // f_pq <= 2 wrinkles_crossed + 4 resolution
};

// Number of strips whose closed planar region meets the segment [a, b].
int wrinkles_crossed(int n_max, Vec2 a, Vec2 b);

// Throws InvariantViolation when the bound fails and `enforce` is set.
ProjectionDefect projection_defect(const WrinkledSurface& surface, const SurfacePoint& p,
                                   const SurfacePoint& q, bool enforce = false);

}  // namespace acat
