#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace acat {

// Absolute tolerance used for metric comparisons throughout the library.
inline constexpr double kTolerance = 1e-9;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 lerp(Vec2 a, Vec2 b, double t) { return a + t * (b - a); }

using VertexId = std::uint32_t;

// A point of a metric graph: lies on the edge {u, v} at distance `offset`
// from u. Vertices are represented with u == v and offset == 0.
struct GraphPoint {
  VertexId u = 0;
  VertexId v = 0;
  double offset = 0.0;

  static GraphPoint at_vertex(VertexId id) { return {id, id, 0.0}; }
  bool is_vertex() const { return u == v; }
};

// Point of the upper half-plane model of H^2.
struct HPoint {
  double x = 0.0;
  double y = 1.0;
};

// Point of the universal cover of T^1 H^2 in section coordinates: the base
// point and the (unbounded) fiber offset from the global section.
struct UTPoint {
  HPoint base;
  double theta = 0.0;
};

// A point tagged with the space it belongs to.
struct MetricPoint {
  std::string space;
  std::variant<Vec2, GraphPoint, HPoint, UTPoint> coords;
};

// Uniform contract for the geodesic spaces used by the comparison
// machinery.
class GeodesicSpace {
 public:
  virtual ~GeodesicSpace() = default;

  virtual const std::string& tag() const = 0;
  virtual double distance(const MetricPoint& p, const MetricPoint& q) const = 0;

  // Distances from one source to many targets; spaces with a shortest-path
  // oracle override this to share one search.
  virtual std::vector<double> distances_from(const MetricPoint& source,
                                             std::span<const MetricPoint> targets) const;

  // Points at arclength fractions `ts` along a geodesic from a to b.
  virtual std::vector<MetricPoint> geodesic_points(const MetricPoint& a, const MetricPoint& b,
                                                   std::span<const double> ts) const = 0;

 protected:
  // Throws DomainError when p does not belong to this space.
  void require_own(const MetricPoint& p) const;
};

class EuclideanPlane final : public GeodesicSpace {
 public:
  EuclideanPlane() = default;

  const std::string& tag() const override { return tag_; }
  double distance(const MetricPoint& p, const MetricPoint& q) const override;
  std::vector<MetricPoint> geodesic_points(const MetricPoint& a, const MetricPoint& b,
                                           std::span<const double> ts) const override;

  MetricPoint point(double x, double y) const { return {tag_, Vec2{x, y}}; }
  Vec2 coords(const MetricPoint& p) const;

 private:
  std::string tag_ = "euclidean";
};

struct GraphEdge {
  VertexId i = 0;
  VertexId j = 0;
  double length = 0.0;
};

// Weighted undirected graph standing in for a geodesic space. Vertices carry
// an optional coordinate record of fixed dimension.
class MetricGraph {
 public:
  struct Arc {
    VertexId to;
    double length;
  };

  explicit MetricGraph(std::size_t coord_dim = 0) : coord_dim_(coord_dim) {}

  VertexId add_vertex(std::span<const double> coords = {});
  // Adds {i, j}; a repeated pair keeps the shorter length.
  void add_edge(VertexId i, VertexId j, double length);

  std::size_t vertex_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  std::size_t coord_dim() const { return coord_dim_; }
  std::span<const double> coords(VertexId v) const;
  std::span<const Arc> neighbors(VertexId v) const { return adjacency_.at(v); }
  std::optional<double> edge_length(VertexId i, VertexId j) const;

  // Edges with i < j, sorted.
  std::vector<GraphEdge> edges() const;
  // Maximum edge length (0 for an edgeless graph).
  double resolution() const { return resolution_; }
  bool connected() const;

 private:
  std::size_t coord_dim_;
  std::vector<double> coords_;
  std::vector<std::vector<Arc>> adjacency_;
  std::size_t edge_count_ = 0;
  double resolution_ = 0.0;
};

// Output of a label-setting shortest-path search.
struct ShortestPaths {
  std::vector<double> dist;
  std::vector<VertexId> parent;  // parent[v] == v for sources and unreached vertices

  std::vector<VertexId> path_to(VertexId target) const;
};

struct PathSource {
  VertexId vertex;
  double initial = 0.0;
};

// Priority-queue Dijkstra. Ties are settled in increasing vertex id. When
// `stop_after` is non-empty the search halts once all of those vertices are
// settled.
ShortestPaths dijkstra(const MetricGraph& g, std::span<const PathSource> sources,
                       std::span<const VertexId> stop_after = {});

double graph_distance(const MetricGraph& g, VertexId u, VertexId v);

// Subdivides every edge into equal pieces no longer than target_resolution.
// New vertices interpolate the endpoint coordinates.
MetricGraph refine_graph(const MetricGraph& g, double target_resolution);

// Sum of consecutive distances measured in `space`.
double polyline_length(const GeodesicSpace& space, std::span<const MetricPoint> path);

// Line format: `v <id> <coords...>` and `e <i> <j> <length>`, 17 significant
// digits.
void write_graph(std::ostream& out, const MetricGraph& g);
MetricGraph read_graph(std::istream& in);

// The continuous metric graph: points may sit anywhere on an edge.
class GraphSpace final : public GeodesicSpace {
 public:
  GraphSpace(std::shared_ptr<const MetricGraph> graph, std::string tag);

  const std::string& tag() const override { return tag_; }
  double distance(const MetricPoint& p, const MetricPoint& q) const override;
  std::vector<double> distances_from(const MetricPoint& source,
                                     std::span<const MetricPoint> targets) const override;
  std::vector<MetricPoint> geodesic_points(const MetricPoint& a, const MetricPoint& b,
                                           std::span<const double> ts) const override;

  const MetricGraph& graph() const { return *graph_; }
  MetricPoint vertex(VertexId v) const;
  MetricPoint point(GraphPoint p) const;
  GraphPoint coords(const MetricPoint& p) const;

 private:
  std::shared_ptr<const MetricGraph> graph_;
  std::string tag_;
};

}  // namespace acat
