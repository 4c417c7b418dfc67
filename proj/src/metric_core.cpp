#include "acat/metric_core.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>

#include "acat/errors.hpp"

namespace acat {

std::vector<double> GeodesicSpace::distances_from(const MetricPoint& source,
                                                  std::span<const MetricPoint> targets) const {
  std::vector<double> out;
  out.reserve(targets.size());
  for (const auto& t : targets) out.push_back(distance(source, t));
  return out;
}

void GeodesicSpace::require_own(const MetricPoint& p) const {
  if (p.space != tag()) {
    throw DomainError("point tagged '" + p.space + "' used in space '" + tag() + "'");
  }
}

Vec2 EuclideanPlane::coords(const MetricPoint& p) const {
  require_own(p);
  const auto* v = std::get_if<Vec2>(&p.coords);
  if (!v) throw DomainError("euclidean point without planar coordinates");
  if (!std::isfinite(v->x) || !std::isfinite(v->y)) throw DomainError("non-finite coordinates");
  return *v;
}

double EuclideanPlane::distance(const MetricPoint& p, const MetricPoint& q) const {
  return acat::distance(coords(p), coords(q));
}

std::vector<MetricPoint> EuclideanPlane::geodesic_points(const MetricPoint& a, const MetricPoint& b,
                                                         std::span<const double> ts) const {
  const Vec2 pa = coords(a), pb = coords(b);
  std::vector<MetricPoint> out;
  out.reserve(ts.size());
  for (double t : ts) out.push_back(point(lerp(pa, pb, t).x, lerp(pa, pb, t).y));
  return out;
}

// ---------------------------------------------------------------------------

VertexId MetricGraph::add_vertex(std::span<const double> coords) {
  if (coords.size() != coord_dim_) {
    throw DomainError("vertex coordinate record has wrong dimension");
  }
  coords_.insert(coords_.end(), coords.begin(), coords.end());
  adjacency_.emplace_back();
  return static_cast<VertexId>(adjacency_.size() - 1);
}

void MetricGraph::add_edge(VertexId i, VertexId j, double length) {
  if (i >= vertex_count() || j >= vertex_count()) throw DomainError("edge endpoint out of range");
  if (i == j) throw DomainError("self-loop edge");
  if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("edge length must be positive");
  for (auto& arc : adjacency_[i]) {
    if (arc.to == j) {
      if (length < arc.length) {
        arc.length = length;
        for (auto& back : adjacency_[j]) {
          if (back.to == i) back.length = length;
        }
      }
      return;
    }
  }
  adjacency_[i].push_back({j, length});
  adjacency_[j].push_back({i, length});
  ++edge_count_;
  resolution_ = std::max(resolution_, length);
}

std::span<const double> MetricGraph::coords(VertexId v) const {
  if (v >= vertex_count()) throw DomainError("vertex out of range");
  return {coords_.data() + static_cast<std::size_t>(v) * coord_dim_, coord_dim_};
}

std::optional<double> MetricGraph::edge_length(VertexId i, VertexId j) const {
  if (i >= vertex_count()) return std::nullopt;
  for (const auto& arc : adjacency_[i]) {
    if (arc.to == j) return arc.length;
  }
  return std::nullopt;
}

std::vector<GraphEdge> MetricGraph::edges() const {
  std::vector<GraphEdge> out;
  out.reserve(edge_count_);
  for (VertexId i = 0; i < vertex_count(); ++i) {
    for (const auto& arc : adjacency_[i]) {
      if (i < arc.to) out.push_back({i, arc.to, arc.length});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const GraphEdge& a, const GraphEdge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  return out;
}

bool MetricGraph::connected() const {
  if (vertex_count() == 0) return true;
  std::vector<char> seen(vertex_count(), 0);
  std::vector<VertexId> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    for (const auto& arc : adjacency_[v]) {
      if (!seen[arc.to]) {
        seen[arc.to] = 1;
        ++count;
        stack.push_back(arc.to);
      }
    }
  }
  return count == vertex_count();
}

std::vector<VertexId> ShortestPaths::path_to(VertexId target) const {
  if (target >= dist.size() || !std::isfinite(dist[target])) {
    throw UnreachableError("target not reached by the search");
  }
  std::vector<VertexId> path{target};
  while (parent[path.back()] != path.back()) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

ShortestPaths dijkstra(const MetricGraph& g, std::span<const PathSource> sources,
                       std::span<const VertexId> stop_after) {
  const std::size_t n = g.vertex_count();
  ShortestPaths sp;
  sp.dist.assign(n, kInfinity);
  sp.parent.resize(n);
  for (VertexId v = 0; v < n; ++v) sp.parent[v] = v;

  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (const auto& s : sources) {
    if (s.vertex >= n) throw DomainError("source vertex out of range");
    if (s.initial < sp.dist[s.vertex]) {
      sp.dist[s.vertex] = s.initial;
      heap.emplace(s.initial, s.vertex);
    }
  }

  std::vector<char> settled(n, 0);
  std::vector<char> wanted;
  std::size_t remaining = 0;
  if (!stop_after.empty()) {
    wanted.assign(n, 0);
    for (VertexId t : stop_after) {
      if (t >= n) throw DomainError("target vertex out of range");
      if (!wanted[t]) {
        wanted[t] = 1;
        ++remaining;
      }
    }
  }

  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (settled[v] || d > sp.dist[v]) continue;
    settled[v] = 1;
    if (!wanted.empty() && wanted[v] && --remaining == 0) break;
    for (const auto& arc : g.neighbors(v)) {
      const double nd = d + arc.length;
      if (nd < sp.dist[arc.to]) {
        sp.dist[arc.to] = nd;
        sp.parent[arc.to] = v;
        heap.emplace(nd, arc.to);
      }
    }
  }
  return sp;
}

double graph_distance(const MetricGraph& g, VertexId u, VertexId v) {
  if (u >= g.vertex_count() || v >= g.vertex_count()) throw DomainError("vertex out of range");
  if (u == v) return 0.0;
  const PathSource src{u, 0.0};
  const VertexId stop[] = {v};
  auto sp = dijkstra(g, {&src, 1}, stop);
  if (!std::isfinite(sp.dist[v])) throw UnreachableError("vertices lie in different components");
  return sp.dist[v];
}

MetricGraph refine_graph(const MetricGraph& g, double target_resolution) {
  if (!(target_resolution > 0.0)) throw DomainError("target resolution must be positive");
  const std::size_t dim = g.coord_dim();
  MetricGraph out(dim);
  for (VertexId v = 0; v < g.vertex_count(); ++v) out.add_vertex(g.coords(v));
  std::vector<double> buf(dim);
  for (const auto& e : g.edges()) {
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(e.length / target_resolution - 1e-12)));
    const double step = e.length / static_cast<double>(pieces);
    VertexId prev = e.i;
    const auto ci = g.coords(e.i);
    const auto cj = g.coords(e.j);
    for (std::size_t k = 1; k < pieces; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(pieces);
      for (std::size_t c = 0; c < dim; ++c) buf[c] = ci[c] + t * (cj[c] - ci[c]);
      VertexId mid = out.add_vertex(buf);
      out.add_edge(prev, mid, step);
      prev = mid;
    }
    out.add_edge(prev, e.j, step);
  }
  return out;
}

double polyline_length(const GeodesicSpace& space, std::span<const MetricPoint> path) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (path[i].space != space.tag() || path[i + 1].space != space.tag()) {
      throw DomainError("polyline mixes points from different spaces");
    }
    total += space.distance(path[i], path[i + 1]);
  }
  if (path.size() == 1 && path[0].space != space.tag()) {
    throw DomainError("polyline point from a different space");
  }
  return total;
}

void write_graph(std::ostream& out, const MetricGraph& g) {
  char buf[64];
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    out << "v " << v;
    for (double c : g.coords(v)) {
      std::snprintf(buf, sizeof buf, " %.17g", c);
      out << buf;
    }
    out << '\n';
  }
  for (const auto& e : g.edges()) {
    std::snprintf(buf, sizeof buf, " %.17g", e.length);
    out << "e " << e.i << ' ' << e.j << buf << '\n';
  }
}

MetricGraph read_graph(std::istream& in) {
  struct Vertex {
    long long id;
    std::vector<double> coords;
  };
  std::vector<Vertex> vertices;
  std::vector<std::tuple<long long, long long, double>> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind) || kind[0] == '#') continue;
    auto fail = [&](const char* what) {
      throw UsageError("graph line " + std::to_string(lineno) + ": " + what);
    };
    if (kind == "v") {
      Vertex v;
      if (!(ls >> v.id)) fail("bad vertex id");
      double c;
      while (ls >> c) v.coords.push_back(c);
      if (!ls.eof()) fail("bad vertex coordinate");
      vertices.push_back(std::move(v));
    } else if (kind == "e") {
      long long i, j;
      double len;
      if (!(ls >> i >> j >> len)) fail("bad edge record");
      edges.emplace_back(i, j, len);
    } else {
      fail("unknown record");
    }
  }
  const std::size_t dim = vertices.empty() ? 0 : vertices.front().coords.size();
  MetricGraph g(dim);
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    if (vertices[k].id != static_cast<long long>(k)) throw UsageError("vertex ids must be 0..n-1 in order");
    if (vertices[k].coords.size() != dim) throw UsageError("inconsistent vertex coordinate dimension");
    g.add_vertex(vertices[k].coords);
  }
  for (const auto& [i, j, len] : edges) {
    if (i < 0 || j < 0) throw UsageError("negative vertex id in edge");
    g.add_edge(static_cast<VertexId>(i), static_cast<VertexId>(j), len);
  }
  return g;
}

// ---------------------------------------------------------------------------

namespace {

struct Anchor {
  VertexId a;
  double to_a;
  VertexId b;
  double to_b;
};

Anchor anchor_of(const MetricGraph& g, const GraphPoint& p) {
  if (p.is_vertex()) return {p.u, 0.0, p.u, 0.0};
  const double len = *g.edge_length(p.u, p.v);
  return {p.u, p.offset, p.v, len - p.offset};
}

}  // namespace

GraphSpace::GraphSpace(std::shared_ptr<const MetricGraph> graph, std::string tag)
    : graph_(std::move(graph)), tag_(std::move(tag)) {
  if (!graph_) throw DomainError("graph space needs a graph");
}

MetricPoint GraphSpace::vertex(VertexId v) const { return point(GraphPoint::at_vertex(v)); }

MetricPoint GraphSpace::point(GraphPoint p) const {
  MetricPoint mp{tag_, p};
  mp.coords = coords(mp);
  return mp;
}

GraphPoint GraphSpace::coords(const MetricPoint& p) const {
  require_own(p);
  const auto* gp = std::get_if<GraphPoint>(&p.coords);
  if (!gp) throw DomainError("graph point without edge coordinates");
  GraphPoint q = *gp;
  if (q.u >= graph_->vertex_count() || q.v >= graph_->vertex_count()) {
    throw DomainError("graph point vertex out of range");
  }
  if (q.is_vertex()) {
    if (q.offset != 0.0) throw DomainError("vertex point with nonzero offset");
    return q;
  }
  const auto len = graph_->edge_length(q.u, q.v);
  if (!len) throw DomainError("graph point on a missing edge");
  if (!(q.offset >= 0.0 && q.offset <= *len)) throw DomainError("edge offset out of range");
  if (q.offset == 0.0) return GraphPoint::at_vertex(q.u);
  if (q.offset == *len) return GraphPoint::at_vertex(q.v);
  return q;
}

double GraphSpace::distance(const MetricPoint& p, const MetricPoint& q) const {
  const MetricPoint one[] = {q};
  return distances_from(p, one).front();
}

namespace {

// Distance between two points known to lie on the same edge {u, v}, measured
// along it; nullopt when they do not share an edge.
std::optional<double> along_edge(const MetricGraph& g, const GraphPoint& p, const GraphPoint& q) {
  auto pos = [&](const GraphPoint& x, VertexId u, VertexId v, double len) -> std::optional<double> {
    if (x.is_vertex()) {
      if (x.u == u) return 0.0;
      if (x.u == v) return len;
      return std::nullopt;
    }
    if (x.u == u && x.v == v) return x.offset;
    if (x.u == v && x.v == u) return len - x.offset;
    return std::nullopt;
  };
  const GraphPoint& e = !p.is_vertex() ? p : q;
  if (e.is_vertex()) return std::nullopt;
  const double len = *g.edge_length(e.u, e.v);
  auto a = pos(p, e.u, e.v, len);
  auto b = pos(q, e.u, e.v, len);
  if (!a || !b) return std::nullopt;
  return std::abs(*a - *b);
}

}  // namespace

std::vector<double> GraphSpace::distances_from(const MetricPoint& source,
                                               std::span<const MetricPoint> targets) const {
  const MetricGraph& g = *graph_;
  const GraphPoint s = coords(source);
  std::vector<GraphPoint> ts;
  ts.reserve(targets.size());
  std::vector<VertexId> stop;
  for (const auto& t : targets) {
    ts.push_back(coords(t));
    stop.push_back(ts.back().u);
    stop.push_back(ts.back().v);
  }
  const Anchor sa = anchor_of(g, s);
  const PathSource srcs[] = {{sa.a, sa.to_a}, {sa.b, sa.to_b}};
  auto sp = dijkstra(g, srcs, stop);

  std::vector<double> out;
  out.reserve(ts.size());
  for (const auto& t : ts) {
    const Anchor ta = anchor_of(g, t);
    double d = std::min(sp.dist[ta.a] + ta.to_a, sp.dist[ta.b] + ta.to_b);
    if (auto direct = along_edge(g, s, t)) d = std::min(d, *direct);
    if (!std::isfinite(d)) throw UnreachableError("points lie in different components");
    out.push_back(d);
  }
  return out;
}

std::vector<MetricPoint> GraphSpace::geodesic_points(const MetricPoint& a, const MetricPoint& b,
                                                     std::span<const double> ts) const {
  const MetricGraph& g = *graph_;
  const GraphPoint pa = coords(a);
  const GraphPoint pb = coords(b);

  // The geodesic as a chain of segments, each lying on one edge {u, v} and
  // running from position `from` to position `to` (measured from u).
  struct Segment {
    VertexId u, v;
    double from, to;
  };
  std::vector<Segment> segs;

  const Anchor sa = anchor_of(g, pa);
  const Anchor ta = anchor_of(g, pb);
  const PathSource srcs[] = {{sa.a, sa.to_a}, {sa.b, sa.to_b}};
  const VertexId stop[] = {ta.a, ta.b};
  auto sp = dijkstra(g, srcs, stop);
  const double via_a = sp.dist[ta.a] + ta.to_a;
  const double via_b = sp.dist[ta.b] + ta.to_b;
  double total = std::min(via_a, via_b);
  auto direct = along_edge(g, pa, pb);

  auto edge_pos = [&](const GraphPoint& x, VertexId u, VertexId v) {
    if (x.is_vertex()) return x.u == u ? 0.0 : *g.edge_length(u, v);
    return x.u == u ? x.offset : *g.edge_length(u, v) - x.offset;
  };

  if (direct && *direct <= total) {
    total = *direct;
    if (total > 0.0) {
      const GraphPoint& e = !pa.is_vertex() ? pa : pb;
      segs.push_back({e.u, e.v, edge_pos(pa, e.u, e.v), edge_pos(pb, e.u, e.v)});
    }
  } else {
    if (!std::isfinite(total)) throw UnreachableError("points lie in different components");
    const VertexId last = via_a <= via_b ? ta.a : ta.b;
    const auto path = sp.path_to(last);
    const VertexId first = path.front();
    if (!pa.is_vertex()) {
      segs.push_back({pa.u, pa.v, pa.offset, first == pa.u ? 0.0 : *g.edge_length(pa.u, pa.v)});
    }
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      segs.push_back({path[k], path[k + 1], 0.0, *g.edge_length(path[k], path[k + 1])});
    }
    if (!pb.is_vertex()) {
      segs.push_back({pb.u, pb.v, last == pb.u ? 0.0 : *g.edge_length(pb.u, pb.v), pb.offset});
    }
  }

  std::vector<MetricPoint> out;
  out.reserve(ts.size());
  for (double t : ts) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("geodesic parameter outside [0,1]");
    double remaining = t * total;
    GraphPoint at = pa;
    for (const auto& seg : segs) {
      const double len = std::abs(seg.to - seg.from);
      if (remaining <= len || &seg == &segs.back()) {
        const double step = std::min(remaining, len);
        const double pos = seg.from + (seg.to >= seg.from ? step : -step);
        at = {seg.u, seg.v, pos};
        break;
      }
      remaining -= len;
    }
    if (t == 1.0) at = pb;
    out.push_back(point(at.offset == 0.0 ? GraphPoint::at_vertex(at.u) : at));
  }
  return out;
}

}  // namespace acat
