#include "acat/tree_of_spaces.hpp"

#include <algorithm>
#include <cmath>

#include "acat/errors.hpp"
#include "json.hpp"

namespace acat {

std::vector<double> all_pairs(const MetricGraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<double> out(n * n);
  for (VertexId s = 0; s < n; ++s) {
    const PathSource src{s, 0.0};
    const ShortestPaths sp = dijkstra(g, std::span<const PathSource>(&src, 1));
    std::copy(sp.dist.begin(), sp.dist.end(), out.begin() + static_cast<std::ptrdiff_t>(s * n));
  }
  return out;
}

std::vector<int> TreeOfSpaces::block_path(int a, int b) const {
  std::vector<int> up, down;
  while (blocks.at(a).depth > blocks.at(b).depth) {
    up.push_back(a);
    a = blocks[a].parent;
  }
  while (blocks.at(b).depth > blocks.at(a).depth) {
    down.push_back(b);
    b = blocks[b].parent;
  }
  while (a != b) {
    up.push_back(a);
    down.push_back(b);
    a = blocks[a].parent;
    b = blocks[b].parent;
  }
  up.push_back(a);
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

namespace {

// One connection between neighbouring blocks: an edge-space graph whose
// level 0 attaches through side0_map and whose last level through side1_map.
struct Link {
  const MetricGraph* a = nullptr;  // null: discrete, one unit edge per pair
  std::vector<VertexId> side0_map;
  std::vector<VertexId> side1_map;
};

TreeOfSpaces assemble(const MetricGraph& x1, const MetricGraph& x2, const Link& link, int branching, int radius,
                      int steps, GluingMode mode, BlockType root) {
  if (branching < 1) throw DomainError("branching must be at least 1");
  if (radius < 0) throw DomainError("radius must be non-negative");
  if (steps < 1) throw DomainError("strip_steps must be at least 1");

  TreeOfSpaces z;
  z.radius = radius;
  z.mode = mode;
  z.blocks.push_back({-1, 0, mode == GluingMode::Hnn ? BlockType::X1 : root, {}});
  for (std::size_t i = 0; i < z.blocks.size(); ++i) {
    if (z.blocks[i].depth >= radius) continue;
    for (int c = 0; c < branching; ++c) {
      BlockType t = BlockType::X1;
      if (mode == GluingMode::Amalgam) t = z.blocks[i].type == BlockType::X1 ? BlockType::X2 : BlockType::X1;
      z.blocks.push_back({static_cast<int>(i), z.blocks[i].depth + 1, t, {}});
    }
  }

  // Block vertices first, so two gluings of the same tree share their ids.
  for (std::size_t b = 0; b < z.blocks.size(); ++b) {
    const MetricGraph& x = z.blocks[b].type == BlockType::X1 ? x1 : x2;
    for (VertexId v = 0; v < x.vertex_count(); ++v) {
      z.blocks[b].vertices.push_back(z.graph.add_vertex());
      z.owner.push_back(static_cast<int>(b));
      z.local.push_back(v);
    }
    for (const GraphEdge& e : x.edges())
      z.graph.add_edge(z.blocks[b].vertices[e.i], z.blocks[b].vertices[e.j], e.length);
  }

  for (std::size_t b = 1; b < z.blocks.size(); ++b) {
    const int parent = z.blocks[b].parent;
    Strip s;
    // embed1 always lands in an X1-type block; in HNN mode the parent side.
    const bool parent_is_side0 = mode == GluingMode::Hnn || z.blocks[parent].type == BlockType::X1;
    s.side0 = parent_is_side0 ? parent : static_cast<int>(b);
    s.side1 = parent_is_side0 ? static_cast<int>(b) : parent;
    const std::size_t m = link.side0_map.size();
    std::vector<VertexId> first(m), last(m);
    for (std::size_t k = 0; k < m; ++k) {
      first[k] = z.blocks[s.side0].vertices[link.side0_map[k]];
      last[k] = z.blocks[s.side1].vertices[link.side1_map[k]];
    }
    s.levels.push_back(first);
    for (int level = 1; level < steps; ++level) {
      std::vector<VertexId> row(m);
      for (std::size_t k = 0; k < m; ++k) {
        row[k] = z.graph.add_vertex();
        z.owner.push_back(-1);
        z.local.push_back(static_cast<VertexId>(k));
      }
      s.levels.push_back(row);
    }
    s.levels.push_back(last);
    const double h = 1.0 / steps;
    for (std::size_t level = 0; level + 1 < s.levels.size(); ++level)
      for (std::size_t k = 0; k < m; ++k) z.graph.add_edge(s.levels[level][k], s.levels[level + 1][k], h);
    if (link.a)
      for (std::size_t level = 1; level + 1 < s.levels.size(); ++level)
        for (const GraphEdge& e : link.a->edges())
          z.graph.add_edge(s.levels[level][e.i], s.levels[level][e.j], e.length);
    z.strips.push_back(std::move(s));
  }
  return z;
}

void require_isometric(const MetricGraph& a, const MetricGraph& x, const std::vector<VertexId>& embed,
                       const char* name) {
  if (embed.size() != a.vertex_count()) throw DomainError(std::string(name) + " does not cover the edge space");
  for (VertexId v : embed)
    if (v >= x.vertex_count()) throw DomainError(std::string(name) + " leaves its vertex space");
  const std::vector<double> da = all_pairs(a), dx = all_pairs(x);
  const std::size_t n = a.vertex_count(), nx = x.vertex_count();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double want = da[i * n + j], got = dx[embed[i] * nx + embed[j]];
      if (i != j && embed[i] == embed[j]) throw DomainError(std::string(name) + " is not injective");
      if (!(std::abs(want - got) <= 1e-12) && !(std::isinf(want) && std::isinf(got)))
        throw DomainError(std::string(name) + " is not isometric");
    }
}

}  // namespace

TreeOfSpaces build_amalgam_space(const GluingSpec& spec, int branching, int radius, int strip_steps,
                                 GluingMode mode, BlockType root) {
  if (spec.a.vertex_count() == 0) throw DomainError("empty edge space");
  const MetricGraph& x2 = mode == GluingMode::Hnn ? spec.x1 : spec.x2;
  require_isometric(spec.a, spec.x1, spec.embed1, "embed1");
  require_isometric(spec.a, x2, spec.embed2, "embed2");
  const Link link{&spec.a, spec.embed1, spec.embed2};
  return assemble(spec.x1, x2, link, branching, radius, strip_steps, mode, root);
}

DecompositionReport geodesic_decomposition_check(const TreeOfSpaces& z, const GluingSpec& spec, VertexId p,
                                                 VertexId q) {
  if (p >= z.owner.size() || q >= z.owner.size() || z.owner[p] < 0 || z.owner[q] < 0)
    throw DomainError("decomposition endpoints must be block vertices");
  DecompositionReport out;
  out.dijkstra = graph_distance(z.graph, p, q);
  out.blocks = z.block_path(z.owner[p], z.owner[q]);

  const MetricGraph& x2 = z.mode == GluingMode::Hnn ? spec.x1 : spec.x2;
  const std::vector<double> d1 = all_pairs(spec.x1), d2 = all_pairs(x2), da = all_pairs(spec.a);
  const std::size_t n1 = spec.x1.vertex_count(), n2 = x2.vertex_count(), na = spec.a.vertex_count();
  auto block_dist = [&](int b, VertexId u, VertexId v) {
    return z.blocks[b].type == BlockType::X1 ? d1[u * n1 + v] : d2[u * n2 + v];
  };

  // Cost to reach each local vertex of the current block.
  const int first = out.blocks.front();
  const std::size_t first_n = z.blocks[first].vertices.size();
  std::vector<double> cost(first_n);
  for (VertexId v = 0; v < first_n; ++v) cost[v] = block_dist(first, z.local[p], v);

  for (std::size_t i = 0; i + 1 < out.blocks.size(); ++i) {
    const int from = out.blocks[i], to = out.blocks[i + 1];
    const Strip* strip = nullptr;
    for (const Strip& s : z.strips)
      if ((s.side0 == from && s.side1 == to) || (s.side0 == to && s.side1 == from)) strip = &s;
    const bool forward = strip->side0 == from;
    const auto& exit_map = forward ? spec.embed1 : spec.embed2;
    const auto& entry_map = forward ? spec.embed2 : spec.embed1;
    std::vector<double> across(na, kInfinity);
    for (std::size_t a1 = 0; a1 < na; ++a1)
      for (std::size_t a2 = 0; a2 < na; ++a2)
        across[a2] = std::min(across[a2], cost[exit_map[a1]] + da[a1 * na + a2] + 1.0);
    const std::size_t to_n = z.blocks[to].vertices.size();
    std::vector<double> next(to_n, kInfinity);
    for (std::size_t a2 = 0; a2 < na; ++a2)
      for (VertexId v = 0; v < to_n; ++v)
        next[v] = std::min(next[v], across[a2] + block_dist(to, entry_map[a2], v));
    cost = std::move(next);
  }
  out.decomposition = cost[z.local[q]];
  out.ok = std::abs(out.decomposition - out.dijkstra) <= 1e-9;
  return out;
}

namespace {

double orbit_diameter(const MetricGraph& x, std::span<const VertexId> orbit) {
  double d = 0.0;
  for (VertexId u : orbit)
    for (VertexId v : orbit) d = std::max(d, graph_distance(x, u, v));
  return d;
}

}  // namespace

FiniteEdgeAmalgam build_finite_edge_amalgam(const MetricGraph& x1, const MetricGraph& x2,
                                            std::span<const VertexId> orbit1, std::span<const VertexId> orbit2,
                                            int branching, int radius) {
  if (orbit1.empty() || orbit1.size() != orbit2.size()) throw DomainError("orbits must be non-empty and equal in size");
  for (VertexId v : orbit1)
    if (v >= x1.vertex_count()) throw DomainError("orbit vertex outside X1");
  for (VertexId v : orbit2)
    if (v >= x2.vertex_count()) throw DomainError("orbit vertex outside X2");
  FiniteEdgeAmalgam out;
  const Link full{nullptr, {orbit1.begin(), orbit1.end()}, {orbit2.begin(), orbit2.end()}};
  const Link single{nullptr, {orbit1.front()}, {orbit2.front()}};
  out.z = assemble(x1, x2, full, branching, radius, 1, GluingMode::Amalgam, BlockType::X1);
  out.z_tilde = assemble(x1, x2, single, branching, radius, 1, GluingMode::Amalgam, BlockType::X1);
  out.diameter1 = orbit_diameter(x1, orbit1);
  out.diameter2 = orbit_diameter(x2, orbit2);
  out.epsilon = 2.0 * std::max(out.diameter1, out.diameter2) + 2.0;
  return out;
}

double measured_distortion(const FiniteEdgeAmalgam& amalgam) {
  const std::vector<double> dz = all_pairs(amalgam.z.graph), dt = all_pairs(amalgam.z_tilde.graph);
  const std::size_t n = amalgam.z.graph.vertex_count();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, std::abs(dz[i * n + j] - dt[i * n + j]));
  return worst;
}

std::string block_map_json(const TreeOfSpaces& z) {
  nlohmann::json j;
  j["radius"] = z.radius;
  j["mode"] = z.mode == GluingMode::Hnn ? "hnn" : "amalgam";
  j["blocks"] = nlohmann::json::array();
  for (std::size_t b = 0; b < z.blocks.size(); ++b) {
    const Block& blk = z.blocks[b];
    j["blocks"].push_back({{"id", b},
                           {"parent", blk.parent},
                           {"depth", blk.depth},
                           {"type", blk.type == BlockType::X1 ? "X1" : "X2"},
                           {"vertices", blk.vertices}});
  }
  j["strips"] = nlohmann::json::array();
  for (const Strip& s : z.strips)
    j["strips"].push_back({{"side0", s.side0}, {"side1", s.side1}, {"interface0", s.levels.front()},
                           {"interface1", s.levels.back()}});
  return j.dump();
}

}  // namespace acat
