#pragma once

#include <span>
#include <string>
#include <vector>

#include "acat/metric_core.hpp"

namespace acat {

enum class BlockType { X1, X2 };
enum class GluingMode { Amalgam, Hnn };

// Vertex spaces X1, X2 and edge space A with isometric vertex embeddings.
// In HNN mode both embeddings land in X1 and x2 is ignored.
struct GluingSpec {
  MetricGraph x1;
  MetricGraph x2;
  MetricGraph a;
  std::vector<VertexId> embed1;
  std::vector<VertexId> embed2;
};

struct Block {
  int parent = -1;
  int depth = 0;
  BlockType type = BlockType::X1;
  std::vector<VertexId> vertices;  // local vertex -> vertex of the glued graph
};

// A x [0, 1] between two blocks: levels[0] sits in `side0` (through embed1),
// levels.back() in `side1` (through embed2).
struct Strip {
  int side0 = 0;
  int side1 = 0;
  std::vector<std::vector<VertexId>> levels;
};

struct TreeOfSpaces {
  MetricGraph graph;
  std::vector<Block> blocks;
  std::vector<Strip> strips;
  std::vector<int> owner;         // block of each vertex, -1 inside strips
  std::vector<VertexId> local;    // index inside the owning block
  int radius = 0;
  GluingMode mode = GluingMode::Amalgam;

  // Blocks on the tree path from block a to block b, inclusive.
  std::vector<int> block_path(int a, int b) const;
};

// Ball of the given radius in the tree where every node has `branching`
// children; blocks of an amalgam alternate type, HNN blocks are all X1.
TreeOfSpaces build_amalgam_space(const GluingSpec& spec, int branching, int radius, int strip_steps,
                                 GluingMode mode = GluingMode::Amalgam, BlockType root = BlockType::X1);

struct DecompositionReport {
  double dijkstra = 0.0;
  double decomposition = 0.0;  // best chain of block legs and strip crossings
  std::vector<int> blocks;     // tree path of blocks
  bool ok = false;             // agreement within 1e-9
};

// p and q must be block vertices. The chain minimum is taken over every
// interface vertex on the tree path, using each block's own metric and
// d_A + 1 across strips.
DecompositionReport geodesic_decomposition_check(const TreeOfSpaces& z, const GluingSpec& spec, VertexId p,
                                                 VertexId q);

struct FiniteEdgeAmalgam {
  TreeOfSpaces z;        // one unit edge per orbit pair and tree edge
  TreeOfSpaces z_tilde;  // glued through the first orbit pair only
  double diameter1 = 0.0;
  double diameter2 = 0.0;
  double epsilon = 0.0;  // 2 max(diameter1, diameter2) + 2
};

FiniteEdgeAmalgam build_finite_edge_amalgam(const MetricGraph& x1, const MetricGraph& x2,
                                            std::span<const VertexId> orbit1, std::span<const VertexId> orbit2,
                                            int branching, int radius);

// sup |d_Z - d_Z~| over all pairs of block vertices (identity on blocks).
double measured_distortion(const FiniteEdgeAmalgam& amalgam);

// All-pairs distances of a small graph, row-major.
std::vector<double> all_pairs(const MetricGraph& g);

// Block map: node types, parents and vertex / interface ids.
std::string block_map_json(const TreeOfSpaces& z);

}  // namespace acat
