#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "acat/metric_core.hpp"
#include "acat/tree_of_spaces.hpp"
#include "acat/wrinkled.hpp"

namespace acat {

struct ProfileRow {
  double r = 0.0;
  double f_hat = 0.0;  // running maximum over every triangle sampled up to r
  int samples = 0;     // triangles behind f_hat
  double f_raw = 0.0;  // maximum over the triangles drawn at this radius only
};

struct DefectProfile {
  std::vector<ProfileRow> rows;
  std::string space_tag;
  std::uint64_t seed = 0;
};

struct ScaleSchedule {
  std::vector<double> scales;
};

// Strictly increasing and >= 1, else DomainError.
void validate(const ScaleSchedule& schedule);

// Draws points of the ball of radius r around a fixed basepoint. space(r)
// may rebuild a discretisation; the reference stays valid until the next
// call with a different r.
class BallSampler {
 public:
  virtual ~BallSampler() = default;
  virtual std::string tag() const = 0;
  virtual const GeodesicSpace& space(double r) = 0;
  virtual MetricPoint sample(double r, std::mt19937_64& rng) = 0;
};

// Disc around the origin.
class EuclideanBallSampler final : public BallSampler {
 public:
  std::string tag() const override { return plane_.tag(); }
  const GeodesicSpace& space(double) override { return plane_; }
  MetricPoint sample(double r, std::mt19937_64& rng) override;

 private:
  EuclideanPlane plane_;
};

// Vertices within distance r of `basepoint`.
class GraphBallSampler final : public BallSampler {
 public:
  GraphBallSampler(std::shared_ptr<const MetricGraph> graph, VertexId basepoint, std::string tag = "graph");
  std::string tag() const override { return space_.tag(); }
  const GeodesicSpace& space(double) override { return space_; }
  MetricPoint sample(double r, std::mt19937_64& rng) override;

 private:
  GraphSpace space_;
  std::vector<double> from_base_;
};

// A fixed finite graph with every edge length multiplied by r; samples
// are vertices of the whole rescaled graph.
class ScaledGraphSampler final : public BallSampler {
 public:
  explicit ScaledGraphSampler(MetricGraph graph, std::string tag = "scaled_graph");
  std::string tag() const override { return tag_; }
  const GeodesicSpace& space(double r) override;
  MetricPoint sample(double r, std::mt19937_64& rng) override;

 private:
  MetricGraph base_;
  std::string tag_;
  double scale_ = 0.0;
  std::unique_ptr<GraphSpace> space_;
};

struct WrinkledProbeOptions {
  double resolution_ratio = 0.01;  // mesh spacing = ratio * r
  double clip_factor = 1.25;       // clip radius = factor * r
  double stencil = 4.2;
};

// Wrinkled quadrant meshed per radius, basepoint over the corner. Points
// are mesh vertices over uniform plan points, kept when their surface
// distance to the basepoint is at most r.
class WrinkledBallSampler final : public BallSampler {
 public:
  explicit WrinkledBallSampler(WrinkledProbeOptions options = {});
  std::string tag() const override { return "wrinkled"; }
  const GeodesicSpace& space(double r) override;
  MetricPoint sample(double r, std::mt19937_64& rng) override;

  const WrinkledSurface& surface(double r);
  // Smallest n with n(n+1) >= sqrt(2) clip radius.
  int strips_for(double r) const;

 private:
  WrinkledProbeOptions opt_;
  double r_ = 0.0;
  std::unique_ptr<WrinkledSurface> surface_;
  std::vector<double> from_base_;
};

// Euclidean plane and graph spaces only; anything else is UnsupportedError.
std::unique_ptr<BallSampler> ball_sampler_for(const GeodesicSpace& space);

// For each r, the largest triangle_defect over triangles with vertices in
// B(basepoint, r). Draws at each radius come from their own seed stream;
// f_hat carries the maximum forward so nested sample sets give a
// non-decreasing profile.
DefectProfile defect_profile(BallSampler& sampler, const ScaleSchedule& radii, int triangles_per_radius,
                             int grid, std::uint64_t seed);

enum class Verdict { Sublinear, Linearish, Inconclusive };
const char* verdict_name(Verdict v);

struct VerdictThresholds {
  double sublinear_slope = 0.9;
  double linear_slope = 0.95;
  double ratio = 0.5;
  double zero = 1e-9;  // rows at or below this count as zero
};

struct SublinearityVerdict {
  Verdict verdict = Verdict::Inconclusive;
  double slope = 0.0;  // log f_hat against log r over nonzero rows
  double ratio = 0.0;  // (f_hat(r_max) / r_max) / (f_hat(r_min) / r_min)
  int rows_used = 0;
  VerdictThresholds thresholds;
};

// Needs at least 4 rows. An all-zero profile is Sublinear.
SublinearityVerdict sublinearity_verdict(const DefectProfile& profile, const VerdictThresholds& thresholds = {});

struct SqrtFit {
  double a = 0.0;  // f_hat ~ a sqrt(r) + b, least squares
  double b = 0.0;
  double max_residual = 0.0;
};
SqrtFit fit_sqrt(const DefectProfile& profile);

// Largest four-point defect over the three cyclic orders of a 4-tuple.
double four_point_all_orders(const double d[4][4]);

// Max over tuples drawn from B(basepoint, scale / 2) of the four-point
// defect divided by scale.
double scaled_four_point(BallSampler& sampler, double scale, int tuples, std::uint64_t seed);

struct QiDistortion {
  double sup = 0.0;      // sup |d_domain - d_codomain| / scale
  double epsilon = 0.0;  // additive constant of the map
  int pairs = 0;
  int unconverged = 0;   // Sasaki pairs judged from the solver bracket
};

// map_tag: "sasaki_to_product", "finite_amalgam_to_tilde" or "identity".
// Sasaki pairs sit at product distance scale with base distance at most 5;
// amalgam pairs are block vertices of the 6-cycle amalgam with d_Z within
// max(1, scale / 4) of scale.
QiDistortion qi_distortion_decay(const std::string& map_tag, double scale, int pairs, std::uint64_t seed);

std::string profile_csv(const DefectProfile& profile);
std::string verdict_json(const SublinearityVerdict& verdict, const DefectProfile& profile);

}  // namespace acat
