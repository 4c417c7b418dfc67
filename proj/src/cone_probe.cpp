#include "acat/cone_probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "acat/comparison.hpp"
#include "acat/errors.hpp"
#include "acat/sasaki.hpp"
#include "json.hpp"

namespace acat {

void validate(const ScaleSchedule& schedule) {
  if (schedule.scales.empty()) throw DomainError("empty scale schedule");
  for (std::size_t i = 0; i < schedule.scales.size(); ++i) {
    if (!(schedule.scales[i] >= 1.0)) throw DomainError("scales must be at least 1");
    if (i > 0 && !(schedule.scales[i] > schedule.scales[i - 1])) throw DomainError("scales must increase");
  }
}

namespace {

constexpr int kMaxRejections = 100000;

std::vector<double> distances_from_vertex(const MetricGraph& g, VertexId v) {
  const PathSource src{v, 0.0};
  return dijkstra(g, std::span<const PathSource>(&src, 1)).dist;
}

VertexId pick_within(const std::vector<double>& from_base, double r, std::mt19937_64& rng) {
  std::vector<VertexId> ball;
  for (VertexId v = 0; v < from_base.size(); ++v)
    if (from_base[v] <= r) ball.push_back(v);
  std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
  return ball[pick(rng)];
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

MetricPoint EuclideanBallSampler::sample(double r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rho = r * std::sqrt(u(rng)), t = 2.0 * std::numbers::pi * u(rng);
  return plane_.point(rho * std::cos(t), rho * std::sin(t));
}

GraphBallSampler::GraphBallSampler(std::shared_ptr<const MetricGraph> graph, VertexId basepoint, std::string tag)
    : space_(graph, std::move(tag)) {
  if (basepoint >= graph->vertex_count()) throw DomainError("basepoint out of range");
  from_base_ = distances_from_vertex(*graph, basepoint);
}

MetricPoint GraphBallSampler::sample(double r, std::mt19937_64& rng) {
  return space_.vertex(pick_within(from_base_, r, rng));
}

ScaledGraphSampler::ScaledGraphSampler(MetricGraph graph, std::string tag)
    : base_(std::move(graph)), tag_(std::move(tag)) {
  if (base_.vertex_count() == 0) throw DomainError("empty graph");
}

const GeodesicSpace& ScaledGraphSampler::space(double r) {
  if (!(r > 0.0)) throw DomainError("scale must be positive");
  if (!space_ || scale_ != r) {
    auto g = std::make_shared<MetricGraph>();
    for (VertexId v = 0; v < base_.vertex_count(); ++v) g->add_vertex();
    for (const GraphEdge& e : base_.edges()) g->add_edge(e.i, e.j, e.length * r);
    space_ = std::make_unique<GraphSpace>(g, tag_);
    scale_ = r;
  }
  return *space_;
}

MetricPoint ScaledGraphSampler::sample(double r, std::mt19937_64& rng) {
  space(r);
  std::uniform_int_distribution<VertexId> pick(0, base_.vertex_count() - 1);
  return space_->vertex(pick(rng));
}

WrinkledBallSampler::WrinkledBallSampler(WrinkledProbeOptions options) : opt_(options) {
  if (!(opt_.resolution_ratio > 0.0) || !(opt_.clip_factor >= 1.0))
    throw DomainError("bad wrinkled probe options");
}

int WrinkledBallSampler::strips_for(double r) const {
  const double reach = std::sqrt(2.0) * opt_.clip_factor * r;
  int n = 1;
  while (n * (n + 1) < reach) ++n;
  return n;
}

const WrinkledSurface& WrinkledBallSampler::surface(double r) {
  if (!(r > 0.0)) throw DomainError("radius must be positive");
  if (!surface_ || r_ != r) {
    WrinkledOptions w;
    w.n_max = strips_for(r);
    w.resolution = opt_.resolution_ratio * r;
    w.stencil = opt_.stencil;
    w.clip_radius = opt_.clip_factor * r;
    surface_ = std::make_unique<WrinkledSurface>(w);
    from_base_ = distances_from_vertex(*surface_->mesh(), surface_->nearest_vertex(surface_->origin()));
    r_ = r;
  }
  return *surface_;
}

const GeodesicSpace& WrinkledBallSampler::space(double r) { return surface(r).space(); }

MetricPoint WrinkledBallSampler::sample(double r, std::mt19937_64& rng) {
  const WrinkledSurface& s = surface(r);
  std::uniform_real_distribution<double> u(-r, r);
  for (int k = 0; k < kMaxRejections; ++k) {
    const Vec2 p{u(rng), u(rng)};
    if (p.x * p.x + p.y * p.y > r * r) continue;
    const VertexId v = s.nearest_vertex(s.above(p));
    if (from_base_[v] <= r) return s.space().vertex(v);
  }
  throw InvariantViolation("no mesh vertex found in the ball");
}

std::unique_ptr<BallSampler> ball_sampler_for(const GeodesicSpace& space) {
  if (dynamic_cast<const EuclideanPlane*>(&space)) return std::make_unique<EuclideanBallSampler>();
  if (const auto* g = dynamic_cast<const GraphSpace*>(&space)) {
    if (g->graph().vertex_count() == 0) throw DomainError("empty graph");
    auto copy = std::make_shared<const MetricGraph>(g->graph());
    return std::make_unique<GraphBallSampler>(copy, 0, g->tag());
  }
  throw UnsupportedError("ball sampling is not supported for space '" + space.tag() + "'");
}

DefectProfile defect_profile(BallSampler& sampler, const ScaleSchedule& radii, int triangles_per_radius, int grid,
                             std::uint64_t seed) {
  validate(radii);
  if (triangles_per_radius < 1) throw DomainError("need at least one triangle per radius");
  if (grid < 2) throw DomainError("grid must be at least 2");
  DefectProfile out;
  out.space_tag = sampler.tag();
  out.seed = seed;
  double carried = 0.0;
  int total = 0;
  for (std::size_t i = 0; i < radii.scales.size(); ++i) {
    const double r = radii.scales[i];
    const GeodesicSpace& space = sampler.space(r);
    std::mt19937_64 rng = stream(seed, i);
    double raw = 0.0;
    for (int t = 0; t < triangles_per_radius; ++t) {
      const MetricPoint x = sampler.sample(r, rng), y = sampler.sample(r, rng), z = sampler.sample(r, rng);
      raw = std::max(raw, triangle_defect(space, x, y, z, grid).delta);
    }
    carried = std::max(carried, raw);
    total += triangles_per_radius;
    out.rows.push_back({r, carried, total, raw});
  }
  return out;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Sublinear:
      return "SUBLINEAR";
    case Verdict::Linearish:
      return "LINEARISH";
    case Verdict::Inconclusive:
      break;
  }
  return "INCONCLUSIVE";
}

SublinearityVerdict sublinearity_verdict(const DefectProfile& profile, const VerdictThresholds& thresholds) {
  if (profile.rows.size() < 4) throw DomainError("verdict needs at least 4 rows");
  SublinearityVerdict v;
  v.thresholds = thresholds;
  std::vector<double> lx, ly;
  for (const ProfileRow& row : profile.rows) {
    if (row.f_hat < 0.0) throw DomainError("negative defect");
    if (row.f_hat > thresholds.zero) {
      lx.push_back(std::log(row.r));
      ly.push_back(std::log(row.f_hat));
    }
  }
  v.rows_used = static_cast<int>(lx.size());
  if (lx.empty()) {
    v.verdict = Verdict::Sublinear;
    return v;
  }
  const ProfileRow& lo = profile.rows.front();
  const ProfileRow& hi = profile.rows.back();
  v.ratio = lo.f_hat > thresholds.zero ? (hi.f_hat / hi.r) / (lo.f_hat / lo.r) : std::numeric_limits<double>::infinity();
  if (lx.size() < 2) {
    v.slope = std::numeric_limits<double>::quiet_NaN();
    return v;
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  v.slope = sxy / sxx;
  if (v.slope <= thresholds.sublinear_slope && v.ratio <= thresholds.ratio)
    v.verdict = Verdict::Sublinear;
  else if (v.slope >= thresholds.linear_slope)
    v.verdict = Verdict::Linearish;
  return v;
}

SqrtFit fit_sqrt(const DefectProfile& profile) {
  if (profile.rows.size() < 2) throw DomainError("fit needs at least 2 rows");
  const double n = static_cast<double>(profile.rows.size());
  double mx = 0.0, my = 0.0;
  for (const ProfileRow& row : profile.rows) {
    mx += std::sqrt(row.r) / n;
    my += row.f_hat / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (const ProfileRow& row : profile.rows) {
    const double x = std::sqrt(row.r) - mx;
    sxy += x * (row.f_hat - my);
    sxx += x * x;
  }
  SqrtFit fit;
  fit.a = sxy / sxx;
  fit.b = my - fit.a * mx;
  for (const ProfileRow& row : profile.rows)
    fit.max_residual = std::max(fit.max_residual, std::abs(row.f_hat - fit.a * std::sqrt(row.r) - fit.b));
  return fit;
}

double four_point_all_orders(const double d[4][4]) {
  const int orders[3][4] = {{0, 1, 2, 3}, {0, 1, 3, 2}, {0, 2, 1, 3}};
  double worst = 0.0;
  for (const auto& o : orders)
    worst = std::max(worst, four_point_defect(d[o[0]][o[1]], d[o[0]][o[2]], d[o[0]][o[3]], d[o[1]][o[2]],
                                              d[o[1]][o[3]], d[o[2]][o[3]]));
  return worst;
}

double scaled_four_point(BallSampler& sampler, double scale, int tuples, std::uint64_t seed) {
  if (!(scale > 0.0)) throw DomainError("scale must be positive");
  if (tuples < 1) throw DomainError("need at least one tuple");
  const double r = 0.5 * scale;
  const GeodesicSpace& space = sampler.space(r);
  std::mt19937_64 rng = stream(seed, 0);
  double worst = 0.0;
  for (int t = 0; t < tuples; ++t) {
    std::vector<MetricPoint> pts;
    for (int k = 0; k < 4; ++k) pts.push_back(sampler.sample(r, rng));
    double d[4][4] = {};
    for (int i = 0; i < 3; ++i) {
      const std::vector<double> row = space.distances_from(pts[i], std::span(pts).subspan(i + 1));
      for (int j = i + 1; j < 4; ++j) d[i][j] = d[j][i] = row[j - i - 1];
    }
    worst = std::max(worst, four_point_all_orders(d));
  }
  return worst / scale;
}

namespace {

// The point at hyperbolic distance d from p in direction beta (0 = up).
HPoint hyp_shoot(HPoint p, double d, double beta) {
  // Disc model around i, then the Cayley map, then the similarity to p.
  const double rho = std::tanh(0.5 * d);
  const double wx = -rho * std::sin(beta), wy = rho * std::cos(beta);
  // z = i (1 + w) / (1 - w)
  const double den = (1.0 - wx) * (1.0 - wx) + wy * wy;
  const double nx = (1.0 + wx) * (1.0 - wx) - wy * wy, ny = 2.0 * wy;
  const double zx = -ny / den, zy = nx / den;
  return {p.x + p.y * zx, p.y * zy};
}

QiDistortion sasaki_decay(double scale, int pairs, std::uint64_t seed) {
  constexpr double kMaxBase = 5.0;
  QiDistortion out;
  out.epsilon = std::numbers::pi;
  out.pairs = pairs;
  std::mt19937_64 rng = stream(seed, 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double phi_lo = scale > kMaxBase ? std::acos(kMaxBase / scale) : 0.0;
  for (int k = 0; k < pairs; ++k) {
    const HPoint base{2.0 * u(rng) - 1.0, std::exp(2.0 * u(rng) - 1.0)};
    const double phi = phi_lo + (0.5 * std::numbers::pi - phi_lo) * u(rng);
    const double beta = 2.0 * std::numbers::pi * u(rng);
    const double sign = u(rng) < 0.5 ? -1.0 : 1.0;
    const UTPoint p{base, 2.0 * std::numbers::pi * u(rng) - std::numbers::pi};
    const UTPoint q{hyp_shoot(base, scale * std::cos(phi), beta), p.theta + sign * scale * std::sin(phi)};
    const QiReport rep = qi_bounds_check(p, q);
    if (!rep.converged) ++out.unconverged;
    const double gap = std::max(std::abs(rep.bracket_lo - rep.D), std::abs(rep.bracket_hi - rep.D));
    out.sup = std::max(out.sup, gap / scale);
  }
  return out;
}

QiDistortion amalgam_decay(double scale, int pairs, std::uint64_t seed) {
  MetricGraph c6;
  for (int i = 0; i < 6; ++i) c6.add_vertex();
  for (int i = 0; i < 6; ++i) c6.add_edge(i, (i + 1) % 6, 1.0);
  const std::vector<VertexId> orbit{0, 3};
  const int radius = std::clamp(static_cast<int>(std::ceil(scale / 2.0)) + 1, 2, 12);
  const FiniteEdgeAmalgam f = build_finite_edge_amalgam(c6, c6, orbit, orbit, 2, radius);
  QiDistortion out;
  out.epsilon = f.epsilon;
  const double window = std::max(1.0, 0.25 * scale);
  std::vector<VertexId> pts;
  for (VertexId v = 0; v < f.z.owner.size(); ++v)
    if (f.z.owner[v] >= 0) pts.push_back(v);
  std::mt19937_64 rng = stream(seed, 2);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  for (int attempt = 0; out.pairs < pairs && attempt < 50 * pairs; ++attempt) {
    const VertexId s = pts[pick(rng)];
    const std::vector<double> dz = distances_from_vertex(f.z.graph, s);
    std::vector<VertexId> ring;
    for (VertexId v : pts)
      if (std::abs(dz[v] - scale) <= window) ring.push_back(v);
    if (ring.empty()) continue;
    const std::vector<double> dt = distances_from_vertex(f.z_tilde.graph, s);
    std::uniform_int_distribution<std::size_t> pr(0, ring.size() - 1);
    const VertexId t = ring[pr(rng)];
    out.sup = std::max(out.sup, std::abs(dz[t] - dt[t]) / scale);
    ++out.pairs;
  }
  if (out.pairs == 0) throw DomainError("no amalgam pairs at this scale");
  return out;
}

}  // namespace

QiDistortion qi_distortion_decay(const std::string& map_tag, double scale, int pairs, std::uint64_t seed) {
  if (!(scale > 0.0)) throw DomainError("scale must be positive");
  if (pairs < 1) throw DomainError("need at least one pair");
  if (map_tag == "identity") return {0.0, 0.0, pairs, 0};
  if (map_tag == "sasaki_to_product") return sasaki_decay(scale, pairs, seed);
  if (map_tag == "finite_amalgam_to_tilde") return amalgam_decay(scale, pairs, seed);
  throw DomainError("unknown map tag '" + map_tag + "'");
}

std::string profile_csv(const DefectProfile& profile) {
  std::string out = "r,f_hat,samples\n";
  char buf[96];
  for (const ProfileRow& row : profile.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", row.r, row.f_hat, row.samples);
    out += buf;
  }
  return out;
}

std::string verdict_json(const SublinearityVerdict& verdict, const DefectProfile& profile) {
  nlohmann::json j;
  j["verdict"] = verdict_name(verdict.verdict);
  j["slope"] = std::isfinite(verdict.slope) ? nlohmann::json(verdict.slope) : nlohmann::json(nullptr);
  j["ratio"] = std::isfinite(verdict.ratio) ? nlohmann::json(verdict.ratio) : nlohmann::json(nullptr);
  j["rows_used"] = verdict.rows_used;
  j["thresholds"] = {{"sublinear_slope", verdict.thresholds.sublinear_slope},
                     {"linear_slope", verdict.thresholds.linear_slope},
                     {"ratio", verdict.thresholds.ratio},
                     {"zero", verdict.thresholds.zero}};
  j["space"] = profile.space_tag;
  j["seed"] = profile.seed;
  j["rows"] = nlohmann::json::array();
  for (const ProfileRow& row : profile.rows)
    j["rows"].push_back({{"r", row.r}, {"f_hat", row.f_hat}, {"samples", row.samples}, {"f_raw", row.f_raw}});
  return j.dump(2);
}

}  // namespace acat
