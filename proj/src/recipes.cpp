#include "acat/recipes.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <initializer_list>
#include <limits>
#include <random>
#include <sstream>

#include "acat/circumcenter.hpp"
#include "acat/comparison.hpp"
#include "acat/cone_probe.hpp"
#include "acat/errors.hpp"
#include "acat/sasaki.hpp"
#include "acat/tree_of_spaces.hpp"
#include "acat/wrinkled.hpp"
#include "json.hpp"

namespace acat {

using nlohmann::json;

namespace {

struct Key {
  const char* name;
  const char* fallback;  // nullptr: required
};

class Params {
 public:
  Params(const RecipeParams& raw, std::initializer_list<Key> keys) {
    for (const auto& [k, v] : raw) {
      if (std::none_of(keys.begin(), keys.end(), [&](const Key& key) { return k == key.name; }))
        throw UsageError("unknown key '" + k + "'");
    }
    for (const Key& key : keys) {
      const auto it = raw.find(key.name);
      if (it != raw.end())
        values_[key.name] = it->second;
      else if (key.fallback)
        values_[key.name] = key.fallback;
      else
        throw UsageError(std::string("missing required key '") + key.name + "'");
    }
    if (values_.count("seed")) seed();
  }

  const std::string& str(const std::string& k) const { return values_.at(k); }

  double num(const std::string& k) const { return parse_double(k, str(k)); }

  int integer(const std::string& k) const {
    const std::string& s = str(k);
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || errno != 0 || v < std::numeric_limits<int>::min() ||
        v > std::numeric_limits<int>::max())
      throw UsageError("key '" + k + "' expects an integer, got '" + s + "'");
    return static_cast<int>(v);
  }

  std::uint64_t seed() const {
    const std::string& s = str("seed");
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s[0] == '-' || *end != '\0' || errno != 0)
      throw UsageError("seed expects an unsigned integer, got '" + s + "'");
    return v;
  }

  std::vector<double> list(const std::string& k) const {
    std::vector<double> out;
    std::stringstream ss(str(k));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(k, item));
    if (out.empty()) throw UsageError("key '" + k + "' expects a comma-separated list");
    return out;
  }

  json to_json() const { return json(values_); }

 private:
  static double parse_double(const std::string& k, const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || errno != 0 || !std::isfinite(v))
      throw UsageError("key '" + k + "' expects a number, got '" + s + "'");
    return v;
  }

  std::map<std::string, std::string> values_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> columns) {
    for (const char* c : columns) columns_.push_back(c);
    text_ = join(columns_);
  }
  void row(const std::vector<std::string>& cells) {
    text_ += join(cells);
    ++rows_;
  }
  const std::string& text() const { return text_; }
  int rows() const { return rows_; }
  const std::vector<std::string>& columns() const { return columns_; }

 private:
  static std::string join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
    return out + "\n";
  }
  std::vector<std::string> columns_;
  std::string text_;
  int rows_ = 0;
};

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RecipeOutput finish(const std::string& name, const Params& p, const Csv& csv, json summary) {
  json m;
  m["recipe"] = name;
  m["params"] = p.to_json();
  m["library_version"] = kLibraryVersion;
  m["timestamp"] = timestamp();
  m["columns"] = csv.columns();
  m["rows"] = csv.rows();
  m["summary"] = std::move(summary);
  return {csv.text(), m.dump(2) + "\n"};
}

MetricGraph cycle_graph(int n) {
  MetricGraph g;
  for (int i = 0; i < n; ++i) g.add_vertex();
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n, 1.0);
  return g;
}

MetricGraph random_tree(int n, double lo, double hi, std::mt19937_64& rng) {
  MetricGraph g;
  std::uniform_real_distribution<double> len(lo, hi);
  g.add_vertex();
  for (int i = 1; i < n; ++i) {
    g.add_vertex();
    g.add_edge(i, std::uniform_int_distribution<int>(0, i - 1)(rng), len(rng));
  }
  return g;
}

// ---------------------------------------------------------------------------

RecipeOutput wrinkled_gap(const RecipeParams& raw) {
  const Params p(raw, {{"n_max", nullptr}, {"seed", "1"}});
  const int n_max = p.integer("n_max");
  if (n_max < 1) throw UsageError("n_max must be at least 1");
  const std::vector<DivergenceGap> table = divergence_table(n_max);
  Csv csv({"n", "diagonal_distance", "euclidean_distance", "gap", "lower_bound"});
  bool holds = true;
  for (int n = 1; n <= n_max; ++n) {
    const DivergenceGap& g = table[n - 1];
    holds = holds && g.gap >= g.lower_bound;
    csv.row({std::to_string(n), fmt(diagonal_distance(n)), fmt(euclidean_diagonal_distance(n)), fmt(g.gap),
             fmt(g.lower_bound)});
  }
  return finish("wrinkled-gap", p, csv, {{"bound_holds", holds}, {"final_gap", table.back().gap}});
}

RecipeOutput wrinkled_profile(const RecipeParams& raw) {
  const Params p(raw, {{"radii", nullptr},
                       {"triangles", "200"},
                       {"grid", "5"},
                       {"resolution_ratio", "0.01"},
                       {"clip_factor", "1.25"},
                       {"seed", "1"}});
  WrinkledBallSampler sampler({p.num("resolution_ratio"), p.num("clip_factor"), 4.2});
  const DefectProfile profile =
      defect_profile(sampler, {p.list("radii")}, p.integer("triangles"), p.integer("grid"), p.seed());
  Csv csv({"r", "f_hat", "samples"});
  for (const ProfileRow& row : profile.rows) csv.row({fmt(row.r), fmt(row.f_hat), std::to_string(row.samples)});
  json summary;
  if (profile.rows.size() >= 4) summary["verdict"] = json::parse(verdict_json(sublinearity_verdict(profile), profile));
  if (profile.rows.size() >= 2) {
    const SqrtFit fit = fit_sqrt(profile);
    summary["sqrt_fit"] = {{"a", fit.a}, {"b", fit.b}, {"max_residual", fit.max_residual}};
  }
  return finish("wrinkled-profile", p, csv, summary);
}

const char* kind_name(CurveKind k) {
  switch (k) {
    case CurveKind::Point:
      return "point";
    case CurveKind::Geodesic:
      return "geodesic";
    case CurveKind::Equidistant:
      return "equidistant";
    case CurveKind::Horocycle:
      return "horocycle";
    case CurveKind::Circle:
      break;
  }
  return "circle";
}

RecipeOutput sasaki_classify(const RecipeParams& raw) {
  const Params p(raw, {{"c", nullptr},
                       {"length", "5"},
                       {"step", "0.01"},
                       {"direction", "0.3"},
                       {"integrator", "ode"},
                       {"seed", "1"}});
  const std::string integrator = p.str("integrator");
  if (integrator != "ode" && integrator != "charge") throw UsageError("integrator must be ode or charge");
  Csv csv({"c", "class", "kind", "kappa_mean", "kappa_std", "kappa_expected", "rel_residual_2", "rel_residual_1",
           "speed_drift"});
  json rows = json::array();
  for (double c : p.list("c")) {
    if (std::abs(c) > 1.0) throw UsageError("c must lie in [-1, 1]");
    const UTPoint start{{0.0, 1.0}, 0.0};
    const SasakiCurve curve =
        integrator == "ode"
            ? sasaki_geodesic_ode(start, p.num("direction"), c, p.num("length"), p.num("step"))
            : sasaki_geodesic_charge(start, p.num("direction"), c, p.num("length"), p.num("step"));
    const ProjectionShape shape = classify_projection(curve);
    const double s2 = 1.0 - c * c;
    const double expected = s2 > 0.0 ? -c / std::sqrt(s2) : std::numeric_limits<double>::quiet_NaN();
    const double k2 = shape.kappa_mean * shape.kappa_mean;
    const char* cls = c == 0.0 ? "horizontal" : (std::abs(c) == 1.0 ? "vertical" : "oblique");
    csv.row({fmt(c), cls, kind_name(shape.kind), fmt(shape.kappa_mean), fmt(shape.kappa_std), fmt(expected),
             fmt(std::abs(s2 * s2 * k2 - c * c)), fmt(std::abs(s2 * k2 - c * c)), fmt(shape.speed_drift)});
    rows.push_back({{"c", c}, {"class", cls}, {"kind", kind_name(shape.kind)}, {"base_motion", shape.base_motion}});
  }
  return finish("sasaki-classify", p, csv, {{"curves", rows}});
}

RecipeOutput sasaki_qi(const RecipeParams& raw) {
  const Params p(raw, {{"pairs", nullptr}, {"d_max", "5"}, {"dtheta_max", "8"}, {"tol", "1e-4"}, {"seed", "1"}});
  const int n = p.integer("pairs");
  if (n < 1) throw UsageError("pairs must be positive");
  const double tol = p.num("tol");
  Csv csv({"d", "dtheta", "L", "D", "ok_lower", "ok_upper", "endpoint_err"});
  int converged = 0, lower_fail = 0, upper_fail = 0;
  double max_ld = -kInfinity, max_dl = -kInfinity;
  for (const auto& [a, b] : envelope_pairs(n, p.num("d_max"), p.num("dtheta_max"), p.seed())) {
    const QiReport r = qi_bounds_check(a, b, tol);
    converged += r.converged;
    lower_fail += !r.ok_lower;
    upper_fail += !r.ok_upper;
    max_ld = std::max(max_ld, r.L - r.D);
    max_dl = std::max(max_dl, r.D - r.L);
    csv.row({fmt(r.d), fmt(r.dtheta), fmt(r.L), fmt(r.D), r.ok_lower ? "1" : "0", r.ok_upper ? "1" : "0",
             fmt(r.endpoint_error)});
  }
  return finish("sasaki-qi", p, csv,
                {{"pairs", n},
                 {"converged", converged},
                 {"lower_failures", lower_fail},
                 {"upper_failures", upper_fail},
                 {"max_L_minus_D", max_ld},
                 {"max_D_minus_L", max_dl}});
}

TriangleSides planar_sides(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
  return {distance(b, c), distance(a, c), distance(a, b)};
}

RecipeOutput cn_sweep(const RecipeParams& raw) {
  const Params p(raw, {{"tuples", nullptr}, {"seed", "1"}});
  const int n = p.integer("tuples");
  if (n < 1) throw UsageError("tuples must be positive");
  std::mt19937_64 rng(p.seed());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Csv csv({"family", "index", "residual", "ok"});
  json summary;
  auto record = [&](const char* family, int i, double residual, bool ok) {
    csv.row({family, std::to_string(i), fmt(residual), ok ? "1" : "0"});
    json& s = summary[family];
    if (s.is_null()) s = {{"count", 0}, {"failures", 0}, {"min_residual", residual}};
    s["count"] = s["count"].get<int>() + 1;
    s["failures"] = s["failures"].get<int>() + (ok ? 0 : 1);
    s["min_residual"] = std::min(s["min_residual"].get<double>(), residual);
  };

  for (int i = 0; i < n; ++i) {
    std::uniform_real_distribution<double> w(-5.0, 5.0);
    const Vec2 a{w(rng), w(rng)}, b{w(rng), w(rng)}, r{w(rng), w(rng)};
    const double res = cn_inequality_residual(distance(a, r), distance(b, r), distance(lerp(a, b, 0.5), r),
                                              distance(a, b));
    record("cn_euclidean", i, res, res >= -1e-9);
  }

  const double half[] = {0.5};
  auto graph_family = [&](const char* family, MetricGraph g) {
    auto shared = std::make_shared<MetricGraph>(refine_graph(g, 0.25));
    const GraphSpace space(shared, family);
    std::uniform_int_distribution<VertexId> pick(0, shared->vertex_count() - 1);
    for (int i = 0; i < n; ++i) {
      const MetricPoint a = space.vertex(pick(rng)), b = space.vertex(pick(rng)), r = space.vertex(pick(rng));
      const MetricPoint m = space.geodesic_points(a, b, half)[0];
      const double res =
          cn_inequality_residual(space.distance(a, r), space.distance(b, r), space.distance(m, r), space.distance(a, b));
      record(family, i, res, res >= -1e-9);
      if (res < -1e-9 && !summary[family].contains("witness"))
        summary[family]["witness"] = {{"d_pr", space.distance(a, r)},
                                      {"d_qr", space.distance(b, r)},
                                      {"d_mr", space.distance(m, r)},
                                      {"d_pq", space.distance(a, b)}};
    }
  };
  graph_family("cn_tree", random_tree(12, 0.5, 2.0, rng));
  graph_family("cn_cycle6", cycle_graph(6));

  for (int i = 0; i < n; ++i) {
    TriangleSides s = planar_sides(rng);
    while (s.c < 1e-3) s = planar_sides(rng);
    const double tp = 4.0 * u(rng);
    const double tq = std::clamp(tp + (2.0 * u(rng) - 1.0) * s.c, 0.0, tp + s.c);
    const MedianCase1 m = median_case1(s.a, s.b, s.c, tp, tq);
    record("median_case1", i, m.gap, m.gap >= -1e-9 * std::max(1.0, m.h * m.h));
  }
  for (int i = 0; i < n; ++i) {
    const TriangleSides s = planar_sides(rng);
    const TailExtension t = tail_extension_check(s.a, s.b, s.c, 10.0 * u(rng));
    record("tail_extension", i, t.h - t.h_prime_plus_r, t.ok);
  }
  return finish("cn-sweep", p, csv, summary);
}

RecipeOutput circum_iterate(const RecipeParams& raw) {
  const Params p(raw, {{"points", nullptr},
                       {"space", "euclidean"},
                       {"a", "0.1"},
                       {"slack", "0.05"},
                       {"extent", "10"},
                       {"seed", "1"}});
  const int n = p.integer("points");
  if (n < 1) throw UsageError("points must be positive");
  const double a = p.num("a"), extent = p.num("extent");
  const std::string kind = p.str("space");
  std::mt19937_64 rng(p.seed());
  const DefectFunction flat = [](double) { return 0.0; };

  IterationResult run;
  ContractionCheck check;
  if (kind == "euclidean") {
    EuclideanPlane plane;
    std::uniform_real_distribution<double> u(-extent, extent);
    BoundedSet y;
    for (int i = 0; i < n; ++i) y.points.push_back(plane.point(u(rng), u(rng)));
    run = iterate_barycenters(y, a, euclidean_solver(plane), flat);
    check = verify_contraction(plane, run, a, flat);
  } else if (kind == "tree") {
    const double slack = p.num("slack");
    auto g = std::make_shared<MetricGraph>(refine_graph(random_tree(30, 0.1 * extent, 0.4 * extent, rng), slack));
    const GraphSpace space(g, "tree");
    std::vector<MetricPoint> cands;
    for (VertexId v = 0; v < g->vertex_count(); ++v) cands.push_back(space.vertex(v));
    std::uniform_int_distribution<VertexId> pick(0, g->vertex_count() - 1);
    BoundedSet y;
    for (int i = 0; i < n; ++i) y.points.push_back(space.vertex(pick(rng)));
    run = iterate_barycenters(y, a, candidate_solver(space, cands, slack), flat);
    check = verify_contraction(space, run, a, flat);
  } else {
    throw UsageError("space must be euclidean or tree");
  }
  if (!check.decay_ok || !check.diameter_ok)
    throw InvariantViolation("circumcenter contraction failed on a CAT(0) space");

  Csv csv({"step", "radius", "center_count"});
  for (std::size_t k = 0; k < run.steps.size(); ++k)
    csv.row({std::to_string(k), fmt(run.steps[k].radius), std::to_string(run.steps[k].centers.size())});
  return finish("circum-iterate", p, csv,
                {{"reached", run.reached},
                 {"cap", run.cap},
                 {"decay_ok", check.decay_ok},
                 {"diameter_ok", check.diameter_ok},
                 {"worst_decay_excess", check.worst_decay_excess},
                 {"worst_diameter_excess", check.worst_diameter_excess},
                 {"diameters", check.diameters}});
}

RecipeOutput amalgam_build(const RecipeParams& raw) {
  const Params p(raw, {{"radius", nullptr},
                       {"branching", "2"},
                       {"strip_steps", "2"},
                       {"mode", "amalgam"},
                       {"cycle", "6"},
                       {"pairs", "1000"},
                       {"seed", "1"}});
  const int len = p.integer("cycle");
  if (len < 4) throw UsageError("cycle must be at least 4");
  const std::string mode = p.str("mode");
  if (mode != "amalgam" && mode != "hnn") throw UsageError("mode must be amalgam or hnn");
  MetricGraph edge;
  edge.add_vertex();
  edge.add_vertex();
  edge.add_edge(0, 1, 1.0);
  const VertexId h = static_cast<VertexId>(len / 2);
  const GluingSpec spec{cycle_graph(len), cycle_graph(len), edge, {0, 1}, {h, h + 1}};
  const int branching = p.integer("branching"), radius = p.integer("radius");
  const TreeOfSpaces z = build_amalgam_space(spec, branching, radius, p.integer("strip_steps"),
                                             mode == "hnn" ? GluingMode::Hnn : GluingMode::Amalgam);

  std::vector<VertexId> pts;
  for (VertexId v = 0; v < z.owner.size(); ++v)
    if (z.owner[v] >= 0) pts.push_back(v);
  std::mt19937_64 rng(p.seed());
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  const int pairs = p.integer("pairs");
  int agree = 0;
  double worst = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const DecompositionReport r = geodesic_decomposition_check(z, spec, pts[pick(rng)], pts[pick(rng)]);
    agree += r.ok;
    worst = std::max(worst, std::abs(r.dijkstra - r.decomposition));
  }
  if (agree != pairs) throw InvariantViolation("block decomposition disagrees with the glued metric");

  const std::vector<VertexId> orbit{0, h};
  const FiniteEdgeAmalgam f = build_finite_edge_amalgam(spec.x1, spec.x2, orbit, orbit, branching, radius);
  const double distortion = measured_distortion(f);
  if (distortion > f.epsilon) throw InvariantViolation("finite-orbit gluing exceeds its additive budget");

  Csv csv({"block", "parent", "depth", "type", "vertices"});
  for (std::size_t b = 0; b < z.blocks.size(); ++b) {
    const Block& blk = z.blocks[b];
    csv.row({std::to_string(b), std::to_string(blk.parent), std::to_string(blk.depth),
             blk.type == BlockType::X1 ? "X1" : "X2", std::to_string(blk.vertices.size())});
  }
  return finish("amalgam-build", p, csv,
                {{"vertices", z.graph.vertex_count()},
                 {"edges", z.graph.edge_count()},
                 {"decomposition_pairs", pairs},
                 {"decomposition_agree", agree},
                 {"decomposition_worst_gap", worst},
                 {"finite_edge",
                  {{"distortion", distortion},
                   {"epsilon", f.epsilon},
                   {"diameter1", f.diameter1},
                   {"diameter2", f.diameter2}}},
                 {"block_map", json::parse(block_map_json(z))}});
}

RecipeOutput four_point(const RecipeParams& raw) {
  const Params p(raw, {{"space", nullptr},
                       {"scales", nullptr},
                       {"tuples", "100"},
                       {"resolution_ratio", "0.01"},
                       {"clip_factor", "1.25"},
                       {"seed", "1"}});
  const std::string kind = p.str("space");
  std::unique_ptr<BallSampler> sampler;
  if (kind == "euclidean")
    sampler = std::make_unique<EuclideanBallSampler>();
  else if (kind == "cycle6")
    sampler = std::make_unique<ScaledGraphSampler>(cycle_graph(6), "cycle6");
  else if (kind == "wrinkled")
    sampler = std::make_unique<WrinkledBallSampler>(WrinkledProbeOptions{p.num("resolution_ratio"),
                                                                         p.num("clip_factor"), 4.2});
  else
    throw UsageError("space must be euclidean, cycle6 or wrinkled");
  const ScaleSchedule schedule{p.list("scales")};
  validate(schedule);
  Csv csv({"scale", "max_defect"});
  json values = json::array();
  for (double s : schedule.scales) {
    const double v = scaled_four_point(*sampler, s, p.integer("tuples"), p.seed());
    csv.row({fmt(s), fmt(v)});
    values.push_back(v);
  }
  return finish("four-point", p, csv, {{"max_defect", values}});
}

using Runner = std::function<RecipeOutput(const RecipeParams&)>;

const std::map<std::string, Runner>& registry() {
  static const std::map<std::string, Runner> r{
      {"wrinkled-gap", wrinkled_gap},   {"wrinkled-profile", wrinkled_profile},
      {"sasaki-classify", sasaki_classify}, {"sasaki-qi", sasaki_qi},
      {"cn-sweep", cn_sweep},           {"circum-iterate", circum_iterate},
      {"amalgam-build", amalgam_build}, {"four-point", four_point},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& recipe_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, v] : registry()) out.push_back(k);
    return out;
  }();
  return names;
}

RecipeParams parse_params(const std::string& text) {
  RecipeParams out;
  std::stringstream ss(text);
  std::string line;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw UsageError("line " + std::to_string(number) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      if (b == std::string::npos) return std::string();
      return s.substr(b, s.find_last_not_of(" \t") - b + 1);
    };
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

RecipeOutput run_recipe(const std::string& name, const RecipeParams& params) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw UsageError("unknown recipe '" + name + "'");
  return it->second(params);
}

}  // namespace acat
