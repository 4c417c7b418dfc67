#include "acat/acat.h"

#include <memory>
#include <new>
#include <string>

#include "acat/circumcenter.hpp"
#include "acat/comparison.hpp"
#include "acat/cone_probe.hpp"
#include "acat/errors.hpp"
#include "acat/recipes.hpp"
#include "acat/sasaki.hpp"
#include "acat/wrinkled.hpp"

struct acat_graph {
  std::shared_ptr<acat::MetricGraph> graph = std::make_shared<acat::MetricGraph>();
  // Rebuilt lazily after edits.
  mutable std::unique_ptr<acat::GraphSpace> space;
};

struct acat_wrinkled {
  std::unique_ptr<acat::WrinkledSurface> surface;
};

struct acat_profile {
  acat::DefectProfile profile;
};

struct acat_run {
  acat::RecipeOutput output;
};

namespace {

thread_local std::string g_last_error;

template <class F>
acat_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return ACAT_OK;
  } catch (const acat::DomainError& e) {
    g_last_error = e.what();
    return ACAT_E_DOMAIN;
  } catch (const acat::UnreachableError& e) {
    g_last_error = e.what();
    return ACAT_E_UNREACHABLE;
  } catch (const acat::UnsupportedError& e) {
    g_last_error = e.what();
    return ACAT_E_UNSUPPORTED;
  } catch (const acat::InvariantViolation& e) {
    g_last_error = e.what();
    return ACAT_E_INVARIANT;
  } catch (const acat::UsageError& e) {
    g_last_error = e.what();
    return ACAT_E_USAGE;
  } catch (const acat::ConvergenceError& e) {
    g_last_error = e.what();
    return ACAT_E_CONVERGENCE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ACAT_E_ALLOC;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ACAT_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return ACAT_E_INTERNAL;
  }
}

const acat::GraphSpace& space_of(const acat_graph* g) {
  if (!g->space) g->space = std::make_unique<acat::GraphSpace>(g->graph, "capi_graph");
  return *g->space;
}

acat::VertexId vertex(const acat_graph* g, size_t v) {
  if (v >= g->graph->vertex_count()) throw acat::DomainError("vertex out of range");
  return static_cast<acat::VertexId>(v);
}

}  // namespace

// A null handle or output pointer is reported before anything else runs.
#define ACAT_REQUIRE(...)                                                              \
  do {                                                                                 \
    const void* ptrs_[] = {__VA_ARGS__};                                               \
    for (const void* p_ : ptrs_)                                                       \
      if (!p_) {                                                                       \
        g_last_error = "null argument";                                                \
        return ACAT_E_NULL;                                                            \
      }                                                                                \
  } while (0)

extern "C" {

const char* acat_version(void) { return acat::kLibraryVersion; }

const char* acat_status_name(acat_status s) {
  switch (s) {
    case ACAT_OK:
      return "ok";
    case ACAT_E_DOMAIN:
      return "domain_error";
    case ACAT_E_UNREACHABLE:
      return "unreachable";
    case ACAT_E_UNSUPPORTED:
      return "unsupported";
    case ACAT_E_INVARIANT:
      return "invariant_violation";
    case ACAT_E_USAGE:
      return "usage_error";
    case ACAT_E_CONVERGENCE:
      return "convergence_error";
    case ACAT_E_NULL:
      return "null_argument";
    case ACAT_E_ALLOC:
      return "out_of_memory";
    case ACAT_E_INTERNAL:
      break;
  }
  return "internal_error";
}

const char* acat_last_error(void) { return g_last_error.c_str(); }

acat_status acat_graph_new(acat_graph** out) {
  ACAT_REQUIRE(out);
  return guard([&] { *out = new acat_graph; });
}

void acat_graph_free(acat_graph* g) { delete g; }

acat_status acat_graph_add_vertex(acat_graph* g, size_t* id) {
  ACAT_REQUIRE(g, id);
  return guard([&] {
    *id = g->graph->add_vertex();
    g->space.reset();
  });
}

acat_status acat_graph_add_edge(acat_graph* g, size_t i, size_t j, double length) {
  ACAT_REQUIRE(g);
  return guard([&] {
    g->graph->add_edge(vertex(g, i), vertex(g, j), length);
    g->space.reset();
  });
}

acat_status acat_graph_distance(const acat_graph* g, size_t u, size_t v, double* out) {
  ACAT_REQUIRE(g, out);
  return guard([&] { *out = acat::graph_distance(*g->graph, vertex(g, u), vertex(g, v)); });
}

acat_status acat_graph_triangle_defect(const acat_graph* g, size_t x, size_t y, size_t z, int grid, double* out) {
  ACAT_REQUIRE(g, out);
  return guard([&] {
    const acat::GraphSpace& s = space_of(g);
    *out = acat::triangle_defect(s, s.vertex(vertex(g, x)), s.vertex(vertex(g, y)), s.vertex(vertex(g, z)), grid)
               .delta;
  });
}

acat_status acat_graph_four_point(const acat_graph* g, const size_t v[4], double* out) {
  ACAT_REQUIRE(g, v, out);
  return guard([&] {
    double d[4][4] = {};
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) d[i][j] = d[j][i] = acat::graph_distance(*g->graph, vertex(g, v[i]), vertex(g, v[j]));
    *out = acat::four_point_all_orders(d);
  });
}

acat_status acat_four_point_defect(const double d[6], double* out) {
  ACAT_REQUIRE(d, out);
  return guard([&] { *out = acat::four_point_defect(d[0], d[1], d[2], d[3], d[4], d[5]); });
}

acat_status acat_cn_residual(double dpr, double dqr, double dmr, double dpq, double* out) {
  ACAT_REQUIRE(out);
  return guard([&] { *out = acat::cn_inequality_residual(dpr, dqr, dmr, dpq); });
}

acat_status acat_median_case1(double a, double b, double c, double p, double q, double* gap, double* gap_closed) {
  ACAT_REQUIRE(gap, gap_closed);
  return guard([&] {
    const acat::MedianCase1 m = acat::median_case1(a, b, c, p, q);
    *gap = m.gap;
    *gap_closed = m.gap_closed;
  });
}

acat_status acat_tail_extension(double alpha, double beta, double gamma, double r, int* ok, double* h,
                                double* h_prime_plus_r) {
  ACAT_REQUIRE(ok, h, h_prime_plus_r);
  return guard([&] {
    const acat::TailExtension t = acat::tail_extension_check(alpha, beta, gamma, r);
    *ok = t.ok ? 1 : 0;
    *h = t.h;
    *h_prime_plus_r = t.h_prime_plus_r;
  });
}

acat_status acat_diagonal_distance(int n, double* out) {
  ACAT_REQUIRE(out);
  return guard([&] { *out = acat::diagonal_distance(n); });
}

acat_status acat_euclidean_diagonal_distance(int n, double* out) {
  ACAT_REQUIRE(out);
  return guard([&] { *out = acat::euclidean_diagonal_distance(n); });
}

acat_status acat_divergence_gap(int n, double* gap, double* lower_bound) {
  ACAT_REQUIRE(gap, lower_bound);
  return guard([&] {
    const acat::DivergenceGap g = acat::divergence_gap(n);
    *gap = g.gap;
    *lower_bound = g.lower_bound;
  });
}

acat_status acat_wrinkled_new(int n_max, double resolution, double clip_radius, acat_wrinkled** out) {
  ACAT_REQUIRE(out);
  return guard([&] {
    acat::WrinkledOptions o;
    o.n_max = n_max;
    o.resolution = resolution;
    o.clip_radius = clip_radius;
    auto w = std::make_unique<acat_wrinkled>();
    w->surface = std::make_unique<acat::WrinkledSurface>(o);
    *out = w.release();
  });
}

void acat_wrinkled_free(acat_wrinkled* w) { delete w; }

acat_status acat_wrinkled_distance(const acat_wrinkled* w, double px, double py, double qx, double qy, double* out,
                                   int* touched_boundary) {
  ACAT_REQUIRE(w, out);
  return guard([&] {
    const acat::WrinkledSurface& s = *w->surface;
    const auto d = s.distance(s.above({px, py}), s.above({qx, qy}));
    *out = d.value;
    if (touched_boundary) *touched_boundary = d.touched_boundary ? 1 : 0;
  });
}

acat_status acat_sasaki_qi(double px, double py, double ptheta, double qx, double qy, double qtheta, double tol,
                           acat_qi_report* out) {
  ACAT_REQUIRE(out);
  return guard([&] {
    const acat::QiReport r = acat::qi_bounds_check({{px, py}, ptheta}, {{qx, qy}, qtheta}, tol);
    *out = {r.d,           r.dtheta,        r.L,       r.D,          r.ok_lower, r.ok_upper,
            r.converged,   r.endpoint_error, r.bracket_lo, r.bracket_hi, r.holonomy};
  });
}

acat_status acat_sasaki_classify(double c, double direction, double length, double step,
                                 acat_projection_shape* out) {
  ACAT_REQUIRE(out);
  return guard([&] {
    const acat::SasakiCurve curve = acat::sasaki_geodesic_ode({{0.0, 1.0}, 0.0}, direction, c, length, step);
    const acat::ProjectionShape s = acat::classify_projection(curve);
    *out = {s.kappa_mean, s.kappa_std, static_cast<int>(s.kind), s.fit_residual, s.speed_drift, s.base_motion};
  });
}

acat_status acat_min_enclosing_ball(const double* xy, size_t n, double* cx, double* cy, double* radius) {
  ACAT_REQUIRE(xy, cx, cy, radius);
  return guard([&] {
    std::vector<acat::Vec2> pts;
    for (size_t i = 0; i < n; ++i) pts.push_back({xy[2 * i], xy[2 * i + 1]});
    const acat::Ball b = acat::minimal_enclosing_ball(pts);
    *cx = b.center.x;
    *cy = b.center.y;
    *radius = b.radius;
  });
}

acat_status acat_wrinkled_profile(const double* radii, size_t n, int triangles, int grid, uint64_t seed,
                                  double resolution_ratio, double clip_factor, acat_profile** out) {
  ACAT_REQUIRE(radii, out);
  return guard([&] {
    acat::WrinkledBallSampler sampler({resolution_ratio, clip_factor, 4.2});
    auto p = std::make_unique<acat_profile>();
    p->profile = acat::defect_profile(sampler, {std::vector<double>(radii, radii + n)}, triangles, grid, seed);
    *out = p.release();
  });
}

void acat_profile_free(acat_profile* p) { delete p; }

size_t acat_profile_rows(const acat_profile* p) { return p ? p->profile.rows.size() : 0; }

acat_status acat_profile_row(const acat_profile* p, size_t i, double* r, double* f_hat, int* samples) {
  ACAT_REQUIRE(p, r, f_hat, samples);
  return guard([&] {
    if (i >= p->profile.rows.size()) throw acat::DomainError("row out of range");
    const acat::ProfileRow& row = p->profile.rows[i];
    *r = row.r;
    *f_hat = row.f_hat;
    *samples = row.samples;
  });
}

acat_status acat_profile_verdict(const acat_profile* p, int* verdict, double* slope, double* ratio) {
  ACAT_REQUIRE(p, verdict, slope, ratio);
  return guard([&] {
    const acat::SublinearityVerdict v = acat::sublinearity_verdict(p->profile);
    *verdict = v.verdict == acat::Verdict::Sublinear   ? ACAT_SUBLINEAR
               : v.verdict == acat::Verdict::Linearish ? ACAT_LINEARISH
                                                       : ACAT_INCONCLUSIVE;
    *slope = v.slope;
    *ratio = v.ratio;
  });
}

acat_status acat_qi_distortion(const char* map_tag, double scale, int pairs, uint64_t seed, double* sup,
                               double* epsilon) {
  ACAT_REQUIRE(map_tag, sup, epsilon);
  return guard([&] {
    const acat::QiDistortion q = acat::qi_distortion_decay(map_tag, scale, pairs, seed);
    *sup = q.sup;
    *epsilon = q.epsilon;
  });
}

const char* acat_recipe_name(size_t i) {
  const auto& names = acat::recipe_names();
  return i < names.size() ? names[i].c_str() : nullptr;
}

acat_status acat_run_recipe(const char* recipe, const char* config, acat_run** out) {
  ACAT_REQUIRE(recipe, out);
  return guard([&] {
    auto run = std::make_unique<acat_run>();
    run->output = acat::run_recipe(recipe, acat::parse_params(config ? config : ""));
    *out = run.release();
  });
}

void acat_run_free(acat_run* run) { delete run; }

const char* acat_run_csv(const acat_run* run) { return run ? run->output.csv.c_str() : nullptr; }

const char* acat_run_manifest(const acat_run* run) { return run ? run->output.manifest.c_str() : nullptr; }

}  // extern "C"
