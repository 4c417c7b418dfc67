// Links only the shared library; nothing from the C++ core is visible here.
#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "acat/acat.h"

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(acat_version(), "0.1.0");
  EXPECT_STREQ(acat_status_name(ACAT_OK), "ok");
  EXPECT_STRNE(acat_status_name(ACAT_E_USAGE), acat_status_name(ACAT_E_DOMAIN));
}

TEST(CApi, NullArgumentsAreReported) {
  EXPECT_EQ(acat_graph_new(nullptr), ACAT_E_NULL);
  EXPECT_NE(std::string(acat_last_error()), "");
  double out = 0;
  EXPECT_EQ(acat_graph_distance(nullptr, 0, 0, &out), ACAT_E_NULL);
  acat_graph_free(nullptr);
  acat_wrinkled_free(nullptr);
  acat_profile_free(nullptr);
  acat_run_free(nullptr);
}

TEST(CApi, GraphRoundTrip) {
  acat_graph* g = nullptr;
  ASSERT_EQ(acat_graph_new(&g), ACAT_OK);
  size_t ids[6];
  for (size_t& id : ids) ASSERT_EQ(acat_graph_add_vertex(g, &id), ACAT_OK);
  for (size_t i = 0; i < 6; ++i) ASSERT_EQ(acat_graph_add_edge(g, ids[i], ids[(i + 1) % 6], 1.0), ACAT_OK);
  double d = 0;
  ASSERT_EQ(acat_graph_distance(g, 0, 3, &d), ACAT_OK);
  EXPECT_DOUBLE_EQ(d, 3.0);
  EXPECT_EQ(std::string(acat_last_error()), "");

  EXPECT_EQ(acat_graph_add_edge(g, 0, 1, -1.0), ACAT_E_DOMAIN);
  EXPECT_EQ(acat_graph_distance(g, 0, 99, &d), ACAT_E_DOMAIN);

  const size_t v[4] = {0, 1, 3, 4};
  double fp = -1;
  ASSERT_EQ(acat_graph_four_point(g, v, &fp), ACAT_OK);
  EXPECT_GT(fp, 0.0);

  size_t lone = 0;
  ASSERT_EQ(acat_graph_add_vertex(g, &lone), ACAT_OK);
  EXPECT_EQ(acat_graph_distance(g, 0, lone, &d), ACAT_E_UNREACHABLE);
  acat_graph_free(g);
}

TEST(CApi, ComparisonAlgebra) {
  // Four points on a line: zero defect.
  const double d[6] = {1, 2, 3, 1, 2, 1};
  double out = -1;
  ASSERT_EQ(acat_four_point_defect(d, &out), ACAT_OK);
  EXPECT_NEAR(out, 0.0, 1e-12);
  EXPECT_EQ(acat_cn_residual(1, 1, 1, -1, &out), ACAT_E_DOMAIN);
}

TEST(CApi, WrinkledDiagonal) {
  double dn = 0, de = 0, gap = 0, lb = 0;
  ASSERT_EQ(acat_diagonal_distance(5, &dn), ACAT_OK);
  ASSERT_EQ(acat_euclidean_diagonal_distance(5, &de), ACAT_OK);
  ASSERT_EQ(acat_divergence_gap(5, &gap, &lb), ACAT_OK);
  EXPECT_NEAR(gap, dn - de, 1e-12);
  EXPECT_GE(gap, lb);
  EXPECT_EQ(acat_diagonal_distance(0, &dn), ACAT_E_DOMAIN);
}

TEST(CApi, SasakiClassify) {
  acat_projection_shape s{};
  ASSERT_EQ(acat_sasaki_classify(0.0, 0.3, 3.0, 0.01, &s), ACAT_OK);
  EXPECT_EQ(s.kind, ACAT_CURVE_GEODESIC);
  EXPECT_LE(std::abs(s.kappa_mean), 1e-5);
  ASSERT_EQ(acat_sasaki_classify(1.0, 0.3, 3.0, 0.01, &s), ACAT_OK);
  EXPECT_EQ(s.kind, ACAT_CURVE_POINT);
}

TEST(CApi, MinEnclosingBall) {
  const double xy[6] = {0, 0, 2, 0, 1, 0.1};
  double cx = 0, cy = 0, r = 0;
  ASSERT_EQ(acat_min_enclosing_ball(xy, 3, &cx, &cy, &r), ACAT_OK);
  EXPECT_NEAR(cx, 1.0, 1e-9);
  EXPECT_NEAR(cy, 0.0, 1e-9);
  EXPECT_NEAR(r, 1.0, 1e-9);
  EXPECT_NE(acat_min_enclosing_ball(xy, 0, &cx, &cy, &r), ACAT_OK);
}

TEST(CApi, Profile) {
  const double radii[4] = {4, 8, 16, 32};
  acat_profile* p = nullptr;
  ASSERT_EQ(acat_wrinkled_profile(radii, 4, 3, 3, 7, 0.01, 1.25, &p), ACAT_OK);
  ASSERT_EQ(acat_profile_rows(p), 4u);
  double prev = 0;
  for (size_t i = 0; i < 4; ++i) {
    double r = 0, f = 0;
    int n = 0;
    ASSERT_EQ(acat_profile_row(p, i, &r, &f, &n), ACAT_OK);
    EXPECT_EQ(r, radii[i]);
    EXPECT_GE(f, prev);
    prev = f;
  }
  int verdict = -1;
  double slope = 0, ratio = 0;
  EXPECT_EQ(acat_profile_verdict(p, &verdict, &slope, &ratio), ACAT_OK);
  EXPECT_GE(verdict, ACAT_SUBLINEAR);
  EXPECT_LE(verdict, ACAT_INCONCLUSIVE);
  EXPECT_EQ(acat_profile_row(p, 4, nullptr, nullptr, nullptr), ACAT_E_NULL);
  double r = 0, f = 0;
  int n = 0;
  EXPECT_EQ(acat_profile_row(p, 4, &r, &f, &n), ACAT_E_DOMAIN);
  acat_profile_free(p);
}

TEST(CApi, QiDistortion) {
  double sup = -1, eps = 0;
  ASSERT_EQ(acat_qi_distortion("identity", 4, 10, 1, &sup, &eps), ACAT_OK);
  EXPECT_EQ(sup, 0.0);
  ASSERT_EQ(acat_qi_distortion("finite_amalgam_to_tilde", 4, 200, 1, &sup, &eps), ACAT_OK);
  EXPECT_LE(sup, eps / 4 + 1e-12);
  EXPECT_EQ(acat_qi_distortion("nonsense", 4, 10, 1, &sup, &eps), ACAT_E_DOMAIN);
}

TEST(CApi, Recipes) {
  size_t count = 0;
  while (acat_recipe_name(count)) ++count;
  EXPECT_EQ(count, 8u);

  acat_run* run = nullptr;
  ASSERT_EQ(acat_run_recipe("wrinkled-gap", "n_max=3\n", &run), ACAT_OK);
  const std::string csv = acat_run_csv(run);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,diagonal_distance,euclidean_distance,gap,lower_bound");
  EXPECT_NE(std::string(acat_run_manifest(run)).find("\"recipe\": \"wrinkled-gap\""), std::string::npos);
  acat_run_free(run);

  run = nullptr;
  EXPECT_EQ(acat_run_recipe("wrinkled-gap", "", &run), ACAT_E_USAGE);
  EXPECT_EQ(run, nullptr);
  EXPECT_NE(std::string(acat_last_error()).find("n_max"), std::string::npos);
  EXPECT_EQ(acat_run_recipe("nope", "", &run), ACAT_E_USAGE);
}
