/******************************************************************************
 * Copyright 2026 The plp Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "plp/errors.hpp"
#include "plp/plane.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace plp;

namespace {

// Quadratic-time reference for the radius graph.
std::vector<std::pair<int, int>> brute_force_edges(
    const std::vector<Vec3>& points, double radius) {
  std::vector<std::pair<int, int>> edges;
  for (size_t i = 0; i < points.size(); ++i) {
    for (size_t j = i + 1; j < points.size(); ++j) {
      if ((points[i] - points[j]).norm() <= radius) {
        edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  return edges;
}

double tls_objective(const std::vector<Vec3>& pts, const Vec3& normal) {
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : pts) {
    centroid += p;
  }
  centroid /= static_cast<double>(pts.size());
  double sum = 0.0;
  for (const Vec3& p : pts) {
    const double d = normal.dot(p - centroid);
    sum += d * d;
  }
  return sum;
}

// Dense sphere grid followed by pattern-search refinement; independent of the
// SVD path used by fit_plane_svd.
Vec3 grid_descent_normal(const std::vector<Vec3>& pts) {
  double best_theta = 0.0, best_phi = 0.0;
  double best = std::numeric_limits<double>::infinity();
  auto normal_of = [](double theta, double phi) {
    return Vec3(std::sin(theta) * std::cos(phi),
                std::sin(theta) * std::sin(phi), std::cos(theta));
  };
  for (int it = 0; it < 60; ++it) {
    for (int ip = 0; ip < 120; ++ip) {
      const double theta = M_PI * (it + 0.5) / 60.0;
      const double phi = 2.0 * M_PI * ip / 120.0;
      const double val = tls_objective(pts, normal_of(theta, phi));
      if (val < best) {
        best = val;
        best_theta = theta;
        best_phi = phi;
      }
    }
  }
  double step = M_PI / 60.0;
  while (step > 1e-12) {
    bool improved = false;
    for (const auto& [dt, dp] : {std::pair{step, 0.0}, std::pair{-step, 0.0},
                                 std::pair{0.0, step}, std::pair{0.0, -step}}) {
      const double val =
          tls_objective(pts, normal_of(best_theta + dt, best_phi + dp));
      if (val < best) {
        best = val;
        best_theta += dt;
        best_phi += dp;
        improved = true;
      }
    }
    if (!improved) {
      step *= 0.5;
    }
  }
  return normal_of(best_theta, best_phi);
}

NeighborhoodGraph graph_of(const std::vector<Vec3>& pts, double radius) {
  return build_neighborhood_graph(pts, radius);
}

}  // namespace

TEST_CASE("point_plane_distance") {
  Plane3 pi;
  pi.n = Vec3(0, 0, 1);
  pi.d = -1.0;
  CHECK(point_plane_distance(Vec3(0, 0, 3), pi) == doctest::Approx(2.0));
  CHECK(point_plane_distance(Vec3(5, -2, 1), pi) == doctest::Approx(0.0));

  Plane3 scaled = pi;
  scaled.n *= 7.0;
  scaled.d *= 7.0;
  CHECK(point_plane_distance(Vec3(0, 0, 3), scaled) == doctest::Approx(2.0));
}

TEST_CASE("fit_plane_svd") {
  std::mt19937_64 rng(31);
  std::vector<Vec3> flat;
  for (int i = 0; i < 40; ++i) {
    flat.emplace_back(testutil::uniform(rng, -2, 2),
                      testutil::uniform(rng, -2, 2), 1.0);
  }
  const Plane3 fitted = fit_plane_svd(flat);
  CHECK(std::abs(std::abs(fitted.n.z()) - 1.0) < 1e-12);
  CHECK(std::abs(fitted.d * fitted.n.z() + 1.0) < 1e-12);

  const std::vector<Vec3> tri = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 1)};
  const Plane3 exact = fit_plane_svd(tri);
  for (const Vec3& p : tri) {
    CHECK(point_plane_distance(p, exact) < 1e-12);
  }

  const std::vector<Vec3> collinear = {Vec3(0, 0, 0), Vec3(1, 1, 1),
                                       Vec3(2, 2, 2), Vec3(3, 3, 3)};
  CHECK_THROWS_AS(fit_plane_svd(collinear), DegenerateConfiguration);
  CHECK_THROWS_AS(fit_plane_svd({Vec3(0, 0, 0), Vec3(1, 0, 0)}),
                  DegenerateConfiguration);
}

TEST_CASE("fit_plane_svd matches grid descent oracle") {
  std::mt19937_64 rng(32);
  std::normal_distribution<double> gauss(0.0, 0.01);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 normal = testutil::random_unit(rng);
    Vec3 u = normal.cross(Vec3::UnitX());
    if (u.norm() < 0.1) {
      u = normal.cross(Vec3::UnitY());
    }
    u.normalize();
    const Vec3 v = normal.cross(u);
    const Vec3 origin(testutil::uniform(rng, -1, 1),
                      testutil::uniform(rng, -1, 1),
                      testutil::uniform(rng, -1, 1));
    std::vector<Vec3> pts;
    for (int i = 0; i < 60; ++i) {
      pts.push_back(origin + testutil::uniform(rng, -1, 1) * u +
                    testutil::uniform(rng, -1, 1) * v + gauss(rng) * normal);
    }
    const Plane3 fitted = fit_plane_svd(pts);
    Vec3 reference = grid_descent_normal(pts);
    if (fitted.n.dot(reference) < 0.0) {
      reference = -reference;
    }
    // Tiny angles via the cross product; acos of the dot saturates at the
    // double-precision floor (~1.5e-8 rad).
    CHECK(fitted.n.cross(reference).norm() < 1e-9);
  }
}

TEST_CASE("labeling energy hand cases") {
  GeometricThresholds th;
  th.eps_d = 0.1;
  th.lambda = 0.6;

  Plane3 pi;
  pi.n = Vec3(0, 0, 1);
  pi.d = 0.0;

  // Four points on a path; two on the plane, two far away.
  NeighborhoodGraph graph;
  graph.vertices = {Vec3(0, 0, 0), Vec3(0.1, 0, 0), Vec3(0.2, 0, 1.0),
                    Vec3(0.3, 0, 1.0)};
  graph.edges = {{0, 1}, {1, 2}, {2, 3}};

  CHECK(labeling_energy({1, 1, 0, 0}, pi, graph, th) ==
        doctest::Approx(0.6).epsilon(1e-12));
  CHECK(labeling_energy({1, 1, 1, 1}, pi, graph, th) ==
        doctest::Approx(2.0).epsilon(1e-12));

  // Perfect consensus with no disagreeing edges.
  NeighborhoodGraph flat;
  flat.vertices = {Vec3(0, 0, 0), Vec3(0.1, 0, 0.01), Vec3(0.2, 0, 0.0)};
  flat.edges = {{0, 1}, {1, 2}};
  CHECK(labeling_energy({1, 1, 1}, pi, flat, th) == doctest::Approx(0.0));
}

TEST_CASE("graphcut equals thresholding at lambda zero") {
  std::mt19937_64 rng(33);
  GeometricThresholds th;
  th.eps_d = 0.05;
  th.lambda = 0.0;
  Plane3 pi;
  pi.n = Vec3(0, 0, 1);
  pi.d = 0.0;
  std::vector<Vec3> pts;
  for (int i = 0; i < 50; ++i) {
    pts.emplace_back(testutil::uniform(rng, -1, 1),
                     testutil::uniform(rng, -1, 1),
                     testutil::uniform(rng, -0.2, 0.2));
  }
  const NeighborhoodGraph graph = graph_of(pts, th.neighbor_radius());
  const std::vector<uint8_t> labels = graphcut_labels(pi, graph, th);
  for (size_t i = 0; i < pts.size(); ++i) {
    const uint8_t expected =
        point_plane_distance(pts[i], pi) < th.eps_d ? 1 : 0;
    CHECK(labels[i] == expected);
  }
}

TEST_CASE("graphcut reaches the enumeration minimum on small fixtures") {
  std::mt19937_64 rng(34);
  for (int fixture = 0; fixture < 40; ++fixture) {
    const int n = 4 + static_cast<int>(testutil::uniform(rng, 0.0, 8.99));
    std::vector<Vec3> pts;
    for (int i = 0; i < n; ++i) {
      pts.emplace_back(testutil::uniform(rng, -0.5, 0.5),
                       testutil::uniform(rng, -0.5, 0.5),
                       testutil::uniform(rng, -0.3, 0.3));
    }
    GeometricThresholds th;
    th.eps_d = testutil::uniform(rng, 0.02, 0.2);
    th.lambda = testutil::uniform(rng, 0.0, 1.5);
    Plane3 pi;
    pi.n = testutil::random_unit(rng);
    pi.d = testutil::uniform(rng, -0.5, 0.5);

    const NeighborhoodGraph graph = graph_of(pts, th.neighbor_radius());
    const std::vector<uint8_t> cut = graphcut_labels(pi, graph, th);
    const auto [best, best_labels] = testoracle::enumerate_min_energy(pi, graph, th);
    CHECK(labeling_energy(cut, pi, graph, th) ==
          doctest::Approx(best).epsilon(1e-12));

    // Never worse than plain thresholding.
    std::vector<uint8_t> thresholded(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
      thresholded[i] = point_plane_distance(pts[i], pi) < th.eps_d ? 1 : 0;
    }
    CHECK(labeling_energy(cut, pi, graph, th) <=
          labeling_energy(thresholded, pi, graph, th) + 1e-12);
  }
}

TEST_CASE("graphcut separates an ambiguous seam by spatial coherence") {
  GeometricThresholds th;
  th.eps_d = 0.1;
  th.lambda = 0.6;
  Plane3 pi;
  pi.n = Vec3(0, 0, 1);
  pi.d = 0.0;

  // Cluster A hugs the plane; cluster B floats just outside the inlier band
  // except one ambiguous member inside it.
  std::vector<Vec3> pts = {
      Vec3(0.00, 0, 0.00), Vec3(0.05, 0, 0.01), Vec3(0.10, 0, -0.01),
      Vec3(0.15, 0, 0.02),
      Vec3(2.00, 0, 0.14), Vec3(2.05, 0, 0.13), Vec3(2.10, 0, 0.15),
      Vec3(2.07, 0, 0.09),  // within eps_d of the plane, but in cluster B
  };
  const NeighborhoodGraph graph = graph_of(pts, 0.2);
  const std::vector<uint8_t> cut = graphcut_labels(pi, graph, th);
  const auto [best, best_labels] = testoracle::enumerate_min_energy(pi, graph, th);
  CHECK(labeling_energy(cut, pi, graph, th) == doctest::Approx(best));
  CHECK(cut == best_labels);
  // The ambiguous point follows its cluster, unlike plain thresholding.
  CHECK(cut[7] == 0);
  CHECK(point_plane_distance(pts[7], pi) < th.eps_d);
  for (int i = 0; i < 4; ++i) {
    CHECK(cut[i] == 1);
  }
}

TEST_CASE("neighborhood graph radius cases and quadratic oracle") {
  const double r = 0.5;
  {
    const std::vector<Vec3> near_pair = {Vec3(0, 0, 0), Vec3(0.99 * r, 0, 0)};
    CHECK(build_neighborhood_graph(near_pair, r).edges.size() == 1);
  }
  {
    const std::vector<Vec3> far_pair = {Vec3(0, 0, 0), Vec3(1.01 * r, 0, 0)};
    CHECK(build_neighborhood_graph(far_pair, r).edges.empty());
  }

  std::mt19937_64 rng(35);
  std::vector<Vec3> pts;
  for (int i = 0; i < 500; ++i) {
    pts.emplace_back(testutil::uniform(rng, -1, 1),
                     testutil::uniform(rng, -1, 1),
                     testutil::uniform(rng, -1, 1));
  }
  NeighborhoodGraph graph = build_neighborhood_graph(pts, 0.3);
  std::vector<std::pair<int, int>> reference = brute_force_edges(pts, 0.3);
  std::sort(reference.begin(), reference.end());
  CHECK(graph.edges == reference);

  CHECK_THROWS_AS(build_neighborhood_graph(pts, 0.0), std::invalid_argument);
}

TEST_CASE("sequential ransac on one plane with uniform outliers") {
  std::mt19937_64 rng(36);
  LabeledPoints set;
  const Vec3 normal = Vec3(0.2, -0.3, 0.93).normalized();
  const double offset = -1.2;
  Vec3 u = normal.cross(Vec3::UnitX()).normalized();
  const Vec3 v = normal.cross(u);
  for (int i = 0; i < 200; ++i) {
    Vec3 p;
    if (i < 160) {
      p = -offset * normal + testutil::uniform(rng, -1.5, 1.5) * u +
          testutil::uniform(rng, -1.5, 1.5) * v +
          testutil::uniform(rng, -0.004, 0.004) * normal;
    } else {
      p = Vec3(testutil::uniform(rng, -2, 2), testutil::uniform(rng, -2, 2),
               testutil::uniform(rng, -2, 2));
    }
    set.ids.push_back(i);
    set.positions.push_back(p);
  }

  GeometricThresholds th;
  th.eps_d = 0.02;
  th.eps_Pi = 0.01;
  const std::vector<Plane3> planes = sequential_ransac_planes({set}, th, 99);
  REQUIRE(!planes.empty());

  const Plane3& main_plane = planes.front();
  const double cosine = std::abs(main_plane.n.dot(normal));
  CHECK(std::acos(std::min(1.0, cosine)) < 1.0 * M_PI / 180.0);

  std::vector<bool> member(200, false);
  for (int id : main_plane.member_ids) {
    member[id] = true;
  }
  int correct = 0;
  for (int i = 0; i < 200; ++i) {
    if (member[i] == (i < 160)) {
      ++correct;
    }
  }
  CHECK(correct >= 190);  // 95 percent label accuracy

  // Determinism in the seed.
  const std::vector<Plane3> again = sequential_ransac_planes({set}, th, 99);
  REQUIRE(again.size() == planes.size());
  for (size_t i = 0; i < planes.size(); ++i) {
    CHECK(planes[i].member_ids == again[i].member_ids);
    CHECK((planes[i].n - again[i].n).norm() < 1e-15);
  }
}

TEST_CASE("sequential ransac splits a wrongly merged mask") {
  std::mt19937_64 rng(37);
  LabeledPoints set;
  int id = 0;
  // Plane 1: z = 0. Plane 2: x = 1. Same mask.
  for (int i = 0; i < 80; ++i) {
    set.ids.push_back(id++);
    set.positions.emplace_back(testutil::uniform(rng, -1, 0.6),
                               testutil::uniform(rng, -1, 1),
                               testutil::uniform(rng, -0.003, 0.003));
  }
  for (int i = 0; i < 80; ++i) {
    set.ids.push_back(id++);
    set.positions.emplace_back(1.0 + testutil::uniform(rng, -0.003, 0.003),
                               testutil::uniform(rng, -1, 1),
                               testutil::uniform(rng, 0.4, 2.0));
  }
  GeometricThresholds th;
  th.eps_d = 0.02;
  th.eps_Pi = 0.01;
  const std::vector<Plane3> planes = sequential_ransac_planes({set}, th, 5);
  REQUIRE(planes.size() == 2);
  const double c0 = std::abs(planes[0].n.dot(Vec3::UnitZ()));
  const double c1 = std::abs(planes[1].n.dot(Vec3::UnitX()));
  const double c0_swapped = std::abs(planes[0].n.dot(Vec3::UnitX()));
  const double c1_swapped = std::abs(planes[1].n.dot(Vec3::UnitZ()));
  const bool direct = c0 > 0.999 && c1 > 0.999;
  const bool swapped = c0_swapped > 0.999 && c1_swapped > 0.999;
  CHECK((direct || swapped));
}

TEST_CASE("sequential ransac underdetermined input") {
  LabeledPoints tiny;
  tiny.ids = {0, 1};
  tiny.positions = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  GeometricThresholds th;
  CHECK_THROWS_AS(sequential_ransac_planes({tiny}, th, 1), NoModelFound);
}

TEST_CASE("try_merge") {
  GeometricThresholds th;
  th.eps_Pi = 0.05;
  th.T_d = 0.1;

  // Shared members near (0, 0, 1).
  std::mt19937_64 rng(38);
  std::vector<Vec3> positions;
  Plane3 a, b;
  a.n = Vec3(0, 0, 1);
  a.d = -1.0;
  b.n = Vec3(0.0, 0.0995, 0.995).normalized();
  b.d = -1.0;
  for (int i = 0; i < 20; ++i) {
    const double x = testutil::uniform(rng, -0.2, 0.2);
    const double y = testutil::uniform(rng, -0.2, 0.2);
    positions.emplace_back(x, y, 1.0);
    a.member_ids.push_back(i);
  }
  for (int i = 0; i < 20; ++i) {
    const double x = testutil::uniform(rng, -0.2, 0.2);
    const double y = testutil::uniform(rng, -0.2, 0.2);
    positions.emplace_back(x, y, 1.0 - 0.0995 / 0.995 * y);
    b.member_ids.push_back(20 + i);
  }

  auto pos_copy = positions;
  const auto merged = try_merge(a, b, pos_copy, th);
  REQUIRE(merged.has_value());
  CHECK(merged->member_ids.size() == 40);
  for (int id : merged->member_ids) {
    CHECK(point_plane_distance(pos_copy[id], *merged) < 1e-10);
  }

  // Symmetry up to normal sign.
  auto pos_copy2 = positions;
  const auto merged_swapped = try_merge(b, a, pos_copy2, th);
  REQUIRE(merged_swapped.has_value());
  CHECK(std::abs(merged->n.dot(merged_swapped->n)) > 1.0 - 1e-12);
  CHECK(merged->member_ids == merged_swapped->member_ids);

  // Identical planes merge without changing the equation.
  auto pos_copy3 = positions;
  Plane3 a2 = a;
  const auto self_merge = try_merge(a, a2, pos_copy3, th);
  REQUIRE(self_merge.has_value());
  CHECK(std::abs(self_merge->n.dot(a.n)) > 1.0 - 1e-12);
  CHECK(std::abs(std::abs(self_merge->d) - std::abs(a.d)) < 1e-12);

  // Perpendicular planes never merge.
  Plane3 c;
  c.n = Vec3(1, 0, 0);
  c.d = 0.0;
  c.member_ids = {0, 1, 2};
  auto pos_copy4 = positions;
  CHECK(!try_merge(a, c, pos_copy4, th).has_value());
}

TEST_CASE("refine_members projects with the signed distance") {
  Plane3 pi;
  pi.n = Vec3(0, 0, 1);
  pi.d = -1.0;
  pi.member_ids = {0, 1, 2};
  std::vector<Vec3> positions = {Vec3(0, 0, 3), Vec3(0, 0, -1), Vec3(2, 5, 1)};
  refine_members(pi, positions);
  CHECK((positions[0] - Vec3(0, 0, 1)).norm() < 1e-12);
  CHECK((positions[1] - Vec3(0, 0, 1)).norm() < 1e-12);
  CHECK((positions[2] - Vec3(2, 5, 1)).norm() < 1e-12);

  double total = 0.0;
  for (int id : pi.member_ids) {
    total += point_plane_distance(positions[id], pi);
  }
  CHECK(total < 1e-10);
}

TEST_CASE("adaptive thresholds scale with median depth") {
  GeometricThresholds base;
  const GeometricThresholds at_one = adaptive_thresholds(1.0, base);
  CHECK(at_one.eps_d == doctest::Approx(0.02));
  CHECK(at_one.T_d == doctest::Approx(0.04));
  CHECK(at_one.eps_Pi == doctest::Approx(0.01));
  CHECK(at_one.neighbor_radius() == doctest::Approx(0.04));

  const GeometricThresholds at_two = adaptive_thresholds(2.0, base);
  CHECK(at_two.eps_d == doctest::Approx(2.0 * at_one.eps_d));
  CHECK(at_two.T_d == doctest::Approx(2.0 * at_one.T_d));
  CHECK(at_two.eps_Pi == doctest::Approx(2.0 * at_one.eps_Pi));

  CHECK_THROWS_AS(adaptive_thresholds(0.0, base), std::invalid_argument);
  CHECK_THROWS_AS(adaptive_thresholds(-1.0, base), std::invalid_argument);
}
