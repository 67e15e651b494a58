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

#include <cmath>

#include "plp/camera.hpp"
#include "plp/errors.hpp"
#include "plp/line.hpp"
#include "test_util.hpp"

using namespace plp;

namespace {

ImageLineSegment project_segment(const PoseSE3& pose, const CameraIntrinsics& K,
                                 const Vec3& a, const Vec3& b) {
  const PixelPoint pa = project_point(pose, K, a);
  const PixelPoint pb = project_point(pose, K, b);
  return {pa, pb};
}

Vec3 segment_line(const ImageLineSegment& seg) {
  return seg.s.homogeneous().cross(seg.e.homogeneous());
}

}  // namespace

TEST_CASE("pluecker_from_endpoints hand cases") {
  // Moment paired as m = x0 x d so the camera-frame transform below holds
  // with a positive scale.
  const PlueckerLine a = pluecker_from_endpoints(Vec3(1, 0, 0), Vec3(0, 1, 0));
  CHECK((a.m - Vec3(0, 0, -1)).norm() < 1e-15);
  CHECK((a.d - Vec3(1, -1, 0)).norm() < 1e-15);

  const PlueckerLine through_origin =
      pluecker_from_endpoints(Vec3(0, 0, 1), Vec3(0, 0, 2));
  CHECK(through_origin.m.norm() < 1e-15);
  CHECK((through_origin.d - Vec3(0, 0, -1)).norm() < 1e-15);

  std::mt19937_64 rng(21);
  for (int i = 0; i < 1000; ++i) {
    const PlueckerLine line = testutil::random_line(rng);
    CHECK(std::abs(line.m.dot(line.d)) < 1e-12 * line.m.norm() * line.d.norm() + 1e-300);
  }

  CHECK_THROWS_AS(pluecker_from_endpoints(Vec3(1, 2, 3), Vec3(1, 2, 3)),
                  DegenerateLine);
}

TEST_CASE("orthonormal representation hand case") {
  PlueckerLine line;
  line.m = Vec3(0, 0, 1);
  line.d = Vec3(1, 0, 0);
  const OrthonormalLine o = to_orthonormal(line);
  CHECK((o.U.col(0) - Vec3(0, 0, 1)).norm() < 1e-15);
  CHECK((o.U.col(1) - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK((o.U.col(2) - Vec3(0, 1, 0)).norm() < 1e-15);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Mat2 expected_w;
  expected_w << inv_sqrt2, -inv_sqrt2, inv_sqrt2, inv_sqrt2;
  CHECK((o.W - expected_w).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("orthonormal construction invariants and round trip") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 10000; ++i) {
    const PlueckerLine line = testutil::random_line(rng);
    const OrthonormalLine o = to_orthonormal(line);
    CHECK((o.U.transpose() * o.U - Mat3::Identity()).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK(std::abs(o.U.determinant() - 1.0) < 1e-12);
    CHECK(std::abs(o.W.determinant() - 1.0) < 1e-12);

    const PlueckerLine back = from_orthonormal(o);
    CHECK(testutil::line_cosine(line, back) >= 1.0 - 1e-12);
    CHECK(back.klein_residual() < 1e-12);
  }
}

TEST_CASE("orthonormal degenerate lines fall back to QR") {
  // Line through the origin: zero moment.
  PlueckerLine through_origin;
  through_origin.m = Vec3::Zero();
  through_origin.d = Vec3(0.0, 0.3, 0.4);
  const OrthonormalLine o = to_orthonormal(through_origin);
  CHECK((o.U.transpose() * o.U - Mat3::Identity()).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK(std::abs(o.U.determinant() - 1.0) < 1e-12);
  const PlueckerLine back = from_orthonormal(o);
  CHECK(back.m.norm() < 1e-12);
  CHECK(back.d.normalized().dot(through_origin.d.normalized()) >
        1.0 - 1e-12);

  // Pure moment (line at infinity).
  PlueckerLine at_infinity;
  at_infinity.m = Vec3(1.0, -2.0, 0.5);
  at_infinity.d = Vec3::Zero();
  const OrthonormalLine o2 = to_orthonormal(at_infinity);
  const PlueckerLine back2 = from_orthonormal(o2);
  CHECK(back2.d.norm() < 1e-12);
  CHECK(back2.m.normalized().dot(at_infinity.m.normalized()) > 1.0 - 1e-12);

  PlueckerLine zero;
  zero.m = Vec3::Zero();
  zero.d = Vec3::Zero();
  CHECK_THROWS_AS(to_orthonormal(zero), DegenerateLine);
}

TEST_CASE("from_orthonormal identity input") {
  OrthonormalLine o;  // U = I, W = I
  const PlueckerLine line = from_orthonormal(o);
  CHECK((line.m - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK(line.d.norm() < 1e-15);
  CHECK(line.klein_residual() < 1e-12);
}

TEST_CASE("update_orthonormal") {
  std::mt19937_64 rng(23);
  const OrthonormalLine o = to_orthonormal(testutil::random_line(rng));

  const OrthonormalLine same = update_orthonormal(o, Vec4::Zero());
  CHECK(same.U == o.U);
  CHECK(same.W == o.W);

  OrthonormalLine eye;
  Vec4 quarter(0.0, 0.0, M_PI / 2.0, 0.0);
  const OrthonormalLine rotated = update_orthonormal(eye, quarter);
  CHECK((rotated.U - so3_exp(Vec3(0, 0, M_PI / 2.0))).cwiseAbs().maxCoeff() <
        1e-12);

  OrthonormalLine state = o;
  std::normal_distribution<double> gauss(0.0, 0.05);
  for (int i = 0; i < 100000; ++i) {
    Vec4 delta(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
    state = update_orthonormal(state, delta);
  }
  CHECK((state.U.transpose() * state.U - Mat3::Identity()).cwiseAbs().maxCoeff() <
        1e-9);
  CHECK((state.W.transpose() * state.W - Mat2::Identity()).cwiseAbs().maxCoeff() <
        1e-9);
  CHECK(std::abs(state.U.determinant() - 1.0) < 1e-9);
}

TEST_CASE("transform_line matches transformed endpoints") {
  std::mt19937_64 rng(24);
  for (int i = 0; i < 500; ++i) {
    Vec3 a(testutil::uniform(rng, -3, 3), testutil::uniform(rng, -3, 3),
           testutil::uniform(rng, -3, 3));
    Vec3 b = a + testutil::random_unit(rng) * testutil::uniform(rng, 0.3, 3.0);
    const PoseSE3 T = testutil::random_pose(rng);

    const PlueckerLine transformed =
        transform_line(T, pluecker_from_endpoints(a, b));
    const PlueckerLine expected =
        pluecker_from_endpoints(T.transform(a), T.transform(b));
    CHECK(testutil::line_cosine(transformed, expected) >= 1.0 - 1e-10);
    CHECK(transformed.klein_residual() < 1e-10);
  }
}

TEST_CASE("transform_line identity and pure translation") {
  std::mt19937_64 rng(25);
  const PlueckerLine line = testutil::random_line(rng);
  const PlueckerLine same = transform_line(PoseSE3::identity(), line);
  CHECK((same.m - line.m).norm() < 1e-15);
  CHECK((same.d - line.d).norm() < 1e-15);

  // Line through the origin with direction +x, translated by (0,0,1).
  const PlueckerLine x_axis = pluecker_from_endpoints(Vec3(1, 0, 0), Vec3::Zero());
  const PoseSE3 lift(Mat3::Identity(), Vec3(0, 0, 1));
  const PlueckerLine lifted = transform_line(lift, x_axis);
  CHECK((lifted.m - Vec3(0, 1, 0) * x_axis.d.norm()).norm() < 1e-15);
  CHECK((lifted.d - x_axis.d).norm() < 1e-15);
}

TEST_CASE("transform_line composes") {
  std::mt19937_64 rng(26);
  for (int i = 0; i < 200; ++i) {
    const PoseSE3 T1 = testutil::random_pose(rng);
    const PoseSE3 T2 = testutil::random_pose(rng);
    const PlueckerLine line = testutil::random_line(rng);
    const PlueckerLine chained = transform_line(T2, transform_line(T1, line));
    const PlueckerLine direct = transform_line(compose(T2, T1), line);
    CHECK((chained.vector6() - direct.vector6()).norm() <
          1e-10 * direct.vector6().norm());
  }
}

TEST_CASE("project_line") {
  PlueckerLine line_c;
  line_c.m = Vec3(0, 2, 0);
  line_c.d = Vec3(1, 0, 0);
  const Vec3 l = project_line({1.0, 1.0, 0.0, 0.0}, line_c);
  CHECK((l - Vec3(0, 2, 0)).norm() < 1e-15);

  PlueckerLine through_center;
  through_center.m = Vec3::Zero();
  through_center.d = Vec3(0, 0, 1);
  CHECK_THROWS_AS(project_line({1.0, 1.0, 0.0, 0.0}, through_center),
                  DegenerateProjection);
}

TEST_CASE("line_reprojection_error") {
  ImageLineSegment seg;
  seg.s = {5.0, 0.3};
  seg.e = {-2.0, -0.4};
  const Vec2 e = line_reprojection_error(Vec3(0, 1, 0), seg);
  CHECK(e[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(e[1] == doctest::Approx(-0.4).epsilon(1e-12));

  // Scale invariance.
  const Vec2 e2 = line_reprojection_error(Vec3(0, 7.5, 0), seg);
  CHECK((e - e2).norm() < 1e-12);

  // Incident endpoints give a zero error, and only then.
  ImageLineSegment on_line;
  on_line.s = {5.0, 0.0};
  on_line.e = {-2.0, 0.0};
  CHECK(line_reprojection_error(Vec3(0, 1, 0), on_line).norm() < 1e-12);

  CHECK_THROWS_AS(line_reprojection_error(Vec3(0, 0, 1), seg),
                  DegenerateProjection);
}

TEST_CASE("dual pluecker matrix antisymmetry") {
  std::mt19937_64 rng(27);
  for (int i = 0; i < 100; ++i) {
    Vec4 pi1, pi2;
    for (int k = 0; k < 4; ++k) {
      pi1[k] = testutil::uniform(rng, -2, 2);
      pi2[k] = testutil::uniform(rng, -2, 2);
    }
    const Mat4 L = dual_pluecker_matrix(pi1, pi2);
    CHECK((L + L.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("two-view triangulation recovers the line") {
  std::mt19937_64 rng(28);
  const CameraIntrinsics K{500.0, 500.0, 320.0, 240.0};
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    // World segment in front of both cameras; ~20 degree baseline.
    const Vec3 a(testutil::uniform(rng, -1, 1), testutil::uniform(rng, -1, 1),
                 testutil::uniform(rng, 3, 6));
    const Vec3 dir = testutil::random_unit(rng);
    const Vec3 b = a + dir * testutil::uniform(rng, 0.5, 2.0);

    const PoseSE3 view1;  // identity
    const PoseSE3 view2(so3_exp(Vec3(0.0, -0.35, 0.0)), Vec3(1.8, 0.0, 0.6));
    try {
      const ImageLineSegment s1 = project_segment(view1, K, a, b);
      const ImageLineSegment s2 = project_segment(view2, K, a, b);

      const PlueckerLine recovered = triangulate_two_view(
          segment_line(s1), projection_matrix(K, view1), segment_line(s2),
          projection_matrix(K, view2), &s1, &view1, &K);
      const PlueckerLine truth = pluecker_from_endpoints(a, b);

      CHECK(testutil::line_cosine(recovered, truth) >= 1.0 - 1e-10);
      CHECK(recovered.klein_residual() < 1e-10);

      // Reprojection into both source views matches the observed lines.
      for (const auto& [view, seg] :
           {std::pair{view1, s1}, std::pair{view2, s2}}) {
        const Vec3 l = project_line(K, transform_line(view, recovered));
        const Vec3 l_obs = segment_line(seg);
        CHECK(std::abs(l.normalized().dot(l_obs.normalized())) >= 1.0 - 1e-10);
      }

      // Endpoint recovery through trimming.
      const LineSegment3 trimmed = trim_endpoints(recovered, s1, view1, K);
      CHECK((trimmed.start - a).norm() < 1e-8);
      CHECK((trimmed.end - b).norm() < 1e-8);
      ++checked;
    } catch (const BehindCamera&) {
      continue;  // segment leaves the second view's frustum
    }
  }
  CHECK(checked > 200);
}

TEST_CASE("triangulation rejects lines in the epipolar plane") {
  const CameraIntrinsics K{500.0, 500.0, 320.0, 240.0};
  const PoseSE3 view1;
  const PoseSE3 view2(Mat3::Identity(), Vec3(-1.0, 0.0, 0.0));  // baseline +x

  // Segment inside the y = 0 plane spanned by both camera centers.
  const Vec3 a(0.3, 0.0, 2.0);
  const Vec3 b(0.9, 0.0, 2.5);
  const ImageLineSegment s1 = project_segment(view1, K, a, b);
  const ImageLineSegment s2 = project_segment(view2, K, a, b);

  CHECK_THROWS_AS(triangulate_two_view(segment_line(s1),
                                       projection_matrix(K, view1),
                                       segment_line(s2),
                                       projection_matrix(K, view2)),
                  NearEpipolarPlane);
}

TEST_CASE("perpendicular foot hand case") {
  const Vec3 foot = perpendicular_foot(Vec3(3.0, 4.0, 1.0), Vec3(0.0, 1.0, 0.0));
  CHECK((foot - Vec3(3.0, 0.0, 1.0)).norm() < 1e-15);
}

TEST_CASE("trim_endpoints maps incident endpoints to themselves") {
  std::mt19937_64 rng(29);
  const CameraIntrinsics K{500.0, 500.0, 320.0, 240.0};
  const PoseSE3 pose = PoseSE3::identity();
  const Vec3 a(-0.4, 0.2, 3.0);
  const Vec3 b(0.8, -0.3, 4.0);
  const PlueckerLine line = pluecker_from_endpoints(a, b);
  const ImageLineSegment seg = project_segment(pose, K, a, b);

  const LineSegment3 trimmed = trim_endpoints(line, seg, pose, K);
  CHECK((trimmed.start - a).norm() < 1e-9);
  CHECK((trimmed.end - b).norm() < 1e-9);

  // Perturbed endpoints come back as their perpendicular feet on the line.
  ImageLineSegment off = seg;
  off.s.v += 5.0;
  off.e.v -= 3.0;
  const LineSegment3 feet3d = trim_endpoints(line, off, pose, K);
  const Vec3 l = project_line(K, transform_line(pose, line));
  for (const auto& [pix, world] :
       {std::pair{off.s, feet3d.start}, std::pair{off.e, feet3d.end}}) {
    const Vec3 foot = perpendicular_foot(pix.homogeneous(), l);
    const PixelPoint reproj = project_point(pose, K, world);
    CHECK(std::abs(reproj.u - foot.x() / foot.z()) < 1e-6);
    CHECK(std::abs(reproj.v - foot.y() / foot.z()) < 1e-6);
  }
}

TEST_CASE("trim_endpoints flags endpoints behind the camera") {
  const CameraIntrinsics K{500.0, 500.0, 320.0, 240.0};
  const PoseSE3 pose;
  // Receding line: pixels beyond the vanishing point (u = 570) back-project
  // to negative depth.
  const Vec3 a(0.0, 0.0, 1.0);
  const Vec3 b(1.0, 0.0, 3.0);
  const PlueckerLine line = pluecker_from_endpoints(a, b);
  ImageLineSegment seg;
  seg.s = project_point(pose, K, a);
  seg.e = {820.0, 240.0};
  CHECK_THROWS_AS(trim_endpoints(line, seg, pose, K), BehindCamera);
}
