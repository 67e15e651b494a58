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
#include "plp/se3.hpp"
#include "test_util.hpp"

using namespace plp;

namespace {

Mat3 rot_z(double angle) {
  return so3_exp(Vec3(0.0, 0.0, angle));
}

}  // namespace

TEST_CASE("compose identity and inverse") {
  std::mt19937_64 rng(7);
  const PoseSE3 p = testutil::random_pose(rng);

  const PoseSE3 left = compose(PoseSE3::identity(), p);
  CHECK((left.rotation - p.rotation).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((left.translation - p.translation).norm() < 1e-15);

  const PoseSE3 round = compose(p, p.inverse());
  CHECK((round.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(round.translation.norm() < 1e-12);
}

TEST_CASE("compose of two z-rotations") {
  PoseSE3 quarter(rot_z(M_PI / 2.0), Vec3::Zero());
  const PoseSE3 half = compose(quarter, quarter);
  CHECK((half.rotation - rot_z(M_PI)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("se3_retract zero increment is exact") {
  std::mt19937_64 rng(8);
  const PoseSE3 p = testutil::random_pose(rng);
  const PoseSE3 q = se3_retract(p, Vec6::Zero());
  CHECK(q.rotation == p.rotation);
  CHECK(q.translation == p.translation);
}

TEST_CASE("se3_retract of pure translation") {
  Vec6 delta;
  delta << 0.0, 0.0, 0.0, 1.0, 2.0, 3.0;
  const PoseSE3 p = se3_retract(PoseSE3::identity(), delta);
  CHECK((p.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((p.translation - Vec3(1.0, 2.0, 3.0)).norm() < 1e-15);
}

TEST_CASE("se3 exp/log round trip and Taylor remainder") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const PoseSE3 p = testutil::random_pose(rng);
    const PoseSE3 q = se3_exp(se3_log(p));
    CHECK((q.rotation - p.rotation).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((q.translation - p.translation).norm() < 1e-10);
  }

  // log(retract(p, h*delta)) deviates from its first-order model by O(h^2).
  const PoseSE3 p = testutil::random_pose(rng);
  Vec6 delta;
  delta << 0.03, -0.02, 0.05, 0.1, -0.2, 0.15;
  const Vec6 x0 = se3_log(p);
  const double h0 = 1e-4;
  const Vec6 dir = (se3_log(se3_retract(p, h0 * delta)) -
                    se3_log(se3_retract(p, -h0 * delta))) /
                   (2.0 * h0);
  for (const double h : {1e-2, 5e-3, 2.5e-3}) {
    const Vec6 taylor_err =
        se3_log(se3_retract(p, h * delta)) - x0 - h * dir;
    CHECK(taylor_err.norm() < 10.0 * h * h * delta.squaredNorm() + 1e-12);
  }

  // retract followed by un-composing recovers the exact increment.
  const Vec6 rec = se3_log(compose(se3_retract(p, delta), p.inverse()));
  CHECK((rec - delta).norm() < 1e-12);
}

TEST_CASE("pose invariants under a million compose/retract operations") {
  std::mt19937_64 rng(10);
  PoseSE3 p;
  std::normal_distribution<double> gauss(0.0, 0.1);
  for (int i = 0; i < 1000000; ++i) {
    if (i % 2 == 0) {
      Vec6 delta;
      for (int k = 0; k < 6; ++k) {
        delta[k] = gauss(rng);
      }
      p = se3_retract(p, delta);
    } else {
      p = compose(p, PoseSE3(rot_z(0.01), Vec3(0.001, 0.0, 0.0)));
    }
  }
  CHECK(p.orthonormality_drift() < 1e-9);
  CHECK(std::abs(p.rotation.determinant() - 1.0) < 1e-9);
}

TEST_CASE("project_point pinhole examples") {
  const CameraIntrinsics K{500.0, 500.0, 320.0, 240.0};
  const PoseSE3 eye;

  const PixelPoint on_axis = project_point(eye, K, Vec3(0.0, 0.0, 2.0));
  CHECK(on_axis.u == doctest::Approx(320.0).epsilon(1e-12));
  CHECK(on_axis.v == doctest::Approx(240.0).epsilon(1e-12));

  const PixelPoint off_axis = project_point(eye, K, Vec3(1.0, 0.0, 2.0));
  CHECK(off_axis.u == doctest::Approx(570.0).epsilon(1e-12));
  CHECK(off_axis.v == doctest::Approx(240.0).epsilon(1e-12));

  CHECK_THROWS_AS(project_point(eye, K, Vec3(0.0, 0.0, -1.0)), BehindCamera);
}

TEST_CASE("projection through a transform is exact on clean geometry") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const CameraIntrinsics K = testutil::random_intrinsics(rng);
    const PoseSE3 pose = testutil::random_pose(rng);
    const Vec3 x_cam(testutil::uniform(rng, -1.0, 1.0),
                     testutil::uniform(rng, -1.0, 1.0),
                     testutil::uniform(rng, 1.0, 8.0));
    const Vec3 x_world = pose.inverse().transform(x_cam);
    const PixelPoint px = project_point(pose, K, x_world);
    const double u = K.fx * x_cam.x() / x_cam.z() + K.cx;
    const double v = K.fy * x_cam.y() / x_cam.z() + K.cy;
    CHECK(std::abs(px.u - u) < 1e-9);
    CHECK(std::abs(px.v - v) < 1e-9);
  }
}

TEST_CASE("line intrinsics matrix") {
  const Mat3 KL_unit = line_intrinsics({1.0, 1.0, 0.0, 0.0});
  CHECK((KL_unit - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-15);

  const Mat3 KL = line_intrinsics({500.0, 500.0, 320.0, 240.0});
  Mat3 expected;
  expected << 500.0, 0.0, 0.0,
              0.0, 500.0, 0.0,
              -160000.0, -120000.0, 250000.0;
  CHECK((KL - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("projected endpoints are incident with the projected line") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const CameraIntrinsics K = testutil::random_intrinsics(rng);
    // Camera-frame segment in front of the camera, line not through center.
    Vec3 a, b;
    do {
      a = Vec3(testutil::uniform(rng, -1.5, 1.5),
               testutil::uniform(rng, -1.5, 1.5),
               testutil::uniform(rng, 1.0, 8.0));
      b = Vec3(testutil::uniform(rng, -1.5, 1.5),
               testutil::uniform(rng, -1.5, 1.5),
               testutil::uniform(rng, 1.0, 8.0));
    } while ((a - b).norm() < 0.2 || a.cross(b).norm() < 1e-2);

    const PlueckerLine line_c = pluecker_from_endpoints(a, b);
    const Vec3 l = project_line(K, line_c);
    const double norm12 = std::hypot(l[0], l[1]);
    REQUIRE(norm12 > 0.0);

    for (const Vec3& x : {a, b}) {
      const PixelPoint px = project_point(PoseSE3::identity(), K, x);
      CHECK(std::abs(px.homogeneous().dot(l)) / norm12 < 1e-6);
    }
  }
}
