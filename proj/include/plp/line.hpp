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
#ifndef PLP_LINE_HPP
#define PLP_LINE_HPP

#include "plp/camera.hpp"
#include "plp/se3.hpp"
#include "plp/types.hpp"

namespace plp {

// Infinite 3D line in Pluecker coordinates (m, d): homogeneous, m.dot(d) = 0.
// m is the normal of the interpretation plane through the origin, d the
// direction, paired so that m = x0.cross(d) for any point x0 on the line.
struct PlueckerLine {
  Vec3 m = Vec3::Zero();
  Vec3 d = Vec3::UnitX();

  Vec6 vector6() const {
    Vec6 v;
    v << m, d;
    return v;
  }
  static PlueckerLine from_vector6(const Vec6& v) {
    PlueckerLine line;
    line.m = v.head<3>();
    line.d = v.tail<3>();
    return line;
  }

  // |m.d| / max(|m||d|, eps); zero on the Klein quadric.
  double klein_residual() const;

  // Scaled to unit 6-norm.
  PlueckerLine normalized() const;

  // Point on the line closest to the origin (requires |d| > 0).
  Vec3 closest_point_to_origin() const { return d.cross(m) / d.squaredNorm(); }
};

// Minimal 4-DOF line parameterization (U, W) in SO(3) x SO(2).
struct OrthonormalLine {
  Mat3 U = Mat3::Identity();
  Mat2 W = Mat2::Identity();
};

struct LineSegment3 {
  Vec3 start = Vec3::Zero();
  Vec3 end = Vec3::UnitX();

  double length() const { return (start - end).norm(); }
};

struct ImageLineSegment {
  PixelPoint s;
  PixelPoint e;
};

// m = x2.cross(x1), d = x1 - x2. Throws DegenerateLine when x1 == x2.
PlueckerLine pluecker_from_endpoints(const Vec3& x1, const Vec3& x2);

// Throws DegenerateLine when both m and d vanish.
OrthonormalLine to_orthonormal(const PlueckerLine& line);

// L = (w1 * u1, w2 * u2); unit 6-norm by construction.
PlueckerLine from_orthonormal(const OrthonormalLine& o);

// Right-multiplicative update U <- U R(delta.head<3>()), W <- W R(delta[3]).
OrthonormalLine update_orthonormal(const OrthonormalLine& o, const Vec4& delta);

// 6x6 action of an SE(3) pose on Pluecker coordinates:
// [[R, [t]x R], [0, R]].
Mat6 line_transform_matrix(const PoseSE3& pose);

PlueckerLine transform_line(const PoseSE3& pose, const PlueckerLine& line_w);

// l = K_L m_c. Throws DegenerateProjection when the line passes through the
// camera center (|m_c| <= 1e-12).
Vec3 project_line(const CameraIntrinsics& K, const PlueckerLine& line_c);

// Signed point-to-line distances of the segment endpoints, per the image-line
// incidence residual. Throws DegenerateProjection when l1^2 + l2^2 <= 1e-18.
Vec2 line_reprojection_error(const Vec3& l, const ImageLineSegment& seg);

// pi1 pi2^T - pi2 pi1^T, antisymmetric by construction.
Mat4 dual_pluecker_matrix(const Vec4& pi1, const Vec4& pi2);

// Intersects the two back-projected interpretation planes pi_i = P_i^T l_i via
// the dual Pluecker matrix. Throws NearEpipolarPlane when the planes are
// parallel to within 1e-6 rad. The sign of the result is chosen so that d
// points from the second observed endpoint towards the first, matching
// pluecker_from_endpoints of the observed segment where recoverable.
PlueckerLine triangulate_two_view(const Vec3& l1, const Mat34& P1,
                                  const Vec3& l2, const Mat34& P2,
                                  const ImageLineSegment* orient_seg = nullptr,
                                  const PoseSE3* orient_pose = nullptr,
                                  const CameraIntrinsics* orient_K = nullptr);

// Perpendicular foot of pixel x on image line l (homogeneous, w = 1).
Vec3 perpendicular_foot(const Vec3& x, const Vec3& l);

// Recovers finite 3D endpoints by intersecting the line with the
// back-projected perpendicular-foot planes of the observed 2D endpoints.
// Throws DegenerateProjection / BehindCamera.
LineSegment3 trim_endpoints(const PlueckerLine& line_w,
                            const ImageLineSegment& seg, const PoseSE3& pose,
                            const CameraIntrinsics& K);

}  // namespace plp

#endif  // PLP_LINE_HPP
