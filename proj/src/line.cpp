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
#include "plp/line.hpp"

#include <Eigen/QR>
#include <cmath>

#include "plp/errors.hpp"

namespace plp {

namespace {

constexpr double kDegenerateEndpoints = 1e-12;
constexpr double kMinMomentNorm = 1e-12;
constexpr double kMinImageLineNorm2 = 1e-18;
constexpr double kMinPlaneAngle = 1e-6;
constexpr double kOrthoDriftTol = 1e-12;

Mat2 rot2(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 R;
  R << c, -s, s, c;
  return R;
}

// Point-form Pluecker matrix; L * pi is the intersection with plane pi.
Mat4 pluecker_point_matrix(const PlueckerLine& line) {
  Mat4 L = Mat4::Zero();
  L.topLeftCorner<3, 3>() = skew(line.m);
  L.topRightCorner<3, 1>() = line.d;
  L.bottomLeftCorner<1, 3>() = -line.d.transpose();
  return L;
}

}  // namespace

double PlueckerLine::klein_residual() const {
  const double scale = m.norm() * d.norm();
  return std::abs(m.dot(d)) / std::max(scale, 1e-300);
}

PlueckerLine PlueckerLine::normalized() const {
  const double n = vector6().norm();
  PlueckerLine out = *this;
  if (n > 0.0) {
    out.m /= n;
    out.d /= n;
  }
  return out;
}

PlueckerLine pluecker_from_endpoints(const Vec3& x1, const Vec3& x2) {
  if ((x1 - x2).norm() < kDegenerateEndpoints) {
    throw DegenerateLine("pluecker_from_endpoints: coincident endpoints");
  }
  PlueckerLine line;
  line.m = x2.cross(x1);
  line.d = x1 - x2;
  return line;
}

OrthonormalLine to_orthonormal(const PlueckerLine& line) {
  const double nm = line.m.norm();
  const double nd = line.d.norm();
  const double scale = std::sqrt(nm * nm + nd * nd);
  if (scale < 1e-300) {
    throw DegenerateLine("to_orthonormal: zero line");
  }

  OrthonormalLine o;
  o.W << nm / scale, -nd / scale, nd / scale, nm / scale;

  if (nm > 1e-12 * scale && nd > 1e-12 * scale) {
    const Vec3 u1 = line.m / nm;
    // Gram-Schmidt keeps U in SO(3) even when the Klein residual is at the
    // 1e-9 invariant boundary.
    Vec3 u2 = line.d - line.d.dot(u1) * u1;
    const double u2n = u2.norm();
    if (u2n < 1e-12 * nd) {
      throw DegenerateLine("to_orthonormal: moment parallel to direction");
    }
    u2 /= u2n;
    o.U.col(0) = u1;
    o.U.col(1) = u2;
    o.U.col(2) = u1.cross(u2);
    return o;
  }

  // One of the two vectors vanishes (line through the origin, or a pure
  // moment). Column-pivoted QR of [m | d] supplies the orthogonal complement.
  Eigen::Matrix<double, 3, 2> A;
  A.col(0) = line.m;
  A.col(1) = line.d;
  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 3, 2>> qr(A);
  qr.setThreshold(1e-12);
  if (qr.rank() == 0) {
    throw DegenerateLine("to_orthonormal: rank-0 line");
  }
  const Mat3 Q = qr.householderQ();
  Vec3 axis;        // the well-defined column
  Vec3 complement;  // unit vector orthogonal to it
  if (nd >= nm) {
    axis = line.d / nd;
  } else {
    axis = line.m / nm;
  }
  complement = Q.col(1) - Q.col(1).dot(axis) * axis;
  if (complement.norm() < 0.5) {
    complement = Q.col(2) - Q.col(2).dot(axis) * axis;
  }
  complement.normalize();
  if (nd >= nm) {
    o.U.col(0) = complement;
    o.U.col(1) = axis;
  } else {
    o.U.col(0) = axis;
    o.U.col(1) = complement;
  }
  o.U.col(2) = o.U.col(0).cross(o.U.col(1));
  return o;
}

PlueckerLine from_orthonormal(const OrthonormalLine& o) {
  PlueckerLine line;
  line.m = o.W(0, 0) * o.U.col(0);
  line.d = o.W(1, 0) * o.U.col(1);
  return line;
}

OrthonormalLine update_orthonormal(const OrthonormalLine& o, const Vec4& delta) {
  if (delta.isZero(0.0)) {
    return o;
  }
  OrthonormalLine out;
  out.U = o.U * so3_exp(delta.head<3>());
  out.W = o.W * rot2(delta[3]);
  if ((out.U.transpose() * out.U - Mat3::Identity()).cwiseAbs().maxCoeff() >
      kOrthoDriftTol) {
    out.U = orthonormalized(out.U);
  }
  if ((out.W.transpose() * out.W - Mat2::Identity()).cwiseAbs().maxCoeff() >
      kOrthoDriftTol) {
    out.W = rot2(std::atan2(out.W(1, 0), out.W(0, 0)));
  }
  return out;
}

Mat6 line_transform_matrix(const PoseSE3& pose) {
  Mat6 T = Mat6::Zero();
  T.topLeftCorner<3, 3>() = pose.rotation;
  T.topRightCorner<3, 3>() = skew(pose.translation) * pose.rotation;
  T.bottomRightCorner<3, 3>() = pose.rotation;
  return T;
}

PlueckerLine transform_line(const PoseSE3& pose, const PlueckerLine& line_w) {
  PlueckerLine out;
  out.m = pose.rotation * line_w.m +
          pose.translation.cross(pose.rotation * line_w.d);
  out.d = pose.rotation * line_w.d;
  return out;
}

Vec3 project_line(const CameraIntrinsics& K, const PlueckerLine& line_c) {
  if (line_c.m.norm() <= kMinMomentNorm) {
    throw DegenerateProjection("project_line: line through camera center");
  }
  return line_intrinsics(K) * line_c.m;
}

Vec2 line_reprojection_error(const Vec3& l, const ImageLineSegment& seg) {
  const double n2 = l[0] * l[0] + l[1] * l[1];
  if (n2 <= kMinImageLineNorm2) {
    throw DegenerateProjection("line_reprojection_error: vanishing image line");
  }
  const double n = std::sqrt(n2);
  return Vec2(seg.s.homogeneous().dot(l) / n, seg.e.homogeneous().dot(l) / n);
}

Mat4 dual_pluecker_matrix(const Vec4& pi1, const Vec4& pi2) {
  return pi1 * pi2.transpose() - pi2 * pi1.transpose();
}

PlueckerLine triangulate_two_view(const Vec3& l1, const Mat34& P1,
                                  const Vec3& l2, const Mat34& P2,
                                  const ImageLineSegment* orient_seg,
                                  const PoseSE3* orient_pose,
                                  const CameraIntrinsics* orient_K) {
  Vec4 pi1 = P1.transpose() * l1;
  Vec4 pi2 = P2.transpose() * l2;
  const double n1 = pi1.head<3>().norm();
  const double n2 = pi2.head<3>().norm();
  if (n1 < 1e-300 || n2 < 1e-300) {
    throw DegenerateProjection("triangulate_two_view: zero interpretation plane");
  }
  pi1 /= n1;
  pi2 /= n2;

  const Vec3 cross = pi1.head<3>().cross(pi2.head<3>());
  const double angle = std::atan2(cross.norm(), std::abs(pi1.head<3>().dot(pi2.head<3>())));
  if (angle <= kMinPlaneAngle) {
    throw NearEpipolarPlane("triangulate_two_view: interpretation planes parallel");
  }

  const Mat4 Lstar = dual_pluecker_matrix(pi1, pi2);
  PlueckerLine line;
  line.d = unskew(Lstar.topLeftCorner<3, 3>());
  line.m = Lstar.topRightCorner<3, 1>();
  line = line.normalized();

  bool oriented = false;
  if (orient_seg != nullptr && orient_pose != nullptr && orient_K != nullptr) {
    try {
      const LineSegment3 seg3 =
          trim_endpoints(line, *orient_seg, *orient_pose, *orient_K);
      if (line.d.dot(seg3.start - seg3.end) < 0.0) {
        line.m = -line.m;
        line.d = -line.d;
      }
      oriented = true;
    } catch (const Error&) {
      oriented = false;
    }
  }
  if (!oriented) {
    int idx = 0;
    line.d.cwiseAbs().maxCoeff(&idx);
    if (line.d[idx] < 0.0) {
      line.m = -line.m;
      line.d = -line.d;
    }
  }
  return line;
}

Vec3 perpendicular_foot(const Vec3& x, const Vec3& l) {
  const double n2 = l[0] * l[0] + l[1] * l[1];
  if (n2 <= kMinImageLineNorm2) {
    throw DegenerateProjection("perpendicular_foot: vanishing image line");
  }
  Vec3 foot = x / x[2];
  const double offset = foot.dot(l) / n2;
  foot[0] -= offset * l[0];
  foot[1] -= offset * l[1];
  return foot;
}

LineSegment3 trim_endpoints(const PlueckerLine& line_w,
                            const ImageLineSegment& seg, const PoseSE3& pose,
                            const CameraIntrinsics& K) {
  const PlueckerLine line_c = transform_line(pose, line_w);
  const Vec3 l = project_line(K, line_c);
  const Mat34 P = projection_matrix(K, pose);
  const Mat4 Lmat = pluecker_point_matrix(line_w);

  auto intersect = [&](const PixelPoint& px) -> Vec3 {
    const Vec3 foot = perpendicular_foot(px.homogeneous(), l);
    // Image line through the foot, perpendicular to l.
    const Vec3 lperp = foot.cross(Vec3(l[0], l[1], 0.0));
    const Vec4 pi = P.transpose() * lperp;
    const Vec4 Xh = Lmat * pi;
    const double w = Xh[3];
    if (std::abs(w) <= 1e-15 * std::max(1.0, Xh.head<3>().norm())) {
      throw DegenerateProjection("trim_endpoints: line parallel to foot plane");
    }
    const Vec3 X = Xh.head<3>() / w;
    if (pose.transform(X).z() <= 0.0) {
      throw BehindCamera("trim_endpoints: endpoint behind camera");
    }
    return X;
  };

  LineSegment3 out;
  out.start = intersect(seg.s);
  out.end = intersect(seg.e);
  return out;
}

}  // namespace plp
