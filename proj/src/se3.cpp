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
#include "plp/se3.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace plp {

namespace {

constexpr double kDriftTol = 1e-12;
constexpr double kSmallAngle = 1e-8;

// V(omega) such that t = V * rho in exp([omega, rho]).
Mat3 so3_left_jacobian(const Vec3& omega) {
  const double theta2 = omega.squaredNorm();
  const Mat3 K = skew(omega);
  if (theta2 < kSmallAngle * kSmallAngle) {
    return Mat3::Identity() + 0.5 * K + (1.0 / 6.0) * K * K;
  }
  const double theta = std::sqrt(theta2);
  const double a = (1.0 - std::cos(theta)) / theta2;
  const double b = (theta - std::sin(theta)) / (theta2 * theta);
  return Mat3::Identity() + a * K + b * K * K;
}

Mat3 so3_left_jacobian_inverse(const Vec3& omega) {
  const double theta2 = omega.squaredNorm();
  const Mat3 K = skew(omega);
  if (theta2 < kSmallAngle * kSmallAngle) {
    return Mat3::Identity() - 0.5 * K + (1.0 / 12.0) * K * K;
  }
  const double theta = std::sqrt(theta2);
  // 1/theta^2 - (1 + cos)/(2 theta sin) is stable away from theta = 0.
  const double c = 1.0 / theta2 -
                   (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Mat3::Identity() - 0.5 * K + c * K * K;
}

}  // namespace

Mat3 orthonormalized(const Mat3& R) {
  Eigen::JacobiSVD<Mat3> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 out = svd.matrixU() * svd.matrixV().transpose();
  if (out.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    out = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return out;
}

PoseSE3::PoseSE3(const Mat3& R, const Vec3& t) : rotation(R), translation(t) {
  if (orthonormality_drift() > kDriftTol) {
    rotation = orthonormalized(rotation);
  }
}

double PoseSE3::orthonormality_drift() const {
  return (rotation.transpose() * rotation - Mat3::Identity())
      .cwiseAbs()
      .maxCoeff();
}

PoseSE3 PoseSE3::inverse() const {
  PoseSE3 out;
  out.rotation = rotation.transpose();
  out.translation = -out.rotation * translation;
  return out;
}

Mat3 so3_exp(const Vec3& omega) {
  const double theta2 = omega.squaredNorm();
  const Mat3 K = skew(omega);
  if (theta2 < kSmallAngle * kSmallAngle) {
    return Mat3::Identity() + K + 0.5 * K * K;
  }
  const double theta = std::sqrt(theta2);
  return Mat3::Identity() + (std::sin(theta) / theta) * K +
         ((1.0 - std::cos(theta)) / theta2) * K * K;
}

Vec3 so3_log(const Mat3& R) {
  Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

PoseSE3 se3_exp(const Vec6& delta) {
  const Vec3 omega = delta.head<3>();
  const Vec3 rho = delta.tail<3>();
  PoseSE3 out;
  out.rotation = so3_exp(omega);
  out.translation = so3_left_jacobian(omega) * rho;
  return out;
}

Vec6 se3_log(const PoseSE3& pose) {
  Vec6 delta;
  const Vec3 omega = so3_log(pose.rotation);
  delta.head<3>() = omega;
  delta.tail<3>() = so3_left_jacobian_inverse(omega) * pose.translation;
  return delta;
}

PoseSE3 se3_retract(const PoseSE3& pose, const Vec6& delta) {
  if (delta.isZero(0.0)) {
    return pose;
  }
  return compose(se3_exp(delta), pose);
}

PoseSE3 compose(const PoseSE3& a, const PoseSE3& b) {
  PoseSE3 out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  if (out.orthonormality_drift() > kDriftTol) {
    out.rotation = orthonormalized(out.rotation);
  }
  return out;
}

}  // namespace plp
