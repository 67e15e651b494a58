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
#include "plp/sim3.hpp"

#include <cmath>

namespace plp {

namespace {

// Scalar integrals int_0^1 u^k exp(u sigma) du used by the Sim(3) closed-form
// translation factor, with series fallbacks near sigma = 0.
double int_u1(double sigma) {
  if (std::abs(sigma) < 1e-4) {
    return 0.5 + sigma / 3.0 + sigma * sigma / 8.0 +
           sigma * sigma * sigma / 30.0;
  }
  return (std::exp(sigma) * (sigma - 1.0) + 1.0) / (sigma * sigma);
}

double int_u2_half(double sigma) {
  if (std::abs(sigma) < 1e-4) {
    return 1.0 / 6.0 + sigma / 8.0 + sigma * sigma / 20.0 +
           sigma * sigma * sigma / 72.0;
  }
  return (std::exp(sigma) * (sigma * sigma - 2.0 * sigma + 2.0) - 2.0) /
         (2.0 * sigma * sigma * sigma);
}

double int_u3(double sigma) {
  if (std::abs(sigma) < 1e-2) {
    return 0.25 + sigma / 5.0 + sigma * sigma / 12.0;
  }
  const double s3 = sigma * sigma * sigma;
  return (std::exp(sigma) * (s3 - 3.0 * sigma * sigma + 6.0 * sigma - 6.0) +
          6.0) /
         (s3 * sigma);
}

double int_u4(double sigma) {
  if (std::abs(sigma) < 1e-2) {
    return 0.2 + sigma / 6.0 + sigma * sigma / 14.0;
  }
  const double s4 = sigma * sigma * sigma * sigma;
  return (std::exp(sigma) * (s4 - 4.0 * sigma * sigma * sigma +
                             12.0 * sigma * sigma - 24.0 * sigma + 24.0) -
          24.0) /
         (s4 * sigma);
}

// W(omega, sigma) = int_0^1 exp(u sigma) R(u omega) du; t = W nu.
Mat3 sim3_translation_factor(const Vec3& omega, double sigma) {
  const double theta = omega.norm();
  const Mat3 K = skew(omega);
  const double C = sigma == 0.0 ? 1.0 : std::expm1(sigma) / sigma;

  double A, B;
  if (theta < 1e-4) {
    // theta-series with sigma-exact coefficients; avoids the (C - b)/theta^2
    // cancellation.
    const double t2 = theta * theta;
    A = int_u1(sigma) - t2 / 6.0 * int_u3(sigma);
    B = int_u2_half(sigma) - t2 / 24.0 * int_u4(sigma);
  } else {
    const double denom = sigma * sigma + theta * theta;
    const double es = std::exp(sigma);
    const double a =
        (es * (sigma * std::sin(theta) - theta * std::cos(theta)) + theta) /
        denom;
    const double b =
        (es * (sigma * std::cos(theta) + theta * std::sin(theta)) - sigma) /
        denom;
    A = a / theta;
    B = (C - b) / (theta * theta);
  }
  return C * Mat3::Identity() + A * K + B * K * K;
}

}  // namespace

Sim3Transform Sim3Transform::inverse() const {
  Sim3Transform out;
  out.s = 1.0 / s;
  out.R = R.transpose();
  out.t = -(out.s) * (out.R * t);
  return out;
}

Vec3 sim3_apply_point(const Sim3Transform& S, const Vec3& x) {
  return S.apply(x);
}

Sim3Transform sim3_compose(const Sim3Transform& a, const Sim3Transform& b) {
  Sim3Transform out;
  out.s = a.s * b.s;
  out.R = a.R * b.R;
  out.t = a.s * (a.R * b.t) + a.t;
  if ((out.R.transpose() * out.R - Mat3::Identity()).cwiseAbs().maxCoeff() >
      1e-12) {
    out.R = orthonormalized(out.R);
  }
  return out;
}

Mat6 sim3_line_matrix(const Sim3Transform& S) {
  Mat6 M = Mat6::Zero();
  M.topLeftCorner<3, 3>() = S.s * S.R;
  M.topRightCorner<3, 3>() = skew(S.t) * S.R;
  M.bottomRightCorner<3, 3>() = S.R;
  return M;
}

Sim3Transform sim3_exp(const Vec7& delta) {
  const Vec3 omega = delta.head<3>();
  const Vec3 nu = delta.segment<3>(3);
  const double sigma = delta[6];
  Sim3Transform out;
  out.R = so3_exp(omega);
  out.s = std::exp(sigma);
  out.t = sim3_translation_factor(omega, sigma) * nu;
  return out;
}

Vec7 sim3_log(const Sim3Transform& S) {
  Vec7 delta;
  const Vec3 omega = so3_log(S.R);
  const double sigma = std::log(S.s);
  delta.head<3>() = omega;
  delta[6] = sigma;
  delta.segment<3>(3) =
      sim3_translation_factor(omega, sigma).lu().solve(S.t);
  return delta;
}

Sim3Transform sim3_from_se3(const PoseSE3& pose, double scale) {
  Sim3Transform out;
  out.s = scale;
  out.R = pose.rotation;
  out.t = pose.translation;
  return out;
}

PoseSE3 se3_from_sim3(const Sim3Transform& S) {
  return PoseSE3(S.R, S.t / S.s);
}

}  // namespace plp
