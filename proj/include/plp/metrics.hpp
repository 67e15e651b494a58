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
#ifndef PLP_METRICS_HPP
#define PLP_METRICS_HPP

#include <vector>

#include "plp/se3.hpp"
#include "plp/sim3.hpp"
#include "plp/types.hpp"

namespace plp {

enum class AlignMode { kSE3, kSim3 };

struct TrajectoryMetrics {
  double ate_rmse = 0.0;
  std::vector<double> ape;  // per frame, after alignment
  Sim3Transform alignment;  // applied to the estimate
  double mean_ape() const;
};

// Least-squares similarity (or rigid) alignment S minimizing
// sum |dst_i - S(src_i)|^2. Needs >= 3 non-collinear points;
// throws DegenerateTrajectory otherwise.
Sim3Transform umeyama_alignment(const std::vector<Vec3>& src,
                                const std::vector<Vec3>& dst, bool with_scale);

// ATE over timestamp-matched trajectories (positions compared after
// alignment). Throws LengthMismatch when sizes differ.
TrajectoryMetrics compute_ate(const std::vector<PoseSE3>& est,
                              const std::vector<PoseSE3>& gt, AlignMode mode);

TrajectoryMetrics compute_ate_positions(const std::vector<Vec3>& est,
                                        const std::vector<Vec3>& gt,
                                        AlignMode mode);

}  // namespace plp

#endif  // PLP_METRICS_HPP
