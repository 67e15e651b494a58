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
#ifndef PLP_JACOBIAN_CHECK_HPP
#define PLP_JACOBIAN_CHECK_HPP

#include <cstdint>

namespace plp {

struct JacobianCheckResult {
  int trials = 0;
  // max over trials of max|J - J_fd| / max(|J_fd|_inf, 1e-8), per block.
  double max_rel_error_point = 0.0;
  double max_rel_error_point_pose = 0.0;
  double max_rel_error_line = 0.0;
  double max_rel_error_line_pose = 0.0;

  double worst() const;
};

// Compares the analytic point/line reprojection Jacobians against central
// finite differences (step 1e-6) on random camera/landmark configurations.
JacobianCheckResult run_jacobian_check(int trials, uint64_t seed);

}  // namespace plp

#endif  // PLP_JACOBIAN_CHECK_HPP
