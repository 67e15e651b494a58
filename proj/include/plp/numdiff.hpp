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
#ifndef PLP_NUMDIFF_HPP
#define PLP_NUMDIFF_HPP

#include "plp/types.hpp"

namespace plp {

// Central-difference Jacobian of a black-box function. eval(k, h) must return
// the function value with parameter k perturbed by h from the expansion point.
template <typename Eval>
MatX central_difference(int rows, int cols, Eval eval, double step) {
  MatX J(rows, cols);
  for (int k = 0; k < cols; ++k) {
    const VecX plus = eval(k, step);
    const VecX minus = eval(k, -step);
    J.col(k) = (plus - minus) / (2.0 * step);
  }
  return J;
}

// max |A - B| / max(|B|_max, floor).
inline double relative_matrix_error(const MatX& analytic, const MatX& numeric,
                                    double floor = 1e-8) {
  const double scale = std::max(numeric.cwiseAbs().maxCoeff(), floor);
  return (analytic - numeric).cwiseAbs().maxCoeff() / scale;
}

}  // namespace plp

#endif  // PLP_NUMDIFF_HPP
