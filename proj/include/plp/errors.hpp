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
#ifndef PLP_ERRORS_HPP
#define PLP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace plp {

// Base class for every recoverable geometry/solver failure.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define PLP_DEFINE_ERROR(NAME)                                      \
  class NAME : public Error {                                       \
   public:                                                          \
    explicit NAME(const std::string& what = #NAME) : Error(what) {} \
  }

PLP_DEFINE_ERROR(BehindCamera);
PLP_DEFINE_ERROR(DegenerateLine);
PLP_DEFINE_ERROR(DegenerateProjection);
PLP_DEFINE_ERROR(NearEpipolarPlane);
PLP_DEFINE_ERROR(DegenerateConfiguration);
PLP_DEFINE_ERROR(NoModelFound);
PLP_DEFINE_ERROR(InsufficientObservations);
PLP_DEFINE_ERROR(DivergedSolve);
PLP_DEFINE_ERROR(GaugeUnderconstrained);
PLP_DEFINE_ERROR(Underconstrained);
PLP_DEFINE_ERROR(MissingReference);
PLP_DEFINE_ERROR(InfeasibleConfig);
PLP_DEFINE_ERROR(DegenerateTrajectory);
PLP_DEFINE_ERROR(LengthMismatch);
PLP_DEFINE_ERROR(ConfigError);

#undef PLP_DEFINE_ERROR

}  // namespace plp

#endif  // PLP_ERRORS_HPP
