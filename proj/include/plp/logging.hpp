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
#ifndef PLP_LOGGING_HPP
#define PLP_LOGGING_HPP

#include <sstream>
#include <string>

namespace plp {

enum class LogLevel { kOff = 0, kError = 1, kInfo = 2, kDebug = 3 };

// Level comes from the PLP_LOG environment variable (off|error|info|debug).
LogLevel log_level();
void log_message(LogLevel level, const std::string& message);

template <typename... Args>
void log_info(const Args&... args) {
  if (log_level() >= LogLevel::kInfo) {
    std::ostringstream os;
    (os << ... << args);
    log_message(LogLevel::kInfo, os.str());
  }
}

template <typename... Args>
void log_error(const Args&... args) {
  if (log_level() >= LogLevel::kError) {
    std::ostringstream os;
    (os << ... << args);
    log_message(LogLevel::kError, os.str());
  }
}

template <typename... Args>
void log_debug(const Args&... args) {
  if (log_level() >= LogLevel::kDebug) {
    std::ostringstream os;
    (os << ... << args);
    log_message(LogLevel::kDebug, os.str());
  }
}

}  // namespace plp

#endif  // PLP_LOGGING_HPP
