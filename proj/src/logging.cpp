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
#include "plp/logging.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace plp {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("PLP_LOG");
    if (env == nullptr) {
      return LogLevel::kError;
    }
    const std::string value(env);
    if (value == "off") return LogLevel::kOff;
    if (value == "error") return LogLevel::kError;
    if (value == "info") return LogLevel::kInfo;
    if (value == "debug") return LogLevel::kDebug;
    return LogLevel::kError;
  }();
  return level;
}

void log_message(LogLevel level, const std::string& message) {
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  const char* tag = level == LogLevel::kError   ? "error"
                    : level == LogLevel::kInfo  ? "info"
                                                : "debug";
  std::cerr << "[plp:" << tag << "] " << message << "\n";
}

}  // namespace plp
