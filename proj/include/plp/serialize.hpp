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
#ifndef PLP_SERIALIZE_HPP
#define PLP_SERIALIZE_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "plp/pipeline.hpp"
#include "plp/scene.hpp"

namespace plp {

using Json = nlohmann::json;

// Throws ConfigError on missing files or malformed JSON.
Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& value);

Json scene_to_json(const SyntheticScene& scene);
SyntheticScene scene_from_json(const Json& j);

Json trajectory_to_json(const std::vector<PoseSE3>& poses,
                        const std::vector<double>& timestamps);
void trajectory_from_json(const Json& j, std::vector<PoseSE3>* poses,
                          std::vector<double>* timestamps);

Json experiment_config_to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const Json& j);

Json solver_report_to_json(const SolverReport& report);
Json run_result_to_json(const RunResult& result);

// Fixed column order:
// run_id,seed,config_hash,ate_rmse_m,mean_ape_m,rejected_outliers
std::string metrics_csv(const std::vector<RunResult>& rows);

}  // namespace plp

#endif  // PLP_SERIALIZE_HPP
