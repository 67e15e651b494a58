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
#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>

#include "plp/errors.hpp"
#include "plp/jacobian_check.hpp"
#include "plp/logging.hpp"
#include "plp/metrics.hpp"
#include "plp/pipeline.hpp"
#include "plp/scene.hpp"
#include "plp/serialize.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolverFailure = 2;
constexpr int kExitConfigError = 3;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string s(buf);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

int cmd_gen_scene(const std::string& config_path, uint64_t seed,
                  const std::string& out_path) {
  plp::SceneConfig config;
  if (!config_path.empty()) {
    const plp::Json j = plp::load_json_file(config_path);
    const plp::Json& scene_json = j.contains("scene") ? j.at("scene") : j;
    config = plp::experiment_config_from_json(
                 plp::Json{{"scene", scene_json}})
                 .scene;
  }
  const plp::SyntheticScene scene = plp::generate_scene(config, seed);
  plp::save_json_file(out_path, plp::scene_to_json(scene));
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_run(const std::string& config_path, bool has_seed, uint64_t seed,
            const std::string& out_dir, int threads, bool deterministic) {
  plp::ExperimentConfig config =
      plp::experiment_config_from_json(plp::load_json_file(config_path));
  if (has_seed) {
    config.seeds = {seed};
  }
  if (!out_dir.empty()) {
    config.output_dir = out_dir;
  }
  if (threads > 0) {
    config.threads = threads;
  }
  if (deterministic) {
    config.deterministic = true;
  }
  return plp::run_experiment(config, config.output_dir);
}

int cmd_eval(const std::string& est_path, const std::string& gt_path,
             const std::string& mode) {
  std::vector<plp::PoseSE3> est, gt;
  trajectory_from_json(plp::load_json_file(est_path), &est, nullptr);
  trajectory_from_json(plp::load_json_file(gt_path), &gt, nullptr);
  const plp::AlignMode align =
      mode == "se3" ? plp::AlignMode::kSE3 : plp::AlignMode::kSim3;
  const plp::TrajectoryMetrics metrics = plp::compute_ate(est, gt, align);
  // Sub-picometer values are alignment rounding noise, not trajectory error.
  const double ate = metrics.ate_rmse < 1e-12 ? 0.0 : metrics.ate_rmse;
  std::cout << format_double(ate) << "\n";
  return kExitOk;
}

int cmd_jacobian_check(int trials, uint64_t seed) {
  const plp::JacobianCheckResult result = plp::run_jacobian_check(trials, seed);
  std::cout << "trials: " << result.trials << "\n"
            << "point jacobian max rel error:      "
            << format_double(result.max_rel_error_point) << "\n"
            << "point pose jacobian max rel error: "
            << format_double(result.max_rel_error_point_pose) << "\n"
            << "line jacobian max rel error:       "
            << format_double(result.max_rel_error_line) << "\n"
            << "line pose jacobian max rel error:  "
            << format_double(result.max_rel_error_line_pose) << "\n"
            << "max rel error: " << format_double(result.worst()) << "\n";
  return result.worst() < 1e-5 ? kExitOk : kExitSolverFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"point-line-plane SLAM backend synthetic experiment runner"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-scene", "generate a synthetic scene JSON");
  std::string gen_config;
  uint64_t gen_seed = 0;
  std::string gen_out = "scene.json";
  gen->add_option("--config", gen_config, "scene or experiment config JSON");
  gen->add_option("--seed", gen_seed, "scene seed");
  gen->add_option("--out", gen_out, "output path");

  auto* run = app.add_subcommand("run", "run an experiment config");
  std::string run_config;
  uint64_t run_seed = 0;
  std::string run_out;
  int run_threads = 0;
  bool run_deterministic = false;
  run->add_option("--config", run_config, "experiment config JSON")->required();
  auto* seed_opt = run->add_option("--seed", run_seed, "override the seed list");
  run->add_option("--out", run_out, "output directory");
  run->add_option("--threads", run_threads, "worker threads");
  run->add_flag("--deterministic", run_deterministic,
                "force deterministic mode");

  auto* eval = app.add_subcommand("eval", "ATE RMSE between two trajectories");
  std::string eval_est, eval_gt, eval_mode = "sim3";
  eval->add_option("est", eval_est, "estimated trajectory JSON")->required();
  eval->add_option("gt", eval_gt, "ground-truth trajectory JSON")->required();
  eval->add_option("--mode", eval_mode, "alignment mode: sim3|se3")
      ->check(CLI::IsMember({"sim3", "se3"}));

  auto* jac = app.add_subcommand("jacobian-check",
                                 "finite-difference check of the analytic "
                                 "reprojection jacobians");
  int jac_trials = 1000;
  uint64_t jac_seed = 12345;
  jac->add_option("--trials", jac_trials, "number of random configurations");
  jac->add_option("--seed", jac_seed, "rng seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen_scene(gen_config, gen_seed, gen_out);
    }
    if (run->parsed()) {
      return cmd_run(run_config, seed_opt->count() > 0, run_seed, run_out,
                     run_threads, run_deterministic);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_est, eval_gt, eval_mode);
    }
    if (jac->parsed()) {
      return cmd_jacobian_check(jac_trials, jac_seed);
    }
  } catch (const plp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const plp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  }
  return kExitOk;
}
