/*
Copyright 2026 The pvg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// pvg: render-refine-repeat flythrough generation and its data tools.
//
//   pvg fly     generate a frame sequence from one RGB-D image
//   pvg align   fit scale/shift of a raw disparity map to sparse keypoints
//   pvg interp  insert in-between frames into a generated sequence
//   pvg metrics sliding-window Frechet distance and per-frame MSE
//   pvg prep    letterbox cropping and speed-normalizing subsampling
//
// Any subcommand accepts --config file.json: a flat object whose keys are
// long flag names. Its values are applied first, so flags on the command
// line win.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "pvg/error.hpp"

namespace {

using pvg::cli::kExitData;
using pvg::cli::kExitUsage;

void AddFly(CLI::App& app, pvg::cli::FlyOptions& o) {
  app.add_option("--rgb", o.rgb, "Input RGB PNG")->required()->check(CLI::ExistingFile);
  app.add_option("--disparity", o.disparity, "Input disparity PFM")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--mask", o.mask, "Optional validity mask PNG")->check(CLI::ExistingFile);
  auto* traj = app.add_option("--trajectory", o.trajectory, "Camera path (19-field text)")
                   ->check(CLI::ExistingFile);
  auto* autopilot = app.add_flag("--autopilot", o.autopilot, "Choose cameras online");
  traj->excludes(autopilot);
  app.add_option("--out", o.out, "Output directory")->required();
  app.add_option("--steps", o.steps, "Generation steps T (T + 1 frames)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--intrinsics", o.intrinsics, "Normalized fx fy cx cy (autopilot)")
      ->expected(4);
  app.add_option("--fov", o.fov_degrees, "Horizontal field of view in degrees (autopilot)");
  app.add_flag("--resize", o.resize, "Resample the input to --size");
  app.add_option("--size", o.size, "Working resolution H W")->expected(2)->capture_default_str();
  app.add_option("--refiner", o.refiner, "inpaint, passthrough or external")
      ->check(CLI::IsMember({"inpaint", "passthrough", "external"}))
      ->capture_default_str();
  app.add_option("--refiner-command", o.refiner_command,
                 "External refiner; the exchange directory is appended");
  app.add_option("--exchange-dir", o.exchange_dir, "Fixed exchange directory");
  app.add_flag("--lenient-refiner", o.lenient_refiner,
               "Allow the external refiner to alter valid pixels");
  app.add_option("--inpaint-iterations", o.inpaint_iterations)->capture_default_str();
  app.add_flag("--no-grounding", o.no_grounding, "Disable disparity grounding");
  app.add_option("--alpha", o.alpha, "Discontinuity threshold")->capture_default_str();
  app.add_option("--seed", o.seed, "Seed for the meander phase")->capture_default_str();
  app.add_option("--sky-threshold", o.sky_threshold)->capture_default_str();
  app.add_option("--near-threshold", o.near_threshold)->capture_default_str();
  app.add_option("--target-sky", o.target_sky)->capture_default_str();
  app.add_option("--near-limit", o.near_limit)->capture_default_str();
  app.add_option("--smoothing", o.smoothing)->capture_default_str();
  app.add_option("--step-distance", o.step_distance)->capture_default_str();
  app.add_flag("--meander", o.meander, "Add a sinusoidal yaw offset");
  app.add_option("--meander-amplitude", o.meander_amplitude, "Radians")->capture_default_str();
  app.add_option("--meander-period", o.meander_period, "Frames")->capture_default_str();
}

void AddAlign(CLI::App& app, pvg::cli::AlignOptions& o) {
  app.add_option("--disparity", o.disparity, "Raw disparity PFM")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--keypoints", o.keypoints, "JSON {\"points\": [[x, y, z], ...]}")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--intrinsics", o.intrinsics, "Normalized fx fy cx cy")
      ->required()
      ->expected(4);
  app.add_option("--out", o.out, "Output directory")->required();
}

void AddInterp(CLI::App& app, pvg::cli::InterpOptions& o) {
  app.add_option("--input", o.input, "Directory written by fly")
      ->required()
      ->check(CLI::ExistingDirectory);
  app.add_option("--trajectory", o.trajectory, "Defaults to <input>/trajectory_out.txt");
  app.add_option("--n", o.n, "In-between frames per gap")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--out", o.out, "Output directory")->required();
}

void AddMetrics(CLI::App& app, pvg::cli::MetricsOptions& o) {
  app.add_option("--embeddings", o.embeddings, "Per-frame embeddings")
      ->check(CLI::ExistingFile);
  app.add_option("--ref", o.ref, "Reference statistics JSON")->check(CLI::ExistingFile);
  app.add_option("--ref-embeddings", o.ref_embeddings, "Reference embeddings")
      ->check(CLI::ExistingFile);
  app.add_option("--window", o.window, "Window width w (even)")->capture_default_str();
  app.add_option("--t", o.t, "Window centers (default: every valid t)");
  app.add_option("--pred-dir", o.pred_dir, "Generated frames for MSE");
  app.add_option("--gt-dir", o.gt_dir, "Ground-truth frames for MSE");
  app.add_option("--out", o.out, "Output directory")->required();
}

void AddPrep(CLI::App& app, pvg::cli::PrepOptions& o) {
  app.add_option("--frames", o.frames, "Directory of PNG frames, sorted by name")
      ->required()
      ->check(CLI::ExistingDirectory);
  app.add_option("--trajectory", o.trajectory, "One pose per frame")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--first-disparity", o.first_disparity, "Enables scale normalization")
      ->check(CLI::ExistingFile);
  app.add_option("--speed-range", o.speed_range, "Target per-frame speed lo hi")
      ->required()
      ->expected(2);
  app.add_option("--drop-list", o.drop_list, "Frame ids to drop")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "Seed for the stride choice")->capture_default_str();
  app.add_option("--luma-threshold", o.luma_threshold)->capture_default_str();
  app.add_option("--min-band", o.min_band)->capture_default_str();
  app.add_option("--out", o.out, "Output directory")->required();
}

// Turns a flat JSON object into flag tokens.
std::vector<std::string> ConfigTokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw CLI::ValidationError("--config", e.what());
  }
  if (!j.is_object()) throw CLI::ValidationError("--config", "expected a JSON object");
  auto scalar = [](const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  std::vector<std::string> tokens;
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      tokens.push_back(flag + "=" + (value.get<bool>() ? "true" : "false"));
    } else if (value.is_array()) {
      tokens.push_back(flag);
      for (const auto& v : value) tokens.push_back(scalar(v));
    } else {
      tokens.push_back(flag);
      tokens.push_back(scalar(value));
    }
  }
  return tokens;
}

// Splices config-file tokens in right after the subcommand name.
std::vector<std::string> ExpandConfig(int argc, char** argv,
                                      const std::vector<std::string>& subcommands) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (config.empty()) return args;
  auto sub = std::find_first_of(args.begin(), args.end(), subcommands.begin(), subcommands.end());
  if (sub == args.end()) throw CLI::ValidationError("--config", "no subcommand given");
  const std::vector<std::string> tokens = ConfigTokens(config);
  args.insert(sub + 1, tokens.begin(), tokens.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perpetual view generation from a single image", "pvg"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string unused_config;
  app.add_option("--config", unused_config, "JSON file of flag values (flags override it)");

  pvg::cli::FlyOptions fly;
  pvg::cli::AlignOptions align;
  pvg::cli::InterpOptions interp;
  pvg::cli::MetricsOptions metrics;
  pvg::cli::PrepOptions prep;
  auto* fly_cmd = app.add_subcommand("fly", "Generate a flythrough from one RGB-D frame");
  auto* align_cmd = app.add_subcommand("align", "Align raw disparity to sparse keypoints");
  auto* interp_cmd = app.add_subcommand("interp", "Insert in-between frames");
  auto* metrics_cmd = app.add_subcommand("metrics", "Sliding-window FID and MSE");
  auto* prep_cmd = app.add_subcommand("prep", "Crop letterboxes and subsample to a speed");
  AddFly(*fly_cmd, fly);
  AddAlign(*align_cmd, align);
  AddInterp(*interp_cmd, interp);
  AddMetrics(*metrics_cmd, metrics);
  AddPrep(*prep_cmd, prep);

  try {
    std::vector<std::string> args =
        ExpandConfig(argc, argv, {"fly", "align", "interp", "metrics", "prep"});
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*fly_cmd) return pvg::cli::RunFly(fly);
    if (*align_cmd) return pvg::cli::RunAlign(align);
    if (*interp_cmd) return pvg::cli::RunInterp(interp);
    if (*metrics_cmd) return pvg::cli::RunMetrics(metrics);
    return pvg::cli::RunPrep(prep);
  } catch (const pvg::cli::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pvg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
