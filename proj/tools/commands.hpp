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

#ifndef PVG_TOOLS_COMMANDS_HPP_
#define PVG_TOOLS_COMMANDS_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace pvg::cli {

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPartial = 3;
inline constexpr int kExitData = 4;

// A flag combination the parser cannot reject on its own.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlyOptions {
  std::string rgb;
  std::string disparity;
  std::string mask;
  std::string trajectory;
  bool autopilot = false;
  std::string out;
  int steps = 0;
  // Normalized fx fy cx cy, as in trajectory files.
  std::vector<double> intrinsics;
  double fov_degrees = 0.0;
  bool resize = false;
  std::vector<int> size = {160, 256};
  std::string refiner = "inpaint";
  std::string refiner_command;
  std::string exchange_dir;
  bool lenient_refiner = false;
  int inpaint_iterations = 2000;
  bool no_grounding = false;
  double alpha = 0.3;
  unsigned seed = 0;
  double sky_threshold = 0.05;
  double near_threshold = 0.5;
  double target_sky = 0.30;
  double near_limit = 0.20;
  double smoothing = 0.05;
  double step_distance = 0.1;
  bool meander = false;
  double meander_amplitude = 0.3;
  double meander_period = 200.0;
};

struct AlignOptions {
  std::string disparity;
  std::string keypoints;
  std::vector<double> intrinsics;
  std::string out;
};

struct InterpOptions {
  std::string input;
  std::string trajectory;
  int n = 4;
  std::string out;
};

struct MetricsOptions {
  std::string embeddings;
  std::string ref;
  std::string ref_embeddings;
  int window = 50;
  std::vector<int> t;
  std::string pred_dir;
  std::string gt_dir;
  std::string out;
};

struct PrepOptions {
  std::string frames;
  std::string trajectory;
  std::string first_disparity;
  std::vector<double> speed_range;
  std::string drop_list;
  unsigned seed = 0;
  double luma_threshold = 16.0 / 255.0;
  int min_band = 4;
  std::string out;
};

int RunFly(const FlyOptions& o);
int RunAlign(const AlignOptions& o);
int RunInterp(const InterpOptions& o);
int RunMetrics(const MetricsOptions& o);
int RunPrep(const PrepOptions& o);

}  // namespace pvg::cli

#endif  // PVG_TOOLS_COMMANDS_HPP_
