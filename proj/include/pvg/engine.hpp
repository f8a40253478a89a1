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

#ifndef PVG_ENGINE_HPP_
#define PVG_ENGINE_HPP_

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pvg/alignment.hpp"
#include "pvg/autopilot.hpp"
#include "pvg/error.hpp"
#include "pvg/frame.hpp"
#include "pvg/geometry.hpp"
#include "pvg/image.hpp"
#include "pvg/refinement.hpp"
#include "pvg/renderer.hpp"

namespace pvg {

struct EngineConfig {
  bool grounding_enabled = true;
  RendererConfig renderer;
  std::shared_ptr<const Refiner> refiner = std::make_shared<InpaintRefiner>();
  // Number of generation steps T; a run yields T + 1 frames.
  int steps = 0;
  // Round each new frame to file precision (8-bit rgb, float32 disparity) so
  // that a run resumed from saved frames continues bit-identically.
  bool quantize_state = true;

  void Validate() const {
    if (steps < 0) throw Error(Errc::kInvalidArgument, "steps must be >= 0");
    if (!refiner) throw Error(Errc::kInvalidArgument, "no refiner configured");
    renderer.Validate();
  }
};

struct StepDiagnostics {
  int step = 0;
  double gamma = 1.0;
  // Fraction of pixels the refiner had to synthesize (rendered mask = 0).
  double fill_fraction = 0.0;
};

struct StepResult {
  Frame frame;
  StepDiagnostics diagnostics;
};

struct StepFailure {
  int step = 0;
  Errc code = Errc::kEmptyMask;
  std::string message;
};

struct GeneratedSequence {
  std::vector<Frame> frames;
  // diagnostics[i] describes how frames[i + 1] was made.
  std::vector<StepDiagnostics> diagnostics;
  // Set when the run stopped early because a view shared no content with
  // its predecessor.
  std::optional<StepFailure> failure;
};

// One render -> refine -> ground iteration. The returned frame is valid
// wherever its disparity is positive, i.e. everywhere for refiners that
// honor the no-holes contract.
inline StepResult Step(const Frame& frame, const Pose& next_pose, const Intrinsics& next_k,
                       const EngineConfig& cfg) {
  cfg.Validate();
  RenderOutput rendered = Render(frame, next_pose, next_k, cfg.renderer);
  const std::size_t valid = CountValid(rendered.mask);
  if (valid == 0) {
    throw Error(Errc::kEmptyMask, "rendered view shares no content with its source");
  }
  RefineResult refined = cfg.refiner->Refine(rendered.rgb, rendered.disparity, rendered.mask);
  RequireSameShape(refined.rgb, rendered.mask, "refiner rgb output");
  RequireSameShape(refined.disparity, rendered.mask, "refiner disparity output");

  StepResult out;
  out.diagnostics.fill_fraction =
      1.0 - static_cast<double>(valid) / static_cast<double>(rendered.mask.size());
  if (cfg.grounding_enabled) {
    GroundingResult g = GroundDisparity(refined.disparity, rendered.disparity, rendered.mask);
    out.diagnostics.gamma = g.gamma;
    refined.disparity = std::move(g.grounded);
  }
  Frame& f = out.frame;
  f.pose = next_pose;
  f.intrinsics = next_k;
  f.rgb = cfg.quantize_state ? QuantizeTo8Bit(refined.rgb) : std::move(refined.rgb);
  f.disparity =
      cfg.quantize_state ? QuantizeToFloat(refined.disparity) : std::move(refined.disparity);
  f.mask = Mask(f.rgb.width(), f.rgb.height(), 0);
  for (std::size_t i = 0; i < f.mask.size(); ++i) {
    f.mask[i] = (std::isfinite(f.disparity[i]) && f.disparity[i] > 0.0) ? 1 : 0;
  }
  ApplyMask(f.mask, f.rgb, f.disparity);
  return out;
}

namespace detail {

// Runs `steps` iterations, asking `next_camera(i, current)` for each target
// camera. Stops early (and records why) on an empty rendered view.
template <typename NextCamera>
GeneratedSequence RunLoop(const Frame& frame0, const EngineConfig& cfg,
                          NextCamera&& next_camera) {
  cfg.Validate();
  frame0.Validate();
  GeneratedSequence seq;
  seq.frames.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  seq.frames.push_back(frame0);
  for (int i = 1; i <= cfg.steps; ++i) {
    const Frame& current = seq.frames.back();
    try {
      const auto [pose, k] = next_camera(i, current);
      StepResult r = Step(current, pose, k, cfg);
      r.diagnostics.step = i;
      seq.frames.push_back(std::move(r.frame));
      seq.diagnostics.push_back(r.diagnostics);
    } catch (const Error& e) {
      if (e.code() == Errc::kEmptyMask) {
        seq.failure = StepFailure{i, e.code(), e.what()};
        return seq;
      }
      throw Error(e.code(), "step " + std::to_string(i) + ": " + e.what());
    }
  }
  return seq;
}

}  // namespace detail

// Follows a scripted trajectory; entry 0 is the input frame's camera and
// entries 1..T are the cameras of the generated frames.
inline GeneratedSequence Generate(const Frame& frame0, const Trajectory& trajectory,
                                  const EngineConfig& cfg) {
  if (trajectory.size() < static_cast<std::size_t>(cfg.steps) + 1) {
    throw Error(Errc::kTrajectoryTooShort,
                std::to_string(trajectory.size()) + " poses for " +
                    std::to_string(cfg.steps) + " steps");
  }
  return detail::RunLoop(frame0, cfg, [&](int i, const Frame&) {
    const TrajectoryEntry& e = trajectory[static_cast<std::size_t>(i)];
    return std::pair{e.pose, e.intrinsics};
  });
}

// Chooses each next camera online from the current frame's disparity.
inline GeneratedSequence Generate(const Frame& frame0, const AutopilotConfig& autopilot,
                                  const EngineConfig& cfg,
                                  std::optional<AutopilotState> initial = std::nullopt) {
  autopilot.Validate();
  AutopilotState state = initial.value_or(AutopilotState::FromPose(frame0.pose));
  return detail::RunLoop(frame0, cfg, [&](int, const Frame& current) {
    auto [next_state, pose] = NextPose(state, current, autopilot);
    state = next_state;
    return std::pair{pose, current.intrinsics};
  });
}

struct InterpolationConfig {
  RendererConfig renderer;
  InpaintConfig inpaint;
};

// The in-between frame a fraction `lambda` of the way from `a` to `b`: both
// endpoints are re-rendered into the interpolated camera and blended as
// a + lambda (b - a) where both cover a pixel; a pixel covered by one
// endpoint takes that endpoint's value and uncovered pixels are inpainted.
inline Frame InterpolateAt(const Frame& a, const Frame& b, double lambda,
                           const InterpolationConfig& cfg = {}) {
  const Pose pose = InterpolatePose(a.pose, b.pose, lambda);
  const Intrinsics& k = a.intrinsics;
  const RenderOutput ra = Render(a, pose, k, cfg.renderer);
  const RenderOutput rb = Render(b, pose, k, cfg.renderer);
  Frame out;
  out.pose = pose;
  out.intrinsics = k;
  out.rgb = Image(k.width, k.height, Color::Zero());
  out.disparity = DisparityMap(k.width, k.height, 0.0);
  out.mask = Mask(k.width, k.height, 0);
  for (std::size_t i = 0; i < out.mask.size(); ++i) {
    if (ra.mask[i] && rb.mask[i]) {
      out.rgb[i] = ra.rgb[i] + lambda * (rb.rgb[i] - ra.rgb[i]);
      out.disparity[i] = ra.disparity[i] + lambda * (rb.disparity[i] - ra.disparity[i]);
    } else if (ra.mask[i]) {
      out.rgb[i] = ra.rgb[i];
      out.disparity[i] = ra.disparity[i];
    } else if (rb.mask[i]) {
      out.rgb[i] = rb.rgb[i];
      out.disparity[i] = rb.disparity[i];
    } else {
      continue;
    }
    out.mask[i] = 1;
  }
  const std::size_t valid = CountValid(out.mask);
  if (valid == 0 || valid == out.mask.size()) return out;
  RefineResult filled = RefineInpaint(out.rgb, out.disparity, out.mask, cfg.inpaint);
  out.rgb = std::move(filled.rgb);
  out.disparity = std::move(filled.disparity);
  out.mask.Fill(1);
  return out;
}

// n presentation-only frames strictly between `a` and `b`, at
// lambda = k / (n + 1) for k = 1..n.
inline std::vector<Frame> InterpolateFrames(const Frame& a, const Frame& b, int n,
                                            const InterpolationConfig& cfg = {}) {
  if (n < 0) throw Error(Errc::kInvalidArgument, "negative in-between count");
  std::vector<Frame> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    out.push_back(InterpolateAt(a, b, static_cast<double>(k) / (n + 1), cfg));
  }
  return out;
}

}  // namespace pvg

#endif  // PVG_ENGINE_HPP_
