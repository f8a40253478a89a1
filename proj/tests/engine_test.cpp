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

#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "pvg/engine.hpp"
#include "support/scenes.hpp"

namespace pvg {
namespace {

using testing::PlaneFrame;
using testing::RandomFrame;
using testing::StandardIntrinsics;
using testing::StepEdgeFrame;

// Inpaints, then multiplies all disparity by a constant factor.
class ScaledRefiner : public Refiner {
 public:
  explicit ScaledRefiner(double factor) : factor_(factor) {}
  RefineResult Refine(const Image& rgb, const DisparityMap& disparity,
                      const Mask& mask) const override {
    RefineResult r = CountValid(mask) == mask.size() ? RefinePassthrough(rgb, disparity, mask)
                                                     : RefineInpaint(rgb, disparity, mask);
    for (double& d : r.disparity.values()) d *= factor_;
    return r;
  }
  std::string Name() const override { return "scaled"; }

 private:
  double factor_;
};

Trajectory ForwardTrajectory(const Intrinsics& k, int n, double spacing) {
  std::vector<TrajectoryEntry> entries;
  for (int i = 0; i < n; ++i) {
    entries.push_back({i, k, Pose::FromCenter(Mat3::Identity(), Vec3(0, 0, spacing * i))});
  }
  return Trajectory(std::move(entries));
}

Frame Quantized(Frame f) {
  f.rgb = QuantizeTo8Bit(f.rgb);
  f.disparity = QuantizeToFloat(f.disparity);
  return f;
}

TEST(StepTest, IdentityStepHasUnitGamma) {
  const Frame f = Quantized(RandomFrame(StandardIntrinsics(), 3));
  EngineConfig cfg;
  cfg.refiner = std::make_shared<PassthroughRefiner>();
  const StepResult r = Step(f, f.pose, f.intrinsics, cfg);
  const RenderOutput rendered = Render(f, f.pose, f.intrinsics);
  EXPECT_EQ(r.diagnostics.gamma, 1.0);
  EXPECT_EQ(r.frame.mask, rendered.mask);
  EXPECT_EQ(r.frame.rgb, rendered.rgb);
  EXPECT_EQ(r.frame.disparity, rendered.disparity);
}

TEST(StepTest, GroundingUndoesRefinerScale) {
  const Frame f = Quantized(PlaneFrame(StandardIntrinsics(), 4.0));
  EngineConfig cfg;
  cfg.refiner = std::make_shared<ScaledRefiner>(2.0);
  const StepResult r = Step(f, f.pose, f.intrinsics, cfg);
  EXPECT_NEAR(r.diagnostics.gamma, 0.5, 1e-12);
  for (double d : r.frame.disparity.values()) ASSERT_NEAR(d, 0.25, 1e-7);

  cfg.grounding_enabled = false;
  const StepResult u = Step(f, f.pose, f.intrinsics, cfg);
  EXPECT_EQ(u.diagnostics.gamma, 1.0);
  for (double d : u.frame.disparity.values()) ASSERT_NEAR(d, 0.5, 1e-7);
}

TEST(StepTest, BackwardMotionFillsEverything) {
  const Frame f = PlaneFrame(StandardIntrinsics(), 4.0);
  const Pose next = Pose::FromCenter(Mat3::Identity(), Vec3(0.3, 0, -0.5));
  const StepResult r = Step(f, next, f.intrinsics, {});
  EXPECT_GT(r.diagnostics.fill_fraction, 0.0);
  EXPECT_EQ(CountValid(r.frame.mask), r.frame.mask.size());
  EXPECT_NO_THROW(r.frame.Validate());
}

TEST(StepTest, TurningAroundIsEmptyMask) {
  const Frame f = PlaneFrame(StandardIntrinsics(), 4.0);
  Mat3 back = Mat3::Identity();
  back(0, 0) = -1;
  back(2, 2) = -1;
  try {
    Step(f, Pose::FromCenter(back, Vec3::Zero()), f.intrinsics, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kEmptyMask);
  }
}

TEST(GenerateTest, ZeroStepsReturnsInput) {
  const Frame f = RandomFrame(StandardIntrinsics(), 1);
  const GeneratedSequence seq = Generate(f, ForwardTrajectory(f.intrinsics, 1, 0.1), {});
  ASSERT_EQ(seq.frames.size(), 1u);
  EXPECT_EQ(seq.frames[0].rgb, f.rgb);
  EXPECT_TRUE(seq.diagnostics.empty());
  EXPECT_FALSE(seq.failure);
}

TEST(GenerateTest, StaticPassthroughIsFixedPoint) {
  const Frame f = StepEdgeFrame(StandardIntrinsics());
  EngineConfig cfg;
  cfg.refiner = std::make_shared<PassthroughRefiner>();
  cfg.steps = 5;
  const GeneratedSequence seq = Generate(f, ForwardTrajectory(f.intrinsics, 6, 0.0), cfg);
  ASSERT_EQ(seq.frames.size(), 6u);
  for (int i = 2; i <= 5; ++i) {
    EXPECT_EQ(seq.frames[i].rgb, seq.frames[1].rgb) << i;
    EXPECT_EQ(seq.frames[i].disparity, seq.frames[1].disparity) << i;
    EXPECT_EQ(seq.frames[i].mask, seq.frames[1].mask) << i;
  }
}

TEST(GenerateTest, TrajectoryTooShort) {
  const Frame f = RandomFrame(StandardIntrinsics(), 1);
  EngineConfig cfg;
  cfg.steps = 3;
  try {
    Generate(f, ForwardTrajectory(f.intrinsics, 3, 0.1), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kTrajectoryTooShort);
  }
}

TEST(GenerateTest, EmptyMaskStopsWithPartialSequence) {
  const Intrinsics k = StandardIntrinsics();
  const Frame f = PlaneFrame(k, 4.0);
  Mat3 back = Mat3::Identity();
  back(0, 0) = -1;
  back(2, 2) = -1;
  std::vector<TrajectoryEntry> entries = {
      {0, k, Pose::Identity()},
      {1, k, Pose::FromCenter(Mat3::Identity(), Vec3(0, 0, 0.1))},
      {2, k, Pose::FromCenter(back, Vec3(0, 0, 0.1))},
      {3, k, Pose::Identity()}};
  EngineConfig cfg;
  cfg.steps = 3;
  const GeneratedSequence seq = Generate(f, Trajectory(entries), cfg);
  EXPECT_EQ(seq.frames.size(), 2u);
  ASSERT_TRUE(seq.failure);
  EXPECT_EQ(seq.failure->step, 2);
  EXPECT_EQ(seq.failure->code, Errc::kEmptyMask);
}

TEST(GenerateTest, RestartFromSavedFrameIsMarkov) {
  const Frame f = Quantized(RandomFrame(StandardIntrinsics(), 11));
  const Trajectory traj = ForwardTrajectory(f.intrinsics, 7, 0.05);
  EngineConfig cfg;
  cfg.steps = 6;
  const GeneratedSequence full = Generate(f, traj, cfg);
  ASSERT_EQ(full.frames.size(), 7u);

  const Frame& saved = full.frames[3];
  const Frame restart = Frame::FromRgbd(saved.rgb, saved.disparity, saved.intrinsics, saved.pose);
  std::vector<TrajectoryEntry> rest(traj.entries().begin() + 3, traj.entries().end());
  cfg.steps = 3;
  const GeneratedSequence tail = Generate(restart, Trajectory(rest), cfg);
  ASSERT_EQ(tail.frames.size(), 4u);
  for (int i = 1; i <= 3; ++i) {
    EXPECT_EQ(tail.frames[i].rgb, full.frames[3 + i].rgb) << i;
    EXPECT_EQ(tail.frames[i].disparity, full.frames[3 + i].disparity) << i;
  }
}

TEST(InterpolateTest, ZeroInBetweens) {
  const Frame f = RandomFrame(StandardIntrinsics(), 2);
  EXPECT_TRUE(InterpolateFrames(f, f, 0).empty());
  EXPECT_THROW(InterpolateFrames(f, f, -1), Error);
}

TEST(InterpolateTest, IdenticalEndpointsReproduceFrame) {
  const Frame f = RandomFrame(StandardIntrinsics(), 4);
  const std::vector<Frame> mid = InterpolateFrames(f, f, 3);
  ASSERT_EQ(mid.size(), 3u);
  const RenderOutput r = Render(f, f.pose, f.intrinsics);
  for (const Frame& m : mid) {
    EXPECT_TRUE(m.pose == f.pose);
    for (std::size_t i = 0; i < r.mask.size(); ++i) {
      if (!r.mask[i]) continue;
      ASSERT_EQ(m.rgb[i], f.rgb[i]);
      ASSERT_EQ(m.disparity[i], f.disparity[i]);
    }
  }
}

TEST(InterpolateTest, BlendsBlackAndWhiteToGray) {
  const Intrinsics k = StandardIntrinsics(64, 40);
  const Frame a = Frame::FromRgbd(Image(64, 40, Color::Zero()), DisparityMap(64, 40, 0.5), k);
  const Frame b = Frame::FromRgbd(Image(64, 40, Color::Ones()), DisparityMap(64, 40, 0.5), k);
  const Frame m = InterpolateAt(a, b, 0.5);
  for (const Color& c : m.rgb.values()) ASSERT_EQ(c, Color::Constant(0.5));
  const std::vector<Frame> three = InterpolateFrames(a, b, 3);
  EXPECT_EQ(three[0].rgb(10, 10).x(), 0.25);
  EXPECT_EQ(three[2].rgb(10, 10).x(), 0.75);
}

TEST(InterpolateTest, MovingEndpointsGiveValidFullFrames) {
  const Intrinsics k = StandardIntrinsics();
  const Frame a = RandomFrame(k, 5);
  Frame b = RandomFrame(k, 6);
  b.pose = Pose::FromCenter(Mat3::Identity(), Vec3(0.2, 0, 0.3));
  for (const Frame& m : InterpolateFrames(a, b, 2)) {
    EXPECT_EQ(CountValid(m.mask), m.mask.size());
    EXPECT_NO_THROW(m.Validate());
  }
}

}  // namespace
}  // namespace pvg
