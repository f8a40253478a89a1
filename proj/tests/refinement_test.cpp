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

#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "pvg/refinement.hpp"
#include "support/scenes.hpp"

namespace pvg {
namespace {

struct Inputs {
  Image rgb;
  DisparityMap disparity;
  Mask mask;
};

// Random valid content with a rectangular hole.
Inputs WithHole(int w, int h, int hx0, int hy0, int hx1, int hy1, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  Inputs in{Image(w, h, Color::Zero()), DisparityMap(w, h), Mask(w, h, 1)};
  for (std::size_t i = 0; i < in.mask.size(); ++i) {
    in.rgb[i] = Color(u(rng), u(rng), u(rng));
    in.disparity[i] = u(rng);
  }
  for (int y = hy0; y < hy1; ++y) {
    for (int x = hx0; x < hx1; ++x) {
      in.mask(x, y) = 0;
      in.rgb(x, y).setZero();
      in.disparity(x, y) = 0.0;
    }
  }
  return in;
}

TEST(PassthroughTest, IsBitExact) {
  const Inputs in = WithHole(12, 9, 3, 3, 6, 5, 1);
  const RefineResult out = RefinePassthrough(in.rgb, in.disparity, in.mask);
  EXPECT_EQ(out.rgb, in.rgb);
  EXPECT_EQ(out.disparity, in.disparity);
  const RefineResult full = PassthroughRefiner().Refine(in.rgb, in.disparity, Mask(12, 9, 1));
  EXPECT_EQ(full.rgb, in.rgb);
}

TEST(InpaintTest, FullMaskIsIdentity) {
  const Inputs in = WithHole(10, 8, 0, 0, 0, 0, 2);
  const RefineResult out = RefineInpaint(in.rgb, in.disparity, in.mask);
  EXPECT_EQ(out.rgb, in.rgb);
  EXPECT_EQ(out.disparity, in.disparity);
}

TEST(InpaintTest, SingleHoleInConstantSurroundings) {
  const double c = 0.37;
  Image rgb(5, 5, Color::Constant(c));
  DisparityMap d(5, 5, c);
  Mask m(5, 5, 1);
  m(2, 2) = 0;
  rgb(2, 2).setZero();
  d(2, 2) = 0.0;
  const RefineResult out = RefineInpaint(rgb, d, m);
  EXPECT_NEAR(out.rgb(2, 2).x(), c, 1e-12);
  EXPECT_NEAR(out.disparity(2, 2), c, 1e-12);
}

TEST(InpaintTest, HalfPlaneHoleConvergesToBoundaryConstant) {
  const double c = 0.6;
  const int w = 20;
  const int h = 10;
  Image rgb(w, h, Color::Constant(c));
  DisparityMap d(w, h, 2.0);
  Mask m(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = w / 2; x < w; ++x) {
      m(x, y) = 0;
      rgb(x, y).setZero();
      d(x, y) = 0.0;
    }
  }
  const RefineResult out = RefineInpaint(rgb, d, m);
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_NEAR(out.rgb[i].y(), c, 1e-9);
    EXPECT_NEAR(out.disparity[i], 2.0, 1e-9);
  }
}

TEST(InpaintTest, PreservesValidPixelsAndObeysMaximumPrinciple) {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const Inputs in = WithHole(24, 16, 4 + seed, 3, 15, 12, seed);
    const RefineResult out = RefineInpaint(in.rgb, in.disparity, in.mask);
    Color lo = Color::Constant(1e9);
    Color hi = Color::Constant(-1e9);
    double dlo = 1e9;
    double dhi = -1e9;
    for (std::size_t i = 0; i < in.mask.size(); ++i) {
      if (!in.mask[i]) continue;
      lo = lo.cwiseMin(in.rgb[i]);
      hi = hi.cwiseMax(in.rgb[i]);
      dlo = std::min(dlo, in.disparity[i]);
      dhi = std::max(dhi, in.disparity[i]);
    }
    for (std::size_t i = 0; i < in.mask.size(); ++i) {
      if (in.mask[i]) {
        ASSERT_EQ(out.rgb[i], in.rgb[i]);
        ASSERT_EQ(out.disparity[i], in.disparity[i]);
        continue;
      }
      for (int c = 0; c < 3; ++c) {
        ASSERT_GE(out.rgb[i][c], lo[c]);
        ASSERT_LE(out.rgb[i][c], hi[c]);
      }
      ASSERT_GE(out.disparity[i], dlo * (1 - 1e-12));
      ASSERT_LE(out.disparity[i], dhi * (1 + 1e-12));
    }
  }
}

TEST(InpaintTest, IdempotentOnFilledOutput) {
  const Inputs in = WithHole(16, 12, 2, 2, 9, 7, 3);
  const RefineResult once = RefineInpaint(in.rgb, in.disparity, in.mask);
  const RefineResult twice = RefineInpaint(once.rgb, once.disparity, Mask(16, 12, 1));
  EXPECT_EQ(once.rgb, twice.rgb);
  EXPECT_EQ(once.disparity, twice.disparity);
}

TEST(InpaintTest, AllMasked) {
  try {
    RefineInpaint(Image(4, 4), DisparityMap(4, 4), Mask(4, 4, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kAllMasked);
  }
}

TEST(InpaintTest, RejectsBadConfig) {
  const Inputs in = WithHole(6, 6, 1, 1, 3, 3, 4);
  EXPECT_THROW(RefineInpaint(in.rgb, in.disparity, in.mask, {0, 1e-6}), Error);
  EXPECT_THROW(RefineInpaint(in.rgb, in.disparity, in.mask, {10, 0.0}), Error);
}

class ExternalRefinerTest : public ::testing::Test {
 protected:
  ExternalRefinerConfig Config(const std::string& mode) {
    ExternalRefinerConfig cfg;
    cfg.command = std::string(PVG_FAKE_REFINER) + " " + mode;
    return cfg;
  }

  // 8-bit exact colors and float-exact disparity, as after a saved step.
  Inputs in_ = [] {
    Inputs in = WithHole(20, 14, 5, 4, 11, 9, 5);
    in.rgb = QuantizeTo8Bit(in.rgb);
    in.disparity = QuantizeToFloat(in.disparity);
    return in;
  }();
};

TEST_F(ExternalRefinerTest, FillsHoles) {
  const RefineResult out = RefineExternal(in_.rgb, in_.disparity, in_.mask, Config("fill"));
  for (std::size_t i = 0; i < in_.mask.size(); ++i) {
    if (in_.mask[i]) {
      ASSERT_EQ(out.rgb[i], in_.rgb[i]);
      ASSERT_EQ(out.disparity[i], in_.disparity[i]);
    } else {
      ASSERT_NEAR(out.rgb[i].x(), 0.5, 0.5 / 255.0);
      ASSERT_EQ(out.disparity[i], 0.5);
    }
  }
}

Errc ExternalError(const Inputs& in, const ExternalRefinerConfig& cfg) {
  try {
    RefineExternal(in.rgb, in.disparity, in.mask, cfg);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return Errc::kInvalidArgument;
}

TEST_F(ExternalRefinerTest, NonzeroExitIsExternalFailure) {
  EXPECT_EQ(ExternalError(in_, Config("fail")), Errc::kExternalFailure);
  EXPECT_EQ(ExternalError(in_, Config("silent")), Errc::kExternalFailure);
}

TEST_F(ExternalRefinerTest, ZeroDisparityIsContractViolation) {
  EXPECT_EQ(ExternalError(in_, Config("zero")), Errc::kContractViolation);
}

TEST_F(ExternalRefinerTest, StrictModeRejectsChangedValidPixels) {
  EXPECT_EQ(ExternalError(in_, Config("touch")), Errc::kContractViolation);
  ExternalRefinerConfig relaxed = Config("touch");
  relaxed.strict = false;
  EXPECT_NO_THROW(RefineExternal(in_.rgb, in_.disparity, in_.mask, relaxed));
}

TEST_F(ExternalRefinerTest, UsesGivenExchangeDirectory) {
  const auto dir = std::filesystem::temp_directory_path() / "pvg_refiner_exchange_test";
  std::filesystem::remove_all(dir);
  ExternalRefinerConfig cfg = Config("fill");
  cfg.exchange_dir = dir;
  ExternalRefiner(cfg).Refine(in_.rgb, in_.disparity, in_.mask);
  EXPECT_TRUE(std::filesystem::exists(dir / "rgb.png"));
  EXPECT_TRUE(std::filesystem::exists(dir / "refined_disparity.pfm"));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace pvg
