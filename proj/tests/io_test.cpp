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
#include <fstream>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "pvg/io.hpp"
#include "support/scenes.hpp"

namespace pvg {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pvg_io_test_" + std::string(::testing::UnitTest::GetInstance()
                                             ->current_test_info()
                                             ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

Errc CodeOf(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return Errc::kInvalidArgument;
}

TEST_F(IoTest, RgbPngRoundTripIsLosslessAt8Bits) {
  const Image img = QuantizeTo8Bit(testing::RandomFrame(testing::StandardIntrinsics(40, 24), 1).rgb);
  io::WriteRgbPng(dir_ / "a.png", img);
  EXPECT_EQ(io::ReadRgbPng(dir_ / "a.png"), img);
}

TEST_F(IoTest, MaskPngStoresZeroAnd255) {
  Mask m(7, 5, 0);
  m(3, 2) = 1;
  m(6, 4) = 1;
  io::WriteMaskPng(dir_ / "m.png", m);
  EXPECT_EQ(io::ReadMaskPng(dir_ / "m.png"), m);
  const Image as_rgb = io::ReadRgbPng(dir_ / "m.png");
  EXPECT_EQ(as_rgb(3, 2), Color::Ones());
  EXPECT_EQ(as_rgb(0, 0), Color::Zero());
}

TEST_F(IoTest, PfmRoundTripAndLayout) {
  DisparityMap d(3, 2);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 3; ++x) d(x, y) = 0.25 * (1 + x + 3 * y);
  }
  io::WritePfm(dir_ / "d.pfm", d);
  EXPECT_EQ(io::ReadPfm(dir_ / "d.pfm"), d);

  std::ifstream in(dir_ / "d.pfm", std::ios::binary);
  std::string magic, dims, scale;
  std::getline(in, magic);
  std::getline(in, dims);
  std::getline(in, scale);
  EXPECT_EQ(magic, "Pf");
  EXPECT_EQ(dims, "3 2");
  EXPECT_EQ(std::stod(scale), -1.0);
  // Rows are stored bottom to top.
  float first = 0;
  in.read(reinterpret_cast<char*>(&first), sizeof(first));
  EXPECT_EQ(first, 1.0f);
}

TEST_F(IoTest, PfmRoundsToFloat) {
  DisparityMap d(2, 2, 0.1);
  io::WritePfm(dir_ / "d.pfm", d);
  EXPECT_EQ(io::ReadPfm(dir_ / "d.pfm"), QuantizeToFloat(d));
}

TEST_F(IoTest, MissingAndMalformedFiles) {
  EXPECT_EQ(CodeOf([&] { io::ReadRgbPng(dir_ / "none.png"); }), Errc::kIoError);
  io::detail::WriteText(dir_ / "bad.pfm", "PF\n1 1\n-1\n");
  EXPECT_EQ(CodeOf([&] { io::ReadPfm(dir_ / "bad.pfm"); }), Errc::kParseError);
}

Trajectory SampleTrajectory() {
  const Intrinsics k = testing::StandardIntrinsics();
  std::vector<TrajectoryEntry> e;
  for (int i = 0; i < 4; ++i) {
    const Mat3 r = Eigen::AngleAxisd(0.1 * i, Vec3(0.2, 1, 0.1).normalized()).toRotationMatrix();
    e.push_back({100 + 7 * i, k, Pose::FromCenter(r, Vec3(0.1 * i, -0.3, 1.0 / 3.0 * i))});
  }
  return Trajectory(std::move(e));
}

TEST_F(IoTest, TrajectoryRoundTripIsBitExact) {
  const Trajectory t = SampleTrajectory();
  io::WriteTrajectory(dir_ / "t.txt", t);
  const Trajectory r = io::ReadTrajectory(dir_ / "t.txt", 256, 160);
  ASSERT_EQ(r.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(r[i].frame_id, t[i].frame_id);
    EXPECT_TRUE(r[i].intrinsics == t[i].intrinsics);
    EXPECT_TRUE(r[i].pose == t[i].pose);
  }
  io::WriteTrajectory(dir_ / "t2.txt", r);
  EXPECT_EQ(io::detail::ReadText(dir_ / "t.txt"), io::detail::ReadText(dir_ / "t2.txt"));
}

TEST_F(IoTest, TrajectoryLineHas19Fields) {
  const std::string line = io::FormatTrajectoryLine(SampleTrajectory()[0]);
  std::istringstream ls(line);
  std::vector<std::string> tok;
  for (std::string s; ls >> s;) tok.push_back(s);
  ASSERT_EQ(tok.size(), 19u);
  EXPECT_EQ(tok[0], "100");
  EXPECT_EQ(tok[1], "0.5");
  EXPECT_EQ(tok[5], "0");
  EXPECT_EQ(tok[6], "0");
}

TEST_F(IoTest, TrajectorySkipsUrlLineAndRejectsBadRows) {
  const std::string row = io::FormatTrajectoryLine(SampleTrajectory()[0]);
  io::detail::WriteText(dir_ / "url.txt", "https://example.com/video\n" + row + "\n");
  EXPECT_EQ(io::ReadTrajectory(dir_ / "url.txt", 256, 160).size(), 1u);
  io::detail::WriteText(dir_ / "short.txt", "1 2 3\n4 5 6\n");
  EXPECT_EQ(CodeOf([&] { io::ReadTrajectory(dir_ / "short.txt", 256, 160); }),
            Errc::kParseError);
  io::detail::WriteText(dir_ / "order.txt", row + "\n" + row + "\n");
  EXPECT_EQ(CodeOf([&] { io::ReadTrajectory(dir_ / "order.txt", 256, 160); }),
            Errc::kParseError);
}

TEST_F(IoTest, KeypointsRoundTrip) {
  const KeypointSet kp = {Vec3(1.5, 2.25, 0.125), Vec3(10, 20, 3.0 / 7.0)};
  io::WriteKeypoints(dir_ / "k.json", kp);
  EXPECT_EQ(io::ReadKeypoints(dir_ / "k.json"), kp);
}

TEST_F(IoTest, EmbeddingsRoundTripAtFloatPrecision) {
  EmbeddingSequence e(5, 3);
  std::mt19937 rng(2);
  std::normal_distribution<double> g;
  for (int i = 0; i < 15; ++i) e.data()[i] = g(rng);
  io::WriteEmbeddings(dir_ / "e.bin", e);
  const EmbeddingSequence r = io::ReadEmbeddings(dir_ / "e.bin");
  ASSERT_EQ(r.rows(), 5);
  ASSERT_EQ(r.cols(), 3);
  EXPECT_EQ(r, e.cast<float>().cast<double>());
  EXPECT_EQ(fs::file_size(dir_ / "e.bin"), std::string("{\"m\":3,\"n\":5}\n").size() + 60);
}

TEST_F(IoTest, TruncatedEmbeddingsAreParseErrors) {
  io::detail::WriteText(dir_ / "e.bin", "{\"n\":4,\"m\":2}\nabc");
  EXPECT_EQ(CodeOf([&] { io::ReadEmbeddings(dir_ / "e.bin"); }), Errc::kParseError);
}

TEST_F(IoTest, StatsRoundTrip) {
  GaussianStats s;
  s.mu = Eigen::Vector2d(0.1, -3.0);
  s.sigma = (Eigen::Matrix2d() << 2.0, 0.3, 0.3, 1.0 / 3.0).finished();
  io::WriteStats(dir_ / "s.json", s);
  const GaussianStats r = io::ReadStats(dir_ / "s.json");
  EXPECT_EQ(r.mu, s.mu);
  EXPECT_EQ(r.sigma, s.sigma);
  io::detail::WriteText(dir_ / "bad.json", R"({"mu":[1,2],"sigma":[[1]]})");
  EXPECT_EQ(CodeOf([&] { io::ReadStats(dir_ / "bad.json"); }), Errc::kDimensionMismatch);
}

}  // namespace
}  // namespace pvg
