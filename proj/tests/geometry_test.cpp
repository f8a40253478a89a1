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

#include <random>

#include <gtest/gtest.h>

#include "pvg/geometry.hpp"

namespace pvg {
namespace {

Intrinsics UnitK() { return {1.0, 1.0, 0.0, 0.0, 3, 3}; }

Pose RandomPose(std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return {q.normalized().toRotationMatrix(), Vec3(n(rng), n(rng), n(rng))};
}

TEST(UnprojectTest, IdentityIntrinsics) {
  EXPECT_EQ(Unproject(UnitK(), 0, 0, 1.0), Vec3(0, 0, 1));
  EXPECT_EQ(Unproject(UnitK(), 0, 0, 0.5), Vec3(0, 0, 2));
}

TEST(UnprojectTest, MatchesExplicitInverse) {
  const Intrinsics k{2.0, 2.0, 1.0, 1.0, 3, 3};
  // K^-1 = [[1/2, 0, -1/2], [0, 1/2, -1/2], [0, 0, 1]] by hand.
  Mat3 k_inv;
  k_inv << 0.5, 0.0, -0.5, 0.0, 0.5, -0.5, 0.0, 0.0, 1.0;
  EXPECT_TRUE(k_inv.isApprox(k.Matrix().inverse()));
  EXPECT_EQ(Unproject(k, 1, 1, 1.0), Vec3(0, 0, 1));
  const Vec3 expected = k_inv * Vec3(2.0, 0.5, 1.0) / 0.25;
  EXPECT_TRUE(Unproject(k, 2.0, 0.5, 0.25).isApprox(expected, 1e-15));
}

TEST(UnprojectTest, RejectsNonPositiveDisparity) {
  try {
    Unproject(UnitK(), 0, 0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNonPositiveDisparity);
  }
  EXPECT_THROW(Unproject(UnitK(), 0, 0, -1.0), Error);
}

TEST(ProjectTest, PrincipalRay) {
  const Projection p = Project(UnitK(), Vec3(0, 0, 2));
  EXPECT_EQ(p.u, 0.0);
  EXPECT_EQ(p.v, 0.0);
  EXPECT_EQ(p.depth, 2.0);
}

TEST(ProjectTest, BehindCamera) {
  try {
    Project(UnitK(), Vec3(0, 0, -1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kBehindCamera);
  }
}

TEST(ProjectTest, RoundTripOverImageAndDisparities) {
  const Intrinsics k{2.0, 2.0, 1.0, 1.0, 3, 3};
  const Projection p = Project(k, Unproject(k, 1, 1, 1.0));
  EXPECT_NEAR(p.u, 1.0, 1e-12);
  EXPECT_NEAR(p.v, 1.0, 1e-12);
  EXPECT_NEAR(p.depth, 1.0, 1e-12);

  const Intrinsics big{210.5, 190.25, 127.5, 79.5, 256, 160};
  for (double d : {0.01, 0.1, 1.0, 10.0}) {
    for (int v = 0; v < big.height; v += 7) {
      for (int u = 0; u < big.width; u += 5) {
        const Projection q = Project(big, Unproject(big, u, v, d));
        ASSERT_NEAR(q.u, u, 1e-6);
        ASSERT_NEAR(q.v, v, 1e-6);
        ASSERT_NEAR(q.depth, 1.0 / d, 1e-6);
      }
    }
  }
}

TEST(RelativeTransformTest, SamePoseIsIdentity) {
  std::mt19937 rng(1);
  for (int i = 0; i < 50; ++i) {
    const Pose p = RandomPose(rng);
    const Pose r = RelativeTransform(p, p);
    EXPECT_LE((r.rotation - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE(r.translation.cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_TRUE(r.IsValid());
  }
}

TEST(RelativeTransformTest, PureTranslation) {
  const Pose dst{Mat3::Identity(), Vec3(0.5, -2.0, 3.0)};
  const Pose r = RelativeTransform(Pose::Identity(), dst);
  EXPECT_EQ(r.rotation, Mat3::Identity());
  EXPECT_EQ(r.translation, dst.translation);
  std::mt19937 rng(2);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int i = 0; i < 3; ++i) {
    const Vec3 p(n(rng), n(rng), n(rng));
    EXPECT_TRUE(dst.Apply(p).isApprox(r.Apply(Pose::Identity().Apply(p)), 1e-12));
  }
}

TEST(RelativeTransformTest, CompositionProperty) {
  std::mt19937 rng(3);
  std::normal_distribution<double> n(0.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const Pose a = RandomPose(rng);
    const Pose b = RandomPose(rng);
    const Pose r = RelativeTransform(a, b);
    ASSERT_TRUE(r.IsValid());
    const Vec3 p(n(rng), n(rng), n(rng));
    ASSERT_LE((b.Apply(p) - r.Apply(a.Apply(p))).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(InterpolatePoseTest, EndpointsAreExact) {
  std::mt19937 rng(4);
  for (int i = 0; i < 20; ++i) {
    const Pose a = RandomPose(rng);
    const Pose b = RandomPose(rng);
    EXPECT_EQ(InterpolatePose(a, b, 0.0), a);
    EXPECT_EQ(InterpolatePose(a, b, 1.0), b);
  }
}

TEST(InterpolatePoseTest, MidpointOfTranslations) {
  const Pose a = Pose::FromCenter(Mat3::Identity(), Vec3(0, 0, 0));
  const Pose b = Pose::FromCenter(Mat3::Identity(), Vec3(1, 0, 0));
  const Pose m = InterpolatePose(a, b, 0.5);
  // Camera centers are -R^T t.
  EXPECT_TRUE(m.Center().isApprox(Vec3(0.5, 0, 0), 1e-12));
  EXPECT_LE((m.rotation - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(InterpolatePoseTest, LookDirectionFollowsGreatCircle) {
  const Pose a = Pose::FromCenter(LookRotation(Vec3::UnitZ(), Vec3::UnitY()), Vec3::Zero());
  const Pose b = Pose::FromCenter(LookRotation(Vec3::UnitX(), Vec3::UnitY()), Vec3::Zero());
  for (double t : {0.1, 0.25, 0.5, 0.9}) {
    const Pose p = InterpolatePose(a, b, t);
    ASSERT_TRUE(p.IsValid());
    EXPECT_NEAR(AngleBetween(p.Forward(), a.Forward()), t * std::numbers::pi / 2, 1e-12);
    // Stays level: camera x axis has no vertical component.
    EXPECT_NEAR(p.Right().y(), 0.0, 1e-12);
  }
}

TEST(InterpolatePoseTest, AntipodalLookIsDegenerate) {
  const Pose a = Pose::FromCenter(LookRotation(Vec3::UnitZ(), Vec3::UnitY()), Vec3::Zero());
  const Pose b = Pose::FromCenter(LookRotation(-Vec3::UnitZ(), Vec3::UnitY()), Vec3::Zero());
  try {
    InterpolatePose(a, b, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kDegenerateRotation);
  }
}

TEST(InterpolatePoseTest, ResultsAreValidPoses) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Pose a = RandomPose(rng);
    const Pose b = RandomPose(rng);
    if (AngleBetween(a.Forward(), b.Forward()) > 3.0) continue;
    const Pose p = InterpolatePose(a, b, u(rng));
    ASSERT_TRUE(p.IsValid());
  }
}

TEST(PoseTest, ValidateRejectsReflection) {
  Pose p;
  p.rotation(0, 0) = -1.0;
  EXPECT_FALSE(p.IsValid());
  EXPECT_THROW(p.Validate(), Error);
}

TEST(TrajectoryTest, RequiresIncreasingIds) {
  TrajectoryEntry e;
  e.frame_id = 3;
  EXPECT_THROW(Trajectory({e, e}), Error);
  EXPECT_THROW(Trajectory(std::vector<TrajectoryEntry>{}), Error);
  TrajectoryEntry f = e;
  f.frame_id = 4;
  EXPECT_EQ(Trajectory({e, f}).size(), 2u);
}

}  // namespace
}  // namespace pvg
