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

#ifndef PVG_GEOMETRY_HPP_
#define PVG_GEOMETRY_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "pvg/error.hpp"

namespace pvg {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Pinhole calibration in pixels. Pixel centers sit at integer coordinates,
// so the image covers [-0.5, width - 0.5) x [-0.5, height - 0.5).
struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 3;
  int height = 3;

  void Validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) {
      throw Error(Errc::kInvalidArgument, "focal lengths must be positive");
    }
    if (width < 3 || height < 3) {
      throw Error(Errc::kInvalidArgument, "image must be at least 3x3");
    }
  }

  Mat3 Matrix() const {
    Mat3 k;
    k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
    return k;
  }

  bool Contains(double u, double v) const {
    return u >= -0.5 && v >= -0.5 && u < width - 0.5 && v < height - 0.5;
  }

  // Pinhole intrinsics with the principal point at the image center.
  static Intrinsics FromFov(double horizontal_fov_rad, int width, int height) {
    const double f = 0.5 * width / std::tan(0.5 * horizontal_fov_rad);
    return {f, f, 0.5 * (width - 1), 0.5 * (height - 1), width, height};
  }

  friend bool operator==(const Intrinsics&, const Intrinsics&) = default;
};

// World-to-camera rigid transform: a world point p maps to R * p + t in
// camera coordinates (x right, y down, z forward).
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose Identity() { return {}; }

  Vec3 Apply(const Vec3& world) const { return rotation * world + translation; }

  Vec3 Center() const { return -rotation.transpose() * translation; }

  // Camera axes expressed in world coordinates.
  Vec3 Right() const { return rotation.row(0).transpose(); }
  Vec3 Down() const { return rotation.row(1).transpose(); }
  Vec3 Forward() const { return rotation.row(2).transpose(); }

  Pose Inverse() const {
    return {rotation.transpose(), -rotation.transpose() * translation};
  }

  static Pose FromCenter(const Mat3& rotation, const Vec3& center) {
    return {rotation, -rotation * center};
  }

  bool IsValid(double tol = 1e-9) const {
    if (!rotation.allFinite() || !translation.allFinite()) return false;
    const double ortho =
        (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
    return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
  }

  void Validate() const {
    if (!IsValid()) {
      throw Error(Errc::kInvalidPose, "rotation is not a proper orthonormal matrix");
    }
  }

  friend bool operator==(const Pose& a, const Pose& b) {
    return a.rotation == b.rotation && a.translation == b.translation;
  }
};

struct TrajectoryEntry {
  long long frame_id = 0;
  Intrinsics intrinsics;
  Pose pose;
};

// Ordered camera path with strictly increasing frame ids.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<TrajectoryEntry> entries)
      : entries_(std::move(entries)) {
    Validate();
  }

  void Validate() const {
    if (entries_.empty()) {
      throw Error(Errc::kInvalidArgument, "trajectory is empty");
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      entries_[i].intrinsics.Validate();
      entries_[i].pose.Validate();
      if (i > 0 && entries_[i].frame_id <= entries_[i - 1].frame_id) {
        throw Error(Errc::kInvalidArgument,
                    "frame ids must be strictly increasing (at line " +
                        std::to_string(i + 1) + ")");
      }
    }
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const TrajectoryEntry& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<TrajectoryEntry>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  std::vector<TrajectoryEntry> entries_;
};

// (x, y, z) = K^-1 (u, v, 1) / d.
inline Vec3 Unproject(const Intrinsics& k, double u, double v, double disparity) {
  if (!(disparity > 0.0)) {
    throw Error(Errc::kNonPositiveDisparity,
                "cannot unproject disparity " + std::to_string(disparity));
  }
  const double z = 1.0 / disparity;
  return {(u - k.cx) / k.fx * z, (v - k.cy) / k.fy * z, z};
}

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

inline Projection Project(const Intrinsics& k, const Vec3& p) {
  if (!(p.z() > 0.0)) {
    throw Error(Errc::kBehindCamera, "point has non-positive depth");
  }
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy, p.z()};
}

// Maps source-camera coordinates into destination-camera coordinates.
inline Pose RelativeTransform(const Pose& src, const Pose& dst) {
  const Mat3 r = dst.rotation * src.rotation.transpose();
  return {r, dst.translation - r * src.translation};
}

// Spherical interpolation between unit vectors. Throws DegenerateRotation for
// antipodal inputs, where the great circle is undefined.
inline Vec3 Slerp(const Vec3& a, const Vec3& b, double t) {
  const double cos_theta = std::clamp(a.dot(b), -1.0, 1.0);
  const double theta = std::atan2(a.cross(b).norm(), cos_theta);
  if (theta < 1e-12) return a;
  if (std::numbers::pi - theta < 1e-9) {
    throw Error(Errc::kDegenerateRotation, "antipodal directions");
  }
  const double s = std::sin(theta);
  const Vec3 out = (std::sin((1.0 - t) * theta) / s) * a + (std::sin(t * theta) / s) * b;
  return out.normalized();
}

inline double AngleBetween(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

// World-to-camera rotation of a camera looking along `look` with its image
// "up" (negative camera y) as close to `up` as possible.
inline Mat3 LookRotation(const Vec3& look, const Vec3& up) {
  const Vec3 z = look.normalized();
  const Vec3 side = z.cross(up);
  if (!z.allFinite() || side.norm() < 1e-9) {
    throw Error(Errc::kDegenerateRotation, "look direction is parallel to up");
  }
  const Vec3 x = side.normalized();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.row(0) = x.transpose();
  r.row(1) = y.transpose();
  r.row(2) = z.transpose();
  return r;
}

// Camera center moves linearly; look direction is slerped; the rotation is
// rebuilt from the look direction and the interpolated camera up vector.
inline Pose InterpolatePose(const Pose& a, const Pose& b, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(Errc::kInvalidArgument, "interpolation fraction outside [0, 1]");
  }
  if (lambda == 0.0 || a == b) return a;
  if (lambda == 1.0) return b;
  const Vec3 center = a.Center() + lambda * (b.Center() - a.Center());
  const Vec3 look = Slerp(a.Forward(), b.Forward(), lambda);
  const Vec3 up_a = -a.Down();
  const Vec3 up_b = -b.Down();
  const Vec3 up = up_a + lambda * (up_b - up_a);
  return Pose::FromCenter(LookRotation(look, up), center);
}

}  // namespace pvg

#endif  // PVG_GEOMETRY_HPP_
