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

#ifndef PVG_RENDERER_HPP_
#define PVG_RENDERER_HPP_

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "pvg/error.hpp"
#include "pvg/frame.hpp"
#include "pvg/geometry.hpp"
#include "pvg/image.hpp"

namespace pvg {

// How equal-depth fragments are resolved. Only one rule exists today; it is
// kept explicit so stored configs stay meaningful if another is added.
enum class DepthTieRule { kLowerTriangleIndexWins };

struct RendererConfig {
  // Threshold on the Sobel gradient magnitude of the disparity map.
  double alpha = 0.3;
  // Divide disparity by its maximum valid value before thresholding.
  bool normalize_disparity = true;
  DepthTieRule depth_test = DepthTieRule::kLowerTriangleIndexWins;
  // Geometry closer than this (scene units) is clipped away.
  double near_plane = 1e-6;

  void Validate() const {
    if (!(alpha > 0.0)) throw Error(Errc::kInvalidArgument, "alpha must be positive");
    if (!(near_plane > 0.0)) {
      throw Error(Errc::kInvalidArgument, "near plane must be positive");
    }
  }
};

struct RenderOutput {
  Image rgb;
  DisparityMap disparity;
  Mask mask;
};

namespace detail {

// 3x3 Sobel response at (x, y). `sample` returns the neighbor value.
template <typename Sample>
double SobelMagnitude(Sample&& sample) {
  const double gx = (sample(1, -1) + 2.0 * sample(1, 0) + sample(1, 1)) -
                    (sample(-1, -1) + 2.0 * sample(-1, 0) + sample(-1, 1));
  const double gy = (sample(-1, 1) + 2.0 * sample(0, 1) + sample(1, 1)) -
                    (sample(-1, -1) + 2.0 * sample(0, -1) + sample(1, -1));
  return std::sqrt(gx * gx + gy * gy);
}

}  // namespace detail

// 0 where the Sobel gradient magnitude of `disparity` exceeds alpha, 1
// elsewhere. Borders use replicate padding.
inline Mask DiscontinuityMask(const DisparityMap& disparity, double alpha) {
  Mask out(disparity.width(), disparity.height(), 1);
  for (int y = 0; y < disparity.height(); ++y) {
    for (int x = 0; x < disparity.width(); ++x) {
      const double g = detail::SobelMagnitude(
          [&](int dx, int dy) { return disparity.AtClamped(x + dx, y + dy); });
      if (g > alpha) out(x, y) = 0;
    }
  }
  return out;
}

// Same as above, restricted to valid pixels: invalid neighbors take the
// center value (so holes do not register as edges) and invalid pixels are 0.
inline Mask DiscontinuityMask(const DisparityMap& disparity, const Mask& valid,
                              double alpha) {
  RequireSameShape(disparity, valid, "discontinuity mask");
  Mask out(disparity.width(), disparity.height(), 0);
  for (int y = 0; y < disparity.height(); ++y) {
    for (int x = 0; x < disparity.width(); ++x) {
      if (!valid(x, y)) continue;
      const double center = disparity(x, y);
      const double g = detail::SobelMagnitude([&](int dx, int dy) {
        const int nx = std::clamp(x + dx, 0, disparity.width() - 1);
        const int ny = std::clamp(y + dy, 0, disparity.height() - 1);
        return valid(nx, ny) ? disparity(nx, ny) : center;
      });
      if (!(g > alpha)) out(x, y) = 1;
    }
  }
  return out;
}

struct MeshVertex {
  Vec3 position = Vec3::Zero();
  Color color = Color::Zero();
  double mask = 0.0;
};

struct TriangleMesh {
  std::vector<MeshVertex> vertices;
  std::vector<std::array<int, 3>> triangles;
};

// Mesh vertex validity mask of a frame: its own mask combined with the
// discontinuity mask of its disparity.
inline Mask MeshMask(const Frame& frame, const RendererConfig& cfg) {
  double max_d = 0.0;
  for (std::size_t i = 0; i < frame.mask.size(); ++i) {
    if (frame.mask[i]) max_d = std::max(max_d, frame.disparity[i]);
  }
  if (!cfg.normalize_disparity || max_d <= 0.0) {
    return DiscontinuityMask(frame.disparity, frame.mask, cfg.alpha);
  }
  DisparityMap normalized = frame.disparity;
  for (double& d : normalized.values()) d /= max_d;
  return DiscontinuityMask(normalized, frame.mask, cfg.alpha);
}

namespace detail {

inline void CheckMeshable(const Frame& frame) {
  RequireSameShape(frame.rgb, frame.disparity, "frame rgb/disparity");
  RequireSameShape(frame.rgb, frame.mask, "frame rgb/mask");
  for (std::size_t i = 0; i < frame.mask.size(); ++i) {
    if (frame.mask[i] && !(frame.disparity[i] > 0.0)) {
      throw Error(Errc::kNonPositiveDisparity,
                  "valid pixel " + std::to_string(i) + " has disparity <= 0");
    }
  }
}

// Quad (x, y) is split along its top-left -> bottom-right diagonal.
template <typename Emit>
void ForEachGridTriangle(int width, int height, const Mask& valid, Emit&& emit) {
  for (int y = 0; y + 1 < height; ++y) {
    for (int x = 0; x + 1 < width; ++x) {
      const int tl = y * width + x;
      const int tr = tl + 1;
      const int bl = tl + width;
      const int br = bl + 1;
      if (valid[tl] && valid[tr] && valid[br]) emit(std::array<int, 3>{tl, tr, br});
      if (valid[tl] && valid[br] && valid[bl]) emit(std::array<int, 3>{tl, br, bl});
    }
  }
}

}  // namespace detail

// One vertex per pixel, unprojected into the frame's camera coordinates.
// Triangles touching a pixel outside the frame's own mask are omitted, so a
// fully valid HxW frame yields exactly 2 (H-1)(W-1) triangles.
inline TriangleMesh BuildMesh(const Frame& frame,
                              const RendererConfig& cfg = RendererConfig()) {
  detail::CheckMeshable(frame);
  const Mask vertex_mask = MeshMask(frame, cfg);
  const int w = frame.width();
  const int h = frame.height();
  TriangleMesh mesh;
  mesh.vertices.resize(frame.mask.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      MeshVertex& v = mesh.vertices[static_cast<std::size_t>(y) * w + x];
      if (!frame.mask(x, y)) continue;
      v.position = Unproject(frame.intrinsics, x, y, frame.disparity(x, y));
      v.color = frame.rgb(x, y);
      v.mask = vertex_mask(x, y);
    }
  }
  mesh.triangles.reserve(static_cast<std::size_t>(std::max(0, w - 1)) *
                         std::max(0, h - 1) * 2);
  detail::ForEachGridTriangle(w, h, frame.mask, [&](const std::array<int, 3>& t) {
    mesh.triangles.push_back(t);
  });
  return mesh;
}

namespace detail {

struct ScreenVertex {
  double x = 0.0;
  double y = 0.0;
  double inv_depth = 0.0;
  Color color = Color::Zero();
  double mask = 0.0;
};

// Z-buffered accumulation target. Fragments replace the stored one only when
// strictly closer, so among equal depths the earliest triangle wins.
class Framebuffer {
 public:
  Framebuffer(int width, int height)
      : width_(width),
        height_(height),
        inv_depth_(width, height, 0.0),
        color_(width, height, Color::Zero()),
        mask_(width, height, 0.0) {}

  void Draw(const ScreenVertex& a, const ScreenVertex& b, const ScreenVertex& c) {
    const double area = Edge(a, b, c.x, c.y);
    if (area == 0.0 || !std::isfinite(area)) return;
    const double min_x = std::min({a.x, b.x, c.x});
    const double max_x = std::max({a.x, b.x, c.x});
    const double min_y = std::min({a.y, b.y, c.y});
    const double max_y = std::max({a.y, b.y, c.y});
    const int x0 = std::max(0, static_cast<int>(std::ceil(min_x)));
    const int x1 = std::min(width_ - 1, static_cast<int>(std::floor(max_x)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(min_y)));
    const int y1 = std::min(height_ - 1, static_cast<int>(std::floor(max_y)));
    for (int py = y0; py <= y1; ++py) {
      for (int px = x0; px <= x1; ++px) {
        // Edge values opposite each vertex; all share the sign of `area`
        // inside the triangle and are exactly zero on its edges.
        double wa = Edge(b, c, px, py);
        double wb = Edge(c, a, px, py);
        double wc = Edge(a, b, px, py);
        if (area < 0.0) {
          wa = -wa;
          wb = -wb;
          wc = -wc;
        }
        if (wa < 0.0 || wb < 0.0 || wc < 0.0) continue;
        const double sum = wa + wb + wc;
        const double ba = wa / sum;
        const double bb = wb / sum;
        const double bc = wc / sum;
        // Inverse depth is affine in screen space.
        const double inv_depth = ba * a.inv_depth + bb * b.inv_depth + bc * c.inv_depth;
        if (!(inv_depth > inv_depth_(px, py))) continue;
        const double pa = ba * a.inv_depth / inv_depth;
        const double pb = bb * b.inv_depth / inv_depth;
        const double pc = bc * c.inv_depth / inv_depth;
        inv_depth_(px, py) = inv_depth;
        color_(px, py) = pa * a.color + pb * b.color + pc * c.color;
        mask_(px, py) = pa * a.mask + pb * b.mask + pc * c.mask;
      }
    }
  }

  RenderOutput Resolve() const {
    RenderOutput out{Image(width_, height_, Color::Zero()),
                     DisparityMap(width_, height_, 0.0), Mask(width_, height_, 0)};
    for (std::size_t i = 0; i < out.mask.size(); ++i) {
      if (inv_depth_[i] > 0.0 && mask_[i] >= 0.5) {
        out.mask[i] = 1;
        out.rgb[i] = color_[i];
        out.disparity[i] = inv_depth_[i];
      }
    }
    return out;
  }

 private:
  static double Edge(const ScreenVertex& p, const ScreenVertex& q, double x, double y) {
    return (q.x - p.x) * (y - p.y) - (q.y - p.y) * (x - p.x);
  }

  int width_;
  int height_;
  Grid<double> inv_depth_;
  Grid<Color> color_;
  Grid<double> mask_;
};

inline ScreenVertex ToScreen(const Intrinsics& k, const MeshVertex& v) {
  const Projection p = Project(k, v.position);
  return {p.u, p.v, 1.0 / p.depth, v.color, v.mask};
}

inline MeshVertex Lerp(const MeshVertex& a, const MeshVertex& b, double t) {
  return {a.position + t * (b.position - a.position), a.color + t * (b.color - a.color),
          a.mask + t * (b.mask - a.mask)};
}

// Clips a camera-space triangle against z = near and draws the pieces.
inline void ClipAndDraw(Framebuffer& fb, const Intrinsics& k, double near,
                        const std::array<MeshVertex, 3>& tri) {
  std::array<MeshVertex, 4> poly;
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const MeshVertex& cur = tri[i];
    const MeshVertex& nxt = tri[(i + 1) % 3];
    const bool cur_in = cur.position.z() >= near;
    const bool nxt_in = nxt.position.z() >= near;
    if (cur_in) poly[n++] = cur;
    if (cur_in != nxt_in) {
      const double t = (near - cur.position.z()) / (nxt.position.z() - cur.position.z());
      MeshVertex cut = Lerp(cur, nxt, t);
      cut.position.z() = near;
      poly[n++] = cut;
    }
  }
  if (n < 3) return;
  const ScreenVertex s0 = ToScreen(k, poly[0]);
  ScreenVertex prev = ToScreen(k, poly[1]);
  for (int i = 2; i < n; ++i) {
    const ScreenVertex cur = ToScreen(k, poly[i]);
    fb.Draw(s0, prev, cur);
    prev = cur;
  }
}

}  // namespace detail

// Rasterizes a mesh whose vertices are already in the target camera's
// coordinates. Output color and disparity are zero wherever the output mask
// is zero; the mask is the interpolated vertex mask thresholded at 0.5.
inline RenderOutput Rasterize(const TriangleMesh& camera_mesh, const Intrinsics& k,
                              const RendererConfig& cfg = RendererConfig()) {
  cfg.Validate();
  k.Validate();
  detail::Framebuffer fb(k.width, k.height);
  for (const auto& t : camera_mesh.triangles) {
    detail::ClipAndDraw(fb, k, cfg.near_plane,
                        {camera_mesh.vertices[t[0]], camera_mesh.vertices[t[1]],
                         camera_mesh.vertices[t[2]]});
  }
  return fb.Resolve();
}

// Renders a world-space mesh through a world-to-camera pose.
inline RenderOutput RenderMesh(const TriangleMesh& world_mesh, const Pose& pose,
                               const Intrinsics& k,
                               const RendererConfig& cfg = RendererConfig()) {
  TriangleMesh cam = world_mesh;
  for (MeshVertex& v : cam.vertices) v.position = pose.Apply(v.position);
  return Rasterize(cam, k, cfg);
}

// Warps a frame into a new camera. When the target camera is the source
// camera, vertices land exactly on their own pixel centers and the output
// reproduces the input bit-for-bit on every surviving pixel.
inline RenderOutput Render(const Frame& frame, const Pose& dst_pose,
                           const Intrinsics& dst_k,
                           const RendererConfig& cfg = RendererConfig()) {
  cfg.Validate();
  dst_pose.Validate();
  dst_k.Validate();
  TriangleMesh mesh = BuildMesh(frame, cfg);
  if (dst_pose == frame.pose && dst_k == frame.intrinsics) {
    detail::Framebuffer fb(dst_k.width, dst_k.height);
    const int w = frame.width();
    std::vector<detail::ScreenVertex> screen(mesh.vertices.size());
    for (std::size_t i = 0; i < screen.size(); ++i) {
      const MeshVertex& v = mesh.vertices[i];
      screen[i] = {static_cast<double>(static_cast<int>(i) % w),
                   static_cast<double>(static_cast<int>(i) / w), frame.disparity[i],
                   v.color, v.mask};
    }
    for (const auto& t : mesh.triangles) fb.Draw(screen[t[0]], screen[t[1]], screen[t[2]]);
    return fb.Resolve();
  }
  const Pose rel = RelativeTransform(frame.pose, dst_pose);
  for (MeshVertex& v : mesh.vertices) v.position = rel.Apply(v.position);
  return Rasterize(mesh, dst_k, cfg);
}

}  // namespace pvg

#endif  // PVG_RENDERER_HPP_
