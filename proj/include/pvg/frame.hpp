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

#ifndef PVG_FRAME_HPP_
#define PVG_FRAME_HPP_

#include <cmath>

#include "pvg/error.hpp"
#include "pvg/geometry.hpp"
#include "pvg/image.hpp"

namespace pvg {

// The complete state carried from one generation step to the next.
struct Frame {
  Image rgb;
  DisparityMap disparity;
  Mask mask;
  Pose pose;
  Intrinsics intrinsics;

  int width() const { return rgb.width(); }
  int height() const { return rgb.height(); }

  // Checks shapes, mask values, disparity sign, and that masked-out pixels
  // carry zero color and disparity.
  void Validate() const {
    RequireSameShape(rgb, disparity, "frame rgb/disparity");
    RequireSameShape(rgb, mask, "frame rgb/mask");
    if (intrinsics.width != rgb.width() || intrinsics.height != rgb.height()) {
      throw Error(Errc::kDimensionMismatch, "frame intrinsics do not match image size");
    }
    intrinsics.Validate();
    pose.Validate();
    for (std::size_t i = 0; i < mask.size(); ++i) {
      const double d = disparity[i];
      if (!std::isfinite(d)) {
        throw Error(Errc::kInvalidArgument, "non-finite disparity");
      }
      if (mask[i] > 1) throw Error(Errc::kInvalidArgument, "mask value not 0/1");
      if (mask[i] == 1) {
        if (!(d > 0.0)) {
          throw Error(Errc::kNonPositiveDisparity, "valid pixel with disparity <= 0");
        }
      } else if (d != 0.0 || !rgb[i].isZero()) {
        throw Error(Errc::kInvalidArgument, "masked-out pixel must hold zeros");
      }
    }
  }

  // A fully valid frame from color and disparity.
  static Frame FromRgbd(Image rgb, DisparityMap disparity, const Intrinsics& k,
                        const Pose& pose = Pose::Identity()) {
    Frame f;
    f.mask = Mask(rgb.width(), rgb.height(), 1);
    f.rgb = std::move(rgb);
    f.disparity = std::move(disparity);
    f.pose = pose;
    f.intrinsics = k;
    return f;
  }
};

// Zeroes color and disparity wherever the mask is 0.
inline void ApplyMask(const Mask& mask, Image& rgb, DisparityMap& disparity) {
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == 0) {
      rgb[i].setZero();
      disparity[i] = 0.0;
    }
  }
}

}  // namespace pvg

#endif  // PVG_FRAME_HPP_
