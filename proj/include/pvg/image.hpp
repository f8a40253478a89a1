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

#ifndef PVG_IMAGE_HPP_
#define PVG_IMAGE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pvg/error.hpp"

namespace pvg {

// Dense row-major 2D array. Pixel (x, y) is column x, row y.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, const T& fill = T())
      : width_(width), height_(height) {
    if (width < 0 || height < 0) {
      throw Error(Errc::kInvalidArgument, "negative grid dimensions");
    }
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool Contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& operator()(int x, int y) {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& operator()(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  // Replicate (clamp-to-edge) access.
  const T& AtClamped(int x, int y) const {
    return (*this)(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
  }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  void Fill(const T& v) { std::fill(data_.begin(), data_.end(), v); }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

template <typename A, typename B>
bool SameShape(const Grid<A>& a, const Grid<B>& b) {
  return a.width() == b.width() && a.height() == b.height();
}

template <typename A, typename B>
void RequireSameShape(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (!SameShape(a, b)) {
    throw Error(Errc::kDimensionMismatch,
                std::string(what) + ": " + std::to_string(a.width()) + "x" +
                    std::to_string(a.height()) + " vs " +
                    std::to_string(b.width()) + "x" +
                    std::to_string(b.height()));
  }
}

// Linear RGB with channels nominally in [0, 1].
using Color = Eigen::Vector3d;
using Image = Grid<Color>;
// Inverse depth; 0 marks "no data" on masked-out pixels.
using DisparityMap = Grid<double>;
// Binary validity mask holding only 0 or 1.
using Mask = Grid<std::uint8_t>;

inline std::size_t CountValid(const Mask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.values().begin(), mask.values().end(),
                    [](std::uint8_t m) { return m != 0; }));
}

inline double Luma(const Color& c) {
  return 0.299 * c.x() + 0.587 * c.y() + 0.114 * c.z();
}

// Rounds every channel to the nearest 8-bit level, i.e. what survives a
// PNG round trip.
inline Image QuantizeTo8Bit(const Image& image) {
  Image out = image;
  for (Color& c : out.values()) {
    for (int k = 0; k < 3; ++k) {
      c[k] = std::round(std::clamp(c[k], 0.0, 1.0) * 255.0) / 255.0;
    }
  }
  return out;
}

// Rounds every value to float32, i.e. what survives a PFM round trip.
inline DisparityMap QuantizeToFloat(const DisparityMap& map) {
  DisparityMap out = map;
  for (double& d : out.values()) d = static_cast<double>(static_cast<float>(d));
  return out;
}

}  // namespace pvg

#endif  // PVG_IMAGE_HPP_
