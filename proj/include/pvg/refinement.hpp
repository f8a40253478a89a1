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

#ifndef PVG_REFINEMENT_HPP_
#define PVG_REFINEMENT_HPP_

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "pvg/error.hpp"
#include "pvg/image.hpp"
#include "pvg/io.hpp"

namespace pvg {

struct RefineResult {
  Image rgb;
  DisparityMap disparity;
};

// Fills the masked-out regions of a rendered view. Implementations must
// return maps of the input size with positive disparity everywhere and rgb in
// [0, 1]; the passthrough refiner is the one documented exception.
class Refiner {
 public:
  virtual ~Refiner() = default;
  virtual RefineResult Refine(const Image& rgb, const DisparityMap& disparity,
                              const Mask& mask) const = 0;
  virtual std::string Name() const = 0;
};

inline RefineResult RefinePassthrough(const Image& rgb, const DisparityMap& disparity,
                                      const Mask& /*mask*/) {
  return {rgb, disparity};
}

struct InpaintConfig {
  int max_iterations = 2000;
  // Stop once no pixel changes by more than this in one sweep.
  double convergence_tol = 1e-6;

  void Validate() const {
    if (max_iterations < 1) throw Error(Errc::kInvalidArgument, "max_iterations < 1");
    if (!(convergence_tol > 0.0)) {
      throw Error(Errc::kInvalidArgument, "convergence_tol must be positive");
    }
  }
};

namespace detail {

using Channels = std::array<double, 4>;  // r, g, b, log disparity

inline constexpr std::array<std::array<int, 2>, 4> kFourNeighbors = {
    {{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};

// Harmonic fill of the unknown pixels of `values` with Neumann borders.
// Unknown pixels are first seeded layer by layer from known neighbors, then
// relaxed with Gauss-Seidel sweeps in raster order.
inline void HarmonicFill(Grid<Channels>& values, const Mask& known,
                         const InpaintConfig& cfg) {
  const int w = values.width();
  const int h = values.height();
  Mask filled = known;
  std::vector<int> holes;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!known(x, y)) holes.push_back(y * w + x);
    }
  }
  std::vector<int> frontier;
  std::size_t remaining = holes.size();
  while (remaining > 0) {
    frontier.clear();
    for (int i : holes) {
      if (filled[i]) continue;
      const int x = i % w;
      const int y = i / w;
      for (const auto& [dx, dy] : kFourNeighbors) {
        if (filled.Contains(x + dx, y + dy) && filled(x + dx, y + dy)) {
          frontier.push_back(i);
          break;
        }
      }
    }
    if (frontier.empty()) break;
    for (int i : frontier) {
      const int x = i % w;
      const int y = i / w;
      Channels sum{};
      int count = 0;
      for (const auto& [dx, dy] : kFourNeighbors) {
        if (!filled.Contains(x + dx, y + dy) || !filled(x + dx, y + dy)) continue;
        const Channels& n = values(x + dx, y + dy);
        for (int c = 0; c < 4; ++c) sum[c] += n[c];
        ++count;
      }
      for (int c = 0; c < 4; ++c) values[i][c] = sum[c] / count;
    }
    for (int i : frontier) filled[i] = 1;
    remaining -= frontier.size();
  }

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    double max_change = 0.0;
    for (int i : holes) {
      const int x = i % w;
      const int y = i / w;
      Channels sum{};
      int count = 0;
      for (const auto& [dx, dy] : kFourNeighbors) {
        if (!values.Contains(x + dx, y + dy)) continue;
        const Channels& n = values(x + dx, y + dy);
        for (int c = 0; c < 4; ++c) sum[c] += n[c];
        ++count;
      }
      for (int c = 0; c < 4; ++c) {
        const double v = sum[c] / count;
        max_change = std::max(max_change, std::abs(v - values[i][c]));
        values[i][c] = v;
      }
    }
    if (max_change < cfg.convergence_tol) break;
  }
}

}  // namespace detail

// Keeps mask=1 pixels bit-exact and fills the rest by harmonic diffusion.
// Disparity is diffused in log space and exponentiated, so it stays positive.
inline RefineResult RefineInpaint(const Image& rgb, const DisparityMap& disparity,
                                  const Mask& mask, const InpaintConfig& cfg = {}) {
  cfg.Validate();
  RequireSameShape(rgb, disparity, "inpaint rgb/disparity");
  RequireSameShape(rgb, mask, "inpaint rgb/mask");
  if (CountValid(mask) == 0) throw Error(Errc::kAllMasked, "no valid source pixels");
  if (CountValid(mask) == mask.size()) return {rgb, disparity};

  Grid<detail::Channels> values(rgb.width(), rgb.height());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    if (!(disparity[i] > 0.0)) {
      throw Error(Errc::kNonPositiveDisparity, "valid pixel with disparity <= 0");
    }
    values[i] = {rgb[i].x(), rgb[i].y(), rgb[i].z(), std::log(disparity[i])};
  }
  detail::HarmonicFill(values, mask, cfg);

  RefineResult out{rgb, disparity};
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) continue;
    out.rgb[i] = Color(values[i][0], values[i][1], values[i][2]);
    out.disparity[i] = std::exp(values[i][3]);
  }
  return out;
}

struct ExternalRefinerConfig {
  // Shell command; the exchange directory is appended as its last argument.
  std::string command;
  // Exchange directory. Empty means a fresh temporary directory per call,
  // removed afterwards.
  std::filesystem::path exchange_dir;
  // Require mask=1 pixels to come back unchanged (at exchange precision).
  bool strict = true;
};

namespace detail {

inline std::string ShellQuote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

inline std::filesystem::path MakeTempDir() {
  std::string templ =
      (std::filesystem::temp_directory_path() / "pvg-refine-XXXXXX").string();
  if (mkdtemp(templ.data()) == nullptr) {
    throw Error(Errc::kIoError, "cannot create temporary exchange directory");
  }
  return templ;
}

}  // namespace detail

// Checks the refiner output contract. With `strict`, mask=1 pixels must equal
// `reference` exactly.
inline void ValidateRefinerOutput(const RefineResult& out, const Mask& mask,
                                  const RefineResult* reference) {
  RequireSameShape(out.rgb, mask, "refined rgb");
  RequireSameShape(out.disparity, mask, "refined disparity");
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double d = out.disparity[i];
    if (!std::isfinite(d) || !(d > 0.0)) {
      throw Error(Errc::kContractViolation,
                  "refined disparity not positive at pixel " + std::to_string(i));
    }
    if (!out.rgb[i].allFinite() || out.rgb[i].minCoeff() < 0.0 ||
        out.rgb[i].maxCoeff() > 1.0) {
      throw Error(Errc::kContractViolation,
                  "refined rgb outside [0, 1] at pixel " + std::to_string(i));
    }
    if (reference != nullptr && mask[i] &&
        (out.rgb[i] != reference->rgb[i] || d != reference->disparity[i])) {
      throw Error(Errc::kContractViolation,
                  "valid pixel " + std::to_string(i) + " was modified");
    }
  }
}

// Exchanges rgb.png, disparity.pfm and mask.png with an external program and
// reads back refined.png and refined_disparity.pfm. Calls sharing an
// exchange directory must not run concurrently.
inline RefineResult RefineExternal(const Image& rgb, const DisparityMap& disparity,
                                   const Mask& mask, const ExternalRefinerConfig& cfg) {
  namespace fs = std::filesystem;
  RequireSameShape(rgb, disparity, "external rgb/disparity");
  RequireSameShape(rgb, mask, "external rgb/mask");
  if (cfg.command.empty()) {
    throw Error(Errc::kInvalidArgument, "external refiner command is empty");
  }
  const bool temporary = cfg.exchange_dir.empty();
  const fs::path dir = temporary ? detail::MakeTempDir() : cfg.exchange_dir;
  struct Cleanup {
    fs::path dir;
    bool active;
    ~Cleanup() {
      std::error_code ec;
      if (active) fs::remove_all(dir, ec);
    }
  } cleanup{dir, temporary};

  fs::create_directories(dir);
  fs::remove(dir / "refined.png");
  fs::remove(dir / "refined_disparity.pfm");
  io::WriteRgbPng(dir / "rgb.png", rgb);
  io::WritePfm(dir / "disparity.pfm", disparity);
  io::WriteMaskPng(dir / "mask.png", mask);

  const std::string cmd = cfg.command + " " + detail::ShellQuote(dir.string());
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(Errc::kExternalFailure,
                "'" + cfg.command + "' exited with status " +
                    std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : status));
  }
  if (!fs::exists(dir / "refined.png") || !fs::exists(dir / "refined_disparity.pfm")) {
    throw Error(Errc::kExternalFailure, "external refiner produced no outputs");
  }
  RefineResult out;
  try {
    out = {io::ReadRgbPng(dir / "refined.png"),
           io::ReadPfm(dir / "refined_disparity.pfm")};
  } catch (const Error& e) {
    throw Error(Errc::kExternalFailure, e.what());
  }
  if (cfg.strict) {
    // The program only ever saw the inputs at file precision.
    const RefineResult sent{QuantizeTo8Bit(rgb), QuantizeToFloat(disparity)};
    ValidateRefinerOutput(out, mask, &sent);
  } else {
    ValidateRefinerOutput(out, mask, nullptr);
  }
  return out;
}

class PassthroughRefiner final : public Refiner {
 public:
  RefineResult Refine(const Image& rgb, const DisparityMap& disparity,
                      const Mask& mask) const override {
    return RefinePassthrough(rgb, disparity, mask);
  }
  std::string Name() const override { return "passthrough"; }
};

class InpaintRefiner final : public Refiner {
 public:
  explicit InpaintRefiner(InpaintConfig cfg = {}) : cfg_(cfg) { cfg_.Validate(); }
  RefineResult Refine(const Image& rgb, const DisparityMap& disparity,
                      const Mask& mask) const override {
    return RefineInpaint(rgb, disparity, mask, cfg_);
  }
  std::string Name() const override { return "inpaint"; }

 private:
  InpaintConfig cfg_;
};

class ExternalRefiner final : public Refiner {
 public:
  explicit ExternalRefiner(ExternalRefinerConfig cfg) : cfg_(std::move(cfg)) {}
  RefineResult Refine(const Image& rgb, const DisparityMap& disparity,
                      const Mask& mask) const override {
    return RefineExternal(rgb, disparity, mask, cfg_);
  }
  std::string Name() const override { return "external"; }

 private:
  ExternalRefinerConfig cfg_;
};

}  // namespace pvg

#endif  // PVG_REFINEMENT_HPP_
