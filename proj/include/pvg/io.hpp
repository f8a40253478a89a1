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

#ifndef PVG_IO_HPP_
#define PVG_IO_HPP_

// File formats:
//   - RGB images: 8-bit PNG.
//   - Masks: 8-bit grayscale PNG holding 0 or 255.
//   - Disparity: single-channel little-endian PFM ("Pf", scale -1.0).
//   - Trajectories: one camera per line, 19 fields
//       frame_id fx fy cx cy 0 0 r00 r01 r02 t0 r10 r11 r12 t1 r20 r21 r22 t2
//     with intrinsics normalized by image width/height and a world-to-camera
//     3x4 matrix.
//   - Keypoints: JSON {"points": [[x, y, z], ...]}.
//   - Embeddings: one line of JSON {"n": N, "m": M}, then N*M little-endian
//     float32 values, row-major.
//   - Gaussian statistics: JSON {"mu": [...], "sigma": [[...], ...]}.

#include <png.h>

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pvg/alignment.hpp"
#include "pvg/error.hpp"
#include "pvg/geometry.hpp"
#include "pvg/image.hpp"
#include "pvg/metrics.hpp"

namespace pvg::io {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "PFM and embedding I/O assume a little-endian host");

namespace detail {

inline std::uint8_t ToByte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

inline std::vector<std::uint8_t> ReadPngRaw(const fs::path& path, png_uint_32 format,
                                            int& width, int& height) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw Error(Errc::kIoError, path.string() + ": " + image.message);
  }
  image.format = format;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(Errc::kIoError, path.string() + ": " + image.message);
  }
  width = static_cast<int>(image.width);
  height = static_cast<int>(image.height);
  return buffer;
}

inline void WritePngRaw(const fs::path& path, png_uint_32 format, int width, int height,
                        const std::vector<std::uint8_t>& buffer) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, buffer.data(), 0,
                               nullptr)) {
    throw Error(Errc::kIoError, path.string() + ": " + image.message);
  }
}

inline std::string FormatDouble(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline double ParseDouble(const std::string& token, const std::string& where) {
  double v = 0.0;
  const auto r = std::from_chars(token.data(), token.data() + token.size(), v);
  if (r.ec != std::errc() || r.ptr != token.data() + token.size()) {
    throw Error(Errc::kParseError, where + ": bad number '" + token + "'");
  }
  return v;
}

inline std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json ReadJson(const fs::path& path) {
  try {
    return nlohmann::json::parse(ReadText(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseError, path.string() + ": " + e.what());
  }
}

inline void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::kIoError, "write failed for " + path.string());
}

}  // namespace detail

inline Image ReadRgbPng(const fs::path& path) {
  int w = 0;
  int h = 0;
  const auto buf = detail::ReadPngRaw(path, PNG_FORMAT_RGB, w, h);
  Image out(w, h);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = Color(buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]) / 255.0;
  }
  return out;
}

inline void WriteRgbPng(const fs::path& path, const Image& image) {
  std::vector<std::uint8_t> buf(image.size() * 3);
  for (std::size_t i = 0; i < image.size(); ++i) {
    for (int c = 0; c < 3; ++c) buf[3 * i + c] = detail::ToByte(image[i][c]);
  }
  detail::WritePngRaw(path, PNG_FORMAT_RGB, image.width(), image.height(), buf);
}

inline Mask ReadMaskPng(const fs::path& path) {
  int w = 0;
  int h = 0;
  const auto buf = detail::ReadPngRaw(path, PNG_FORMAT_GRAY, w, h);
  Mask out(w, h);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[i] >= 128 ? 1 : 0;
  return out;
}

inline void WriteMaskPng(const fs::path& path, const Mask& mask) {
  std::vector<std::uint8_t> buf(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) buf[i] = mask[i] ? 255 : 0;
  detail::WritePngRaw(path, PNG_FORMAT_GRAY, mask.width(), mask.height(), buf);
}

// PFM stores rows bottom to top.
inline void WritePfm(const fs::path& path, const DisparityMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  out << "Pf\n" << map.width() << " " << map.height() << "\n-1.0\n";
  std::vector<float> row(static_cast<std::size_t>(map.width()));
  for (int y = map.height() - 1; y >= 0; --y) {
    for (int x = 0; x < map.width(); ++x) row[x] = static_cast<float>(map(x, y));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw Error(Errc::kIoError, "write failed for " + path.string());
}

inline DisparityMap ReadPfm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  std::string magic;
  int w = 0;
  int h = 0;
  double scale = 0.0;
  in >> magic >> w >> h >> scale;
  in.get();
  if (!in || magic != "Pf" || w <= 0 || h <= 0 || scale == 0.0) {
    throw Error(Errc::kParseError, path.string() + ": not a single-channel PFM");
  }
  const bool little = scale < 0.0;
  DisparityMap out(w, h);
  std::vector<std::uint32_t> row(static_cast<std::size_t>(w));
  for (int y = h - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(std::uint32_t)));
    if (!in) throw Error(Errc::kParseError, path.string() + ": truncated PFM");
    for (int x = 0; x < w; ++x) {
      std::uint32_t bits = row[x];
      if (!little) bits = __builtin_bswap32(bits);
      out(x, y) = static_cast<double>(std::bit_cast<float>(bits));
    }
  }
  return out;
}

// Reads a trajectory file. Normalized intrinsics are converted to pixels with
// the given image size. Blank lines, '#' comments and a leading single-token
// line (a source URL) are skipped.
inline Trajectory ReadTrajectory(const fs::path& path, int width, int height) {
  std::istringstream in(detail::ReadText(path));
  std::vector<TrajectoryEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok.size() == 1 && entries.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (tok.size() != 19) {
      throw Error(Errc::kParseError,
                  where + ": expected 19 fields, got " + std::to_string(tok.size()));
    }
    std::array<double, 19> v{};
    for (int i = 0; i < 19; ++i) v[i] = detail::ParseDouble(tok[i], where);
    if (v[5] != 0.0 || v[6] != 0.0) {
      throw Error(Errc::kParseError, where + ": distortion slots must be zero");
    }
    TrajectoryEntry e;
    e.frame_id = static_cast<long long>(v[0]);
    if (static_cast<double>(e.frame_id) != v[0]) {
      throw Error(Errc::kParseError, where + ": frame id is not an integer");
    }
    e.intrinsics = {v[1] * width, v[2] * height, v[3] * width, v[4] * height, width,
                    height};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) e.pose.rotation(r, c) = v[7 + 4 * r + c];
      e.pose.translation(r) = v[7 + 4 * r + 3];
    }
    entries.push_back(e);
  }
  try {
    return Trajectory(std::move(entries));
  } catch (const Error& e) {
    throw Error(Errc::kParseError, path.string() + ": " + e.what());
  }
}

inline std::string FormatTrajectoryLine(const TrajectoryEntry& e) {
  const Intrinsics& k = e.intrinsics;
  std::string s = std::to_string(e.frame_id);
  auto add = [&](double v) {
    s += ' ';
    s += detail::FormatDouble(v);
  };
  add(k.fx / k.width);
  add(k.fy / k.height);
  add(k.cx / k.width);
  add(k.cy / k.height);
  s += " 0 0";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) add(e.pose.rotation(r, c));
    add(e.pose.translation(r));
  }
  return s;
}

inline void WriteTrajectory(const fs::path& path, const Trajectory& traj) {
  std::string text;
  for (const auto& e : traj) text += FormatTrajectoryLine(e) + "\n";
  detail::WriteText(path, text);
}

inline KeypointSet ReadKeypoints(const fs::path& path) {
  const nlohmann::json j = detail::ReadJson(path);
  KeypointSet out;
  try {
    for (const auto& p : j.at("points")) {
      if (p.size() != 3) throw Error(Errc::kParseError, "point must have 3 coordinates");
      out.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseError, path.string() + ": " + e.what());
  }
  return out;
}

inline void WriteKeypoints(const fs::path& path, const KeypointSet& points) {
  nlohmann::json j;
  j["points"] = nlohmann::json::array();
  for (const Vec3& p : points) j["points"].push_back({p.x(), p.y(), p.z()});
  detail::WriteText(path, j.dump() + "\n");
}

inline EmbeddingSequence ReadEmbeddings(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  long long n = 0;
  long long m = 0;
  try {
    const auto j = nlohmann::json::parse(header);
    n = j.at("n").get<long long>();
    m = j.at("m").get<long long>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseError, path.string() + ": bad header: " + e.what());
  }
  if (n < 0 || m < 1) throw Error(Errc::kParseError, path.string() + ": bad n/m");
  std::vector<float> payload(static_cast<std::size_t>(n * m));
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size() * sizeof(float)));
  if (!in) throw Error(Errc::kParseError, path.string() + ": truncated payload");
  EmbeddingSequence e(n, m);
  for (long long r = 0; r < n; ++r) {
    for (long long c = 0; c < m; ++c) e(r, c) = payload[r * m + c];
  }
  return e;
}

inline void WriteEmbeddings(const fs::path& path, const EmbeddingSequence& e) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  out << nlohmann::json{{"n", e.rows()}, {"m", e.cols()}}.dump() << "\n";
  for (Eigen::Index r = 0; r < e.rows(); ++r) {
    for (Eigen::Index c = 0; c < e.cols(); ++c) {
      const float v = static_cast<float>(e(r, c));
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
  if (!out) throw Error(Errc::kIoError, "write failed for " + path.string());
}

inline GaussianStats ReadStats(const fs::path& path) {
  const nlohmann::json j = detail::ReadJson(path);
  GaussianStats s;
  try {
    const auto mu = j.at("mu").get<std::vector<double>>();
    const auto sigma = j.at("sigma").get<std::vector<std::vector<double>>>();
    const auto m = static_cast<Eigen::Index>(mu.size());
    s.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), m);
    if (static_cast<Eigen::Index>(sigma.size()) != m) {
      throw Error(Errc::kDimensionMismatch, path.string() + ": sigma rows != len(mu)");
    }
    s.sigma.resize(m, m);
    for (Eigen::Index r = 0; r < m; ++r) {
      if (static_cast<Eigen::Index>(sigma[r].size()) != m) {
        throw Error(Errc::kDimensionMismatch, path.string() + ": sigma is not square");
      }
      for (Eigen::Index c = 0; c < m; ++c) s.sigma(r, c) = sigma[r][c];
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseError, path.string() + ": " + e.what());
  }
  return s;
}

inline void WriteStats(const fs::path& path, const GaussianStats& s) {
  nlohmann::json j;
  j["mu"] = std::vector<double>(s.mu.data(), s.mu.data() + s.mu.size());
  j["sigma"] = nlohmann::json::array();
  for (Eigen::Index r = 0; r < s.sigma.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(s.sigma.cols()));
    for (Eigen::Index c = 0; c < s.sigma.cols(); ++c) row[c] = s.sigma(r, c);
    j["sigma"].push_back(row);
  }
  detail::WriteText(path, j.dump() + "\n");
}

}  // namespace pvg::io

#endif  // PVG_IO_HPP_
