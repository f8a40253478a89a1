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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pvg/pvg.hpp"

namespace pvg::cli {
namespace {

namespace fs = std::filesystem;

std::string Numbered(const char* stem, int i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%05d.%s", stem, i, ext);
  return buf;
}

void MakeDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::kIoError, "cannot create " + dir.string() + ": " + ec.message());
}

Intrinsics FromNormalized(const std::vector<double>& v, int width, int height) {
  return {v[0] * width, v[1] * height, v[2] * width, v[3] * height, width, height};
}

// Mask of pixels with usable (finite, positive) disparity, intersected with
// an optional user mask; masked pixels are zeroed.
Frame AssembleFrame(Image rgb, DisparityMap disparity, Mask mask, const Intrinsics& k,
                    const Pose& pose) {
  RequireSameShape(rgb, disparity, "rgb/disparity");
  RequireSameShape(rgb, mask, "rgb/mask");
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double d = disparity[i];
    if (!(std::isfinite(d) && d > 0.0)) mask[i] = 0;
  }
  ApplyMask(mask, rgb, disparity);
  Frame f{std::move(rgb), std::move(disparity), std::move(mask), pose, k};
  f.Validate();
  return f;
}

void WriteFrame(const fs::path& dir, int index, const Frame& f) {
  io::WriteRgbPng(dir / Numbered("frame", index, "png"), f.rgb);
  io::WritePfm(dir / Numbered("disparity", index, "pfm"), f.disparity);
  io::WriteMaskPng(dir / Numbered("mask", index, "png"), f.mask);
}

std::shared_ptr<const Refiner> MakeRefiner(const FlyOptions& o) {
  if (o.refiner == "passthrough") return std::make_shared<PassthroughRefiner>();
  if (o.refiner == "inpaint") {
    InpaintConfig cfg;
    cfg.max_iterations = o.inpaint_iterations;
    return std::make_shared<InpaintRefiner>(cfg);
  }
  if (o.refiner_command.empty()) {
    throw UsageError("--refiner external needs --refiner-command");
  }
  ExternalRefinerConfig cfg;
  cfg.command = o.refiner_command;
  cfg.exchange_dir = o.exchange_dir;
  cfg.strict = !o.lenient_refiner;
  return std::make_shared<ExternalRefiner>(cfg);
}

AutopilotConfig MakeAutopilot(const FlyOptions& o) {
  AutopilotConfig a;
  a.sky_threshold = o.sky_threshold;
  a.near_threshold = o.near_threshold;
  a.target_sky_fraction = o.target_sky;
  a.near_fraction_limit = o.near_limit;
  a.smoothing = o.smoothing;
  a.step_distance = o.step_distance;
  if (o.meander) {
    a.meander_amplitude = o.meander_amplitude;
    a.meander_period = o.meander_period;
    std::mt19937 rng(o.seed);
    a.meander_phase = 2.0 * std::numbers::pi * (static_cast<double>(rng()) / 4294967296.0);
  }
  a.Validate();
  return a;
}

}  // namespace

int RunFly(const FlyOptions& o) {
  if (o.autopilot == !o.trajectory.empty()) {
    throw UsageError("exactly one of --trajectory and --autopilot is required");
  }
  Image rgb = io::ReadRgbPng(o.rgb);
  DisparityMap disparity = io::ReadPfm(o.disparity);
  RequireSameShape(rgb, disparity, "rgb/disparity");
  Mask mask = o.mask.empty() ? Mask(rgb.width(), rgb.height(), 1) : io::ReadMaskPng(o.mask);
  RequireSameShape(rgb, mask, "rgb/mask");
  const int src_w = rgb.width();
  const int src_h = rgb.height();
  int w = src_w;
  int h = src_h;
  if (o.resize) {
    h = o.size[0];
    w = o.size[1];
    rgb = Resize(rgb, w, h);
    disparity = Resize(disparity, w, h);
    mask = ResizeNearest(mask, w, h);
  }

  Intrinsics k;
  Pose pose = Pose::Identity();
  Trajectory trajectory;
  if (!o.trajectory.empty()) {
    // Normalized intrinsics in the file are resolution independent.
    trajectory = io::ReadTrajectory(o.trajectory, w, h);
    if (trajectory.size() == 0) throw Error(Errc::kTrajectoryTooShort, "empty trajectory");
    k = trajectory[0].intrinsics;
    pose = trajectory[0].pose;
  } else {
    if (o.intrinsics.size() == 4) {
      k = FromNormalized(o.intrinsics, w, h);
    } else if (o.fov_degrees > 0.0) {
      k = Intrinsics::FromFov(o.fov_degrees * std::numbers::pi / 180.0, w, h);
    } else {
      throw UsageError("--autopilot needs --intrinsics or --fov");
    }
    pose = LevelPose(Vec3::Zero(), Vec3::UnitZ());
  }
  const Frame frame0 = AssembleFrame(std::move(rgb), std::move(disparity), std::move(mask), k, pose);

  EngineConfig cfg;
  cfg.steps = o.steps;
  cfg.grounding_enabled = !o.no_grounding;
  cfg.renderer.alpha = o.alpha;
  cfg.refiner = MakeRefiner(o);
  const GeneratedSequence seq = o.autopilot ? Generate(frame0, MakeAutopilot(o), cfg)
                                            : Generate(frame0, trajectory, cfg);

  const fs::path out = o.out;
  MakeDir(out);
  std::vector<TrajectoryEntry> realized;
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const Frame& f = seq.frames[i];
    WriteFrame(out, static_cast<int>(i), f);
    const long long id = o.autopilot ? static_cast<long long>(i) : trajectory[i].frame_id;
    realized.push_back({id, f.intrinsics, f.pose});
  }
  io::WriteTrajectory(out / "trajectory_out.txt", Trajectory(std::move(realized)));
  std::string csv = "step,gamma,fill_fraction\n";
  for (const StepDiagnostics& d : seq.diagnostics) {
    csv += std::to_string(d.step) + "," + io::detail::FormatDouble(d.gamma) + "," +
           io::detail::FormatDouble(d.fill_fraction) + "\n";
  }
  io::detail::WriteText(out / "diagnostics.csv", csv);
  if (seq.failure) {
    std::cerr << "stopped at step " << seq.failure->step << ": " << seq.failure->message << "\n";
    return kExitPartial;
  }
  return kExitOk;
}

int RunAlign(const AlignOptions& o) {
  const DisparityMap raw = io::ReadPfm(o.disparity);
  const KeypointSet keypoints = io::ReadKeypoints(o.keypoints);
  const Intrinsics k = FromNormalized(o.intrinsics, raw.width(), raw.height());
  const ScaleShift s = FitScaleShift(raw, keypoints, k);
  const DisparityMap aligned = ApplyScaleShift(raw, s);
  const fs::path out = o.out;
  MakeDir(out);
  io::WritePfm(out / "aligned_disparity.pfm", aligned);
  const nlohmann::json j = {{"a", s.a}, {"b", s.b}};
  io::detail::WriteText(out / "scale_shift.json", j.dump() + "\n");
  return kExitOk;
}

int RunInterp(const InterpOptions& o) {
  const fs::path in = o.input;
  std::vector<Image> rgbs;
  std::vector<DisparityMap> disparities;
  std::vector<Mask> masks;
  for (int i = 0; fs::exists(in / Numbered("frame", i, "png")); ++i) {
    rgbs.push_back(io::ReadRgbPng(in / Numbered("frame", i, "png")));
    disparities.push_back(io::ReadPfm(in / Numbered("disparity", i, "pfm")));
    const fs::path mask = in / Numbered("mask", i, "png");
    masks.push_back(fs::exists(mask) ? io::ReadMaskPng(mask)
                                     : Mask(rgbs.back().width(), rgbs.back().height(), 1));
  }
  if (rgbs.empty()) throw Error(Errc::kIoError, "no frame_00000.png in " + in.string());
  const fs::path traj_path = o.trajectory.empty() ? in / "trajectory_out.txt" : fs::path(o.trajectory);
  const Trajectory traj = io::ReadTrajectory(traj_path, rgbs[0].width(), rgbs[0].height());
  if (traj.size() < rgbs.size()) {
    throw Error(Errc::kTrajectoryTooShort, std::to_string(traj.size()) + " poses for " +
                                               std::to_string(rgbs.size()) + " frames");
  }
  std::vector<Frame> frames;
  for (std::size_t i = 0; i < rgbs.size(); ++i) {
    frames.push_back(AssembleFrame(std::move(rgbs[i]), std::move(disparities[i]),
                                   std::move(masks[i]), traj[i].intrinsics, traj[i].pose));
  }

  const fs::path out = o.out;
  MakeDir(out);
  std::vector<TrajectoryEntry> entries;
  int index = 0;
  auto emit = [&](const Frame& f) {
    WriteFrame(out, index, f);
    entries.push_back({index, f.intrinsics, f.pose});
    ++index;
  };
  for (std::size_t i = 0; i < frames.size(); ++i) {
    emit(frames[i]);
    if (i + 1 == frames.size()) break;
    for (const Frame& m : InterpolateFrames(frames[i], frames[i + 1], o.n)) emit(m);
  }
  io::WriteTrajectory(out / "trajectory_out.txt", Trajectory(std::move(entries)));
  return kExitOk;
}

int RunMetrics(const MetricsOptions& o) {
  if (o.ref.empty() == o.ref_embeddings.empty()) {
    throw UsageError("exactly one of --ref and --ref-embeddings is required");
  }
  const fs::path out = o.out;
  MakeDir(out);
  if (!o.embeddings.empty()) {
    const EmbeddingSequence e = io::ReadEmbeddings(o.embeddings);
    const GaussianStats ref = o.ref.empty()
                                  ? ComputeGaussianStats(io::ReadEmbeddings(o.ref_embeddings))
                                  : io::ReadStats(o.ref);
    std::vector<int> centers = o.t;
    if (centers.empty()) {
      for (int t = o.window / 2 - 1; t + o.window / 2 < e.rows(); ++t) centers.push_back(t);
      if (centers.empty()) {
        throw Error(Errc::kWindowOutOfBounds,
                    "sequence of " + std::to_string(e.rows()) + " is shorter than the window");
      }
    }
    std::string csv = "t,fid\n";
    for (int t : centers) {
      const WindowSpec spec{o.window, t};
      if (WindowRankDeficient(e, spec)) {
        std::cerr << "warning: window of " << o.window << " frames cannot give a full-rank "
                  << e.cols() << "-d covariance\n";
      }
      csv += std::to_string(t) + "," + io::detail::FormatDouble(SlidingFid(e, ref, spec)) + "\n";
    }
    io::detail::WriteText(out / "fid.csv", csv);
  }
  if (!o.pred_dir.empty() || !o.gt_dir.empty()) {
    if (o.pred_dir.empty() || o.gt_dir.empty()) {
      throw UsageError("--pred-dir and --gt-dir go together");
    }
    std::string csv = "frame,mse\n";
    const fs::path pred = o.pred_dir;
    const fs::path gt = o.gt_dir;
    for (int i = 0; fs::exists(pred / Numbered("frame", i, "png")); ++i) {
      const double mse = Mse(io::ReadRgbPng(pred / Numbered("frame", i, "png")),
                             io::ReadRgbPng(gt / Numbered("frame", i, "png")));
      csv += std::to_string(i) + "," + io::detail::FormatDouble(mse) + "\n";
    }
    io::detail::WriteText(out / "mse.csv", csv);
  }
  return kExitOk;
}

int RunPrep(const PrepOptions& o) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(o.frames)) {
    if (entry.path().extension() == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(Errc::kIoError, "no .png frames in " + o.frames);
  std::vector<Image> images;
  for (const fs::path& p : files) images.push_back(io::ReadRgbPng(p));
  const int w = images[0].width();
  const int h = images[0].height();
  Trajectory traj = io::ReadTrajectory(o.trajectory, w, h);
  if (traj.size() != images.size()) {
    throw Error(Errc::kDimensionMismatch, std::to_string(images.size()) + " frames vs " +
                                              std::to_string(traj.size()) + " poses");
  }

  // The crop keeps every row or column that carries content in any frame.
  LetterboxConfig lb{o.luma_threshold, o.min_band};
  CropRect rect{w, h, 0, 0};
  for (const Image& img : images) {
    RequireSameShape(img, images[0], "frame size");
    const CropRect r = DetectLetterbox(img, traj[0].intrinsics, lb).rect;
    rect = {std::min(rect.x0, r.x0), std::min(rect.y0, r.y0), std::max(rect.x1, r.x1),
            std::max(rect.y1, r.y1)};
  }

  if (!o.first_disparity.empty()) traj = ScaleNormalize(traj, io::ReadPfm(o.first_disparity));
  const std::vector<int> strides = NormalizeSpeed(traj, o.speed_range[0], o.speed_range[1]);
  std::mt19937 rng(o.seed);
  const int stride = strides[rng() % strides.size()];

  std::vector<long long> dropped;
  if (!o.drop_list.empty()) {
    std::istringstream in(io::detail::ReadText(o.drop_list));
    for (std::string tok; in >> tok;) {
      dropped.push_back(static_cast<long long>(io::detail::ParseDouble(tok, o.drop_list)));
    }
  }

  const fs::path out = o.out;
  MakeDir(out);
  std::vector<TrajectoryEntry> kept;
  int index = 0;
  for (std::size_t i = 0; i < traj.size(); i += static_cast<std::size_t>(stride)) {
    TrajectoryEntry e = traj[i];
    if (std::find(dropped.begin(), dropped.end(), e.frame_id) != dropped.end()) continue;
    e.intrinsics = CropIntrinsics(e.intrinsics, rect);
    io::WriteRgbPng(out / Numbered("frame", index++, "png"), Crop(images[i], rect));
    kept.push_back(e);
  }
  io::WriteTrajectory(out / "trajectory_out.txt", Trajectory(std::move(kept)));
  const nlohmann::json j = {{"stride", stride},
                            {"valid_strides", strides},
                            {"crop", {rect.x0, rect.y0, rect.x1, rect.y1}},
                            {"dropped", dropped}};
  io::detail::WriteText(out / "prep.json", j.dump() + "\n");
  return kExitOk;
}

}  // namespace pvg::cli
