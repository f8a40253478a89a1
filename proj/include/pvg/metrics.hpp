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

#ifndef PVG_METRICS_HPP_
#define PVG_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <utility>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "pvg/error.hpp"
#include "pvg/image.hpp"

namespace pvg {

// One row per frame, one column per feature dimension.
using EmbeddingSequence = Eigen::MatrixXd;

struct GaussianStats {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;

  Eigen::Index dim() const { return mu.size(); }

  void Validate() const {
    if (mu.size() < 1) throw Error(Errc::kInvalidArgument, "empty statistics");
    if (sigma.rows() != mu.size() || sigma.cols() != mu.size()) {
      throw Error(Errc::kDimensionMismatch, "covariance shape does not match mean");
    }
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
      throw Error(Errc::kNotPSD, "covariance is not symmetric");
    }
  }
};

// Centered half-open window (t - w/2, t + w/2] over frame indices.
struct WindowSpec {
  int w = 2;
  int t = 0;

  int first() const { return t - w / 2 + 1; }
  int last() const { return t + w / 2; }
};

template <typename T>
double Mse(const Grid<T>& a, const Grid<T>& b) {
  RequireSameShape(a, b, "mse");
  if (a.empty()) throw Error(Errc::kInvalidArgument, "mse of empty images");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if constexpr (std::is_arithmetic_v<T>) {
      const double e = static_cast<double>(a[i]) - static_cast<double>(b[i]);
      sum += e * e;
      ++count;
    } else {
      sum += (a[i] - b[i]).squaredNorm();
      count += static_cast<std::size_t>(a[i].size());
    }
  }
  return sum / static_cast<double>(count);
}

// Sample mean and unbiased (n-1) covariance, symmetrized.
inline GaussianStats ComputeGaussianStats(const EmbeddingSequence& e) {
  if (e.cols() < 1) throw Error(Errc::kInvalidArgument, "embedding dimension is 0");
  if (e.rows() < 2) {
    throw Error(Errc::kTooFewSamples,
                std::to_string(e.rows()) + " embedding(s), need at least 2");
  }
  GaussianStats s;
  s.mu = e.colwise().mean().transpose();
  const Eigen::MatrixXd centered = e.rowwise() - s.mu.transpose();
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(e.rows() - 1);
  s.sigma = 0.5 * (cov + cov.transpose());
  return s;
}

namespace detail {

// Eigenvalues below this magnitude relative to the largest are noise.
inline constexpr double kEigenRelTol = 1e-10;
inline constexpr double kEigenAbsTol = 1e-8;

inline Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> CheckedEigen(
    const Eigen::MatrixXd& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) {
    throw Error(Errc::kNotPSD, std::string(what) + ": eigendecomposition failed");
  }
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  if (ev.minCoeff() < -std::max(kEigenAbsTol, kEigenRelTol * scale)) {
    throw Error(Errc::kNotPSD, std::string(what) + " has a negative eigenvalue " +
                                   std::to_string(ev.minCoeff()));
  }
  return es;
}

inline Eigen::VectorXd ClampedEigenvalues(const Eigen::VectorXd& ev) {
  return ev.cwiseMax(0.0);
}

}  // namespace detail

// Squared Frechet distance between two Gaussians:
//   |mu_a - mu_b|^2 + Tr(S_a + S_b - 2 (S_a S_b)^(1/2)).
// The trace term uses the eigenvalues of S_a^(1/2) S_b S_a^(1/2), which is
// symmetric PSD and shares its spectrum with S_a S_b.
inline double FrechetDistance(const GaussianStats& a, const GaussianStats& b) {
  a.Validate();
  b.Validate();
  if (a.dim() != b.dim()) {
    throw Error(Errc::kDimensionMismatch, "statistics dimensions " +
                                              std::to_string(a.dim()) + " vs " +
                                              std::to_string(b.dim()));
  }
  const auto es_a = detail::CheckedEigen(a.sigma, "sigma_a");
  detail::CheckedEigen(b.sigma, "sigma_b");
  const Eigen::VectorXd sqrt_ev = detail::ClampedEigenvalues(es_a.eigenvalues()).cwiseSqrt();
  const Eigen::MatrixXd sqrt_a =
      es_a.eigenvectors() * sqrt_ev.asDiagonal() * es_a.eigenvectors().transpose();
  Eigen::MatrixXd m = sqrt_a * b.sigma * sqrt_a;
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_m(m, Eigen::EigenvaluesOnly);
  const double trace_sqrt =
      detail::ClampedEigenvalues(es_m.eigenvalues()).cwiseSqrt().sum();
  const double d = (a.mu - b.mu).squaredNorm() + a.sigma.trace() + b.sigma.trace() -
                   2.0 * trace_sqrt;
  return std::max(d, 0.0);
}

// FID-w at t: Frechet distance between the statistics of embeddings in the
// window (t - w/2, t + w/2] and reference statistics.
inline double SlidingFid(const EmbeddingSequence& e, const GaussianStats& ref,
                         const WindowSpec& spec) {
  if (spec.w < 2 || spec.w % 2 != 0) {
    throw Error(Errc::kInvalidArgument, "window width must be even and >= 2");
  }
  if (spec.first() < 0 || spec.last() >= e.rows()) {
    throw Error(Errc::kWindowOutOfBounds,
                "window [" + std::to_string(spec.first()) + ", " +
                    std::to_string(spec.last()) + "] outside 0.." +
                    std::to_string(e.rows() - 1));
  }
  if (e.cols() != ref.dim()) {
    throw Error(Errc::kDimensionMismatch, "embedding dimension " +
                                              std::to_string(e.cols()) + " vs reference " +
                                              std::to_string(ref.dim()));
  }
  const GaussianStats window = ComputeGaussianStats(e.middleRows(spec.first(), spec.w));
  return FrechetDistance(window, ref);
}

// True when the window has fewer samples than needed for a full-rank
// covariance estimate.
inline bool WindowRankDeficient(const EmbeddingSequence& e, const WindowSpec& spec) {
  return spec.w < e.cols() + 1;
}

}  // namespace pvg

#endif  // PVG_METRICS_HPP_
