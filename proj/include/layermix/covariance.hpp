// Copyright 2026 The LayerMix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "layermix/image.hpp"
#include "layermix/pipeline.hpp"
#include "layermix/sampling.hpp"
#include "layermix/transforms.hpp"

namespace layermix {

/// First and second moments of one transform's output at each stage.
struct TransformMoments {
  std::string name;
  double probability = 0.0;
  std::vector<double> mu;
  std::vector<double> sigma;
};

/// Mixture of per-transform stage moments.
struct TransformStats {
  std::vector<TransformMoments> transforms;

  std::size_t stages() const { return transforms.empty() ? 0 : transforms.front().mu.size(); }
  /// Throws ParameterError on empty input, mismatched mu/sigma lengths,
  /// negative sigma, or probabilities that do not sum to 1.
  void validate() const;

  static TransformStats from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

/// Stage auto-covariance when one transform is drawn per call and shared by
/// every stage:
///   K_ii = E_k[sigma_ki^2] + E_k[mu_ki^2] - E_k[mu_ki]^2
///   K_ij = E_k[mu_ki mu_kj] - E_k[mu_ki] E_k[mu_kj]
Eigen::MatrixXd analytic_autocovariance(const TransformStats& stats);

/// Same marginal variances but zero cross-stage covariance: every stage
/// redraws its transform independently.
Eigen::MatrixXd analytic_autocovariance_iid(const TransformStats& stats);

Eigen::MatrixXd analytic_reference(PipelineStructure structure, const TransformStats& stats);

/// Monte-Carlo estimate from the scalar generative process: pick k (once per
/// trial for LayerMix, once per stage for Iid), then draw each stage from
/// N(mu_ki, sigma_ki^2). Uses the unbiased (n - 1) estimator.
///
/// Trials are processed in fixed-size chunks, chunk c on rng.split(c), and
/// the chunk summaries are merged in chunk order, so the result is the same
/// for any `workers`.
Eigen::MatrixXd empirical_autocovariance(PipelineStructure structure, const TransformStats& stats,
                                         std::size_t n, const RngStream& rng, unsigned workers = 1);

/// Unbiased sample covariance of the rows of `samples` (one trial per row).
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& samples);

struct CovarianceReport {
  PipelineStructure structure = PipelineStructure::LayerMix;
  Eigen::MatrixXd analytic;
  Eigen::MatrixXd empirical;
  double max_abs_deviation = 0.0;
  std::size_t n_samples = 0;

  nlohmann::json to_json() const;
};

CovarianceReport covariance_report(PipelineStructure structure, const TransformStats& stats,
                                   std::size_t n, const RngStream& rng, unsigned workers = 1);

bool is_symmetric(const Eigen::MatrixXd& m, double tol);
/// Smallest eigenvalue >= -tol.
bool is_positive_semidefinite(const Eigen::MatrixXd& m, double tol);

using ImageStatistic = std::function<double(const Image&)>;
double mean_intensity(const Image& img);

struct StageMoments {
  std::vector<double> mu;
  std::vector<double> sigma;
};

/// Applies the transform `n` times to each stage's input image (fresh level
/// draws) and reports the sample mean and standard deviation of `statistic`.
/// Requires n >= 100.
StageMoments estimate_transform_stats(std::span<const Image> stage_inputs,
                                      const TransformDescriptor& desc, int magnitude,
                                      const ImageStatistic& statistic, std::size_t n,
                                      RngStream& rng);

}  // namespace layermix
