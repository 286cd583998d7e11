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

#include "layermix/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>
#include <utility>

#include <Eigen/Eigenvalues>

namespace layermix {

void TransformStats::validate() const {
  if (transforms.empty()) throw ParameterError("transform stats: no transforms");
  const std::size_t d = transforms.front().mu.size();
  if (d == 0) throw ParameterError("transform stats: no stages");
  double total = 0.0;
  for (const auto& t : transforms) {
    if (t.mu.size() != d || t.sigma.size() != d) {
      throw ParameterError("transform stats: mu/sigma length mismatch");
    }
    for (double s : t.sigma)
      if (!(s >= 0.0)) throw ParameterError("transform stats: sigma must be non-negative");
    for (double m : t.mu)
      if (!std::isfinite(m)) throw ParameterError("transform stats: mu must be finite");
    if (!(t.probability >= 0.0)) throw ParameterError("transform stats: negative probability");
    total += t.probability;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ParameterError("transform stats: probabilities sum to " + std::to_string(total));
  }
}

TransformStats TransformStats::from_json(const nlohmann::json& doc) {
  TransformStats stats;
  try {
    for (const auto& item : doc.at("transforms")) {
      TransformMoments t;
      t.name = item.value("name", std::string{});
      t.probability = item.at("probability").get<double>();
      t.mu = item.at("mu").get<std::vector<double>>();
      t.sigma = item.at("sigma").get<std::vector<double>>();
      stats.transforms.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("transform stats: ") + e.what());
  }
  stats.validate();
  return stats;
}

nlohmann::json TransformStats::to_json() const {
  nlohmann::json doc;
  doc["transforms"] = nlohmann::json::array();
  for (const auto& t : transforms) {
    nlohmann::json item{{"probability", t.probability}, {"mu", t.mu}, {"sigma", t.sigma}};
    if (!t.name.empty()) item["name"] = t.name;
    doc["transforms"].push_back(std::move(item));
  }
  return doc;
}

Eigen::MatrixXd analytic_autocovariance(const TransformStats& stats) {
  stats.validate();
  const auto d = static_cast<Eigen::Index>(stats.stages());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(d, d);  // E_k[mu_ki mu_kj]
  Eigen::VectorXd var = Eigen::VectorXd::Zero(d);        // E_k[sigma_ki^2]
  for (const auto& t : stats.transforms) {
    const Eigen::Map<const Eigen::VectorXd> mu(t.mu.data(), d);
    const Eigen::Map<const Eigen::VectorXd> sigma(t.sigma.data(), d);
    mean += t.probability * mu;
    second += t.probability * mu * mu.transpose();
    var += t.probability * sigma.cwiseProduct(sigma);
  }
  Eigen::MatrixXd k = second - mean * mean.transpose();
  k.diagonal() += var;
  // (p mu_i) mu_j and (p mu_j) mu_i can round differently.
  return (k + k.transpose()) / 2.0;
}

Eigen::MatrixXd analytic_autocovariance_iid(const TransformStats& stats) {
  const Eigen::MatrixXd full = analytic_autocovariance(stats);
  return full.diagonal().asDiagonal();
}

Eigen::MatrixXd analytic_reference(PipelineStructure structure, const TransformStats& stats) {
  return structure == PipelineStructure::LayerMix ? analytic_autocovariance(stats)
                                                  : analytic_autocovariance_iid(stats);
}

namespace {

constexpr std::size_t kChunkTrials = 1 << 16;

// Running mean and co-moment (upper triangle during accumulation); merged
// with the pairwise update of Chan et al.
struct Moments {
  double count = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd comoment;
  Eigen::VectorXd delta;

  explicit Moments(Eigen::Index d)
      : mean(Eigen::VectorXd::Zero(d)), comoment(Eigen::MatrixXd::Zero(d, d)), delta(d) {}

  void add(const Eigen::VectorXd& x) {
    count += 1.0;
    const Eigen::Index d = mean.size();
    for (Eigen::Index i = 0; i < d; ++i) {
      delta[i] = x[i] - mean[i];
      mean[i] += delta[i] / count;
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      const double after = x[j] - mean[j];
      for (Eigen::Index i = 0; i <= j; ++i) comoment(i, j) += delta[i] * after;
    }
  }

  /// Copies the upper triangle into the lower one.
  void finish() { comoment.triangularView<Eigen::StrictlyLower>() = comoment.transpose(); }

  void merge(const Moments& other) {
    if (other.count == 0.0) return;
    if (count == 0.0) {
      *this = other;
      return;
    }
    const double total = count + other.count;
    const Eigen::VectorXd diff = other.mean - mean;
    comoment += other.comoment + diff * diff.transpose() * (count * other.count / total);
    mean += diff * (other.count / total);
    count = total;
  }
};

std::size_t pick_component(const std::vector<double>& cumulative, double u) {
  for (std::size_t k = 0; k + 1 < cumulative.size(); ++k)
    if (u < cumulative[k]) return k;
  return cumulative.size() - 1;
}

Moments simulate_chunk(PipelineStructure structure, const TransformStats& stats,
                       const std::vector<double>& cumulative, std::size_t trials, RngStream rng) {
  const auto d = static_cast<Eigen::Index>(stats.stages());
  Moments m(d);
  Eigen::VectorXd x(d);
  // Normals come in pairs; the spare carries over to the next stage or trial.
  std::optional<double> spare;
  auto normal = [&]() {
    if (spare) return *std::exchange(spare, std::nullopt);
    const auto [z0, z1] = rng.standard_normal_pair();
    spare = z1;
    return z0;
  };
  for (std::size_t t = 0; t < trials; ++t) {
    std::size_t k = pick_component(cumulative, rng.uniform());
    for (Eigen::Index i = 0; i < d; ++i) {
      if (structure == PipelineStructure::Iid && i > 0)
        k = pick_component(cumulative, rng.uniform());
      const auto& tr = stats.transforms[k];
      const auto si = static_cast<std::size_t>(i);
      x[i] = tr.mu[si] + tr.sigma[si] * normal();
    }
    m.add(x);
  }
  m.finish();
  return m;
}

}  // namespace

Eigen::MatrixXd empirical_autocovariance(PipelineStructure structure, const TransformStats& stats,
                                         std::size_t n, const RngStream& rng, unsigned workers) {
  stats.validate();
  if (n < 2) throw ParameterError("empirical covariance needs n >= 2");
  std::vector<double> cumulative;
  double running = 0.0;
  for (const auto& t : stats.transforms) cumulative.push_back(running += t.probability);

  const std::size_t chunks = (n + kChunkTrials - 1) / kChunkTrials;
  const auto d = static_cast<Eigen::Index>(stats.stages());
  std::vector<Moments> parts(chunks, Moments(d));
  auto run_chunk = [&](std::size_t c) {
    const std::size_t trials = std::min(kChunkTrials, n - c * kChunkTrials);
    parts[c] = simulate_chunk(structure, stats, cumulative, trials, rng.split(c));
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers <= 1 || chunks == 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < chunks; c += workers) run_chunk(c);
      });
    }
  }

  Moments total(d);
  for (const auto& p : parts) total.merge(p);
  Eigen::MatrixXd cov = total.comoment / (total.count - 1.0);
  // Symmetrize rounding noise from the rank-one updates.
  return (cov + cov.transpose()) / 2.0;
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& samples) {
  if (samples.rows() < 2) throw ParameterError("sample covariance needs at least two rows");
  Moments m(samples.cols());
  for (Eigen::Index r = 0; r < samples.rows(); ++r) m.add(samples.row(r).transpose());
  m.finish();
  Eigen::MatrixXd cov = m.comoment / (m.count - 1.0);
  return (cov + cov.transpose()) / 2.0;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

nlohmann::json CovarianceReport::to_json() const {
  return nlohmann::json{
      {"pipeline", structure == PipelineStructure::LayerMix ? "layermix" : "iid"},
      {"analytic", matrix_to_json(analytic)},
      {"empirical", matrix_to_json(empirical)},
      {"max_abs_deviation", max_abs_deviation},
      {"n_samples", n_samples},
  };
}

CovarianceReport covariance_report(PipelineStructure structure, const TransformStats& stats,
                                   std::size_t n, const RngStream& rng, unsigned workers) {
  CovarianceReport report;
  report.structure = structure;
  report.analytic = analytic_reference(structure, stats);
  report.empirical = empirical_autocovariance(structure, stats, n, rng, workers);
  report.max_abs_deviation = (report.analytic - report.empirical).cwiseAbs().maxCoeff();
  report.n_samples = n;
  return report;
}

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

bool is_positive_semidefinite(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -tol;
}

double mean_intensity(const Image& img) {
  double sum = 0.0;
  for (float v : img.data()) sum += v;
  return img.data().empty() ? 0.0 : sum / static_cast<double>(img.data().size());
}

StageMoments estimate_transform_stats(std::span<const Image> stage_inputs,
                                      const TransformDescriptor& desc, int magnitude,
                                      const ImageStatistic& statistic, std::size_t n,
                                      RngStream& rng) {
  if (n < 100) throw ParameterError("estimate_transform_stats needs n >= 100");
  if (stage_inputs.empty()) throw ParameterError("estimate_transform_stats needs a stage input");
  StageMoments out;
  for (const auto& input : stage_inputs) {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = statistic(apply_transform(input, desc, magnitude, rng));
      count += 1.0;
      const double delta = v - mean;
      mean += delta / count;
      m2 += delta * (v - mean);
    }
    out.mu.push_back(mean);
    out.sigma.push_back(std::sqrt(std::max(0.0, m2 / (count - 1.0))));
  }
  return out;
}

}  // namespace layermix
