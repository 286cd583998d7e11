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

#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "layermix/cli.hpp"
#include "layermix/transforms.hpp"

namespace layermix {

double chi_square_p_value(double statistic, double degrees_of_freedom) {
  const boost::math::chi_squared dist(degrees_of_freedom);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

double chi_square_statistic(const std::vector<std::uint64_t>& counts,
                            const std::vector<double>& probabilities) {
  const double n =
      static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = n * probabilities[i];
    const double diff = static_cast<double>(counts[i]) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

namespace {

SelfCheckRow mean_check(std::string name, double sum, double sum_sq, double n, double expected) {
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  const double se = std::sqrt(var / n);
  return {std::move(name), mean, expected, se, false, std::abs(mean - expected) <= 4.0 * se};
}

SelfCheckRow chi_square_check(std::string name, const std::vector<std::uint64_t>& counts,
                              const std::vector<double>& probabilities) {
  const double stat = chi_square_statistic(counts, probabilities);
  const double p = chi_square_p_value(stat, static_cast<double>(counts.size() - 1));
  return {std::move(name), stat, static_cast<double>(counts.size() - 1), p, true, p > 0.01};
}

}  // namespace

std::vector<SelfCheckRow> run_selfcheck(const SelfCheckOptions& options) {
  if (options.n < 2) throw ParameterError("selfcheck needs n >= 2");
  const double n = static_cast<double>(options.n);
  std::vector<SelfCheckRow> rows;

  {
    RngStream rng(options.seed, 1);
    double sa = 0, saa = 0, sb = 0, sbb = 0, ss = 0, sss = 0;
    for (std::uint64_t i = 0; i < options.n; ++i) {
      const ConicWeights w = sample_conic_weights(rng, options.beta);
      sa += w.a;
      saa += w.a * w.a;
      sb += w.b;
      sbb += w.b * w.b;
      ss += w.a + w.b;
      sss += (w.a + w.b) * (w.a + w.b);
    }
    rows.push_back(mean_check("conic mean(a)", sa, saa, n, 1.0));
    rows.push_back(mean_check("conic mean(b)", sb, sbb, n, 0.0));
    rows.push_back(mean_check("conic mean(a+b)", ss, sss, n, 1.0));
  }

  {
    std::array<BlendMethodId, kBlendMethodCount> configured{};
    for (std::size_t i = 0; i < kBlendMethodCount; ++i) {
      configured[i] = {static_cast<BlendMethod>(i), options.blend_probabilities[i]};
    }
    RngStream rng(options.seed, 2);
    std::vector<std::uint64_t> counts(kBlendMethodCount, 0);
    for (std::uint64_t i = 0; i < options.n; ++i) {
      ++counts[static_cast<std::size_t>(choose_blend_method(rng, configured).tag)];
    }
    std::vector<double> expected;
    for (const auto& w : default_blend_weights()) expected.push_back(w.probability);
    rows.push_back(chi_square_check("blend method frequencies", counts, expected));
  }

  {
    RngStream rng(options.seed, 3);
    std::vector<std::uint64_t> counts(3, 0);
    for (std::uint64_t i = 0; i < options.n; ++i)
      ++counts[static_cast<std::size_t>(choose_layer_exit(rng))];
    rows.push_back(
        chi_square_check("exit layer uniformity", counts, std::vector<double>(3, 1.0 / 3.0)));
  }

  {
    RngStream rng(options.seed, 4);
    std::vector<std::uint64_t> counts(kTransformKindCount, 0);
    for (std::uint64_t i = 0; i < options.n; ++i) {
      ++counts[static_cast<std::size_t>(sample_transform(rng).kind)];
    }
    rows.push_back(
        chi_square_check("transform kind uniformity", counts,
                         std::vector<double>(kTransformKindCount, 1.0 / kTransformKindCount)));
  }
  return rows;
}

}  // namespace layermix
