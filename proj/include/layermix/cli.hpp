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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "layermix/sampling.hpp"

namespace layermix {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitEmptyBank = 4,
  kExitIncompleteGrid = 5,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SelfCheckRow {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  /// Standard error for mean checks; the chi-square p-value for
  /// distribution checks.
  double spread = 0.0;
  bool is_chi_square = false;
  bool passed = false;
};

struct SelfCheckOptions {
  std::uint64_t n = 1'000'000;
  std::uint64_t seed = 0;
  double beta = 3.0;
  std::array<double, kBlendMethodCount> blend_probabilities{1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0,
                                                            1.0 / 6.0};
};

/// Distribution self-test of the samplers: conic weight means within four
/// standard errors, and chi-square goodness of fit (p > 0.01) of blend
/// methods against (1/3, 1/3, 1/6, 1/6), exit layers and transform kinds
/// against uniform.
std::vector<SelfCheckRow> run_selfcheck(const SelfCheckOptions& options);

/// Upper tail probability of a chi-square statistic.
double chi_square_p_value(double statistic, double degrees_of_freedom);

/// Pearson statistic of observed counts against expected probabilities.
double chi_square_statistic(const std::vector<std::uint64_t>& counts,
                            const std::vector<double>& probabilities);

}  // namespace layermix
