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
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace layermix {

/// A log line that violates the prediction record schema. `line` is 1-based,
/// 0 when the record did not come from a file.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IncompleteGridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when records do not satisfy a metric's precondition (missing
/// grouping fields, short sequences, mismatched class universes).
class MetricInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PredictionRecord {
  std::string sample_id;
  int label = 0;
  /// Class indices in descending score order.
  std::vector<int> ranked_classes;
  /// Top-1 score.
  double confidence = 0.0;
  std::optional<std::string> corruption;
  std::optional<int> severity;
  std::optional<std::string> sequence_id;
  std::optional<int> frame;

  int top1() const { return ranked_classes.front(); }
  bool correct() const { return top1() == label; }
};

/// Strict schema: the eight known field names only, optional fields omitted
/// rather than null, frame present iff sequence_id present.
PredictionRecord parse_prediction_record(const nlohmann::json& doc, std::size_t line = 0);
nlohmann::json to_json(const PredictionRecord& record);

/// JSON-lines reader; blank lines are skipped.
std::vector<PredictionRecord> read_prediction_log(std::istream& in);
std::vector<PredictionRecord> read_prediction_log_file(const std::string& path);

/// Top-1 error per (corruption, severity) cell.
class CorruptionGrid {
 public:
  explicit CorruptionGrid(std::span<const PredictionRecord> records);

  const std::vector<std::string>& corruptions() const { return corruptions_; }
  const std::vector<int>& severities() const { return severities_; }
  bool complete() const;
  /// Throws IncompleteGridError for an empty cell.
  double error(const std::string& corruption, int severity) const;

 private:
  std::vector<std::string> corruptions_;
  std::vector<int> severities_;
  std::map<std::pair<std::string, int>, std::pair<std::size_t, std::size_t>>
      cells_;  // errors, total
};

/// Uniform average of the cell errors over the full corruption x severity grid.
double mean_corruption_error(std::span<const PredictionRecord> records);

/// Mean over corruptions of sum_s E_method(c, s) / sum_s E_baseline(c, s).
/// Both grids must cover the same corruptions and severities.
double mean_corruption_error(std::span<const PredictionRecord> records,
                             std::span<const PredictionRecord> baseline);

enum class FlipMode {
  Temporal,       // frame i vs frame i - 1
  NoiseSequence,  // frame i vs the first frame
};

/// Pooled over every compared pair of every sequence.
double mean_flip_probability(std::span<const PredictionRecord> records, FlipMode mode);

/// d(tau, tau') = sum_{i=1..5} sum_{j=min(i, s(i))+1}^{max(i, s(i))} 1(1 <= j - 1 <= 5)
/// with s = tau^-1 tau'. Both rankings must list the same classes, at least 5.
int top5_distance(std::span<const int> ranking, std::span<const int> next_ranking);

/// Average top-5 distance over all adjacent frame pairs of all sequences.
double mean_top5_distance(std::span<const PredictionRecord> records);

inline constexpr int kDefaultCalibrationBins = 15;

/// RMS calibration error with equal-mass bins.
///
/// Records are ordered by confidence; records sharing a confidence form one
/// block whose accuracy is the block mean, and each bin takes exactly 1/bins
/// of the total mass (blocks straddling a boundary are split
/// proportionally). This keeps the result independent of record order and
/// unchanged when the whole log is duplicated.
double rms_calibration_error(std::span<const PredictionRecord> records,
                             int bins = kDefaultCalibrationBins);

/// Generalised Jensen-Shannon divergence of three distributions, in nats:
/// mean of KL(x || M) over x in {p, q, r}, M = (p + q + r) / 3.
double jsd_consistency(std::span<const double> p, std::span<const double> q,
                       std::span<const double> r);

/// Groups records by sequence_id (sorted by id) with frames ordered 0..L-1.
/// Throws MetricInputError on gaps, duplicates or sequences shorter than 2.
std::vector<std::vector<const PredictionRecord*>> group_sequences(
    std::span<const PredictionRecord> records);

}  // namespace layermix
