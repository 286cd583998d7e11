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

#include "layermix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>

namespace layermix {

namespace {

const std::set<std::string>& known_fields() {
  static const std::set<std::string> fields{"sample_id",   "label",      "ranked_classes",
                                            "confidence",  "corruption", "severity",
                                            "sequence_id", "frame"};
  return fields;
}

template <typename T>
T require_field(const nlohmann::json& doc, const char* name, std::size_t line) {
  if (!doc.contains(name)) throw SchemaError(std::string("missing field '") + name + "'", line);
  try {
    return doc.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(std::string("field '") + name + "' has the wrong type", line);
  }
}

bool is_integer(const nlohmann::json& v) { return v.is_number_integer() || v.is_number_unsigned(); }

}  // namespace

PredictionRecord parse_prediction_record(const nlohmann::json& doc, std::size_t line) {
  if (!doc.is_object()) throw SchemaError("record is not a JSON object", line);
  for (const auto& [key, value] : doc.items()) {
    if (!known_fields().contains(key)) throw SchemaError("unknown field '" + key + "'", line);
    if (value.is_null()) throw SchemaError("field '" + key + "' is null; omit it instead", line);
  }

  PredictionRecord rec;
  if (!doc.contains("sample_id") || !doc["sample_id"].is_string()) {
    throw SchemaError("field 'sample_id' must be a string", line);
  }
  rec.sample_id = doc["sample_id"].get<std::string>();
  if (!doc.contains("label") || !is_integer(doc["label"]) || doc["label"].get<long long>() < 0) {
    throw SchemaError("field 'label' must be a non-negative integer", line);
  }
  rec.label = doc["label"].get<int>();

  if (!doc.contains("ranked_classes") || !doc["ranked_classes"].is_array() ||
      doc["ranked_classes"].empty()) {
    throw SchemaError("field 'ranked_classes' must be a non-empty array", line);
  }
  std::set<int> seen;
  for (const auto& v : doc["ranked_classes"]) {
    if (!is_integer(v) || v.get<long long>() < 0) {
      throw SchemaError("ranked_classes entries must be non-negative integers", line);
    }
    const int cls = v.get<int>();
    if (!seen.insert(cls).second) throw SchemaError("ranked_classes has duplicate entries", line);
    rec.ranked_classes.push_back(cls);
  }

  rec.confidence = require_field<double>(doc, "confidence", line);
  if (!doc["confidence"].is_number() || !(rec.confidence >= 0.0 && rec.confidence <= 1.0)) {
    throw SchemaError("field 'confidence' must be a number in [0, 1]", line);
  }

  if (doc.contains("corruption")) {
    if (!doc["corruption"].is_string())
      throw SchemaError("field 'corruption' must be a string", line);
    rec.corruption = doc["corruption"].get<std::string>();
  }
  if (doc.contains("severity")) {
    if (!is_integer(doc["severity"]))
      throw SchemaError("field 'severity' must be an integer", line);
    const long long s = doc["severity"].get<long long>();
    if (s < 1 || s > 5) throw SchemaError("field 'severity' must be in 1..5", line);
    rec.severity = static_cast<int>(s);
  }
  if (doc.contains("sequence_id")) {
    if (!doc["sequence_id"].is_string())
      throw SchemaError("field 'sequence_id' must be a string", line);
    rec.sequence_id = doc["sequence_id"].get<std::string>();
  }
  if (doc.contains("frame")) {
    if (!is_integer(doc["frame"]) || doc["frame"].get<long long>() < 0) {
      throw SchemaError("field 'frame' must be a non-negative integer", line);
    }
    rec.frame = doc["frame"].get<int>();
  }
  if (rec.frame.has_value() != rec.sequence_id.has_value()) {
    throw SchemaError("'frame' and 'sequence_id' must appear together", line);
  }
  return rec;
}

nlohmann::json to_json(const PredictionRecord& record) {
  nlohmann::json doc{{"sample_id", record.sample_id},
                     {"label", record.label},
                     {"ranked_classes", record.ranked_classes},
                     {"confidence", record.confidence}};
  if (record.corruption) doc["corruption"] = *record.corruption;
  if (record.severity) doc["severity"] = *record.severity;
  if (record.sequence_id) doc["sequence_id"] = *record.sequence_id;
  if (record.frame) doc["frame"] = *record.frame;
  return doc;
}

std::vector<PredictionRecord> read_prediction_log(std::istream& in) {
  std::vector<PredictionRecord> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(std::string("invalid JSON: ") + e.what(), line);
    }
    out.push_back(parse_prediction_record(doc, line));
  }
  return out;
}

std::vector<PredictionRecord> read_prediction_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open prediction log " + path);
  return read_prediction_log(in);
}

CorruptionGrid::CorruptionGrid(std::span<const PredictionRecord> records) {
  std::set<std::string> corruptions;
  std::set<int> severities;
  for (const auto& r : records) {
    if (!r.corruption || !r.severity) {
      throw MetricInputError("record '" + r.sample_id + "' lacks corruption/severity");
    }
    corruptions.insert(*r.corruption);
    severities.insert(*r.severity);
    auto& cell = cells_[{*r.corruption, *r.severity}];
    cell.first += r.correct() ? 0 : 1;
    cell.second += 1;
  }
  corruptions_.assign(corruptions.begin(), corruptions.end());
  severities_.assign(severities.begin(), severities.end());
}

bool CorruptionGrid::complete() const {
  if (corruptions_.empty()) return false;
  return cells_.size() == corruptions_.size() * severities_.size();
}

double CorruptionGrid::error(const std::string& corruption, int severity) const {
  const auto it = cells_.find({corruption, severity});
  if (it == cells_.end() || it->second.second == 0) {
    throw IncompleteGridError("no records for corruption '" + corruption + "' severity " +
                              std::to_string(severity));
  }
  return static_cast<double>(it->second.first) / static_cast<double>(it->second.second);
}

double mean_corruption_error(std::span<const PredictionRecord> records) {
  const CorruptionGrid grid(records);
  if (grid.corruptions().empty()) throw IncompleteGridError("no corruption records");
  double total = 0.0;
  for (const auto& c : grid.corruptions())
    for (int s : grid.severities()) total += grid.error(c, s);
  return total / static_cast<double>(grid.corruptions().size() * grid.severities().size());
}

double mean_corruption_error(std::span<const PredictionRecord> records,
                             std::span<const PredictionRecord> baseline) {
  const CorruptionGrid grid(records);
  const CorruptionGrid base(baseline);
  if (grid.corruptions().empty()) throw IncompleteGridError("no corruption records");
  if (grid.corruptions() != base.corruptions() || grid.severities() != base.severities()) {
    throw IncompleteGridError("baseline grid covers different corruptions or severities");
  }
  double total = 0.0;
  for (const auto& c : grid.corruptions()) {
    double method_sum = 0.0;
    double base_sum = 0.0;
    for (int s : grid.severities()) {
      method_sum += grid.error(c, s);
      base_sum += base.error(c, s);
    }
    if (base_sum == 0.0) {
      throw MetricInputError("baseline has zero error for corruption '" + c + "'");
    }
    total += method_sum / base_sum;
  }
  return total / static_cast<double>(grid.corruptions().size());
}

std::vector<std::vector<const PredictionRecord*>> group_sequences(
    std::span<const PredictionRecord> records) {
  std::map<std::string, std::vector<const PredictionRecord*>> by_id;
  for (const auto& r : records) {
    if (!r.sequence_id || !r.frame) {
      throw MetricInputError("record '" + r.sample_id + "' lacks sequence_id/frame");
    }
    by_id[*r.sequence_id].push_back(&r);
  }
  std::vector<std::vector<const PredictionRecord*>> out;
  for (auto& [id, frames] : by_id) {
    std::sort(
        frames.begin(), frames.end(),
        [](const PredictionRecord* a, const PredictionRecord* b) { return *a->frame < *b->frame; });
    if (frames.size() < 2) throw MetricInputError("sequence '" + id + "' has fewer than 2 frames");
    for (std::size_t i = 0; i < frames.size(); ++i) {
      if (*frames[i]->frame != static_cast<int>(i)) {
        throw MetricInputError("sequence '" + id + "' frames are not contiguous from 0");
      }
    }
    out.push_back(std::move(frames));
  }
  if (out.empty()) throw MetricInputError("no sequence records");
  return out;
}

double mean_flip_probability(std::span<const PredictionRecord> records, FlipMode mode) {
  std::size_t flips = 0;
  std::size_t pairs = 0;
  for (const auto& seq : group_sequences(records)) {
    for (std::size_t i = 1; i < seq.size(); ++i) {
      const PredictionRecord* reference = mode == FlipMode::Temporal ? seq[i - 1] : seq[0];
      flips += seq[i]->top1() != reference->top1() ? 1 : 0;
      ++pairs;
    }
  }
  return static_cast<double>(flips) / static_cast<double>(pairs);
}

int top5_distance(std::span<const int> ranking, std::span<const int> next_ranking) {
  if (ranking.size() < 5 || next_ranking.size() < 5) {
    throw MetricInputError("top-5 distance needs rankings of at least 5 classes");
  }
  if (ranking.size() != next_ranking.size() ||
      !std::is_permutation(ranking.begin(), ranking.end(), next_ranking.begin())) {
    throw MetricInputError("rankings cover different class universes");
  }
  std::map<int, int> rank_of;  // class -> 1-based rank in `ranking`
  for (std::size_t r = 0; r < ranking.size(); ++r) rank_of[ranking[r]] = static_cast<int>(r) + 1;

  int distance = 0;
  for (int i = 1; i <= 5; ++i) {
    const int sigma_i = rank_of.at(next_ranking[static_cast<std::size_t>(i) - 1]);
    for (int j = std::min(i, sigma_i) + 1; j <= std::max(i, sigma_i); ++j) {
      if (1 <= j - 1 && j - 1 <= 5) ++distance;
    }
  }
  return distance;
}

double mean_top5_distance(std::span<const PredictionRecord> records) {
  long long total = 0;
  std::size_t pairs = 0;
  for (const auto& seq : group_sequences(records)) {
    for (std::size_t i = 1; i < seq.size(); ++i) {
      total += top5_distance(seq[i - 1]->ranked_classes, seq[i]->ranked_classes);
      ++pairs;
    }
  }
  return static_cast<double>(total) / static_cast<double>(pairs);
}

double rms_calibration_error(std::span<const PredictionRecord> records, int bins) {
  if (bins < 1) throw MetricInputError("calibration needs at least one bin");
  if (records.size() < static_cast<std::size_t>(bins)) {
    throw MetricInputError("calibration needs at least as many records as bins");
  }

  struct Block {
    double confidence;
    double count;
    double correct;
  };
  std::vector<std::pair<double, bool>> items;
  items.reserve(records.size());
  for (const auto& r : records) items.emplace_back(r.confidence, r.correct());
  std::sort(items.begin(), items.end());
  std::vector<Block> blocks;
  for (const auto& [conf, ok] : items) {
    if (blocks.empty() || blocks.back().confidence != conf) blocks.push_back({conf, 0.0, 0.0});
    blocks.back().count += 1.0;
    blocks.back().correct += ok ? 1.0 : 0.0;
  }

  const double n = static_cast<double>(records.size());
  const double width = n / bins;
  std::vector<double> conf_sum(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> acc_sum(static_cast<std::size_t>(bins), 0.0);
  double start = 0.0;
  for (const auto& block : blocks) {
    const double end = start + block.count;
    const double accuracy = block.correct / block.count;
    const int first = std::min(static_cast<int>(start / width), bins - 1);
    for (int b = first; b < bins && b * width < end; ++b) {
      const double overlap = std::min(end, (b + 1) * width) - std::max(start, b * width);
      if (overlap <= 0.0) continue;
      conf_sum[static_cast<std::size_t>(b)] += overlap * block.confidence;
      acc_sum[static_cast<std::size_t>(b)] += overlap * accuracy;
    }
    start = end;
  }

  double total = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double gap =
        (acc_sum[static_cast<std::size_t>(b)] - conf_sum[static_cast<std::size_t>(b)]) / width;
    total += gap * gap / bins;
  }
  return std::sqrt(total);
}

namespace {

void validate_distribution(std::span<const double> p, const char* name) {
  if (p.empty()) throw MetricInputError(std::string(name) + " is empty");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw MetricInputError(std::string(name) + " has a negative entry");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw MetricInputError(std::string(name) + " does not sum to 1");
  }
}

double kl_divergence(std::span<const double> p, const std::vector<double>& m) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) kl += p[i] * std::log(p[i] / m[i]);
  return kl;
}

}  // namespace

double jsd_consistency(std::span<const double> p, std::span<const double> q,
                       std::span<const double> r) {
  validate_distribution(p, "p");
  validate_distribution(q, "q");
  validate_distribution(r, "r");
  if (p.size() != q.size() || p.size() != r.size()) {
    throw MetricInputError("distributions differ in length");
  }
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = (p[i] + q[i] + r[i]) / 3.0;
  const double jsd = (kl_divergence(p, m) + kl_divergence(q, m) + kl_divergence(r, m)) / 3.0;
  return std::clamp(jsd, 0.0, std::log(3.0));
}

}  // namespace layermix
