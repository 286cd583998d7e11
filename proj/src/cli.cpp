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

#include "layermix/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "layermix/covariance.hpp"
#include "layermix/fractal_bank.hpp"
#include "layermix/image_io.hpp"
#include "layermix/metrics.hpp"
#include "layermix/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace layermix {

namespace {

constexpr const char* kToolName = "layermix-cli";

/// Thrown by command bodies to leave with a specific exit code.
struct CommandFailure {
  int code;
  std::string message;
};

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 14> buffer{};
  while (in) {
    in.read(buffer.data(), buffer.size());
    EVP_DigestUpdate(ctx, buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx, digest.data(), &length);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

/// Write-then-rename so readers never observe a partial file.
void write_text_atomically(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw IoError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(workers, count); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// augment

struct AugmentArgs {
  std::string input;
  std::string output;
  std::string fractals;
  std::string fractal_manifest;
  std::string preview_grid;
  std::string replay;
  int magnitude = 8;
  double beta = 3.0;
  std::uint64_t seed = 0;
  bool grayscale_fractals = true;
  int count_per_image = 1;
  std::vector<double> blend_probabilities{1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0};
  double eps_geometric = kDefaultGeometricEps;
  unsigned workers = 1;
};

json augment_config_json(const AugmentArgs& a) {
  const std::string manifest =
      a.fractal_manifest.empty() ? std::string{} : fs::absolute(a.fractal_manifest).string();
  return json{{"magnitude", a.magnitude},
              {"beta", a.beta},
              {"seed", a.seed},
              {"grayscale_fractals", a.grayscale_fractals},
              {"count_per_image", a.count_per_image},
              {"blend_probabilities", a.blend_probabilities},
              {"eps_geometric", a.eps_geometric},
              {"fractal_manifest", manifest}};
}

/// Fills every option the user did not give explicitly from a previous
/// run's manifest.
void apply_replay(AugmentArgs& a, const CLI::App& cmd) {
  std::ifstream in(a.replay);
  if (!in) throw CommandFailure{kExitIo, "cannot open replay manifest " + a.replay};
  json manifest;
  try {
    manifest = json::parse(in);
    const json& cfg = manifest.at("config");
    const json& paths = manifest.at("paths");
    auto unset = [&](const char* flag) { return cmd.get_option(flag)->count() == 0; };
    if (unset("--input")) a.input = paths.at("input").get<std::string>();
    if (unset("--output")) a.output = paths.at("output").get<std::string>();
    if (unset("--fractals")) a.fractals = paths.at("fractals").get<std::string>();
    if (unset("--magnitude")) a.magnitude = cfg.at("magnitude").get<int>();
    if (unset("--beta")) a.beta = cfg.at("beta").get<double>();
    if (unset("--seed")) a.seed = cfg.at("seed").get<std::uint64_t>();
    if (unset("--grayscale-fractals"))
      a.grayscale_fractals = cfg.at("grayscale_fractals").get<bool>();
    if (unset("--count-per-image")) a.count_per_image = cfg.at("count_per_image").get<int>();
    if (unset("--blend-probabilities")) {
      a.blend_probabilities = cfg.at("blend_probabilities").get<std::vector<double>>();
    }
    if (unset("--eps")) a.eps_geometric = cfg.at("eps_geometric").get<double>();
    if (unset("--fractal-manifest"))
      a.fractal_manifest = cfg.value("fractal_manifest", std::string{});
  } catch (const json::exception& e) {
    throw CommandFailure{kExitUsage, std::string("malformed replay manifest: ") + e.what()};
  }
}

Image tile_to(const Image& img, ImageShape shape) {
  return with_channels(resize_bilinear(img, shape.height, shape.width), shape.channels);
}

void write_preview_grid(const fs::path& path, const std::vector<Image>& originals,
                        const FractalBank& bank, const PipelineConfig& cfg) {
  const std::size_t rows = std::min<std::size_t>(originals.size(), 8);
  const ImageShape tile{originals.front().height(), originals.front().width(), 3};
  Image grid({tile.height * static_cast<int>(rows), tile.width * 4, 3});
  for (std::size_t r = 0; r < rows; ++r) {
    RngStream rng = item_stream(cfg, r);
    const LayerSample s = layermix(originals[r], bank, cfg, rng, RunOptions{true, 2});
    std::array<Image, 4> cells{tile_to(originals[r], tile), tile_to(s.layers[0], tile),
                               tile_to(s.layers[1], tile), tile_to(s.layers[2], tile)};
    for (int col = 0; col < 4; ++col) {
      for (int y = 0; y < tile.height; ++y)
        for (int x = 0; x < tile.width; ++x)
          for (int c = 0; c < 3; ++c)
            grid.at(static_cast<int>(r) * tile.height + y, col * tile.width + x, c) =
                cells[static_cast<std::size_t>(col)].at(y, x, c);
    }
  }
  write_png(path, grid);
}

int cmd_augment(AugmentArgs a, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  if (!a.replay.empty()) apply_replay(a, cmd);
  if (a.input.empty() || a.output.empty() || a.fractals.empty()) {
    throw CommandFailure{kExitUsage, "--input, --output and --fractals are required"};
  }
  if (a.count_per_image < 1) throw CommandFailure{kExitUsage, "--count-per-image must be >= 1"};
  if (a.blend_probabilities.size() != kBlendMethodCount) {
    throw CommandFailure{kExitUsage, "--blend-probabilities needs 4 values"};
  }

  PipelineConfig cfg;
  cfg.magnitude = a.magnitude;
  cfg.blending_ratio = a.beta;
  cfg.seed = a.seed;
  cfg.grayscale_fractals = a.grayscale_fractals;
  cfg.eps_geometric = a.eps_geometric;
  std::copy(a.blend_probabilities.begin(), a.blend_probabilities.end(),
            cfg.blend_probabilities.begin());
  try {
    cfg.validate();
  } catch (const ParameterError& e) {
    throw CommandFailure{kExitUsage, e.what()};
  }

  if (!fs::is_directory(a.input))
    throw CommandFailure{kExitIo, "input directory not found: " + a.input};
  BankLoadOptions bank_options;
  bank_options.grayscale = cfg.grayscale_fractals;
  if (!a.fractal_manifest.empty()) bank_options.manifest = a.fractal_manifest;
  const FractalBank bank = FractalBank::load(a.fractals, bank_options);

  const auto input_files = list_image_files(a.input);
  std::vector<Image> originals;
  for (const auto& f : input_files) originals.push_back(read_image(f));
  fs::create_directories(a.output);

  const std::size_t per = static_cast<std::size_t>(a.count_per_image);
  const std::size_t jobs = originals.size() * per;
  std::vector<std::string> names(jobs);
  std::vector<LayerSample> samples(jobs);
  parallel_for(jobs, a.workers, [&](std::size_t job) {
    const std::size_t i = job / per;
    const std::size_t k = job % per;
    RngStream rng = item_stream(cfg, job);
    samples[job] = layermix(originals[i], bank, cfg, rng);
    names[job] = input_files[i].stem().string() + "__aug" + std::to_string(k) + ".png";
    write_png(fs::path(a.output) / names[job], samples[job].image);
    samples[job].image = Image{};
  });

  json files = json::array();
  for (std::size_t job = 0; job < jobs; ++job) {
    json blends = json::array();
    for (auto m : samples[job].blend_trace) blends.push_back(std::string(to_string(m)));
    files.push_back({{"source", fs::relative(input_files[job / per], a.input).string()},
                     {"output", names[job]},
                     {"stream_id", job},
                     {"sha256", sha256_file(fs::path(a.output) / names[job])},
                     {"exit_layer", samples[job].exit_layer},
                     {"transform", std::string(to_string(samples[job].transform_kind))},
                     {"blends", blends}});
  }

  if (!a.preview_grid.empty() && !originals.empty())
    write_preview_grid(a.preview_grid, originals, bank, cfg);

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json manifest{{"tool", kToolName},
                {"version", LAYERMIX_VERSION},
                {"command", "augment"},
                {"seed", a.seed},
                {"config", augment_config_json(a)},
                {"paths",
                 {{"input", fs::absolute(a.input).string()},
                  {"output", fs::absolute(a.output).string()},
                  {"fractals", fs::absolute(a.fractals).string()}}},
                {"files", files},
                {"counters",
                 {{"inputs", originals.size()},
                  {"outputs", jobs},
                  {"fractals", bank.count()},
                  {"fractals_skipped", bank.skipped()}}},
                {"started_at", utc_timestamp()},
                {"wall_clock_seconds", seconds}};
  write_text_atomically(fs::path(a.output) / "manifest.json", manifest.dump(2) + "\n");
  out << "augmented " << originals.size() << " images into " << jobs << " outputs in " << a.output
      << "\n";
  (void)err;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// selfcheck

int cmd_selfcheck(const SelfCheckOptions& options, std::ostream& out) {
  const auto rows = run_selfcheck(options);
  bool all = true;
  out << std::left << std::setw(28) << "check" << std::right << std::setw(14) << "observed"
      << std::setw(14) << "expected" << std::setw(14) << "se / p" << "  status\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(28) << r.name << std::right << std::fixed << std::setprecision(6)
        << std::setw(14) << r.observed << std::setw(14) << r.expected << std::setw(14) << r.spread
        << "  " << (r.passed ? "PASS" : "FAIL") << "\n";
    all = all && r.passed;
  }
  out.unsetf(std::ios::floatfield);
  out << (all ? "all checks passed" : "one or more checks FAILED") << "\n";
  return all ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// covariance

struct CovarianceArgs {
  std::string stats;
  std::string pipeline = "layermix";
  std::uint64_t n = 1'000'000;
  std::string out;
  double tol = 0.02;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

int cmd_covariance(const CovarianceArgs& a, std::ostream& out) {
  std::ifstream in(a.stats);
  if (!in) throw CommandFailure{kExitIo, "cannot open stats file " + a.stats};
  TransformStats stats;
  try {
    stats = TransformStats::from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw CommandFailure{kExitUsage, std::string("malformed stats file: ") + e.what()};
  } catch (const ParameterError& e) {
    throw CommandFailure{kExitUsage, std::string("malformed stats file: ") + e.what()};
  }
  if (a.n < 2) throw CommandFailure{kExitUsage, "--n must be >= 2"};
  const PipelineStructure structure =
      a.pipeline == "iid" ? PipelineStructure::Iid : PipelineStructure::LayerMix;

  const CovarianceReport report =
      covariance_report(structure, stats, a.n, RngStream(a.seed, 0), a.workers);
  json doc = report.to_json();
  // Off-diagonal contrast against the shared-transform prediction.
  const Eigen::MatrixXd shared = analytic_autocovariance(stats);
  double contrast = 0.0;
  for (Eigen::Index i = 0; i < shared.rows(); ++i)
    for (Eigen::Index j = 0; j < shared.cols(); ++j)
      if (i != j) contrast = std::max(contrast, std::abs(shared(i, j) - report.empirical(i, j)));
  doc["tolerance"] = a.tol;
  doc["offdiag_contrast_vs_layermix"] = contrast;
  if (!a.out.empty()) write_text_atomically(a.out, doc.dump(2) + "\n");

  const bool pass = report.max_abs_deviation < a.tol;
  out << "pipeline: " << a.pipeline << "  n: " << a.n << "\n"
      << "analytic:\n"
      << report.analytic << "\nempirical:\n"
      << report.empirical << "\n"
      << "max |analytic - empirical| = " << report.max_abs_deviation << " (tol " << a.tol << ") "
      << (pass ? "PASS" : "FAIL") << "\n"
      << "max off-diagonal gap to shared-transform covariance = " << contrast << "\n";
  return pass ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string log;
  std::string metric = "all";
  std::string mode = "temporal";
  int bins = kDefaultCalibrationBins;
  std::string baseline;
  std::string out;
};

std::vector<PredictionRecord> load_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CommandFailure{kExitIo, "cannot open log " + path};
  return read_prediction_log(in);
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto records = load_log(a.log);
  std::vector<PredictionRecord> corrupted;
  std::vector<PredictionRecord> sequences;
  for (const auto& r : records) {
    if (r.corruption || r.severity) corrupted.push_back(r);
    if (r.sequence_id) sequences.push_back(r);
  }
  const bool all = a.metric == "all";
  const FlipMode mode = a.mode == "noise" ? FlipMode::NoiseSequence : FlipMode::Temporal;

  json metrics = json::object();
  if (a.metric == "mce" || (all && !corrupted.empty())) {
    metrics["mce"] = mean_corruption_error(corrupted);
    if (!a.baseline.empty()) {
      const auto base_all = load_log(a.baseline);
      std::vector<PredictionRecord> base;
      for (const auto& r : base_all)
        if (r.corruption || r.severity) base.push_back(r);
      metrics["mce_normalized"] = mean_corruption_error(corrupted, base);
    }
  }
  if (a.metric == "mfp" || (all && !sequences.empty())) {
    metrics["mfp"] = mean_flip_probability(sequences, mode);
  }
  if (a.metric == "mt5d" || (all && !sequences.empty())) {
    metrics["mt5d"] = mean_top5_distance(sequences);
  }
  if (a.metric == "rms" || (all && records.size() >= static_cast<std::size_t>(a.bins))) {
    metrics["rms"] = rms_calibration_error(records, a.bins);
  }

  out << std::left << std::setw(16) << "metric" << "value\n";
  for (const auto& [name, value] : metrics.items()) {
    out << std::left << std::setw(16) << name << std::setprecision(10) << value.get<double>()
        << "\n";
  }
  if (!a.out.empty()) {
    const json doc{{"log", a.log},
                   {"records", records.size()},
                   {"mode", a.mode},
                   {"bins", a.bins},
                   {"metrics", metrics}};
    write_text_atomically(a.out, doc.dump(2) + "\n");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fractal-prep

struct FractalPrepArgs {
  std::string input;
  std::string output;
  std::string manifest;
};

int cmd_fractal_prep(const FractalPrepArgs& a, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(a.input))
    throw CommandFailure{kExitIo, "input directory not found: " + a.input};
  fs::create_directories(a.output);
  std::vector<std::string> written;
  std::size_t skipped = 0;
  for (const auto& file : list_image_files(a.input)) {
    Image img;
    try {
      img = read_image(file);
    } catch (const IoError& e) {
      err << "warning: skipping " << file.string() << ": " << e.what() << "\n";
      ++skipped;
      continue;
    }
    fs::path rel = fs::relative(file, a.input);
    rel.replace_extension(".png");
    const fs::path dest = fs::path(a.output) / rel;
    if (dest.has_parent_path()) fs::create_directories(dest.parent_path());
    write_png(dest, with_channels(img, 1));
    written.push_back(rel.generic_string());
  }
  std::ostringstream manifest;
  for (const auto& line : written) manifest << line << "\n";
  manifest << "# skipped: " << skipped << "\n";
  write_text_atomically(a.manifest, manifest.str());
  if (written.empty()) throw CommandFailure{kExitEmptyBank, "no decodable images in " + a.input};
  out << "prepared " << written.size() << " grayscale fractals (" << skipped << " skipped)\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LayerMix structured fractal-mixing augmentation and robustness analysis"};
  app.name(kToolName);
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Read options from an INI/TOML file (flags override it)");
  app.set_version_flag("--version", LAYERMIX_VERSION);
  app.require_subcommand(1);

  AugmentArgs aug;
  auto* augment = app.add_subcommand("augment", "Augment a directory of images");
  augment->add_option("--input", aug.input, "Input image directory");
  augment->add_option("--output", aug.output, "Output directory");
  augment->add_option("--fractals", aug.fractals, "Fractal bank directory");
  augment->add_option("--fractal-manifest", aug.fractal_manifest, "File pinning fractal order");
  augment->add_option("--magnitude", aug.magnitude, "Augmentation magnitude")
      ->check(CLI::Range(0, 10));
  augment->add_option("--beta", aug.beta, "Blending ratio")->check(CLI::PositiveNumber);
  augment->add_option("--seed", aug.seed, "Random seed");
  augment->add_option("--grayscale-fractals", aug.grayscale_fractals, "Use grayscale fractals");
  augment->add_option("--count-per-image", aug.count_per_image, "Augmented copies per input")
      ->check(CLI::PositiveNumber);
  augment
      ->add_option("--blend-probabilities", aug.blend_probabilities,
                   "Arithmetic, geometric, pixel, element probabilities")
      ->expected(4);
  augment->add_option("--eps", aug.eps_geometric, "Geometric blend epsilon");
  augment->add_option("--preview-grid", aug.preview_grid,
                      "Write an original | layer1 | layer2 | layer3 preview PNG");
  augment->add_option("--workers", aug.workers, "Worker threads (0 = all cores)");
  augment->add_option("--replay", aug.replay, "Take unset options from a previous manifest.json");

  SelfCheckOptions check;
  std::vector<double> check_probs(check.blend_probabilities.begin(),
                                  check.blend_probabilities.end());
  auto* selfcheck = app.add_subcommand("selfcheck", "Run sampler distribution checks");
  selfcheck->add_option("--n", check.n, "Draws per check");
  selfcheck->add_option("--seed", check.seed, "Random seed");
  selfcheck->add_option("--beta", check.beta, "Blending ratio")->check(CLI::PositiveNumber);
  selfcheck->add_option("--blend-probabilities", check_probs, "Configured blend probabilities")
      ->expected(4);

  CovarianceArgs cov;
  auto* covariance = app.add_subcommand("covariance", "Analytic vs Monte-Carlo stage covariance");
  covariance->add_option("--stats", cov.stats, "Transform statistics JSON")->required();
  covariance->add_option("--pipeline", cov.pipeline, "Pipeline structure")
      ->check(CLI::IsMember({"layermix", "iid"}));
  covariance->add_option("--n", cov.n, "Monte-Carlo trials");
  covariance->add_option("--out", cov.out, "Report JSON path");
  covariance->add_option("--tol", cov.tol, "Max allowed absolute deviation");
  covariance->add_option("--seed", cov.seed, "Random seed");
  covariance->add_option("--workers", cov.workers, "Worker threads (0 = all cores)");

  EvaluateArgs eval;
  auto* evaluate = app.add_subcommand("evaluate", "Robustness metrics from a prediction log");
  evaluate->add_option("--log", eval.log, "JSON-lines prediction log")->required();
  evaluate->add_option("--metric", eval.metric, "Metric to compute")
      ->check(CLI::IsMember({"mce", "mfp", "mt5d", "rms", "all"}));
  evaluate->add_option("--mode", eval.mode, "Flip mode")
      ->check(CLI::IsMember({"temporal", "noise"}));
  evaluate->add_option("--bins", eval.bins, "Adaptive calibration bins")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--baseline", eval.baseline, "Baseline log for normalized mCE");
  evaluate->add_option("--out", eval.out, "Metrics JSON path");

  FractalPrepArgs prep;
  auto* fractal_prep = app.add_subcommand("fractal-prep", "Grayscale-convert a fractal bank");
  fractal_prep->add_option("--input", prep.input, "Source directory")->required();
  fractal_prep->add_option("--output", prep.output, "Destination directory")->required();
  fractal_prep->add_option("--manifest", prep.manifest, "Manifest path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << LAYERMIX_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (augment->parsed()) return cmd_augment(aug, *augment, out, err);
    if (selfcheck->parsed()) {
      if (check_probs.size() != kBlendMethodCount) {
        throw CommandFailure{kExitUsage, "--blend-probabilities needs 4 values"};
      }
      std::copy(check_probs.begin(), check_probs.end(), check.blend_probabilities.begin());
      return cmd_selfcheck(check, out);
    }
    if (covariance->parsed()) return cmd_covariance(cov, out);
    if (evaluate->parsed()) return cmd_evaluate(eval, out);
    if (fractal_prep->parsed()) return cmd_fractal_prep(prep, out, err);
  } catch (const CommandFailure& f) {
    err << "error: " << f.message << "\n";
    return f.code;
  } catch (const SchemaError& e) {
    err << "error: schema violation at " << e.what() << "\n";
    return kExitUsage;
  } catch (const IncompleteGridError& e) {
    err << "error: incomplete corruption grid: " << e.what() << "\n";
    return kExitIncompleteGrid;
  } catch (const EmptyBankError& e) {
    err << "error: " << e.what() << "\n";
    return kExitEmptyBank;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const MetricInputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace layermix
