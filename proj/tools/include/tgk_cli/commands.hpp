#pragma once

// The synth / deblur / bench / convert commands, callable without a
// command line so tests can drive them directly.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tgk/krylov.hpp"
#include "tgk/problems.hpp"
#include "tgk/spd.hpp"
#include "tgk/tikhonov.hpp"
#include "tgk_cli/formats.hpp"

namespace CLI {
class App;
}

namespace tgk::cli {

struct SynthOptions {
  /// One PGM/PPM, or several equally sized PGM frames.
  std::vector<std::filesystem::path> inputs;
  /// Procedural input instead of files: shepp-logan | color | video.
  std::string phantom;
  index_t size = 64;
  int frames = 4;
  double sigma = 3.0;
  index_t band = 12;
  std::string variant = "symmetric";
  double noise_level = 1e-3;
  double omega = 0.2;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir;
};

struct Synthesized {
  Tensor3 truth;
  Tensor3 blurred;
  Tensor3 degraded;
  NoiseSample noise;
  Meta meta;
};

/// Builds truth, A*truth and the noisy data; no files touched.
Synthesized synthesize(const SynthOptions& opts);
/// synthesize() then writes truth.t3b, degraded.t3b and meta.txt to out_dir.
Synthesized run_synth(const SynthOptions& opts);

struct SolverOptions {
  std::string method = "wgg-tgkt";
  std::string reg = "d1";  ///< identity | d1 | d2
  double alpha = 3.0;
  double eta = 1.1;
  double mu_lo = 1e1;
  double mu_hi = 1e7;
  int k_init = 2;
  int k_max = 300;
  bool verify = false;
  bool reorthogonalize = false;
  std::uint64_t seed = 0;
};

/// Blur tensor and covariance rebuilt from synth metadata.
struct Problem {
  TensorOperator a;
  SpdOperator m;
};

Problem problem_from_meta(const Meta& meta);
SpdOperator make_regularizer(const std::string& reg, index_t size, index_t depth, double alpha);

/// Runs one solver; never throws SolveFailure (the partial solution is returned).
Solution run_solver(const Problem& problem, const Tensor3& b, const std::vector<double>& slice_delta,
                    double global_delta, const SolverOptions& opts);

struct DeblurOptions {
  std::filesystem::path in_dir;
  SolverOptions solver;
  std::optional<double> delta;  ///< overrides the recorded delta (every slice too)
  std::filesystem::path out_dir;
  std::filesystem::path report;  ///< default out_dir/report.csv
  bool no_timing = false;        ///< write cpu_secs as 0 for byte-stable reports
};

/// Returns 0 on success and 2 when the discrepancy was not met (partial results written).
int run_deblur(const DeblurOptions& opts);

struct BenchOptions {
  SynthOptions synth;  ///< noise_level is replaced by each entry of `levels`
  std::vector<double> levels{1e-3, 1e-2};
  std::vector<std::string> methods{"wtgkt-p", "wg-tgkt-p", "wgg-tgkt"};
  std::vector<std::string> regs{"d1", "identity", "d2"};
  SolverOptions solver;
  std::filesystem::path report;
  bool no_timing = false;
};

/// One aggregated row per (level, reg, method) cell; failed cells are kept.
std::vector<ReportRow> run_bench(const BenchOptions& opts);

struct ConvertOptions {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path output;
};

/// Images to T3B (frames or color planes become lateral slices), or T3B to
/// images (3 slices and a .ppm target give one color image, otherwise one
/// PGM per slice, numbered when there are several).
void run_convert(const ConvertOptions& opts);

/// Registers the four subcommands on `app`; their callbacks store the
/// process exit code in `exit_code`.
void add_commands(CLI::App& app, int& exit_code);

}  // namespace tgk::cli
