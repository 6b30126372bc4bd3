#include "tgk_cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "tgk/error.hpp"

namespace tgk::cli {
namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string secs(double v, bool no_timing) {
  if (no_timing) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

bool is_p_method(Method m) { return m == Method::wtgkt_p || m == Method::wg_tgkt_p; }

std::vector<Eigen::MatrixXd> load_planes(const SynthOptions& opts) {
  if (!opts.phantom.empty()) {
    if (!opts.inputs.empty()) throw Error("synth: give either --input or --phantom, not both");
    if (opts.phantom == "shepp-logan") return {shepp_logan(opts.size)};
    if (opts.phantom == "color") {
      const auto ch = color_scene(opts.size);
      return {ch.begin(), ch.end()};
    }
    if (opts.phantom == "video") return video_frames(opts.size, opts.frames);
    throw Error("synth: unknown phantom '" + opts.phantom + "' (shepp-logan|color|video)");
  }
  if (opts.inputs.empty()) throw Error("synth: no input image");
  if (opts.inputs.size() == 1) return read_pnm(opts.inputs.front()).planes;
  std::vector<Eigen::MatrixXd> frames;
  for (const auto& path : opts.inputs) {
    Image img = read_pnm(path);
    if (img.planes.size() != 1) throw Error("synth: frames must be gray images: " + path.string());
    frames.push_back(std::move(img.planes.front()));
  }
  return frames;
}

Meta solve_meta(const Solution& sol, const SolverOptions& opts, const std::vector<double>& deltas) {
  Meta meta;
  meta["method"] = std::string(method_name(sol.report.method));
  meta["reg"] = opts.reg;
  meta["eta"] = format_double(opts.eta);
  meta["status"] = sol.report.failed() ? "failed" : "ok";
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    meta["delta_used_" + std::to_string(i)] = format_double(deltas[i]);
  }
  for (const auto& rec : sol.report.slices) {
    const std::string tag = "_" + std::to_string(rec.slice);
    meta["k" + tag] = std::to_string(rec.k);
    meta["mu" + tag] = format_double(rec.mu);
    meta["discrepancy" + tag] = format_double(rec.discrepancy);
    if (rec.full_discrepancy) meta["full_discrepancy" + tag] = format_double(*rec.full_discrepancy);
    if (rec.breakdown_step) meta["breakdown" + tag] = std::to_string(*rec.breakdown_step);
    if (rec.failed) meta["error" + tag] = rec.message;
  }
  return meta;
}

std::vector<double> used_deltas(Method method, const std::vector<double>& slice_delta,
                                double global_delta) {
  if (is_p_method(method)) return slice_delta;
  return {global_delta};
}

void write_images(const fs::path& dir, const std::string& stem, const Tensor3& x) {
  const auto planes = multi_squeeze(x);
  if (planes.size() == 1 || planes.size() == 3) {
    write_pnm(dir / (stem + (planes.size() == 1 ? ".pgm" : ".ppm")), Image{planes});
    return;
  }
  for (std::size_t j = 0; j < planes.size(); ++j) {
    write_pnm(dir / (stem + "_" + std::to_string(j) + ".pgm"), Image{{planes[j]}});
  }
}

}  // namespace

Synthesized synthesize(const SynthOptions& opts) {
  const std::vector<Eigen::MatrixXd> planes = load_planes(opts);
  const index_t rows = planes.front().rows();
  if (planes.front().cols() != rows) {
    throw Error("synth: the blur tensor is N x N x N, so images must be square");
  }
  const BlurSpec spec{rows, opts.sigma, opts.band, parse_blur_variant(opts.variant)};
  spec.validate();

  Synthesized out;
  out.truth = multi_twist(planes);
  const TensorOperator a(build_blur(spec));
  out.blurred = a.apply(out.truth);
  const SpdOperator m = build_covariance_m(rows, rows, opts.omega);
  out.noise = gen_noise(out.blurred, m, NoiseSpec{opts.noise_level, opts.seed});
  out.degraded = out.blurred;
  if (opts.noise_level != 0.0) out.degraded += out.noise.e;

  Meta& meta = out.meta;
  meta["rows"] = std::to_string(out.truth.rows());
  meta["cols"] = std::to_string(out.truth.cols());
  meta["depth"] = std::to_string(out.truth.depth());
  meta["sigma"] = format_double(opts.sigma);
  meta["band"] = std::to_string(opts.band);
  meta["variant"] = opts.variant;
  meta["omega"] = format_double(opts.omega);
  meta["noise_level"] = format_double(opts.noise_level);
  meta["seed"] = std::to_string(opts.seed);
  meta["rho"] = format_double(out.noise.rho);
  meta["delta"] = format_double(out.noise.delta);
  meta["b_true_norm"] = format_double(fro_norm(out.blurred));
  for (std::size_t j = 0; j < out.noise.slice_delta.size(); ++j) {
    meta["delta_" + std::to_string(j)] = format_double(out.noise.slice_delta[j]);
  }
  return out;
}

Synthesized run_synth(const SynthOptions& opts) {
  Synthesized out = synthesize(opts);
  fs::create_directories(opts.out_dir);
  write_t3b(opts.out_dir / "truth.t3b", out.truth);
  write_t3b(opts.out_dir / "degraded.t3b", out.degraded);
  write_meta(opts.out_dir / "meta.txt", out.meta);
  return out;
}

Problem problem_from_meta(const Meta& meta) {
  const auto rows = static_cast<index_t>(meta_double(meta, "rows"));
  const auto depth = static_cast<index_t>(meta_double(meta, "depth"));
  if (rows != depth) throw FormatError("metadata: rows and depth must agree for a blur tensor");
  const BlurSpec spec{rows, meta_double(meta, "sigma"),
                      static_cast<index_t>(meta_double(meta, "band")),
                      parse_blur_variant(meta_string(meta, "variant"))};
  return Problem{TensorOperator(build_blur(spec)),
                 build_covariance_m(rows, depth, meta_double(meta, "omega"))};
}

SpdOperator make_regularizer(const std::string& reg, index_t size, index_t depth, double alpha) {
  if (reg == "identity") return SpdOperator::identity(size, depth);
  if (reg == "d1") return build_reg_d(size, depth, 1, alpha);
  if (reg == "d2") return build_reg_d(size, depth, 2, alpha);
  throw Error("unknown regularizer '" + reg + "' (identity|d1|d2)");
}

Solution run_solver(const Problem& problem, const Tensor3& b, const std::vector<double>& slice_delta,
                    double global_delta, const SolverOptions& opts) {
  const Method method = parse_method(opts.method);
  const Dims ad = problem.a.dims();
  const SpdOperator l = make_regularizer(opts.reg, ad.cols, ad.depth, opts.alpha);
  const Operators ops{problem.a, l, problem.m};

  DiscrepancyConfig cfg;
  cfg.eta = opts.eta;
  cfg.mu_lo = opts.mu_lo;
  cfg.mu_hi = opts.mu_hi;
  cfg.k_init = opts.k_init;
  cfg.k_max = opts.k_max;
  cfg.verify = opts.verify;
  cfg.krylov.reorthogonalize = opts.reorthogonalize;
  cfg.krylov.seed = opts.seed;
  cfg.delta = used_deltas(method, slice_delta, global_delta);
  try {
    return solve(method, ops, b, cfg);
  } catch (const SolveFailure& e) {
    std::cerr << "warning: " << e.what() << "\n";
    return e.partial();
  }
}

int run_deblur(const DeblurOptions& opts) {
  const Meta meta = read_meta(opts.in_dir / "meta.txt");
  const Tensor3 b = read_t3b(opts.in_dir / "degraded.t3b");
  std::optional<Tensor3> truth;
  if (fs::exists(opts.in_dir / "truth.t3b")) truth = read_t3b(opts.in_dir / "truth.t3b");

  const Problem problem = problem_from_meta(meta);
  double global_delta = meta_double(meta, "delta");
  std::vector<double> slice_delta;
  for (index_t j = 0; j < b.cols(); ++j) {
    slice_delta.push_back(meta_double(meta, "delta_" + std::to_string(j)));
  }
  if (opts.delta) {
    global_delta = *opts.delta;
    slice_delta.assign(slice_delta.size(), *opts.delta);
  }

  const Solution sol = run_solver(problem, b, slice_delta, global_delta, opts.solver);
  const Method method = sol.report.method;

  fs::create_directories(opts.out_dir);
  write_t3b(opts.out_dir / "restored.t3b", sol.x);
  write_images(opts.out_dir, "restored", sol.x);

  std::vector<ReportRow> rows;
  const std::string level = num(meta_double(meta, "noise_level"));
  for (const auto& rec : sol.report.slices) {
    ReportRow row;
    row.method = std::string(method_name(method));
    row.reg = opts.solver.reg;
    row.noise_level = level;
    row.slice = is_p_method(method) ? std::to_string(rec.slice) : "all";
    if (rec.failed) row.slice += ":failed";
    row.k = std::to_string(rec.k);
    row.mu = num(rec.mu);
    row.discrepancy = num(rec.discrepancy);
    if (truth) {
      const bool one = is_p_method(method);
      const Metrics q = one ? metrics(sol.x.lateral(rec.slice), truth->lateral(rec.slice))
                            : metrics(sol.x, *truth);
      row.psnr = num(q.psnr);
      row.relerr = num(q.relative_error);
    } else {
      row.psnr = row.relerr = "nan";
    }
    row.cpu_secs = secs(is_p_method(method) ? rec.wall_secs : sol.report.wall_secs, opts.no_timing);
    rows.push_back(std::move(row));
  }
  const fs::path report = opts.report.empty() ? opts.out_dir / "report.csv" : opts.report;
  write_report(report, rows);
  fs::path sidecar = report;
  sidecar.replace_extension(".meta");
  write_meta(sidecar, solve_meta(sol, opts.solver, used_deltas(method, slice_delta, global_delta)));
  return sol.report.failed() ? 2 : 0;
}

std::vector<ReportRow> run_bench(const BenchOptions& opts) {
  std::vector<ReportRow> rows;
  for (double level : opts.levels) {
    SynthOptions so = opts.synth;
    so.noise_level = level;
    const Synthesized data = synthesize(so);
    const Problem problem = problem_from_meta(data.meta);
    for (const auto& reg : opts.regs) {
      for (const auto& method_str : opts.methods) {
        SolverOptions solver = opts.solver;
        solver.method = method_str;
        solver.reg = reg;
        ReportRow row;
        row.method = method_str;
        row.reg = reg;
        row.noise_level = num(level);
        row.slice = "all";
        try {
          const Solution sol = run_solver(problem, data.degraded, data.noise.slice_delta,
                                          data.noise.delta, solver);
          const bool per_slice = is_p_method(sol.report.method) && sol.report.slices.size() > 1;
          double disc_sq = 0.0;
          for (const auto& rec : sol.report.slices) disc_sq += rec.discrepancy * rec.discrepancy;
          const SliceRecord& first = sol.report.slices.front();
          row.k = per_slice ? "-" : std::to_string(first.k);
          row.mu = per_slice ? "-" : num(first.mu);
          row.discrepancy = num(std::sqrt(disc_sq));
          const Metrics q = metrics(sol.x, data.truth);
          row.psnr = num(q.psnr);
          row.relerr = num(q.relative_error);
          row.cpu_secs = secs(sol.report.wall_secs, opts.no_timing);
          if (sol.report.failed()) row.slice = "all:failed";
        } catch (const Error& e) {
          std::cerr << "bench cell " << method_str << "/" << reg << "/" << level
                    << " failed: " << e.what() << "\n";
          row.slice = "all:failed";
          row.k = row.mu = row.discrepancy = row.psnr = row.relerr = "nan";
          row.cpu_secs = secs(0.0, true);
        }
        rows.push_back(std::move(row));
      }
    }
  }
  if (!opts.report.empty()) write_report(opts.report, rows);
  return rows;
}

void run_convert(const ConvertOptions& opts) {
  if (opts.inputs.empty()) throw Error("convert: no input");
  const auto ext = [](const fs::path& p) { return p.extension().string(); };
  if (ext(opts.output) == ".t3b") {
    std::vector<Eigen::MatrixXd> planes;
    for (const auto& in : opts.inputs) {
      Image img = read_pnm(in);
      for (auto& p : img.planes) planes.push_back(std::move(p));
    }
    write_t3b(opts.output, multi_twist(planes));
    return;
  }
  if (opts.inputs.size() != 1 || ext(opts.inputs.front()) != ".t3b") {
    throw Error("convert: expected images -> .t3b or a single .t3b -> image(s)");
  }
  const auto planes = multi_squeeze(read_t3b(opts.inputs.front()));
  if (ext(opts.output) == ".ppm") {
    if (planes.size() != 3) throw Error("convert: a .ppm target needs exactly 3 lateral slices");
    write_pnm(opts.output, Image{planes});
    return;
  }
  if (planes.size() == 1) {
    write_pnm(opts.output, Image{planes});
    return;
  }
  const fs::path dir = opts.output.parent_path();
  const std::string stem = opts.output.stem().string();
  for (std::size_t j = 0; j < planes.size(); ++j) {
    write_pnm(dir / (stem + "_" + std::to_string(j) + ".pgm"), Image{{planes[j]}});
  }
}

namespace {

void add_synth_flags(CLI::App* cmd, SynthOptions& o, bool with_noise_level) {
  cmd->add_option("--input", o.inputs, "PGM/PPM image, or several PGM frames");
  cmd->add_option("--phantom", o.phantom, "procedural input: shepp-logan | color | video");
  cmd->add_option("--size", o.size, "phantom size in pixels")->capture_default_str();
  cmd->add_option("--frames", o.frames, "frame count for --phantom video")->capture_default_str();
  cmd->add_option("--sigma", o.sigma, "blur standard deviation")->capture_default_str();
  cmd->add_option("--band", o.band, "blur bandwidth")->capture_default_str();
  cmd->add_option("--blur-variant", o.variant, "symmetric | circulant")->capture_default_str();
  if (with_noise_level) {
    cmd->add_option("--noise-level", o.noise_level, "||E||_{M^-1} / ||A*X||_F")
        ->capture_default_str();
  }
  cmd->add_option("--omega", o.omega, "covariance shift")->capture_default_str();
  cmd->add_option("--seed", o.seed, "noise seed")->capture_default_str();
}

void add_solver_flags(CLI::App* cmd, SolverOptions& o, bool with_method) {
  if (with_method) {
    cmd->add_option("--method", o.method, "wtgkt-p | wg-tgkt-p | wgg-tgkt")->capture_default_str();
    cmd->add_option("--reg", o.reg, "identity | d1 | d2")->capture_default_str();
  }
  cmd->add_option("--alpha", o.alpha, "regularizer shift")->capture_default_str();
  cmd->add_option("--eta", o.eta, "discrepancy safety factor")->capture_default_str();
  cmd->add_option("--mu-lo", o.mu_lo, "bisection interval start")->capture_default_str();
  cmd->add_option("--mu-hi", o.mu_hi, "bisection interval end")->capture_default_str();
  cmd->add_option("--k-init", o.k_init, "initial step count")->capture_default_str();
  cmd->add_option("--k-max", o.k_max, "step cap")->capture_default_str();
  cmd->add_flag("--verify", o.verify, "also compute the full-space residual");
  cmd->add_flag("--reorthogonalize", o.reorthogonalize, "one pass of weighted Gram-Schmidt");
  cmd->add_option("--krylov-seed", o.seed, "seed for refilled Fourier faces")
      ->capture_default_str();
}

}  // namespace

void add_commands(CLI::App& app, int& exit_code) {
  app.set_config("--config", "", "TOML/INI file; command line flags take precedence");
  app.require_subcommand(1);

  auto synth = std::make_shared<SynthOptions>();
  auto* cs = app.add_subcommand("synth", "blur and add correlated noise to an image");
  add_synth_flags(cs, *synth, true);
  cs->add_option("--out-dir", synth->out_dir, "output directory")->required();
  cs->callback([synth, &exit_code] {
    const Synthesized s = run_synth(*synth);
    std::cout << "delta " << format_double(s.noise.delta) << "\n";
    exit_code = 0;
  });

  auto deblur = std::make_shared<DeblurOptions>();
  auto delta = std::make_shared<double>(0.0);
  auto* cd = app.add_subcommand("deblur", "restore synthesized data");
  cd->add_option("--in-dir", deblur->in_dir, "directory written by synth")->required();
  add_solver_flags(cd, deblur->solver, true);
  auto* delta_opt = cd->add_option("--delta", *delta, "override the recorded noise bound");
  cd->add_option("--out-dir", deblur->out_dir, "output directory")->required();
  cd->add_option("--report", deblur->report, "CSV path (default out-dir/report.csv)");
  cd->add_flag("--no-timing", deblur->no_timing, "write cpu_secs as 0");
  cd->callback([deblur, delta, delta_opt, &exit_code] {
    if (delta_opt->count() > 0) deblur->delta = *delta;
    exit_code = run_deblur(*deblur);
  });

  auto bench = std::make_shared<BenchOptions>();
  auto* cb = app.add_subcommand("bench", "sweep methods x regularizers x noise levels");
  add_synth_flags(cb, bench->synth, false);
  add_solver_flags(cb, bench->solver, false);
  cb->add_option("--levels", bench->levels, "noise levels")->capture_default_str();
  cb->add_option("--methods", bench->methods, "methods")->capture_default_str();
  cb->add_option("--regs", bench->regs, "regularizers")->capture_default_str();
  cb->add_option("--report", bench->report, "CSV path")->required();
  cb->add_flag("--no-timing", bench->no_timing, "write cpu_secs as 0");
  cb->callback([bench, &exit_code] {
    const auto rows = run_bench(*bench);
    exit_code = 0;
    for (const auto& r : rows) {
      if (r.slice.find("failed") != std::string::npos) exit_code = 2;
    }
  });

  auto convert = std::make_shared<ConvertOptions>();
  auto* cc = app.add_subcommand("convert", "PGM/PPM <-> T3B");
  cc->add_option("--input", convert->inputs, "input file(s)")->required();
  cc->add_option("--output", convert->output, "output file")->required();
  cc->callback([convert, &exit_code] {
    run_convert(*convert);
    exit_code = 0;
  });
}

}  // namespace tgk::cli
