#include "tgk/tikhonov.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

namespace tgk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Shared driver for one right-hand side. `Process` adapts a bidiagonalization:
//   start(k), grow(), steps(), broken(), residual_sq(mu), finish(mu) -> X.
template <class Process>
SliceRecord drive(Process& proc, double delta, const DiscrepancyConfig& cfg, Tensor3& x) {
  const Stopwatch clock;
  SliceRecord rec;
  rec.delta = delta;
  const double target = (cfg.eta * delta) * (cfg.eta * delta);
  proc.start(cfg.k_init);
  for (;;) {
    rec.k = proc.steps();
    rec.breakdown_step = proc.broken();
    const double ls = proc.residual_sq(kInf);
    rec.residual_history.push_back(std::sqrt(ls));
    if (ls < target) {
      try {
        const Bisection bis =
            bisect_mu([&proc](double mu) { return proc.residual_sq(mu); }, target, cfg);
        rec.mu = bis.mu;
        rec.bisect_iterations = bis.iterations;
        rec.discrepancy = std::sqrt(proc.residual_sq(bis.mu));
        x = proc.finish(bis.mu);
        rec.wall_secs = clock.seconds();
        return rec;
      } catch (const BracketError& e) {
        if (e.side() == BracketError::Side::below_lower) {
          rec.failed = true;
          rec.message = "discrepancy already met at the lower end of the mu interval";
          return rec;
        }
        // Residual at mu_hi is still too large: more steps are needed.
      }
    }
    if (rec.breakdown_step) {
      rec.failed = true;
      rec.message = "bidiagonalization broke down before the discrepancy was met";
      return rec;
    }
    if (rec.k >= cfg.k_max) {
      rec.failed = true;
      rec.message = "step cap reached before the discrepancy was met";
      return rec;
    }
    proc.grow();
  }
}

class TensorProcess {
 public:
  TensorProcess(const Operators& ops, const Tensor3& b, const KrylovOptions& opts)
      : ops_(ops), b_(b), opts_(opts) {}

  void start(int k) {
    run_ = wtgkb(ops_, b_, k, opts_);
    refresh();
  }
  void grow() {
    run_ = extend(std::move(run_), ops_, 1);
    refresh();
  }
  int steps() const { return run_.steps(); }
  std::optional<int> broken() const { return run_.breakdown_step; }
  double residual_sq(double mu) const { return reduced_->residual_sq(mu); }
  Tensor3 finish(double mu) const {
    return ops_.l.apply(tprod(run_.basis_w(), reduced_->solve(mu)));
  }

 private:
  void refresh() { reduced_.emplace(run_.pbar, run_.z1()); }

  const Operators& ops_;
  const Tensor3& b_;
  KrylovOptions opts_;
  TensorGkb run_;
  std::optional<FourierBidiagonal> reduced_;
};

class GlobalProcess {
 public:
  GlobalProcess(const Operators& ops, const Tensor3& b, const KrylovOptions& opts)
      : ops_(ops), b_(b), opts_(opts) {}

  void start(int k) {
    run_ = wgg_tgkb(ops_, b_, k, opts_);
    pbar_ = run_.pbar();
  }
  void grow() {
    run_ = extend(std::move(run_), ops_, 1);
    pbar_ = run_.pbar();
  }
  int steps() const { return run_.steps(); }
  std::optional<int> broken() const { return run_.breakdown_step; }
  double residual_sq(double mu) const { return pbar_.residual_sq(run_.beta1(), mu); }
  Tensor3 finish(double mu) const {
    const Eigen::VectorXd z = pbar_.solve(run_.beta1(), mu);
    return ops_.l.apply(
        circledast(run_.w, std::span<const double>(z.data(), static_cast<std::size_t>(z.size()))));
  }

 private:
  const Operators& ops_;
  const Tensor3& b_;
  KrylovOptions opts_;
  GlobalGkb run_;
  ScalarBidiagonal pbar_;
};

void verify_record(SliceRecord& rec, const Operators& ops, const Tensor3& x, const Tensor3& b) {
  Tensor3 r = ops.a.apply(x);
  r -= b;
  rec.full_discrepancy = weighted_norm(r, ops.m, Weight::inverse);
}

template <class Process>
Solution solve_one(Method method, const Operators& ops, const Tensor3& b,
                   const DiscrepancyConfig& cfg) {
  const Stopwatch clock;
  Solution sol;
  sol.report.method = method;
  sol.x = Tensor3(ops.a.dims().cols, b.cols(), b.depth());
  Process proc(ops, b, cfg.krylov);
  SliceRecord rec = drive(proc, cfg.delta.front(), cfg, sol.x);
  if (cfg.verify && !rec.failed) verify_record(rec, ops, sol.x, b);
  const bool failed = rec.failed;
  const std::string message = rec.message;
  sol.report.slices.push_back(std::move(rec));
  sol.report.wall_secs = clock.seconds();
  if (failed) throw SolveFailure(std::string(method_name(method)) + ": " + message, std::move(sol));
  return sol;
}

template <class Process>
Solution solve_slices(Method method, const Operators& ops, const Tensor3& b,
                      const DiscrepancyConfig& cfg) {
  const Stopwatch clock;
  Solution sol;
  sol.report.method = method;
  sol.x = Tensor3(ops.a.dims().cols, b.cols(), b.depth());
  std::string first_failure;
  for (index_t j = 0; j < b.cols(); ++j) {
    const Tensor3 bj = b.lateral(j);
    Process proc(ops, bj, cfg.krylov);
    Tensor3 xj(ops.a.dims().cols, 1, b.depth());
    SliceRecord rec = drive(proc, cfg.delta[static_cast<std::size_t>(j)], cfg, xj);
    rec.slice = static_cast<int>(j);
    if (!rec.failed) {
      if (cfg.verify) verify_record(rec, ops, xj, bj);
      sol.x.set_lateral(j, xj);
    } else if (first_failure.empty()) {
      first_failure = "slice " + std::to_string(j) + ": " + rec.message;
    }
    sol.report.slices.push_back(std::move(rec));
  }
  sol.report.wall_secs = clock.seconds();
  if (!first_failure.empty() && !cfg.allow_partial) {
    throw SolveFailure(std::string(method_name(method)) + ": " + first_failure, std::move(sol));
  }
  return sol;
}

void check_lateral(const Tensor3& b, const char* who) {
  if (b.cols() != 1) throw DimensionError(std::string(who) + ": B must be a lateral slice");
}

}  // namespace

void DiscrepancyConfig::validate(std::size_t slices) const {
  if (!(eta > 1.0)) throw Error("discrepancy config: eta must exceed 1");
  if (!(mu_lo > 0.0) || !(mu_hi > mu_lo) || std::isinf(mu_hi)) {
    throw Error("discrepancy config: need 0 < mu_lo < mu_hi < inf");
  }
  if (!(log_width > 0.0) || max_bisect < 1) throw Error("discrepancy config: bad bisection limits");
  if (k_init < 1 || k_max < k_init) throw Error("discrepancy config: need 1 <= k_init <= k_max");
  if (delta.size() != slices) {
    throw Error("discrepancy config: expected " + std::to_string(slices) + " delta value(s), got " +
                std::to_string(delta.size()));
  }
  for (double d : delta) {
    if (!(d > 0.0) || std::isinf(d)) throw Error("discrepancy config: delta must be positive");
  }
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::wtgkt:
      return "wtgkt";
    case Method::wtgkt_p:
      return "wtgkt-p";
    case Method::wg_tgkt:
      return "wg-tgkt";
    case Method::wg_tgkt_p:
      return "wg-tgkt-p";
    case Method::wgg_tgkt:
      return "wgg-tgkt";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::wtgkt, Method::wtgkt_p, Method::wg_tgkt, Method::wg_tgkt_p,
                   Method::wgg_tgkt}) {
    if (method_name(m) == name) return m;
  }
  throw Error("unknown method '" + std::string(name) + "'");
}

bool SolveReport::breakdown() const {
  for (const auto& s : slices) {
    if (s.breakdown_step) return true;
  }
  return false;
}

bool SolveReport::failed() const {
  for (const auto& s : slices) {
    if (s.failed) return true;
  }
  return false;
}

double phi_k(const TensorBidiagonal& pbar, const Tensor3& z1, double mu) {
  return FourierBidiagonal(pbar, z1).residual_sq(mu);
}

double psi_k(const ScalarBidiagonal& pbar, double beta1, double mu) {
  return pbar.residual_sq(beta1, mu);
}

Bisection bisect_mu(const std::function<double(double)>& f, double target,
                    const DiscrepancyConfig& cfg) {
  double lo = std::log10(cfg.mu_lo);
  double hi = std::log10(cfg.mu_hi);
  double f_lo = f(cfg.mu_lo);
  double f_hi = f(cfg.mu_hi);
  if (f_lo < target) {
    throw BracketError("bisect_mu: target above f(mu_lo)", BracketError::Side::below_lower);
  }
  if (f_hi > target) {
    throw BracketError("bisect_mu: target below f(mu_hi)", BracketError::Side::above_upper);
  }
  int it = 0;
  while (hi - lo >= cfg.log_width && it < cfg.max_bisect) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(std::pow(10.0, mid));
    if (fm > target) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
      f_hi = fm;
    }
    ++it;
  }
  Bisection out;
  out.lo = std::pow(10.0, lo);
  out.hi = std::pow(10.0, hi);
  out.mu = std::pow(10.0, 0.5 * (lo + hi));
  out.f_lo = f_lo;
  out.f_hi = f_hi;
  out.iterations = it;
  return out;
}

Solution wtgkt(const Operators& ops, const Tensor3& b, const DiscrepancyConfig& cfg) {
  check_lateral(b, "wtgkt");
  cfg.validate(1);
  return solve_one<TensorProcess>(Method::wtgkt, ops, b, cfg);
}

Solution wtgkt_p(const Operators& ops, const Tensor3& b, const DiscrepancyConfig& cfg) {
  cfg.validate(static_cast<std::size_t>(b.cols()));
  return solve_slices<TensorProcess>(Method::wtgkt_p, ops, b, cfg);
}

Solution wg_tgkt(const Operators& ops, const Tensor3& b, const DiscrepancyConfig& cfg) {
  check_lateral(b, "wg_tgkt");
  cfg.validate(1);
  return solve_one<GlobalProcess>(Method::wg_tgkt, ops, b, cfg);
}

Solution wg_tgkt_p(const Operators& ops, const Tensor3& b, const DiscrepancyConfig& cfg) {
  cfg.validate(static_cast<std::size_t>(b.cols()));
  return solve_slices<GlobalProcess>(Method::wg_tgkt_p, ops, b, cfg);
}

Solution wgg_tgkt(const Operators& ops, const Tensor3& b, const DiscrepancyConfig& cfg) {
  cfg.validate(1);
  return solve_one<GlobalProcess>(Method::wgg_tgkt, ops, b, cfg);
}

Solution solve(Method method, const Operators& ops, const Tensor3& b,
               const DiscrepancyConfig& cfg) {
  switch (method) {
    case Method::wtgkt:
      return wtgkt(ops, b, cfg);
    case Method::wtgkt_p:
      return wtgkt_p(ops, b, cfg);
    case Method::wg_tgkt:
      return wg_tgkt(ops, b, cfg);
    case Method::wg_tgkt_p:
      return wg_tgkt_p(ops, b, cfg);
    case Method::wgg_tgkt:
      break;
  }
  return wgg_tgkt(ops, b, cfg);
}

}  // namespace tgk
