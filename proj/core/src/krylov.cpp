#include "tgk/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tgk/error.hpp"

namespace tgk {
namespace {

const double kSqrtEps = std::sqrt(std::numeric_limits<double>::epsilon());

double tube_peak(const Tensor3& tube) {
  const FourierTensor3 f = fft_mode3(tube);
  double peak = 0.0;
  for (const cdouble& v : f.data()) peak = std::max(peak, std::abs(v));
  return peak;
}

// x -= sum_j V_j * (V_j^T N x), with NV_j = N * V_j supplied.
void reorthogonalize_tubal(Tensor3& x, const std::vector<Tensor3>& v,
                           const std::vector<Tensor3>& nv) {
  for (std::size_t j = 0; j < v.size(); ++j) {
    const Tensor3 coef = tprod(ttranspose(nv[j]), x);
    x -= tprod(v[j], coef);
  }
}

void reorthogonalize_global(Tensor3& x, const std::vector<Tensor3>& v,
                            const std::vector<Tensor3>& nv) {
  for (std::size_t j = 0; j < v.size(); ++j) x -= inner(nv[j], x) * v[j];
}

void check_problem(const Operators& ops, const Tensor3& b) {
  const Dims a = ops.a.dims();
  if (b.rows() != a.rows || b.depth() != a.depth) {
    throw DimensionError("bidiagonalization: B does not match the rows/depth of A");
  }
  if (ops.m.size() != a.rows || ops.m.depth() != a.depth) {
    throw DimensionError("bidiagonalization: M must be rows x rows x n");
  }
  if (ops.l.size() != a.cols || ops.l.depth() != a.depth) {
    throw DimensionError("bidiagonalization: L must be m x m x n");
  }
}

// One step of the tubal recurrence: W_i, c_i, then Q_{i+1}, z_{i+1}.
// Returns false when the run broke down.
bool tensor_step(TensorGkb& run, const Operators& ops) {
  const int i = run.steps() + 1;
  Tensor3 wt = ops.a.apply_transpose(run.mq.back());
  if (i > 1) wt -= tprod(run.w.back(), run.pbar.z.back());
  if (run.options.reorthogonalize) reorthogonalize_tubal(wt, run.w, run.lw);

  Normalized nw;
  try {
    nw = normalize(wt, ops.l, Weight::direct, run.rng, run.scale);
  } catch (const ZeroInputError&) {
    if (i == 1) throw BreakdownError("wtgkb: A^T M^{-1} B is zero", 0);
    run.breakdown_step = i;
    return false;
  }
  if (i == 1 && !nw.invertible()) throw BreakdownError("wtgkb: c_1 is not invertible", 0);
  run.scale = std::max(run.scale, tube_peak(nw.a));
  run.lw.push_back(ops.l.apply(nw.v));
  run.w.push_back(std::move(nw.v));
  run.pbar.c.push_back(std::move(nw.a));

  Tensor3 qt = ops.a.apply(run.lw.back());
  qt -= tprod(run.q.back(), run.pbar.c.back());
  if (run.options.reorthogonalize) reorthogonalize_tubal(qt, run.q, run.mq);

  Normalized nq;
  try {
    nq = normalize(qt, ops.m, Weight::inverse, run.rng, run.scale);
  } catch (const ZeroInputError&) {
    const Dims qd = run.q.back().dims();
    run.q.emplace_back(qd);
    run.mq.emplace_back(qd);
    run.pbar.z.emplace_back(1, 1, qd.depth);
    run.breakdown_step = i;
    return false;
  }
  run.scale = std::max(run.scale, tube_peak(nq.a));
  run.mq.push_back(ops.m.apply_inverse(nq.v));
  run.q.push_back(std::move(nq.v));
  run.pbar.z.push_back(std::move(nq.a));
  return true;
}

bool global_step(GlobalGkb& run, const Operators& ops) {
  const int j = run.steps() + 1;
  Tensor3 wt = ops.a.apply_transpose(run.mq.back());
  if (j > 1) wt -= run.beta.back() * run.w.back();
  if (run.options.reorthogonalize) reorthogonalize_global(wt, run.w, run.lw);

  double scale = 0.0;
  for (double a : run.alpha) scale = std::max(scale, a);
  for (std::size_t s = 1; s < run.beta.size(); ++s) scale = std::max(scale, run.beta[s]);

  Tensor3 lwt = ops.l.apply(wt);
  const double alpha = std::sqrt(std::max(inner(wt, lwt), 0.0));
  if (alpha == 0.0 || alpha <= kSqrtEps * scale) {
    if (j == 1) throw BreakdownError("wgg_tgkb: A^T M^{-1} B is zero", 0);
    run.breakdown_step = j;
    return false;
  }
  wt *= 1.0 / alpha;
  lwt *= 1.0 / alpha;
  run.alpha.push_back(alpha);
  run.w.push_back(std::move(wt));
  run.lw.push_back(std::move(lwt));
  scale = std::max(scale, alpha);

  Tensor3 qt = ops.a.apply(run.lw.back());
  qt -= alpha * run.q.back();
  if (run.options.reorthogonalize) reorthogonalize_global(qt, run.q, run.mq);

  Tensor3 mqt = ops.m.apply_inverse(qt);
  const double beta = std::sqrt(std::max(inner(qt, mqt), 0.0));
  if (beta == 0.0 || beta <= kSqrtEps * scale) {
    const Dims qd = run.q.back().dims();
    run.q.emplace_back(qd);
    run.mq.emplace_back(qd);
    run.beta.push_back(0.0);
    run.breakdown_step = j;
    return false;
  }
  qt *= 1.0 / beta;
  mqt *= 1.0 / beta;
  run.beta.push_back(beta);
  run.q.push_back(std::move(qt));
  run.mq.push_back(std::move(mqt));
  return true;
}

void check_steps(int k) {
  if (k < 0) throw Error("bidiagonalization: step count must be nonnegative");
}

}  // namespace

TensorGkb wtgkb(const Operators& ops, const Tensor3& b, int k, const KrylovOptions& opts) {
  check_problem(ops, b);
  if (b.cols() != 1) throw DimensionError("wtgkb: B must be a lateral slice");
  if (k < 1) throw Error("wtgkb: k must be at least 1");

  TensorGkb run;
  run.options = opts;
  run.rng = GaussianStream(opts.seed);
  Normalized nb;
  try {
    nb = normalize(b, ops.m, Weight::inverse, run.rng);
  } catch (const ZeroInputError&) {
    throw BreakdownError("wtgkb: B is zero", 0);
  }
  if (!nb.invertible()) throw BreakdownError("wtgkb: z_1 is not invertible", 0);
  run.mq.push_back(ops.m.apply_inverse(nb.v));
  run.q.push_back(std::move(nb.v));
  run.pbar.z.push_back(std::move(nb.a));
  return extend(std::move(run), ops, k);
}

TensorGkb extend(TensorGkb run, const Operators& ops, int by) {
  check_steps(by);
  if (by > 0 && run.breakdown_step) {
    throw BreakdownError("wtgkb: cannot extend past a breakdown", *run.breakdown_step);
  }
  for (int s = 0; s < by; ++s) {
    if (!tensor_step(run, ops)) break;
  }
  return run;
}

ScalarBidiagonal GlobalGkb::pbar() const {
  ScalarBidiagonal p;
  const int k = steps();
  p.diag.resize(k);
  p.sub.resize(k);
  for (int j = 0; j < k; ++j) {
    p.diag(j) = alpha[static_cast<std::size_t>(j)];
    p.sub(j) = beta[static_cast<std::size_t>(j) + 1];
  }
  return p;
}

GlobalGkb wgg_tgkb(const Operators& ops, const Tensor3& b, int k, const KrylovOptions& opts) {
  check_problem(ops, b);
  if (k < 1) throw Error("wgg_tgkb: k must be at least 1");

  GlobalGkb run;
  run.options = opts;
  Tensor3 mb = ops.m.apply_inverse(b);
  const double beta1 = std::sqrt(std::max(inner(b, mb), 0.0));
  if (beta1 == 0.0) throw BreakdownError("wgg_tgkb: B is zero", 0);
  mb *= 1.0 / beta1;
  run.beta.push_back(beta1);
  run.q.push_back((1.0 / beta1) * b);
  run.mq.push_back(std::move(mb));
  return extend(std::move(run), ops, k);
}

GlobalGkb wg_tgkb(const Operators& ops, const Tensor3& b, int k, const KrylovOptions& opts) {
  if (b.cols() != 1) throw DimensionError("wg_tgkb: B must be a lateral slice");
  return wgg_tgkb(ops, b, k, opts);
}

GlobalGkb extend(GlobalGkb run, const Operators& ops, int by) {
  check_steps(by);
  if (by > 0 && run.breakdown_step) {
    throw BreakdownError("wgg_tgkb: cannot extend past a breakdown", *run.breakdown_step);
  }
  for (int s = 0; s < by; ++s) {
    if (!global_step(run, ops)) break;
  }
  return run;
}

}  // namespace tgk
