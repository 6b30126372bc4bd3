#pragma once

// Weighted Golub-Kahan bidiagonalization under the t-product.
//
// wtgkb     tubal coefficients; one lateral slice B.
// wgg_tgkb  scalar coefficients; B with p lateral slices treated as a whole.
// wg_tgkb   wgg_tgkb restricted to a single lateral slice.
//
// Operator products A*L*W and A^T*M^{-1}*Q are evaluated right to left and
// L*W_j, M^{-1}*Q_j are kept alongside the bases, so a step costs one apply
// of each of A, A^T, L and M^{-1}.
//
// A zero coefficient stops the recurrence: the result is truncated at the
// last complete step and `breakdown_step` records where it happened.

#include <cstdint>
#include <optional>
#include <vector>

#include "tgk/random.hpp"
#include "tgk/reduced.hpp"
#include "tgk/spd.hpp"
#include "tgk/tensor.hpp"

namespace tgk {

/// Non-owning handles to the fixed operators of one problem.
struct Operators {
  const TensorOperator& a;
  const SpdOperator& l;  ///< m x m x n
  const SpdOperator& m;  ///< rows x rows x n
};

struct KrylovOptions {
  /// One pass of weighted Gram-Schmidt against all earlier basis slices.
  bool reorthogonalize = false;
  /// Seeds the draws used to refill numerically zero Fourier faces.
  std::uint64_t seed = 0;
};

struct TensorGkb {
  std::vector<Tensor3> w;   ///< W_1..W_k, m x 1 x n
  std::vector<Tensor3> q;   ///< Q_1..Q_{k+1}, rows x 1 x n
  std::vector<Tensor3> lw;  ///< L * W_j
  std::vector<Tensor3> mq;  ///< M^{-1} * Q_j
  TensorBidiagonal pbar;    ///< c_1..c_k, z_1..z_{k+1}
  std::optional<int> breakdown_step;
  GaussianStream rng;
  KrylovOptions options;
  double scale = 0.0;  ///< largest Fourier magnitude of c_j, z_{j+1} so far

  int steps() const { return pbar.steps(); }
  const Tensor3& z1() const { return pbar.z.front(); }
  Tensor3 basis_w() const { return hcat(w); }
  Tensor3 basis_q() const { return hcat(q); }
};

/// k steps of the tubal process started from the lateral slice b.
/// Throws BreakdownError(step 0) when z_1 or c_1 is not invertible.
TensorGkb wtgkb(const Operators& ops, const Tensor3& b, int k, const KrylovOptions& opts = {});

/// Continues a run by `by` steps; bitwise identical to a fresh run with k + by.
/// Throws BreakdownError carrying the original step if the run already broke down.
TensorGkb extend(TensorGkb run, const Operators& ops, int by);

struct GlobalGkb {
  std::vector<Tensor3> w;   ///< W_1..W_k, blocks m x p x n
  std::vector<Tensor3> q;   ///< Q_1..Q_{k+1}, blocks rows x p x n
  std::vector<Tensor3> lw;  ///< L * W_j
  std::vector<Tensor3> mq;  ///< M^{-1} * Q_j
  std::vector<double> alpha;  ///< alpha_1..alpha_k
  std::vector<double> beta;   ///< beta_1..beta_{k+1}; beta[0] = ||B||_{M^{-1}}
  std::optional<int> breakdown_step;
  KrylovOptions options;

  int steps() const { return static_cast<int>(alpha.size()); }
  double beta1() const { return beta.front(); }
  /// (k+1) x k lower bidiagonal with alpha on the diagonal.
  ScalarBidiagonal pbar() const;
};

/// k steps of the global process on B with p >= 1 lateral slices.
GlobalGkb wgg_tgkb(const Operators& ops, const Tensor3& b, int k, const KrylovOptions& opts = {});

/// The global process on a single lateral slice; rejects p != 1.
GlobalGkb wg_tgkb(const Operators& ops, const Tensor3& b, int k, const KrylovOptions& opts = {});

GlobalGkb extend(GlobalGkb run, const Operators& ops, int by);

}  // namespace tgk
