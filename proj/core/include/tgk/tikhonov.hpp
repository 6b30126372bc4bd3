#pragma once

// Golub-Kahan-Tikhonov solvers with the discrepancy principle.
//
// Each solver grows the bidiagonalization one step at a time until the
// undamped projected residual drops below eta*delta, then picks mu by
// bisection on log10(mu) so that the damped projected residual equals
// eta*delta, and maps back X = L * (W_k applied to the projected solution).
// Regularization enters as mu^{-1} ||z||^2, so mu grows as the noise shrinks.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tgk/error.hpp"
#include "tgk/krylov.hpp"
#include "tgk/reduced.hpp"
#include "tgk/tensor.hpp"

namespace tgk {

struct DiscrepancyConfig {
  double eta = 1.1;
  /// One value per lateral slice for the p-methods, a single value otherwise.
  std::vector<double> delta;
  double mu_lo = 1e1;
  double mu_hi = 1e7;
  /// Bisection stops when the log10(mu) bracket is narrower than this...
  double log_width = 1e-3;
  /// ...or after this many halvings.
  int max_bisect = 100;
  int k_init = 2;
  int k_max = 300;
  /// Also evaluate the full-space residual ||A*X - B||_{M^{-1}} (one extra apply).
  bool verify = false;
  /// p-methods: keep going after a failed slice (its columns stay zero).
  bool allow_partial = false;
  KrylovOptions krylov;

  /// Throws Error unless eta > 1, 0 < mu_lo < mu_hi, 1 <= k_init <= k_max,
  /// and `delta` holds `slices` positive values.
  void validate(std::size_t slices) const;
};

enum class Method { wtgkt, wtgkt_p, wg_tgkt, wg_tgkt_p, wgg_tgkt };

/// Lower-case hyphenated name: "wtgkt-p", "wg-tgkt-p", "wgg-tgkt", ...
std::string_view method_name(Method m);
/// Inverse of method_name; throws Error on unknown names.
Method parse_method(std::string_view name);

struct SliceRecord {
  int slice = 0;  ///< lateral slice index, or 0 for the global method
  int k = 0;
  double mu = 0.0;
  double delta = 0.0;
  /// Projected residual norm at mu (equals the weighted full-space residual).
  double discrepancy = 0.0;
  /// ||A*X - B||_{M^{-1}}, when verify is on.
  std::optional<double> full_discrepancy;
  int bisect_iterations = 0;
  double wall_secs = 0.0;
  /// Undamped projected residual norm for every k tried.
  std::vector<double> residual_history;
  std::optional<int> breakdown_step;
  bool failed = false;
  std::string message;
};

struct SolveReport {
  Method method = Method::wtgkt;
  std::vector<SliceRecord> slices;
  double wall_secs = 0.0;
  bool breakdown() const;
  bool failed() const;
};

struct Solution {
  Tensor3 x;
  SolveReport report;
};

/// Thrown when some slice could not meet the discrepancy principle;
/// carries everything computed so far.
class SolveFailure : public DiscrepancyError {
 public:
  SolveFailure(const std::string& what, Solution partial)
      : DiscrepancyError(what), partial_(std::move(partial)) {}
  const Solution& partial() const noexcept { return partial_; }

 private:
  Solution partial_;
};

/// ||P*Z_mu - e_1*z_1||_F^2; phi(0) = ||z_1||_F^2.
double phi_k(const TensorBidiagonal& pbar, const Tensor3& z1, double mu);
/// ||P*z_mu - e_1*beta_1||_2^2; psi(0) = beta_1^2.
double psi_k(const ScalarBidiagonal& pbar, double beta1, double mu);

struct Bisection {
  double mu = 0.0;
  double lo = 0.0;  ///< final bracket in mu
  double hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;
  int iterations = 0;
};

/// Root of f(mu) = target for a decreasing f, bracketed by [mu_lo, mu_hi].
/// Throws BracketError when f(mu_lo) < target or f(mu_hi) > target.
Bisection bisect_mu(const std::function<double(double)>& f, double target,
                    const DiscrepancyConfig& cfg);

/// Single lateral slice, tubal process. cfg.delta has one entry.
Solution wtgkt(const Operators& ops, const Tensor3& b, const DiscrepancyConfig& cfg);
/// Each lateral slice j solved independently with delta_j.
Solution wtgkt_p(const Operators& ops, const Tensor3& b, const DiscrepancyConfig& cfg);
/// Single lateral slice, global process.
Solution wg_tgkt(const Operators& ops, const Tensor3& b, const DiscrepancyConfig& cfg);
Solution wg_tgkt_p(const Operators& ops, const Tensor3& b, const DiscrepancyConfig& cfg);
/// All p slices at once with one global delta.
Solution wgg_tgkt(const Operators& ops, const Tensor3& b, const DiscrepancyConfig& cfg);

/// Dispatch on the method tag.
Solution solve(Method method, const Operators& ops, const Tensor3& b,
               const DiscrepancyConfig& cfg);

}  // namespace tgk
