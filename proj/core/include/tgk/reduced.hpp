#pragma once

// Small projected problems produced by the bidiagonalization processes.
//
// Both the tubal (tensor) and the scalar bidiagonal are lower bidiagonal with
// k columns and k+1 rows. The damped least-squares problem
//
//     min || [P; lambda I] z - [rhs e_1; 0] ||,   lambda = mu^{-1/2},
//
// is solved by a sequence of Givens rotations in O(k) per Fourier face.
// mu = +inf gives the undamped least-squares solution, mu = 0 gives z = 0.

#include <span>
#include <vector>

#include <Eigen/Core>

#include "tgk/tensor.hpp"

namespace tgk {

/// Lower bidiagonal tensor of tubes: c_1..c_k on the diagonal and
/// z_2..z_{k+1} below it. z[0] holds z_1, the right-hand side factor with
/// Q_{k+1}^T * B = e_1 * z_1.
struct TensorBidiagonal {
  std::vector<Tensor3> c;
  std::vector<Tensor3> z;

  int steps() const { return static_cast<int>(c.size()); }
  index_t depth() const { return c.empty() ? 0 : c.front().depth(); }
  /// (k+1) x k x n tensor.
  Tensor3 assemble() const;
};

/// The tubal bidiagonal and its right-hand side transformed once, so the
/// regularization parameter can be swept cheaply.
class FourierBidiagonal {
 public:
  FourierBidiagonal(const TensorBidiagonal& pbar, const Tensor3& rhs_tube);

  int steps() const { return steps_; }
  index_t depth() const { return depth_; }

  /// Fourier faces of Z_{mu,k}: column j is face j.
  Eigen::MatrixXcd solve_faces(double mu) const;
  /// Z_{mu,k} as a k x 1 x n lateral slice.
  Tensor3 solve(double mu) const;
  /// ||P * Z_{mu,k} - e_1 * z_1||_F^2.
  double residual_sq(double mu) const;

 private:
  int steps_;
  index_t depth_;
  Eigen::MatrixXcd diag_;  // k x n
  Eigen::MatrixXcd sub_;   // k x n, sub_(j, f) = entry (j+1, j)
  Eigen::VectorXcd rhs_;   // n
  double rhs_norm_sq_;
};

/// Z_{mu,k} solving (P^T*P + mu^{-1} I) * Z = P^T * e_1 * z_1. Throws for mu <= 0.
Tensor3 solve_tensor_tikhonov(const TensorBidiagonal& pbar, const Tensor3& rhs_tube, double mu);

/// Scalar lower bidiagonal (k+1) x k with diag(j) = P(j, j), sub(j) = P(j+1, j).
struct ScalarBidiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd sub;

  static ScalarBidiagonal from_matrix(const Eigen::MatrixXd& p);
  int steps() const { return static_cast<int>(diag.size()); }
  Eigen::MatrixXd matrix() const;

  Eigen::VectorXd solve(double rhs, double mu) const;
  double residual_sq(double rhs, double mu) const;
};

namespace detail {

/// Givens solve of min ||[P; lambda I] z - [rhs e_1; 0]|| for one bidiagonal.
template <class Scalar>
void solve_damped_bidiagonal(std::span<const Scalar> diag, std::span<const Scalar> sub,
                             Scalar rhs, double lambda, std::span<Scalar> z);

template <class Scalar>
double bidiagonal_residual_sq(std::span<const Scalar> diag, std::span<const Scalar> sub,
                              Scalar rhs, std::span<const Scalar> z);

}  // namespace detail

}  // namespace tgk
