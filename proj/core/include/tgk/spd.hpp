#pragma once

// Symmetric positive definite tensors under the t-product.
//
// A tensor N is SPD when every Fourier face is Hermitian positive definite.
// SpdOperator keeps the factorizations needed to apply N and N^{-1}; the
// inverse is never formed. Operators whose faces 2..n vanish ("spatial") act
// on every frontal slice with the same matrix, so no transform is needed.

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "tgk/random.hpp"
#include "tgk/tensor.hpp"

namespace tgk {

namespace detail {

/// Symmetric banded matrix with its banded Cholesky factor, stored by
/// diagonals. Products and solves cost O(n * bandwidth) per column.
class BandedSpd {
 public:
  /// Half bandwidth of `m` when it is narrow enough to pay off, else -1.
  static index_t useful_bandwidth(const Eigen::MatrixXd& m);
  /// `upper` is the Cholesky factor of m, which keeps the band.
  BandedSpd(const Eigen::MatrixXd& m, const Eigen::MatrixXd& upper, index_t band);

  index_t bandwidth() const { return band_; }
  /// x <- M x for a column-major block with size() rows.
  void multiply(Eigen::Ref<Eigen::MatrixXd> x) const;
  /// x <- M^{-1} x.
  void solve(Eigen::Ref<Eigen::MatrixXd> x) const;

 private:
  index_t n_;
  index_t band_;
  std::vector<Eigen::VectorXd> m_diag_;  // m_diag_[d](i) = M(i, i + d)
  std::vector<Eigen::VectorXd> r_diag_;  // r_diag_[d](i) = R(i, i + d)
};

}  // namespace detail

/// Selects N or N^{-1} as the weight of a norm or inner product.
enum class Weight { direct, inverse };

class SpdOperator {
 public:
  enum class Kind { identity, spatial, general };

  static SpdOperator identity(index_t size, index_t depth);
  /// first_face must be symmetric positive definite.
  static SpdOperator spatial(const Eigen::MatrixXd& first_face, index_t depth);
  /// Every Fourier face must be Hermitian (defect < 1e-10) and admit a Cholesky factor.
  static SpdOperator general(const Tensor3& t);
  /// spatial() when faces 2..n are exactly zero, general() otherwise.
  static SpdOperator from_tensor(const Tensor3& t);

  Kind kind() const { return kind_; }
  index_t size() const { return size_; }
  index_t depth() const { return depth_; }
  /// Dense size x size x depth representation.
  Tensor3 tensor() const;
  /// Spatial first face (identity for the identity kind).
  Eigen::MatrixXd first_face() const;

  Tensor3 apply(const Tensor3& x) const;
  /// Solves N * y = x with the cached factors.
  Tensor3 apply_inverse(const Tensor3& x) const;
  Tensor3 apply(const Tensor3& x, Weight w) const {
    return w == Weight::direct ? apply(x) : apply_inverse(x);
  }
  /// Same action on transformed data, face by face.
  FourierTensor3 apply_fourier(const FourierTensor3& x, Weight w) const;

  /// Cholesky factor R with N = R^T * R; Fourier faces upper triangular
  /// with positive diagonal.
  Tensor3 cholesky_factor() const;
  /// R^T * x without forming R^T for the spatial kinds.
  Tensor3 apply_factor_transpose(const Tensor3& x) const;

 private:
  SpdOperator() = default;
  void check_rows(const Tensor3& x, const char* who) const;

  Kind kind_ = Kind::identity;
  index_t size_ = 0;
  index_t depth_ = 0;
  Eigen::MatrixXd face_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  std::optional<detail::BandedSpd> banded_;  // spatial faces with a narrow band
  FourierTensor3 fourier_;
  std::vector<Eigen::LLT<Eigen::MatrixXcd>> face_llt_;
};

/// Weighted norm sqrt(trace((X^T * N * X)_(:,:,1))) = sqrt(<X, N*X>).
/// Tiny negative radicands are clamped; below -1e-12 relative throws NotSpdError.
double weighted_norm(const Tensor3& x, const SpdOperator& n, Weight w = Weight::direct);

/// <a, N*b>.
double weighted_inner(const Tensor3& a, const Tensor3& b, const SpdOperator& n,
                      Weight w = Weight::direct);

struct Normalized {
  Tensor3 v;              ///< lateral slice with ||v||_N = 1
  Tensor3 a;              ///< tube with x = v * a
  index_t replaced_faces = 0;  ///< Fourier faces refilled at random (a^(j) = 0)
  bool invertible() const { return replaced_faces == 0; }
};

/// Facewise normalization of a lateral slice in the Fourier domain. Faces
/// whose weighted norm is at most tol = sqrt(eps) * max(largest face norm,
/// reference) are replaced by a random unit face with a^(j) = 0 (conjugate
/// partner faces receive the conjugate draw). Throws ZeroInputError when
/// every face is below tol.
Normalized normalize(const Tensor3& x, const SpdOperator& n, Weight w, GaussianStream& rng,
                     double reference = 0.0);

/// Cholesky factor of a general SPD tensor: facewise chol of the Fourier faces.
Tensor3 tensor_cholesky(const Tensor3& m);
Tensor3 tensor_cholesky(const SpdOperator& m);

/// Gram matrix G(i, j) = <A_i, N * B_j> over two block lists.
Eigen::MatrixXd tdiamond(std::span<const Tensor3> a_blocks, std::span<const Tensor3> b_blocks,
                         const SpdOperator& n, Weight w = Weight::direct);

}  // namespace tgk
