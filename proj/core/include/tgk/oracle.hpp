#pragma once

// Brute-force reference constructions used to check the FFT path. They
// materialize block-circulant matrices, so every entry point refuses inputs
// whose flattened size exceeds a cap.

#include <Eigen/Core>

#include "tgk/tensor.hpp"

namespace tgk::oracle {

/// Default cap on the flattened row and column counts (rows*n, cols*n).
inline constexpr index_t default_cap = 64;

/// (rows*n) x cols matrix stacking the frontal slices.
Eigen::MatrixXd unfold(const Tensor3& a);
/// Inverse of unfold for a given depth.
Tensor3 fold(const Eigen::MatrixXd& m, index_t depth);
/// (rows*n) x (cols*n) block-circulant matrix with unfold(a) as first block column.
Eigen::MatrixXd bcirc(const Tensor3& a, index_t cap = default_cap);

/// fold(bcirc(a) * unfold(b)).
Tensor3 bcirc_prod(const Tensor3& a, const Tensor3& b, index_t cap = default_cap);

struct Tsvd {
  Tensor3 u;  ///< rows x rows x n, orthogonal
  Tensor3 s;  ///< rows x cols x n, f-diagonal
  Tensor3 v;  ///< cols x cols x n, orthogonal
};

/// Facewise SVD in the Fourier domain. Fourier singular values are positive
/// and sorted, so the singular tubes have decreasing Frobenius norm.
Tsvd tsvd(const Tensor3& a, index_t cap = default_cap);

/// Frobenius norms of the singular tubes s_1, s_2, ... of an f-diagonal tensor.
Eigen::VectorXd singular_tube_norms(const Tensor3& s);

}  // namespace tgk::oracle
