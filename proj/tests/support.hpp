#pragma once

// Shared fixtures for the unit tests: seeded random tensors, SPD tensors and
// small dense helpers that stay independent of the FFT code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/Core>
#include <Eigen/LU>

#include "tgk/oracle.hpp"
#include "tgk/random.hpp"
#include "tgk/spd.hpp"
#include "tgk/tensor.hpp"

namespace tgk::test {

inline Tensor3 random_tensor(Dims dims, std::uint64_t seed) {
  GaussianStream rng(seed);
  return random_normal(dims, rng);
}

/// G^T * G + shift * I for a random G, which is SPD for any shift > 0.
inline Tensor3 random_spd_tensor(index_t size, index_t depth, std::uint64_t seed,
                                 double shift = 1.0) {
  const Tensor3 g = random_tensor({size, size, depth}, seed);
  Tensor3 n = tprod(ttranspose(g), g);
  n += shift * identity_tensor(size, depth);
  return n;
}

/// ||a - b||_F / ||b||_F, or the absolute difference when b vanishes.
inline double rel_dev(const Tensor3& a, const Tensor3& b) {
  const double scale = fro_norm(b);
  const double diff = fro_norm(a - b);
  return scale > 0.0 ? diff / scale : diff;
}

inline double max_abs(const Tensor3& t) {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

/// Dense inverse applied through the block-circulant oracle.
inline Tensor3 oracle_solve(const Tensor3& n, const Tensor3& x) {
  const Eigen::MatrixXd big = oracle::bcirc(n);
  return oracle::fold(big.partialPivLu().solve(oracle::unfold(x)), n.depth());
}

inline Tensor3 oracle_prod(const Tensor3& a, const Tensor3& b) {
  return oracle::bcirc_prod(a, b);
}

}  // namespace tgk::test
