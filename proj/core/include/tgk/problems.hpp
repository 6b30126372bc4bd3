#pragma once

// Test problem construction: Gaussian blur tensors, the correlated-noise
// covariance, smoothing regularizers, noise synthesis, image <-> tensor
// orientation, quality metrics and a few procedural test images.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "tgk/spd.hpp"
#include "tgk/tensor.hpp"

namespace tgk {

/// symmetric: A = toeplitz(z) / (sigma sqrt(2 pi)).
/// circulant: first column [z_1, z_N, ..., z_2], first row z (periodic blur).
enum class BlurVariant { symmetric, circulant };

std::string_view blur_variant_name(BlurVariant v);
/// Accepts the names above and the aliases example1 / example2.
BlurVariant parse_blur_variant(std::string_view name);

struct BlurSpec {
  index_t n_pixels = 0;
  double sigma = 3.0;
  index_t band = 12;
  BlurVariant variant = BlurVariant::symmetric;

  /// Throws Error unless 1 <= band <= n_pixels and sigma > 0.
  void validate() const;
};

/// N x N matrix A with z_i = exp(-(i-1)^2 / (2 sigma^2)) for i <= band, 0 beyond.
Eigen::MatrixXd blur_matrix(const BlurSpec& spec);

/// N x N x N tensor with faces A^(i) = A(i, 1) * A.
Tensor3 build_blur(const BlurSpec& spec);

/// M = Lt^T * Lt + omega * I with Lt the square upper bidiagonal
/// 0.5 * [1 -1; ...; 1] in the first face. Spatial kind.
SpdOperator build_covariance_m(index_t rows, index_t depth, double omega = 0.2);

/// D = (Lt^T * Lt + alpha * I) / 4 with Lt tridiagonal [-1 2 -1] and corner
/// entries gamma. Spatial kind.
SpdOperator build_reg_d(index_t size, index_t depth, int gamma = 1, double alpha = 3.0);

/// First face of build_reg_d's Lt, exposed for tests.
Eigen::MatrixXd second_difference(index_t size, int gamma);

struct NoiseSpec {
  double level = 1e-3;  ///< ||E||_{M^{-1}} / ||B_true||_F
  std::uint64_t seed = 0;
};

struct NoiseSample {
  Tensor3 e;
  double rho = 0.0;
  double delta = 0.0;                ///< ||E||_{M^{-1}} = rho ||E_1||_F
  std::vector<double> slice_delta;   ///< the same per lateral slice
};

/// E = R^T * (rho * E_1) with M = R^T * R and E_1 standard normal, rho chosen
/// so that ||E||_{M^{-1}} = level * ||B_true||_F. level = 0 gives E = 0.
NoiseSample gen_noise(const Tensor3& b_true, const SpdOperator& m, const NoiseSpec& spec);

/// Image column j becomes tube position j of an rows x 1 x cols slice.
Tensor3 twist(const Eigen::MatrixXd& img);
Eigen::MatrixXd squeeze(const Tensor3& slice);
/// p images of equal size as the lateral slices of rows x p x cols.
Tensor3 multi_twist(std::span<const Eigen::MatrixXd> imgs);
std::vector<Eigen::MatrixXd> multi_squeeze(const Tensor3& t);

struct Metrics {
  double relative_error = 0.0;
  double psnr = 0.0;  ///< 10 log10(max(X_true)^2 / MSE); +inf when MSE = 0
  double mse = 0.0;
};

Metrics metrics(const Tensor3& x, const Tensor3& x_true);

/// Modified Shepp-Logan head phantom, values in [0, 1].
Eigen::MatrixXd shepp_logan(index_t size);
/// Smooth three-channel scene with overlapping blobs, values in [0, 1].
std::array<Eigen::MatrixXd, 3> color_scene(index_t size);
/// Gray frames of a few shapes drifting across a textured background.
std::vector<Eigen::MatrixXd> video_frames(index_t size, int count);

}  // namespace tgk
