#pragma once

// Dense third-order tensors and the t-product.
//
// Storage is face-major: frontal slice k is contiguous, and each rows x cols
// face is column-major. Entry (i, j, k) lives at i + j*rows + k*rows*cols.
// Consequently the whole tensor is also a column-major rows x (cols*depth)
// matrix, which is what spatial operators act on. Buffers are aligned to
// Eigen's largest packet so vectorized reductions sum in the same order on
// every run.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace tgk {

using index_t = std::ptrdiff_t;
using cdouble = std::complex<double>;

struct Dims {
  index_t rows = 0;
  index_t cols = 0;
  index_t depth = 0;

  index_t size() const { return rows * cols * depth; }
  bool operator==(const Dims&) const = default;
};

namespace detail {

template <class Scalar>
class DenseTensor {
 public:
  using scalar_type = Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using FaceMap = Eigen::Map<Matrix>;
  using ConstFaceMap = Eigen::Map<const Matrix>;

  /// Empty placeholder; every real tensor has strictly positive dims.
  DenseTensor() = default;
  DenseTensor(index_t rows, index_t cols, index_t depth);
  explicit DenseTensor(Dims dims) : DenseTensor(dims.rows, dims.cols, dims.depth) {}
  DenseTensor(Dims dims, std::vector<Scalar> data);

  index_t rows() const { return dims_.rows; }
  index_t cols() const { return dims_.cols; }
  index_t depth() const { return dims_.depth; }
  Dims dims() const { return dims_; }
  index_t size() const { return dims_.size(); }
  bool empty() const { return data_.empty(); }
  bool is_lateral() const { return dims_.cols == 1; }
  bool is_tube() const { return dims_.rows == 1 && dims_.cols == 1; }

  Scalar& operator()(index_t i, index_t j, index_t k) {
    return data_[static_cast<std::size_t>(i + j * dims_.rows + k * dims_.rows * dims_.cols)];
  }
  const Scalar& operator()(index_t i, index_t j, index_t k) const {
    return data_[static_cast<std::size_t>(i + j * dims_.rows + k * dims_.rows * dims_.cols)];
  }

  std::span<Scalar> data() { return data_; }
  std::span<const Scalar> data() const { return data_; }
  Scalar* raw() { return data_.data(); }
  const Scalar* raw() const { return data_.data(); }

  FaceMap face(index_t k) {
    return FaceMap(data_.data() + k * dims_.rows * dims_.cols, dims_.rows, dims_.cols);
  }
  ConstFaceMap face(index_t k) const {
    return ConstFaceMap(data_.data() + k * dims_.rows * dims_.cols, dims_.rows, dims_.cols);
  }
  /// All faces side by side: rows x (cols*depth).
  FaceMap flat() { return FaceMap(data_.data(), dims_.rows, dims_.cols * dims_.depth); }
  ConstFaceMap flat() const {
    return ConstFaceMap(data_.data(), dims_.rows, dims_.cols * dims_.depth);
  }

  /// Lateral slice j as an rows x 1 x depth tensor.
  DenseTensor lateral(index_t j) const;
  void set_lateral(index_t j, const DenseTensor& slice);
  /// Lateral slices [first, first + count).
  DenseTensor lateral_range(index_t first, index_t count) const;

  DenseTensor& operator+=(const DenseTensor& other);
  DenseTensor& operator-=(const DenseTensor& other);
  DenseTensor& operator*=(Scalar s);

  friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
  friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
  friend DenseTensor operator*(Scalar s, DenseTensor a) { return a *= s; }
  friend DenseTensor operator*(DenseTensor a, Scalar s) { return a *= s; }

  bool operator==(const DenseTensor&) const = default;

 private:
  Dims dims_{};
  std::vector<Scalar, Eigen::aligned_allocator<Scalar>> data_;
};

extern template class DenseTensor<double>;
extern template class DenseTensor<cdouble>;

}  // namespace detail

/// Real third-order tensor (rows x cols x depth).
using Tensor3 = detail::DenseTensor<double>;
/// Transform of a Tensor3 along mode 3; face i holds the i-th Fourier face.
using FourierTensor3 = detail::DenseTensor<cdouble>;

/// Unnormalized forward DFT along every tube.
FourierTensor3 fft_mode3(const Tensor3& t);

/// Inverse of fft_mode3. Rejects data whose conjugate-symmetry defect exceeds
/// 1e-8 relative; the imaginary residue of the result is dropped when below
/// 1e-10 relative and rejected otherwise.
Tensor3 ifft_mode3(const FourierTensor3& f);

/// Faces 0..n/2 of fft_mode3(t); the rest follow from conjugate symmetry.
FourierTensor3 rfft_mode3(const Tensor3& t);

/// Real tensor of depth n from its half spectrum (faces 0..n/2). The
/// imaginary parts of faces 0 and n/2 (n even) are ignored, so the result
/// is real by construction.
Tensor3 irfft_mode3(const FourierTensor3& half, index_t n);

/// Largest relative conjugate-symmetry defect ||F_i - conj(F_{n-i})|| / ||F||.
double conjugate_symmetry_defect(const FourierTensor3& f);

/// Facewise products C_i = op(A_i) * B_i, op = identity or conjugate transpose.
FourierTensor3 face_product(const FourierTensor3& a, const FourierTensor3& b,
                            bool adjoint_a = false);

/// t-product of an rows x m x n tensor with an m x p x n tensor.
Tensor3 tprod(const Tensor3& a, const Tensor3& b);

/// Tensor transpose: faces transposed, faces 2..n reversed.
Tensor3 ttranspose(const Tensor3& a);

Tensor3 identity_tensor(index_t m, index_t n);
/// rows x 1 x n lateral slice with a single 1 at (0, 0, 0).
Tensor3 e1_lateral(index_t rows, index_t n);
Tensor3 e1_tube(index_t n);

double fro_norm(const Tensor3& t);
/// Plain elementwise inner product <a, b>.
double inner(const Tensor3& a, const Tensor3& b);

/// sum_j y_j C_j over equally shaped blocks.
Tensor3 circledast(std::span<const Tensor3> blocks, std::span<const double> y);

/// Concatenate blocks along the column (lateral) direction.
Tensor3 hcat(std::span<const Tensor3> blocks);

/// A fixed tensor operator with its Fourier faces precomputed, so repeated
/// products A*X and A^T*Y cost one FFT pair each. Products run on the half
/// spectrum of real operands, with the faces of A and A^H kept as real
/// [Re Im] blocks so that a product with p lateral slices streams each face
/// once instead of p times.
class TensorOperator {
 public:
  explicit TensorOperator(Tensor3 a);

  Dims dims() const { return spatial_.dims(); }
  const Tensor3& spatial() const { return spatial_; }
  const FourierTensor3& fourier() const { return fourier_; }

  /// A * x.
  Tensor3 apply(const Tensor3& x) const;
  /// A^T * y.
  Tensor3 apply_transpose(const Tensor3& y) const;

 private:
  Tensor3 spatial_;
  FourierTensor3 fourier_;
  std::vector<Eigen::MatrixXd> split_;
  std::vector<Eigen::MatrixXd> split_adjoint_;
};

}  // namespace tgk
