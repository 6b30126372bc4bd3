#include "tgk/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tgk/error.hpp"

namespace tgk {
namespace detail {

template <class Scalar>
DenseTensor<Scalar>::DenseTensor(index_t rows, index_t cols, index_t depth)
    : dims_{rows, cols, depth} {
  if (rows <= 0 || cols <= 0 || depth <= 0) {
    throw DimensionError("tensor dims must be strictly positive");
  }
  data_.assign(static_cast<std::size_t>(dims_.size()), Scalar(0));
}

template <class Scalar>
DenseTensor<Scalar>::DenseTensor(Dims dims, std::vector<Scalar> data)
    : dims_(dims), data_(data.begin(), data.end()) {
  if (dims.rows <= 0 || dims.cols <= 0 || dims.depth <= 0) {
    throw DimensionError("tensor dims must be strictly positive");
  }
  if (static_cast<index_t>(data_.size()) != dims.size()) {
    throw DimensionError("tensor data length does not match dims");
  }
}

template <class Scalar>
DenseTensor<Scalar> DenseTensor<Scalar>::lateral(index_t j) const {
  return lateral_range(j, 1);
}

template <class Scalar>
DenseTensor<Scalar> DenseTensor<Scalar>::lateral_range(index_t first, index_t count) const {
  if (first < 0 || count <= 0 || first + count > dims_.cols) {
    throw DimensionError("lateral slice index out of range");
  }
  DenseTensor out(dims_.rows, count, dims_.depth);
  const index_t chunk = dims_.rows * count;
  for (index_t k = 0; k < dims_.depth; ++k) {
    const Scalar* src = raw() + k * dims_.rows * dims_.cols + first * dims_.rows;
    std::copy(src, src + chunk, out.raw() + k * chunk);
  }
  return out;
}

template <class Scalar>
void DenseTensor<Scalar>::set_lateral(index_t j, const DenseTensor& slice) {
  if (j < 0 || j >= dims_.cols || slice.rows() != dims_.rows || slice.cols() != 1 ||
      slice.depth() != dims_.depth) {
    throw DimensionError("set_lateral: shape mismatch");
  }
  for (index_t k = 0; k < dims_.depth; ++k) {
    const Scalar* src = slice.raw() + k * dims_.rows;
    std::copy(src, src + dims_.rows, raw() + k * dims_.rows * dims_.cols + j * dims_.rows);
  }
}

template <class Scalar>
DenseTensor<Scalar>& DenseTensor<Scalar>::operator+=(const DenseTensor& other) {
  if (dims_ != other.dims_) throw DimensionError("tensor sum: dims mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

template <class Scalar>
DenseTensor<Scalar>& DenseTensor<Scalar>::operator-=(const DenseTensor& other) {
  if (dims_ != other.dims_) throw DimensionError("tensor difference: dims mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

template <class Scalar>
DenseTensor<Scalar>& DenseTensor<Scalar>::operator*=(Scalar s) {
  for (auto& v : data_) v *= s;
  return *this;
}

template class DenseTensor<double>;
template class DenseTensor<cdouble>;

}  // namespace detail

FourierTensor3 face_product(const FourierTensor3& a, const FourierTensor3& b, bool adjoint_a) {
  const index_t inner_a = adjoint_a ? a.rows() : a.cols();
  const index_t outer_a = adjoint_a ? a.cols() : a.rows();
  if (inner_a != b.rows() || a.depth() != b.depth()) {
    throw DimensionError("face_product: inner dimension or depth mismatch");
  }
  FourierTensor3 c(outer_a, b.cols(), a.depth());
  for (index_t k = 0; k < a.depth(); ++k) {
    if (adjoint_a) {
      c.face(k).noalias() = a.face(k).adjoint() * b.face(k);
    } else {
      c.face(k).noalias() = a.face(k) * b.face(k);
    }
  }
  return c;
}

Tensor3 tprod(const Tensor3& a, const Tensor3& b) {
  if (a.cols() != b.rows() || a.depth() != b.depth()) {
    throw DimensionError("tprod: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         "x" + std::to_string(a.depth()) + " times " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + "x" +
                         std::to_string(b.depth()));
  }
  return ifft_mode3(face_product(fft_mode3(a), fft_mode3(b)));
}

Tensor3 ttranspose(const Tensor3& a) {
  const index_t n = a.depth();
  Tensor3 t(a.cols(), a.rows(), n);
  for (index_t k = 0; k < n; ++k) {
    const index_t src = (n - k) % n;
    t.face(k) = a.face(src).transpose();
  }
  return t;
}

Tensor3 identity_tensor(index_t m, index_t n) {
  Tensor3 t(m, m, n);
  t.face(0).setIdentity();
  return t;
}

Tensor3 e1_lateral(index_t rows, index_t n) {
  Tensor3 t(rows, 1, n);
  t(0, 0, 0) = 1.0;
  return t;
}

Tensor3 e1_tube(index_t n) { return e1_lateral(1, n); }

double fro_norm(const Tensor3& t) { return t.flat().norm(); }

double inner(const Tensor3& a, const Tensor3& b) {
  if (a.dims() != b.dims()) throw DimensionError("inner: dims mismatch");
  double s = 0.0;
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

Tensor3 circledast(std::span<const Tensor3> blocks, std::span<const double> y) {
  if (blocks.empty() || blocks.size() != y.size()) {
    throw DimensionError("circledast: need one coefficient per block");
  }
  Tensor3 out(blocks.front().dims());
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    if (blocks[j].dims() != out.dims()) throw DimensionError("circledast: block dims differ");
    out.flat() += y[j] * blocks[j].flat();
  }
  return out;
}

Tensor3 hcat(std::span<const Tensor3> blocks) {
  if (blocks.empty()) throw DimensionError("hcat: no blocks");
  const index_t rows = blocks.front().rows();
  const index_t depth = blocks.front().depth();
  index_t cols = 0;
  for (const auto& b : blocks) {
    if (b.rows() != rows || b.depth() != depth) throw DimensionError("hcat: block dims differ");
    cols += b.cols();
  }
  Tensor3 out(rows, cols, depth);
  for (index_t k = 0; k < depth; ++k) {
    index_t col = 0;
    for (const auto& b : blocks) {
      out.face(k).middleCols(col, b.cols()) = b.face(k);
      col += b.cols();
    }
  }
  return out;
}

namespace {

// [Re Im] block of each face of op(F), op = identity or conjugate transpose.
// Faces 0..n/2 as [Re Im] blocks, of A or of A^H.
std::vector<Eigen::MatrixXd> split_faces(const FourierTensor3& f, bool adjoint) {
  const index_t half = f.depth() / 2 + 1;
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(half));
  for (index_t k = 0; k < half; ++k) {
    const auto face = f.face(k);
    const index_t rows = adjoint ? face.cols() : face.rows();
    const index_t cols = adjoint ? face.rows() : face.cols();
    Eigen::MatrixXd s(rows, 2 * cols);
    if (adjoint) {
      s.leftCols(cols) = face.real().transpose();
      s.rightCols(cols) = -face.imag().transpose();
    } else {
      s.leftCols(cols) = face.real();
      s.rightCols(cols) = face.imag();
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Facewise complex product as rank-one updates over the inner index, so all
// columns of X share one pass over the face.
FourierTensor3 split_product(const std::vector<Eigen::MatrixXd>& a, const FourierTensor3& x) {
  const index_t rows = a.front().rows();
  const index_t inner = a.front().cols() / 2;
  const index_t p = x.cols();
  FourierTensor3 y(rows, p, x.depth());
  Eigen::MatrixXd yr(rows, p);
  Eigen::MatrixXd yi(rows, p);
  for (index_t k = 0; k < x.depth(); ++k) {
    const Eigen::MatrixXd& s = a[static_cast<std::size_t>(k)];
    const auto xk = x.face(k);
    yr.setZero();
    yi.setZero();
    for (index_t j = 0; j < inner; ++j) {
      const auto ar = s.col(j);
      const auto ai = s.col(inner + j);
      for (index_t c = 0; c < p; ++c) {
        const double xr = xk(j, c).real();
        const double xi = xk(j, c).imag();
        yr.col(c) += xr * ar - xi * ai;
        yi.col(c) += xi * ar + xr * ai;
      }
    }
    y.face(k).real() = yr;
    y.face(k).imag() = yi;
  }
  return y;
}

}  // namespace

TensorOperator::TensorOperator(Tensor3 a)
    : spatial_(std::move(a)),
      fourier_(fft_mode3(spatial_)),
      split_(split_faces(fourier_, false)),
      split_adjoint_(split_faces(fourier_, true)) {}

Tensor3 TensorOperator::apply(const Tensor3& x) const {
  if (x.rows() != spatial_.cols() || x.depth() != spatial_.depth()) {
    throw DimensionError("TensorOperator::apply: dims mismatch");
  }
  return irfft_mode3(split_product(split_, rfft_mode3(x)), x.depth());
}

Tensor3 TensorOperator::apply_transpose(const Tensor3& y) const {
  if (y.rows() != spatial_.rows() || y.depth() != spatial_.depth()) {
    throw DimensionError("TensorOperator::apply_transpose: dims mismatch");
  }
  // Fourier faces of A^T are the adjoints of those of A.
  return irfft_mode3(split_product(split_adjoint_, rfft_mode3(y)), y.depth());
}

}  // namespace tgk
