#include "tgk/spd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tgk/error.hpp"

namespace tgk {

namespace detail {

index_t BandedSpd::useful_bandwidth(const Eigen::MatrixXd& m) {
  const index_t n = m.rows();
  index_t band = 0;
  for (index_t j = 0; j < n; ++j) {
    for (index_t i = 0; i < j - band; ++i) {
      if (m(i, j) != 0.0) {
        band = j - i;
        break;
      }
    }
  }
  return 4 * (2 * band + 1) <= n ? band : -1;
}

BandedSpd::BandedSpd(const Eigen::MatrixXd& m, const Eigen::MatrixXd& upper, index_t band)
    : n_(m.rows()), band_(band) {
  for (index_t d = 0; d <= band_; ++d) {
    m_diag_.push_back(m.diagonal(d));
    r_diag_.push_back(upper.diagonal(d));
  }
}

void BandedSpd::multiply(Eigen::Ref<Eigen::MatrixXd> x) const {
  Eigen::MatrixXd y = m_diag_[0].asDiagonal() * x;
  for (index_t d = 1; d <= band_; ++d) {
    const index_t len = n_ - d;
    y.topRows(len).noalias() += m_diag_[d].asDiagonal() * x.bottomRows(len);
    y.bottomRows(len).noalias() += m_diag_[d].asDiagonal() * x.topRows(len);
  }
  x = y;
}

void BandedSpd::solve(Eigen::Ref<Eigen::MatrixXd> x) const {
  // Rows of x become contiguous columns of xt, so each substitution step is
  // a vector operation across all right-hand sides.
  Eigen::MatrixXd xt = x.transpose();
  for (index_t i = 0; i < n_; ++i) {
    for (index_t d = 1; d <= band_ && d <= i; ++d) xt.col(i) -= r_diag_[d](i - d) * xt.col(i - d);
    xt.col(i) /= r_diag_[0](i);
  }
  for (index_t i = n_ - 1; i >= 0; --i) {
    for (index_t d = 1; d <= band_ && i + d < n_; ++d) xt.col(i) -= r_diag_[d](i) * xt.col(i + d);
    xt.col(i) /= r_diag_[0](i);
  }
  x = xt.transpose();
}

}  // namespace detail

SpdOperator SpdOperator::identity(index_t size, index_t depth) {
  if (size <= 0 || depth <= 0) throw DimensionError("SpdOperator: dims must be positive");
  SpdOperator op;
  op.kind_ = Kind::identity;
  op.size_ = size;
  op.depth_ = depth;
  return op;
}

SpdOperator SpdOperator::spatial(const Eigen::MatrixXd& first_face, index_t depth) {
  if (first_face.rows() != first_face.cols() || first_face.rows() == 0 || depth <= 0) {
    throw DimensionError("SpdOperator::spatial: first face must be square and nonempty");
  }
  const double scale = std::max(first_face.norm(), std::numeric_limits<double>::min());
  if ((first_face - first_face.transpose()).norm() > 1e-10 * scale) {
    throw NotSpdError("SpdOperator::spatial: first face is not symmetric", -1);
  }
  SpdOperator op;
  op.kind_ = Kind::spatial;
  op.size_ = first_face.rows();
  op.depth_ = depth;
  op.face_ = first_face;
  op.llt_.compute(first_face);
  if (op.llt_.info() != Eigen::Success) {
    throw NotSpdError("SpdOperator::spatial: first face is not positive definite", -1);
  }
  if (const index_t band = detail::BandedSpd::useful_bandwidth(first_face); band >= 0) {
    op.banded_.emplace(first_face, op.llt_.matrixU(), band);
  }
  return op;
}

SpdOperator SpdOperator::general(const Tensor3& t) {
  if (t.rows() != t.cols()) throw DimensionError("SpdOperator::general: faces must be square");
  SpdOperator op;
  op.kind_ = Kind::general;
  op.size_ = t.rows();
  op.depth_ = t.depth();
  op.fourier_ = fft_mode3(t);
  op.face_llt_.reserve(static_cast<std::size_t>(t.depth()));
  for (index_t k = 0; k < t.depth(); ++k) {
    const auto face = op.fourier_.face(k);
    const double scale = std::max(face.norm(), std::numeric_limits<double>::min());
    if ((face - face.adjoint()).norm() > 1e-10 * scale) {
      throw NotSpdError("SpdOperator: Fourier face " + std::to_string(k) + " is not Hermitian", k);
    }
    Eigen::LLT<Eigen::MatrixXcd> llt(face);
    if (llt.info() != Eigen::Success) {
      throw NotSpdError(
          "SpdOperator: Fourier face " + std::to_string(k) + " is not positive definite", k);
    }
    op.face_llt_.push_back(std::move(llt));
  }
  return op;
}

SpdOperator SpdOperator::from_tensor(const Tensor3& t) {
  for (index_t k = 1; k < t.depth(); ++k) {
    if (!t.face(k).isZero(0.0)) return general(t);
  }
  return spatial(t.face(0), t.depth());
}

Tensor3 SpdOperator::tensor() const {
  switch (kind_) {
    case Kind::identity:
      return identity_tensor(size_, depth_);
    case Kind::spatial: {
      Tensor3 t(size_, size_, depth_);
      t.face(0) = face_;
      return t;
    }
    case Kind::general:
      break;
  }
  return ifft_mode3(fourier_);
}

Eigen::MatrixXd SpdOperator::first_face() const {
  switch (kind_) {
    case Kind::identity:
      return Eigen::MatrixXd::Identity(size_, size_);
    case Kind::spatial:
      return face_;
    case Kind::general:
      break;
  }
  return tensor().face(0);
}

void SpdOperator::check_rows(const Tensor3& x, const char* who) const {
  if (x.rows() != size_ || x.depth() != depth_) {
    throw DimensionError(std::string(who) + ": operand dims do not match the operator");
  }
}

Tensor3 SpdOperator::apply(const Tensor3& x) const {
  check_rows(x, "SpdOperator::apply");
  switch (kind_) {
    case Kind::identity:
      return x;
    case Kind::spatial: {
      Tensor3 y(x.dims());
      if (banded_) {
        y = x;
        banded_->multiply(y.flat());
      } else {
        y.flat().noalias() = face_ * x.flat();
      }
      return y;
    }
    case Kind::general:
      break;
  }
  return ifft_mode3(face_product(fourier_, fft_mode3(x)));
}

Tensor3 SpdOperator::apply_inverse(const Tensor3& x) const {
  check_rows(x, "SpdOperator::apply_inverse");
  switch (kind_) {
    case Kind::identity:
      return x;
    case Kind::spatial: {
      Tensor3 y(x.dims());
      if (banded_) {
        y = x;
        banded_->solve(y.flat());
      } else {
        y.flat() = llt_.solve(x.flat());
      }
      return y;
    }
    case Kind::general:
      break;
  }
  FourierTensor3 f = fft_mode3(x);
  for (index_t k = 0; k < depth_; ++k) {
    f.face(k) = face_llt_[static_cast<std::size_t>(k)].solve(f.face(k));
  }
  return ifft_mode3(f);
}

FourierTensor3 SpdOperator::apply_fourier(const FourierTensor3& x, Weight w) const {
  if (x.rows() != size_ || x.depth() != depth_) {
    throw DimensionError("SpdOperator::apply_fourier: operand dims do not match the operator");
  }
  switch (kind_) {
    case Kind::identity:
      return x;
    case Kind::spatial: {
      // Real operator on complex data: act on real and imaginary parts.
      FourierTensor3 y(x.dims());
      Eigen::MatrixXd re = x.flat().real();
      Eigen::MatrixXd im = x.flat().imag();
      if (banded_) {
        for (auto* part : {&re, &im}) {
          if (w == Weight::direct) {
            banded_->multiply(*part);
          } else {
            banded_->solve(*part);
          }
        }
      } else if (w == Weight::direct) {
        re = face_ * re;
        im = face_ * im;
      } else {
        re = llt_.solve(re);
        im = llt_.solve(im);
      }
      y.flat().real() = re;
      y.flat().imag() = im;
      return y;
    }
    case Kind::general:
      break;
  }
  FourierTensor3 y(x.dims());
  for (index_t k = 0; k < depth_; ++k) {
    if (w == Weight::direct) {
      y.face(k).noalias() = fourier_.face(k) * x.face(k);
    } else {
      y.face(k) = face_llt_[static_cast<std::size_t>(k)].solve(x.face(k));
    }
  }
  return y;
}

Tensor3 SpdOperator::cholesky_factor() const {
  switch (kind_) {
    case Kind::identity:
      return identity_tensor(size_, depth_);
    case Kind::spatial: {
      Tensor3 r(size_, size_, depth_);
      r.face(0) = llt_.matrixU();
      return r;
    }
    case Kind::general:
      break;
  }
  FourierTensor3 rh(size_, size_, depth_);
  for (index_t k = 0; k < depth_; ++k) {
    rh.face(k) = face_llt_[static_cast<std::size_t>(k)].matrixU();
  }
  return ifft_mode3(rh);
}

Tensor3 SpdOperator::apply_factor_transpose(const Tensor3& x) const {
  check_rows(x, "SpdOperator::apply_factor_transpose");
  switch (kind_) {
    case Kind::identity:
      return x;
    case Kind::spatial: {
      Tensor3 y(x.dims());
      y.flat().noalias() = llt_.matrixL() * x.flat();
      return y;
    }
    case Kind::general:
      break;
  }
  // Fourier faces of R^T are the adjoints of the upper factors, i.e. the lower ones.
  FourierTensor3 f = fft_mode3(x);
  for (index_t k = 0; k < depth_; ++k) {
    Eigen::MatrixXcd lower = face_llt_[static_cast<std::size_t>(k)].matrixL();
    f.face(k) = lower * f.face(k);
  }
  return ifft_mode3(f);
}

double weighted_inner(const Tensor3& a, const Tensor3& b, const SpdOperator& n, Weight w) {
  return inner(a, n.apply(b, w));
}

double weighted_norm(const Tensor3& x, const SpdOperator& n, Weight w) {
  const Tensor3 nx = n.apply(x, w);
  const double q = inner(x, nx);
  if (q < 0.0) {
    if (q < -1e-12 * fro_norm(x) * fro_norm(nx)) {
      throw NotSpdError("weighted_norm: negative quadratic form, weight is not SPD", -1);
    }
    return 0.0;
  }
  return std::sqrt(q);
}

Normalized normalize(const Tensor3& x, const SpdOperator& n, Weight w, GaussianStream& rng,
                     double reference) {
  if (x.cols() != 1) throw DimensionError("normalize: expects a lateral slice");
  const index_t depth = x.depth();
  const index_t rows = x.rows();

  FourierTensor3 vh = fft_mode3(x);
  const FourierTensor3 wh = n.apply_fourier(vh, w);

  std::vector<double> a(static_cast<std::size_t>(depth));
  double largest = 0.0;
  for (index_t k = 0; k < depth; ++k) {
    const double q = vh.face(k).cwiseProduct(wh.face(k).conjugate()).sum().real();
    a[static_cast<std::size_t>(k)] = std::sqrt(std::max(q, 0.0));
    largest = std::max(largest, a[static_cast<std::size_t>(k)]);
  }
  const double tol = std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(largest, reference);
  if (largest <= tol) throw ZeroInputError("normalize: input is numerically zero");

  Normalized out;
  FourierTensor3 ah(1, 1, depth);
  for (index_t k = 0; k <= depth / 2; ++k) {
    const index_t partner = (depth - k) % depth;
    const double ak = a[static_cast<std::size_t>(k)];
    if (ak > tol) {
      vh.face(k) /= ak;
      ah(0, 0, k) = ak;
      if (partner != k) {
        vh.face(partner) /= a[static_cast<std::size_t>(partner)];
        ah(0, 0, partner) = a[static_cast<std::size_t>(partner)];
      }
      continue;
    }
    // Numerically zero face: substitute a real random direction of unit weighted
    // norm, shared by the conjugate partner so the inverse transform stays real.
    FourierTensor3 r(rows, 1, depth);
    for (index_t i = 0; i < rows; ++i) r(i, 0, k) = rng.next();
    if (partner != k) r.face(partner) = r.face(k);
    const FourierTensor3 nr = n.apply_fourier(r, w);
    const double rq = r.face(k).cwiseProduct(nr.face(k).conjugate()).sum().real();
    const double rnorm = std::sqrt(std::max(rq, 0.0));
    vh.face(k) = r.face(k) / rnorm;
    ah(0, 0, k) = 0.0;
    out.replaced_faces += 1;
    if (partner != k) {
      vh.face(partner) = r.face(partner) / rnorm;
      ah(0, 0, partner) = 0.0;
      out.replaced_faces += 1;
    }
  }
  out.v = ifft_mode3(vh);
  out.a = ifft_mode3(ah);
  return out;
}

Tensor3 tensor_cholesky(const Tensor3& m) { return SpdOperator::general(m).cholesky_factor(); }

Tensor3 tensor_cholesky(const SpdOperator& m) { return m.cholesky_factor(); }

Eigen::MatrixXd tdiamond(std::span<const Tensor3> a_blocks, std::span<const Tensor3> b_blocks,
                         const SpdOperator& n, Weight w) {
  Eigen::MatrixXd g(static_cast<index_t>(a_blocks.size()), static_cast<index_t>(b_blocks.size()));
  for (std::size_t j = 0; j < b_blocks.size(); ++j) {
    const Tensor3 nb = n.apply(b_blocks[j], w);
    for (std::size_t i = 0; i < a_blocks.size(); ++i) {
      g(static_cast<index_t>(i), static_cast<index_t>(j)) = inner(a_blocks[i], nb);
    }
  }
  return g;
}

}  // namespace tgk
