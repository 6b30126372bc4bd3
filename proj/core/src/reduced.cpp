#include "tgk/reduced.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "tgk/error.hpp"

namespace tgk {
namespace detail {
namespace {

inline double conj_of(double x) { return x; }
inline cdouble conj_of(const cdouble& x) { return std::conj(x); }

double damping(double mu) {
  if (std::isinf(mu)) return 0.0;
  return 1.0 / std::sqrt(mu);
}

}  // namespace

template <class Scalar>
void solve_damped_bidiagonal(std::span<const Scalar> diag, std::span<const Scalar> sub,
                             Scalar rhs, double lambda, std::span<Scalar> z) {
  const std::size_t k = diag.size();
  std::vector<double> r_diag(k);
  std::vector<Scalar> r_sup(k);
  std::vector<Scalar> g(k);

  // The working row carries one nonzero (column j) and its right-hand side.
  Scalar cur = diag[0];
  Scalar cur_rhs = rhs;
  for (std::size_t j = 0; j < k; ++j) {
    if (lambda > 0.0) {
      // Rotate the damping row (lambda at column j) into the working row.
      const double r = std::hypot(std::abs(cur), lambda);
      cur_rhs = conj_of(cur) / r * cur_rhs;
      cur = Scalar(r);
    }
    // Rotate row j+1 of P: sub[j] at column j, diag[j+1] at column j+1.
    const Scalar a = cur;
    const Scalar b = sub[j];
    const double r = std::hypot(std::abs(a), std::abs(b));
    if (r == 0.0) throw Error("bidiagonal least-squares problem is singular");
    const Scalar next = (j + 1 < k) ? diag[j + 1] : Scalar(0);
    r_diag[j] = r;
    r_sup[j] = conj_of(b) / r * next;
    g[j] = conj_of(a) / r * cur_rhs;
    cur = a / r * next;
    cur_rhs = -b / r * cur_rhs;
  }

  for (std::size_t jj = k; jj-- > 0;) {
    Scalar v = g[jj];
    if (jj + 1 < k) v -= r_sup[jj] * z[jj + 1];
    z[jj] = v / r_diag[jj];
  }
}

template <class Scalar>
double bidiagonal_residual_sq(std::span<const Scalar> diag, std::span<const Scalar> sub,
                              Scalar rhs, std::span<const Scalar> z) {
  const std::size_t k = diag.size();
  double sum = std::norm(diag[0] * z[0] - rhs);
  for (std::size_t i = 1; i < k; ++i) sum += std::norm(sub[i - 1] * z[i - 1] + diag[i] * z[i]);
  sum += std::norm(sub[k - 1] * z[k - 1]);
  return sum;
}

template void solve_damped_bidiagonal<double>(std::span<const double>, std::span<const double>,
                                              double, double, std::span<double>);
template void solve_damped_bidiagonal<cdouble>(std::span<const cdouble>, std::span<const cdouble>,
                                               cdouble, double, std::span<cdouble>);
template double bidiagonal_residual_sq<double>(std::span<const double>, std::span<const double>,
                                               double, std::span<const double>);
template double bidiagonal_residual_sq<cdouble>(std::span<const cdouble>,
                                                std::span<const cdouble>, cdouble,
                                                std::span<const cdouble>);

}  // namespace detail

namespace {

void check_mu(double mu) {
  if (!(mu >= 0.0)) throw Error("regularization parameter must be nonnegative");
}

}  // namespace

Tensor3 TensorBidiagonal::assemble() const {
  const int k = steps();
  if (k == 0 || z.size() != c.size() + 1) throw DimensionError("TensorBidiagonal: inconsistent shape");
  const index_t n = depth();
  Tensor3 p(k + 1, k, n);
  for (int j = 0; j < k; ++j) {
    for (index_t f = 0; f < n; ++f) {
      p(j, j, f) = c[static_cast<std::size_t>(j)](0, 0, f);
      p(j + 1, j, f) = z[static_cast<std::size_t>(j) + 1](0, 0, f);
    }
  }
  return p;
}

FourierBidiagonal::FourierBidiagonal(const TensorBidiagonal& pbar, const Tensor3& rhs_tube)
    : steps_(pbar.steps()), depth_(pbar.depth()) {
  if (steps_ == 0 || pbar.z.size() != pbar.c.size() + 1) {
    throw DimensionError("FourierBidiagonal: inconsistent bidiagonal");
  }
  if (!rhs_tube.is_tube() || rhs_tube.depth() != depth_) {
    throw DimensionError("FourierBidiagonal: right-hand side must be a tube of matching depth");
  }
  diag_.resize(steps_, depth_);
  sub_.resize(steps_, depth_);
  for (int j = 0; j < steps_; ++j) {
    const FourierTensor3 cj = fft_mode3(pbar.c[static_cast<std::size_t>(j)]);
    const FourierTensor3 zj = fft_mode3(pbar.z[static_cast<std::size_t>(j) + 1]);
    for (index_t f = 0; f < depth_; ++f) {
      diag_(j, f) = cj(0, 0, f);
      sub_(j, f) = zj(0, 0, f);
    }
  }
  const FourierTensor3 rh = fft_mode3(rhs_tube);
  rhs_.resize(depth_);
  for (index_t f = 0; f < depth_; ++f) rhs_(f) = rh(0, 0, f);
  rhs_norm_sq_ = rhs_tube.flat().squaredNorm();
}

Eigen::MatrixXcd FourierBidiagonal::solve_faces(double mu) const {
  check_mu(mu);
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(steps_, depth_);
  if (mu == 0.0) return z;
  const double lambda = detail::damping(mu);
  for (index_t f = 0; f < depth_; ++f) {
    detail::solve_damped_bidiagonal<cdouble>(
        std::span<const cdouble>(diag_.col(f).data(), static_cast<std::size_t>(steps_)),
        std::span<const cdouble>(sub_.col(f).data(), static_cast<std::size_t>(steps_)), rhs_(f),
        lambda, std::span<cdouble>(z.col(f).data(), static_cast<std::size_t>(steps_)));
  }
  return z;
}

Tensor3 FourierBidiagonal::solve(double mu) const {
  const Eigen::MatrixXcd zf = solve_faces(mu);
  FourierTensor3 zh(steps_, 1, depth_);
  for (index_t f = 0; f < depth_; ++f) zh.face(f) = zf.col(f);
  return ifft_mode3(zh);
}

double FourierBidiagonal::residual_sq(double mu) const {
  check_mu(mu);
  if (mu == 0.0) return rhs_norm_sq_;
  const Eigen::MatrixXcd zf = solve_faces(mu);
  double sum = 0.0;
  for (index_t f = 0; f < depth_; ++f) {
    sum += detail::bidiagonal_residual_sq<cdouble>(
        std::span<const cdouble>(diag_.col(f).data(), static_cast<std::size_t>(steps_)),
        std::span<const cdouble>(sub_.col(f).data(), static_cast<std::size_t>(steps_)), rhs_(f),
        std::span<const cdouble>(zf.col(f).data(), static_cast<std::size_t>(steps_)));
  }
  // Parseval over the n Fourier faces.
  return sum / static_cast<double>(depth_);
}

Tensor3 solve_tensor_tikhonov(const TensorBidiagonal& pbar, const Tensor3& rhs_tube, double mu) {
  if (!(mu > 0.0)) throw Error("solve_tensor_tikhonov: mu must be positive");
  return FourierBidiagonal(pbar, rhs_tube).solve(mu);
}

ScalarBidiagonal ScalarBidiagonal::from_matrix(const Eigen::MatrixXd& p) {
  const index_t k = p.cols();
  if (k == 0 || p.rows() != k + 1) throw DimensionError("ScalarBidiagonal: expects (k+1) x k");
  ScalarBidiagonal b;
  b.diag.resize(k);
  b.sub.resize(k);
  for (index_t j = 0; j < k; ++j) {
    b.diag(j) = p(j, j);
    b.sub(j) = p(j + 1, j);
  }
  return b;
}

Eigen::MatrixXd ScalarBidiagonal::matrix() const {
  const index_t k = diag.size();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(k + 1, k);
  for (index_t j = 0; j < k; ++j) {
    p(j, j) = diag(j);
    p(j + 1, j) = sub(j);
  }
  return p;
}

Eigen::VectorXd ScalarBidiagonal::solve(double rhs, double mu) const {
  check_mu(mu);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(diag.size());
  if (mu == 0.0) return z;
  detail::solve_damped_bidiagonal<double>(
      std::span<const double>(diag.data(), static_cast<std::size_t>(diag.size())),
      std::span<const double>(sub.data(), static_cast<std::size_t>(sub.size())), rhs,
      detail::damping(mu), std::span<double>(z.data(), static_cast<std::size_t>(z.size())));
  return z;
}

double ScalarBidiagonal::residual_sq(double rhs, double mu) const {
  check_mu(mu);
  if (mu == 0.0) return rhs * rhs;
  const Eigen::VectorXd z = solve(rhs, mu);
  return detail::bidiagonal_residual_sq<double>(
      std::span<const double>(diag.data(), static_cast<std::size_t>(diag.size())),
      std::span<const double>(sub.data(), static_cast<std::size_t>(sub.size())), rhs,
      std::span<const double>(z.data(), static_cast<std::size_t>(z.size())));
}

}  // namespace tgk
