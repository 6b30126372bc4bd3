#include "tgk/oracle.hpp"

#include <Eigen/SVD>

#include "tgk/error.hpp"

namespace tgk::oracle {
namespace {

void check_cap(const Tensor3& a, index_t cap) {
  if (a.rows() * a.depth() > cap || a.cols() * a.depth() > cap) {
    throw OracleCapError("oracle: flattened size exceeds cap");
  }
}

}  // namespace

Eigen::MatrixXd unfold(const Tensor3& a) {
  Eigen::MatrixXd m(a.rows() * a.depth(), a.cols());
  for (index_t k = 0; k < a.depth(); ++k) m.middleRows(k * a.rows(), a.rows()) = a.face(k);
  return m;
}

Tensor3 fold(const Eigen::MatrixXd& m, index_t depth) {
  if (depth <= 0 || m.rows() % depth != 0) throw DimensionError("fold: rows not divisible by depth");
  const index_t rows = m.rows() / depth;
  Tensor3 t(rows, m.cols(), depth);
  for (index_t k = 0; k < depth; ++k) t.face(k) = m.middleRows(k * rows, rows);
  return t;
}

Eigen::MatrixXd bcirc(const Tensor3& a, index_t cap) {
  check_cap(a, cap);
  const index_t n = a.depth();
  const index_t r = a.rows();
  const index_t c = a.cols();
  Eigen::MatrixXd m(r * n, c * n);
  for (index_t bi = 0; bi < n; ++bi) {
    for (index_t bj = 0; bj < n; ++bj) {
      m.block(bi * r, bj * c, r, c) = a.face(((bi - bj) % n + n) % n);
    }
  }
  return m;
}

Tensor3 bcirc_prod(const Tensor3& a, const Tensor3& b, index_t cap) {
  if (a.cols() != b.rows() || a.depth() != b.depth()) {
    throw DimensionError("bcirc_prod: inner dimension or depth mismatch");
  }
  check_cap(b, cap);
  return fold(bcirc(a, cap) * unfold(b), a.depth());
}

Tsvd tsvd(const Tensor3& a, index_t cap) {
  check_cap(a, cap);
  const index_t n = a.depth();
  const index_t r = a.rows();
  const index_t c = a.cols();
  const FourierTensor3 f = fft_mode3(a);
  FourierTensor3 uh(r, r, n), sh(r, c, n), vh(c, c, n);

  // Faces k and n-k are conjugate; decompose the first half and mirror so the
  // inverse transforms are real. Self-conjugate faces are real matrices.
  for (index_t k = 0; k <= n / 2; ++k) {
    const index_t partner = (n - k) % n;
    if (partner == k) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(f.face(k).real(),
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
      uh.face(k) = svd.matrixU().cast<cdouble>();
      vh.face(k) = svd.matrixV().cast<cdouble>();
      sh.face(k).setZero();
      for (index_t i = 0; i < svd.singularValues().size(); ++i) sh(i, i, k) = svd.singularValues()(i);
    } else {
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(f.face(k), Eigen::ComputeFullU | Eigen::ComputeFullV);
      uh.face(k) = svd.matrixU();
      vh.face(k) = svd.matrixV();
      sh.face(k).setZero();
      for (index_t i = 0; i < svd.singularValues().size(); ++i) sh(i, i, k) = svd.singularValues()(i);
      uh.face(partner) = uh.face(k).conjugate();
      vh.face(partner) = vh.face(k).conjugate();
      sh.face(partner) = sh.face(k);
    }
  }
  return Tsvd{ifft_mode3(uh), ifft_mode3(sh), ifft_mode3(vh)};
}

Eigen::VectorXd singular_tube_norms(const Tensor3& s) {
  const index_t count = std::min(s.rows(), s.cols());
  Eigen::VectorXd norms(count);
  for (index_t i = 0; i < count; ++i) {
    double sq = 0.0;
    for (index_t k = 0; k < s.depth(); ++k) sq += s(i, i, k) * s(i, i, k);
    norms(i) = std::sqrt(sq);
  }
  return norms;
}

}  // namespace tgk::oracle
