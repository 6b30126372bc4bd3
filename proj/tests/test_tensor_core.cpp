#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "support.hpp"
#include "tgk/error.hpp"
#include "tgk/oracle.hpp"
#include "tgk/spd.hpp"
#include "tgk/tensor.hpp"

namespace tgk {
namespace {

using test::random_tensor;
using test::rel_dev;

Tensor3 tube(std::vector<double> v) {
  const auto n = static_cast<index_t>(v.size());
  return Tensor3({1, 1, n}, std::move(v));
}

TEST(Fft, DeltaTubeTransformsToOnes) {
  const FourierTensor3 f = fft_mode3(tube({1, 0, 0, 0}));
  for (const cdouble& v : f.data()) EXPECT_EQ(v, cdouble(1.0, 0.0));
}

TEST(Fft, ConstantTubeTransformsToScaledDelta) {
  const double c = 2.5;
  const FourierTensor3 f = fft_mode3(tube({c, c, c, c, c}));
  EXPECT_NEAR(std::abs(f(0, 0, 0) - cdouble(5 * c, 0)), 0.0, 1e-14);
  for (index_t k = 1; k < 5; ++k) EXPECT_NEAR(std::abs(f(0, 0, k)), 0.0, 1e-14);
}

TEST(Fft, MatchesDirectDftSum) {
  const Tensor3 t = random_tensor({2, 3, 7}, 11);
  const FourierTensor3 f = fft_mode3(t);
  const double two_pi = 2.0 * std::acos(-1.0);
  for (index_t i = 0; i < 2; ++i) {
    for (index_t j = 0; j < 3; ++j) {
      for (index_t k = 0; k < 7; ++k) {
        cdouble s = 0;
        for (index_t q = 0; q < 7; ++q) s += t(i, j, q) * std::polar(1.0, -two_pi * k * q / 7.0);
        EXPECT_NEAR(std::abs(f(i, j, k) - s), 0.0, 1e-12);
      }
    }
  }
}

TEST(Fft, RoundTrip) {
  const Tensor3 t = random_tensor({3, 2, 5}, 1);
  EXPECT_LT(rel_dev(ifft_mode3(fft_mode3(t)), t), 1e-12);
}

TEST(Fft, ConjugateSymmetryOfRealTransform) {
  for (index_t n : {1, 2, 5, 8}) {
    const FourierTensor3 f = fft_mode3(random_tensor({3, 4, n}, 100 + n));
    EXPECT_LT(conjugate_symmetry_defect(f), 1e-14) << "n=" << n;
  }
}

TEST(Fft, InverseRejectsCorruptedFourierData) {
  FourierTensor3 f = fft_mode3(random_tensor({2, 2, 4}, 3));
  f(0, 0, 1) += cdouble(0.0, 1.0);
  EXPECT_THROW(ifft_mode3(f), FourierSymmetryError);
}

TEST(Fft, HalfSpectrumMatchesFullTransform) {
  for (index_t n : {1, 2, 5, 8}) {
    const Tensor3 t = random_tensor({3, 2, n}, 30 + n);
    const FourierTensor3 full = fft_mode3(t);
    const FourierTensor3 half = rfft_mode3(t);
    ASSERT_EQ(half.depth(), n / 2 + 1);
    for (index_t k = 0; k < half.depth(); ++k) {
      EXPECT_LT((half.face(k) - full.face(k)).norm(), 1e-13 * full.flat().norm()) << "n=" << n;
    }
    EXPECT_LT(rel_dev(irfft_mode3(half, n), t), 1e-15) << "n=" << n;
  }
  EXPECT_THROW(irfft_mode3(rfft_mode3(random_tensor({2, 2, 6}, 39)), 5), DimensionError);
}

TEST(Tprod, IdentityIsNeutral) {
  const Tensor3 a = random_tensor({4, 3, 5}, 2);
  EXPECT_LT(rel_dev(tprod(a, identity_tensor(3, 5)), a), 1e-14);
  EXPECT_LT(rel_dev(tprod(identity_tensor(4, 5), a), a), 1e-14);
}

TEST(Tprod, TwoTubeExample) {
  const Tensor3 c = tprod(tube({1, 2}), tube({3, 4}));
  EXPECT_NEAR(c(0, 0, 0), 11.0, 1e-14);
  EXPECT_NEAR(c(0, 0, 1), 10.0, 1e-14);
  const Tensor3 o = oracle::bcirc_prod(tube({1, 2}), tube({3, 4}));
  EXPECT_EQ(o(0, 0, 0), 11.0);
  EXPECT_EQ(o(0, 0, 1), 10.0);
}

TEST(Tprod, AgreesWithOracle) {
  const Tensor3 a = random_tensor({4, 3, 5}, 4);
  const Tensor3 b = random_tensor({3, 2, 5}, 5);
  EXPECT_LT(rel_dev(tprod(a, b), oracle::bcirc_prod(a, b)), 1e-12);
}

TEST(Tprod, RandomInstancesAgreeWithOracle) {
  GaussianStream dims_rng(77);
  auto pick = [&](int hi) { return 1 + static_cast<index_t>(dims_rng.uniform() * hi); };
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const index_t l = pick(4), m = pick(4), p = pick(4), n = pick(6);
    const Tensor3 a = random_tensor({l, m, n}, 1000 + trial);
    const Tensor3 b = random_tensor({m, p, n}, 5000 + trial);
    worst = std::max(worst, rel_dev(tprod(a, b), oracle::bcirc_prod(a, b)));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Tprod, RejectsMismatchedDims) {
  EXPECT_THROW(tprod(random_tensor({2, 3, 4}, 1), random_tensor({2, 1, 4}, 2)), DimensionError);
  EXPECT_THROW(tprod(random_tensor({2, 3, 4}, 1), random_tensor({3, 1, 5}, 2)), DimensionError);
  EXPECT_THROW(oracle::bcirc_prod(random_tensor({2, 3, 4}, 1), random_tensor({2, 1, 4}, 2)),
               DimensionError);
}

TEST(Tprod, Associativity) {
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor3 a = random_tensor({3, 4, 5}, 10 + trial);
    const Tensor3 b = random_tensor({4, 2, 5}, 20 + trial);
    const Tensor3 c = random_tensor({2, 3, 5}, 30 + trial);
    EXPECT_LT(rel_dev(tprod(tprod(a, b), c), tprod(a, tprod(b, c))), 1e-10);
  }
}

TEST(Tprod, OrthogonalTensorPreservesNorm) {
  // U from the tSVD oracle is orthogonal: U^T * U = I.
  const oracle::Tsvd s = oracle::tsvd(random_tensor({4, 4, 5}, 8));
  EXPECT_LT(rel_dev(tprod(ttranspose(s.u), s.u), identity_tensor(4, 5)), 1e-12);
  for (int trial = 0; trial < 5; ++trial) {
    const Tensor3 a = random_tensor({4, 3, 5}, 40 + trial);
    EXPECT_NEAR(fro_norm(tprod(s.u, a)), fro_norm(a), 1e-12 * fro_norm(a));
  }
}

TEST(Oracle, TubeBcircIsCirculant) {
  const Eigen::MatrixXd c = oracle::bcirc(tube({1, 2, 3}));
  Eigen::Matrix3d expect;
  expect << 1, 3, 2, 2, 1, 3, 3, 2, 1;
  EXPECT_EQ(c, Eigen::MatrixXd(expect));
}

TEST(Oracle, FoldUnfoldRoundTrip) {
  const Tensor3 t = random_tensor({3, 2, 4}, 9);
  EXPECT_EQ(oracle::fold(oracle::unfold(t), 4), t);
}

TEST(Oracle, CapRefusesLargeInputs) {
  EXPECT_THROW(oracle::bcirc(random_tensor({5, 5, 13}, 1)), OracleCapError);
  EXPECT_NO_THROW(oracle::bcirc(random_tensor({8, 8, 8}, 1)));
}

TEST(Transpose, DepthOneIsMatrixTranspose) {
  const Tensor3 a = random_tensor({3, 2, 1}, 12);
  const Tensor3 t = ttranspose(a);
  EXPECT_EQ(Eigen::MatrixXd(t.face(0)), Eigen::MatrixXd(a.face(0).transpose()));
}

TEST(Transpose, TubeReversesTrailingEntries) {
  const Tensor3 t = ttranspose(tube({1, 2, 3}));
  EXPECT_EQ(t, tube({1, 3, 2}));
}

TEST(Transpose, ReversesProductsAndIsInvolution) {
  const Tensor3 a = random_tensor({3, 4, 5}, 13);
  const Tensor3 b = random_tensor({4, 2, 5}, 14);
  EXPECT_LT(rel_dev(ttranspose(tprod(a, b)), tprod(ttranspose(b), ttranspose(a))), 1e-12);
  EXPECT_EQ(ttranspose(ttranspose(a)), a);
}

TEST(Identity, UnitTensors) {
  EXPECT_EQ(tprod(identity_tensor(3, 4), identity_tensor(3, 4)), identity_tensor(3, 4));
  const FourierTensor3 fe = fft_mode3(e1_tube(6));
  for (const cdouble& v : fe.data()) EXPECT_EQ(v, cdouble(1.0, 0.0));
  const Tensor3 x = random_tensor({1, 1, 6}, 15);
  EXPECT_LT(rel_dev(tprod(e1_tube(6), x), x), 1e-14);
  const Tensor3 e = e1_lateral(4, 3);
  EXPECT_EQ(e(0, 0, 0), 1.0);
  EXPECT_EQ(fro_norm(e), 1.0);
}

TEST(Norms, IdentityWeightGivesFrobenius) {
  const Tensor3 x = random_tensor({5, 2, 3}, 16);
  const SpdOperator id = SpdOperator::identity(5, 3);
  EXPECT_NEAR(weighted_norm(x, id), fro_norm(x), 1e-14 * fro_norm(x));
  double s = 0.0;
  for (double v : x.data()) s += v * v;
  EXPECT_NEAR(fro_norm(x), std::sqrt(s), 1e-14);
}

TEST(Norms, DepthOneReducesToQuadraticForm) {
  Eigen::MatrixXd m(3, 3);
  m << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const SpdOperator op = SpdOperator::spatial(m, 1);
  const Tensor3 x = random_tensor({3, 1, 1}, 17);
  const Eigen::VectorXd v = x.flat();
  EXPECT_NEAR(weighted_norm(x, op), std::sqrt(v.dot(m * v)), 1e-14);
}

TEST(Norms, WeightedNormIsPositive) {
  for (int s = 0; s < 3; ++s) {
    const SpdOperator n = SpdOperator::general(test::random_spd_tensor(5, 4, 200 + s));
    for (int trial = 0; trial < 20; ++trial) {
      const Tensor3 x = random_tensor({5, 2, 4}, 300 + 20 * s + trial);
      EXPECT_GT(weighted_norm(x, n), 0.0);
      EXPECT_GT(weighted_norm(x, n, Weight::inverse), 0.0);
    }
  }
}

TEST(Norms, WeightedNormMatchesTraceDefinition) {
  const Tensor3 nt = test::random_spd_tensor(4, 3, 18);
  const SpdOperator n = SpdOperator::general(nt);
  const Tensor3 x = random_tensor({4, 3, 3}, 19);
  const Tensor3 g = test::oracle_prod(ttranspose(x), test::oracle_prod(nt, x));
  EXPECT_NEAR(weighted_norm(x, n), std::sqrt(g.face(0).trace()), 1e-12);
}

TEST(Circledast, LinearCombination) {
  const std::vector<Tensor3> c{random_tensor({3, 2, 4}, 20), random_tensor({3, 2, 4}, 21)};
  const std::vector<double> e1{1.0, 0.0}, zero{0.0, 0.0}, y{2.0, -3.0};
  EXPECT_EQ(circledast(c, e1), c[0]);
  EXPECT_EQ(fro_norm(circledast(c, zero)), 0.0);
  EXPECT_LT(rel_dev(circledast(c, y), 2.0 * c[0] - 3.0 * c[1]), 1e-15);
  const std::vector<double> bad{1.0};
  EXPECT_THROW(circledast(c, bad), DimensionError);
}

TEST(Tdiamond, IdentityWeightAndSymmetry) {
  const std::vector<Tensor3> a{random_tensor({4, 2, 3}, 22), random_tensor({4, 2, 3}, 23)};
  const std::vector<Tensor3> b{random_tensor({4, 2, 3}, 24)};
  const SpdOperator id = SpdOperator::identity(4, 3);
  const Eigen::MatrixXd g = tdiamond(std::span(a).first(1), b, id);
  EXPECT_NEAR(g(0, 0), inner(a[0], b[0]), 1e-13);

  const SpdOperator n = SpdOperator::general(test::random_spd_tensor(4, 3, 25));
  const Eigen::MatrixXd ab = tdiamond(a, b, n);
  const Eigen::MatrixXd ba = tdiamond(b, a, n);
  EXPECT_LT((ab - ba.transpose()).norm(), 1e-12 * ab.norm());
}

TEST(TensorOperator, MatchesTprodForSeveralSlices) {
  const Tensor3 a = random_tensor({6, 5, 7}, 26);
  const TensorOperator op(a);
  for (index_t p : {1, 3}) {
    const Tensor3 x = random_tensor({5, p, 7}, 27 + p);
    const Tensor3 y = random_tensor({6, p, 7}, 37 + p);
    EXPECT_LT(rel_dev(op.apply(x), oracle::bcirc_prod(a, x)), 1e-12);
    EXPECT_LT(rel_dev(op.apply_transpose(y), oracle::bcirc_prod(ttranspose(a), y)), 1e-12);
  }
  EXPECT_THROW(op.apply(random_tensor({6, 1, 7}, 1)), DimensionError);
}

TEST(Tensor, LateralSlicesAndShapeChecks) {
  Tensor3 t = random_tensor({3, 4, 2}, 28);
  const Tensor3 s = t.lateral(2);
  EXPECT_EQ(s.dims(), (Dims{3, 1, 2}));
  for (index_t k = 0; k < 2; ++k) {
    for (index_t i = 0; i < 3; ++i) EXPECT_EQ(s(i, 0, k), t(i, 2, k));
  }
  const Tensor3 r = t.lateral_range(1, 2);
  EXPECT_EQ(r.lateral(1), s);
  EXPECT_THROW(Tensor3(0, 1, 1), DimensionError);
  EXPECT_THROW(Tensor3(Dims{2, 2, 2}, std::vector<double>(7)), DimensionError);
  const std::vector<Tensor3> parts{t.lateral(0), t.lateral_range(1, 3)};
  EXPECT_EQ(hcat(parts), t);
}

}  // namespace
}  // namespace tgk
