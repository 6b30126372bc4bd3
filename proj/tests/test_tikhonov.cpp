#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "support.hpp"
#include "tgk/error.hpp"
#include "tgk/krylov.hpp"
#include "tgk/problems.hpp"
#include "tgk/tikhonov.hpp"

namespace tgk {
namespace {

using test::random_spd_tensor;
using test::random_tensor;

// Random A with geometrically decaying column scales, so the problem is
// mildly ill-posed and the discrepancy principle stops early.
Tensor3 decaying_operator(index_t rows, index_t cols, index_t depth, std::uint64_t seed) {
  Tensor3 a = random_tensor({rows, cols, depth}, seed);
  for (index_t k = 0; k < depth; ++k) {
    for (index_t j = 0; j < cols; ++j) a.face(k).col(j) *= std::pow(0.6, static_cast<double>(j));
  }
  return a;
}

struct Scenario {
  Scenario(index_t rows, index_t cols, index_t depth, index_t p, double level, std::uint64_t seed,
        bool weighted = true)
      : at(decaying_operator(rows, cols, depth, seed)),
        a(at),
        l(weighted ? SpdOperator::general(random_spd_tensor(cols, depth, seed + 1))
                   : SpdOperator::identity(cols, depth)),
        m(weighted ? SpdOperator::general(random_spd_tensor(rows, depth, seed + 2))
                   : SpdOperator::identity(rows, depth)),
        x_true(random_tensor({cols, p, depth}, seed + 3)),
        b_true(a.apply(x_true)),
        noise(gen_noise(b_true, m, {level, seed + 4})),
        b(b_true + noise.e) {}

  Operators ops() const { return {a, l, m}; }

  DiscrepancyConfig config(bool per_slice) const {
    DiscrepancyConfig cfg;
    cfg.delta = per_slice ? noise.slice_delta : std::vector<double>{noise.delta};
    cfg.mu_lo = 1e-4;
    cfg.mu_hi = 1e10;
    cfg.k_max = 40;
    return cfg;
  }

  Tensor3 at;
  TensorOperator a;
  SpdOperator l;
  SpdOperator m;
  Tensor3 x_true;
  Tensor3 b_true;
  NoiseSample noise;
  Tensor3 b;
};

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i / (count - 1)));
  }
  return out;
}

TEST(Phi, StrictlyDecreasingAndExactAtZero) {
  const Scenario s(16, 12, 4, 1, 1e-2, 10);
  const TensorGkb run = wtgkb(s.ops(), s.b, 6);
  double prev = std::numeric_limits<double>::infinity();
  for (double mu : log_grid(1e1, 1e7, 20)) {
    const double v = phi_k(run.pbar, run.z1(), mu);
    EXPECT_LT(v, prev) << "mu=" << mu;
    prev = v;
  }
  Tensor3 e1z1(7, 1, 4);
  for (index_t k = 0; k < 4; ++k) e1z1(0, 0, k) = run.z1()(0, 0, k);
  EXPECT_DOUBLE_EQ(phi_k(run.pbar, run.z1(), 0.0), e1z1.flat().squaredNorm());
}

// phi(mu) = || (mu P P^H + I)^{-1} e1 z1 ||^2 summed over Fourier faces / n.
TEST(Phi, MatchesClosedForm) {
  const Scenario s(16, 12, 4, 1, 1e-2, 20);
  const TensorGkb run = wtgkb(s.ops(), s.b, 5);
  const FourierTensor3 fp = fft_mode3(run.pbar.assemble());
  const FourierTensor3 fz = fft_mode3(run.z1());
  for (double mu : {3.0, 300.0, 3e5}) {
    double sum = 0.0;
    for (index_t f = 0; f < 4; ++f) {
      const Eigen::MatrixXcd p = fp.face(f);
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(6);
      e(0) = fz(0, 0, f);
      const Eigen::MatrixXcd g = mu * p * p.adjoint() + Eigen::MatrixXcd::Identity(6, 6);
      sum += g.partialPivLu().solve(e).squaredNorm();
    }
    const double closed = sum / 4.0;
    EXPECT_NEAR(phi_k(run.pbar, run.z1(), mu), closed, 1e-10 * closed) << "mu=" << mu;
  }
}

TEST(Psi, StrictlyDecreasingAndExactAtZero) {
  const Scenario s(16, 12, 4, 3, 1e-2, 30);
  const GlobalGkb run = wgg_tgkb(s.ops(), s.b, 6);
  double prev = std::numeric_limits<double>::infinity();
  for (double mu : log_grid(1e1, 1e7, 20)) {
    const double v = psi_k(run.pbar(), run.beta1(), mu);
    EXPECT_LT(v, prev) << "mu=" << mu;
    prev = v;
  }
  EXPECT_EQ(psi_k(run.pbar(), run.beta1(), 0.0), run.beta1() * run.beta1());
}

TEST(Psi, OneStepMatchesExplicitInverse) {
  const double alpha = 1.3, beta = 0.4, beta1 = 2.0;
  Eigen::MatrixXd p(2, 1);
  p << alpha, beta;
  const ScalarBidiagonal pb = ScalarBidiagonal::from_matrix(p);
  for (double mu : {0.1, 1.0, 50.0}) {
    const Eigen::Matrix2d g = mu * p * p.transpose() + Eigen::Matrix2d::Identity();
    const Eigen::Vector2d r = g.inverse() * Eigen::Vector2d(beta1, 0.0);
    EXPECT_NEAR(psi_k(pb, beta1, mu), r.squaredNorm(), 1e-14);
  }
}

TEST(Psi, ResidualFormMatchesClosedForm) {
  const Scenario s(16, 12, 4, 2, 1e-2, 40);
  const GlobalGkb run = wgg_tgkb(s.ops(), s.b, 7);
  const Eigen::MatrixXd p = run.pbar().matrix();
  for (double mu : {2.0, 2e3, 2e6}) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(8);
    e(0) = run.beta1();
    const Eigen::MatrixXd g = mu * p * p.transpose() + Eigen::MatrixXd::Identity(8, 8);
    const double closed = g.ldlt().solve(e).squaredNorm();
    // The normal-equation oracle loses accuracy in proportion to cond(g).
    const Eigen::VectorXd sv = g.selfadjointView<Eigen::Lower>().eigenvalues();
    const double tol = 100.0 * std::numeric_limits<double>::epsilon() * sv.maxCoeff() / sv.minCoeff();
    EXPECT_NEAR(psi_k(run.pbar(), run.beta1(), mu), closed, tol * closed) << "mu=" << mu;
  }
}

TEST(Bisect, AnalyticRoot) {
  DiscrepancyConfig cfg;
  cfg.mu_lo = 0.1;
  cfg.mu_hi = 10.0;
  const Bisection b = bisect_mu([](double mu) { return 1.0 / mu; }, 0.5, cfg);
  EXPECT_NEAR(b.mu, 2.0, 2.0 * 1e-3 * std::log(10.0));
  EXPECT_LE(b.lo, 2.0);
  EXPECT_GE(b.hi, 2.0);
  EXPECT_LT(std::log10(b.hi) - std::log10(b.lo), cfg.log_width);
}

TEST(Bisect, BracketErrors) {
  DiscrepancyConfig cfg;
  cfg.mu_lo = 0.1;
  cfg.mu_hi = 10.0;
  auto f = [](double mu) { return 1.0 / mu; };
  try {
    bisect_mu(f, 20.0, cfg);
    FAIL();
  } catch (const BracketError& e) {
    EXPECT_EQ(e.side(), BracketError::Side::below_lower);
  }
  try {
    bisect_mu(f, 0.01, cfg);
    FAIL();
  } catch (const BracketError& e) {
    EXPECT_EQ(e.side(), BracketError::Side::above_upper);
  }
}

TEST(Bisect, RootLiesInFinalBracketOnRealPhi) {
  const Scenario s(16, 12, 4, 1, 1e-2, 50);
  const TensorGkb run = wtgkb(s.ops(), s.b, 6);
  const FourierBidiagonal fb(run.pbar, run.z1());
  DiscrepancyConfig cfg;
  const double target = 0.5 * (fb.residual_sq(cfg.mu_lo) + fb.residual_sq(cfg.mu_hi));
  const Bisection b = bisect_mu([&](double mu) { return fb.residual_sq(mu); }, target, cfg);
  const double f_mu = fb.residual_sq(b.mu);
  EXPECT_LE(std::abs(f_mu - target), std::abs(fb.residual_sq(b.lo) - fb.residual_sq(b.hi)));
  EXPECT_GE(b.f_lo, target);
  EXPECT_LE(b.f_hi, target);
}

TEST(Config, Validation) {
  DiscrepancyConfig cfg;
  cfg.delta = {1.0};
  EXPECT_NO_THROW(cfg.validate(1));
  EXPECT_THROW(cfg.validate(2), Error);
  DiscrepancyConfig bad = cfg;
  bad.eta = 1.0;
  EXPECT_THROW(bad.validate(1), Error);
  bad = cfg;
  bad.mu_lo = 1e8;
  EXPECT_THROW(bad.validate(1), Error);
  bad = cfg;
  bad.k_init = 0;
  EXPECT_THROW(bad.validate(1), Error);
  bad = cfg;
  bad.delta = {0.0};
  EXPECT_THROW(bad.validate(1), Error);
}

TEST(Methods, NamesRoundTrip) {
  for (Method m : {Method::wtgkt, Method::wtgkt_p, Method::wg_tgkt, Method::wg_tgkt_p,
                   Method::wgg_tgkt}) {
    EXPECT_EQ(parse_method(method_name(m)), m);
  }
  EXPECT_EQ(method_name(Method::wgg_tgkt), "wgg-tgkt");
  EXPECT_THROW(parse_method("tgkt"), Error);
}

void expect_discrepancy_met(const SliceRecord& r, double eta) {
  EXPECT_FALSE(r.failed) << r.message;
  EXPECT_NEAR(r.discrepancy, eta * r.delta, 1e-2 * eta * r.delta);
  ASSERT_TRUE(r.full_discrepancy);
  EXPECT_NEAR(*r.full_discrepancy, r.discrepancy, 1e-8 * r.discrepancy);
}

TEST(Wtgkt, FullResidualEqualsReducedResidual) {
  const Scenario s(24, 20, 4, 1, 1e-2, 60);
  DiscrepancyConfig cfg = s.config(false);
  cfg.verify = true;
  // The identity assumes orthonormal bases, which the plain recurrence loses
  // within a few steps on this quickly decaying spectrum.
  cfg.krylov.reorthogonalize = true;
  const Solution sol = wtgkt(s.ops(), s.b, cfg);
  expect_discrepancy_met(sol.report.slices.at(0), cfg.eta);
  const SliceRecord& r = sol.report.slices[0];
  // Both sides squared, as phi_k(mu_k) against ||A*X - B||^2_{M^{-1}}.
  const double full = weighted_norm(s.a.apply(sol.x) - s.b, s.m, Weight::inverse);
  EXPECT_NEAR(full * full, r.discrepancy * r.discrepancy, 1e-8 * r.discrepancy * r.discrepancy);
  // The stopping test used the undamped residual.
  EXPECT_LT(r.residual_history.back(), cfg.eta * r.delta);
  for (std::size_t i = 0; i + 1 < r.residual_history.size(); ++i) {
    EXPECT_GE(r.residual_history[i], cfg.eta * r.delta);
  }
}

TEST(Wtgkt, ExactDataIsRecovered) {
  const Tensor3 at = identity_tensor(8, 4) + 0.1 * random_tensor({8, 8, 4}, 70);
  const TensorOperator a(at);
  const SpdOperator id = SpdOperator::identity(8, 4);
  const Tensor3 x_true = random_tensor({8, 1, 4}, 71);
  const Tensor3 b = a.apply(x_true);
  DiscrepancyConfig cfg;
  cfg.eta = 1.01;
  cfg.delta = {1e-12 * fro_norm(b)};
  cfg.mu_hi = 1e30;
  cfg.krylov.reorthogonalize = true;
  const Solution sol = wtgkt({a, id, id}, b, cfg);
  EXPECT_LT(test::rel_dev(sol.x, x_true), 1e-6);
}

TEST(Wtgkt, UndampedResidualNeverIncreasesWithK) {
  const Scenario s(16, 12, 4, 1, 1e-2, 80);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 2; k <= 8; ++k) {
    const TensorGkb run = wtgkb(s.ops(), s.b, k);
    const double ls = FourierBidiagonal(run.pbar, run.z1()).residual_sq(
        std::numeric_limits<double>::infinity());
    EXPECT_LE(ls, prev * (1.0 + 1e-12)) << "k=" << k;
    prev = ls;
  }
}

TEST(WtgktP, SingleSliceMatchesWtgkt) {
  const Scenario s(16, 12, 4, 1, 1e-2, 90);
  const DiscrepancyConfig cfg = s.config(true);
  const Solution one = wtgkt(s.ops(), s.b, cfg);
  const Solution many = wtgkt_p(s.ops(), s.b, cfg);
  EXPECT_EQ(one.x, many.x);
  EXPECT_EQ(one.report.slices[0].k, many.report.slices[0].k);
  EXPECT_EQ(one.report.slices[0].mu, many.report.slices[0].mu);
}

TEST(WtgktP, IdenticalSlicesGiveIdenticalRecords) {
  const Scenario s(16, 12, 4, 1, 1e-2, 100);
  Tensor3 b(16, 2, 4);
  b.set_lateral(0, s.b);
  b.set_lateral(1, s.b);
  DiscrepancyConfig cfg = s.config(false);
  cfg.delta = {s.noise.delta, s.noise.delta};
  const Solution sol = wtgkt_p(s.ops(), b, cfg);
  const SliceRecord& r0 = sol.report.slices[0];
  const SliceRecord& r1 = sol.report.slices[1];
  EXPECT_EQ(r0.k, r1.k);
  EXPECT_EQ(r0.mu, r1.mu);
  EXPECT_EQ(r0.discrepancy, r1.discrepancy);
  EXPECT_EQ(r1.slice, 1);
  EXPECT_EQ(sol.x.lateral(0), sol.x.lateral(1));
}

// Three 32 x 32 color channels with the blur, covariance and regularizer of
// the experiments.
struct ColorDesk {
  ColorDesk()
      : a(build_blur({32, 2.0, 5, BlurVariant::symmetric})),
        m(build_covariance_m(32, 32)),
        l(build_reg_d(32, 32)) {
    const auto ch = color_scene(32);
    x_true = multi_twist(std::span<const Eigen::MatrixXd>(ch.data(), ch.size()));
    noise = gen_noise(a.apply(x_true), m, {1e-2, 7});
    b = a.apply(x_true) + noise.e;
  }
  Operators ops() const { return {a, l, m}; }

  TensorOperator a;
  SpdOperator m;
  SpdOperator l;
  Tensor3 x_true;
  NoiseSample noise;
  Tensor3 b;
};

TEST(PMethods, EverySliceMeetsItsDiscrepancy) {
  const ColorDesk d;
  DiscrepancyConfig cfg;
  cfg.delta = d.noise.slice_delta;
  cfg.verify = true;
  for (auto solver : {&wtgkt_p, &wg_tgkt_p}) {
    const Solution sol = solver(d.ops(), d.b, cfg);
    ASSERT_EQ(sol.report.slices.size(), 3u);
    for (const SliceRecord& r : sol.report.slices) expect_discrepancy_met(r, cfg.eta);
    EXPECT_GT(metrics(sol.x, d.x_true).psnr, metrics(d.b, d.x_true).psnr);
  }
}

TEST(Wggtgkt, FullResidualEqualsReducedResidual) {
  const Scenario s(24, 20, 4, 3, 1e-2, 110);
  DiscrepancyConfig cfg = s.config(false);
  cfg.verify = true;
  // The identity assumes orthonormal bases, which the plain recurrence loses
  // within a few steps on this quickly decaying spectrum.
  cfg.krylov.reorthogonalize = true;
  const Solution sol = wgg_tgkt(s.ops(), s.b, cfg);
  ASSERT_EQ(sol.report.slices.size(), 1u);
  expect_discrepancy_met(sol.report.slices[0], cfg.eta);
}

TEST(Wggtgkt, SingleSliceMatchesWgtgkt) {
  const Scenario s(16, 12, 4, 1, 1e-2, 120);
  const DiscrepancyConfig cfg = s.config(false);
  const Solution g = wgg_tgkt(s.ops(), s.b, cfg);
  const Solution w = wg_tgkt(s.ops(), s.b, cfg);
  EXPECT_LT(test::rel_dev(g.x, w.x), 1e-10);
  const Solution wp = wg_tgkt_p(s.ops(), s.b, s.config(true));
  EXPECT_LT(test::rel_dev(g.x, wp.x), 1e-10);
}

// n = 1, L = M = I: a plain matrix Golub-Kahan-Tikhonov solve at the same k
// and mu reproduces the solution.
TEST(Wgtgkt, MatchesMatrixOracle) {
  const Scenario s(20, 14, 1, 1, 1e-2, 130, false);
  // Both sides reorthogonalize so that rounding does not separate them.
  DiscrepancyConfig cfg = s.config(false);
  cfg.krylov.reorthogonalize = true;
  const Solution sol = wg_tgkt(s.ops(), s.b, cfg);
  const SliceRecord& r = sol.report.slices[0];
  const Eigen::MatrixXd a = s.at.face(0);
  Eigen::VectorXd u = s.b.face(0);
  const double beta1 = u.norm();
  u /= beta1;
  Eigen::MatrixXd v(14, r.k);
  Eigen::MatrixXd uu(20, r.k + 1);
  uu.col(0) = u;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(r.k + 1, r.k);
  Eigen::VectorXd w = a.transpose() * u;
  for (int j = 0; j < r.k; ++j) {
    if (j > 0) {
      w = a.transpose() * u - p(j, j - 1) * v.col(j - 1);
      w -= v.leftCols(j) * (v.leftCols(j).transpose() * w);
    }
    p(j, j) = w.norm();
    v.col(j) = w / p(j, j);
    u = a * v.col(j) - p(j, j) * u;
    u -= uu.leftCols(j + 1) * (uu.leftCols(j + 1).transpose() * u);
    p(j + 1, j) = u.norm();
    u /= p(j + 1, j);
    uu.col(j + 1) = u;
  }
  Eigen::VectorXd e = Eigen::VectorXd::Zero(r.k + 1);
  e(0) = beta1;
  const Eigen::VectorXd z =
      (p.transpose() * p + Eigen::MatrixXd::Identity(r.k, r.k) / r.mu).ldlt().solve(p.transpose() * e);
  const Eigen::VectorXd x = v * z;
  const Eigen::VectorXd got = sol.x.face(0);
  EXPECT_LT((got - x).norm(), 1e-8 * x.norm());
}

TEST(Solve, DispatchesOnMethod) {
  const Scenario s(16, 12, 4, 1, 1e-2, 140);
  const DiscrepancyConfig cfg = s.config(false);
  EXPECT_EQ(solve(Method::wtgkt, s.ops(), s.b, cfg).x, wtgkt(s.ops(), s.b, cfg).x);
  EXPECT_EQ(solve(Method::wgg_tgkt, s.ops(), s.b, cfg).report.method, Method::wgg_tgkt);
}

TEST(Failures, StepCapCarriesPartialSolution) {
  const Scenario s(24, 20, 4, 2, 1e-3, 150);
  DiscrepancyConfig cfg = s.config(true);
  cfg.k_init = 1;
  cfg.k_max = 1;
  try {
    wtgkt_p(s.ops(), s.b, cfg);
    FAIL() << "expected SolveFailure";
  } catch (const SolveFailure& e) {
    ASSERT_EQ(e.partial().report.slices.size(), 2u);
    EXPECT_TRUE(e.partial().report.failed());
    EXPECT_EQ(e.partial().report.slices[0].k, 1);
  }
  cfg.allow_partial = true;
  const Solution sol = wtgkt_p(s.ops(), s.b, cfg);
  EXPECT_TRUE(sol.report.failed());
  EXPECT_EQ(fro_norm(sol.x), 0.0);
}

TEST(Failures, DiscrepancyMetAtLowerEndFails) {
  const Scenario s(16, 12, 4, 1, 1e-2, 160);
  DiscrepancyConfig cfg = s.config(false);
  cfg.delta = {0.9 * weighted_norm(s.b, s.m, Weight::inverse)};
  cfg.mu_lo = 1e3;
  EXPECT_THROW(wgg_tgkt(s.ops(), s.b, cfg), DiscrepancyError);
}

TEST(Failures, WrongShapesAreRejected) {
  const Scenario s(16, 12, 4, 2, 1e-2, 170);
  EXPECT_THROW(wtgkt(s.ops(), s.b, s.config(false)), DimensionError);
  EXPECT_THROW(wg_tgkt(s.ops(), s.b, s.config(false)), DimensionError);
  EXPECT_THROW(wtgkt_p(s.ops(), s.b, s.config(false)), Error);
}

}  // namespace
}  // namespace tgk
