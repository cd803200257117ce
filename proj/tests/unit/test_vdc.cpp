#include "oracles.hpp"
#include "wwlab/spectral.hpp"
#include "wwlab/vdc.hpp"

#include <gtest/gtest.h>

using namespace wwlab;

namespace {

std::vector<Operator> constant_terms(const Operator& a, int n) { return std::vector<Operator>(static_cast<std::size_t>(n), a); }

}  // namespace

TEST(VdcGap, SingleTermIsEquality) {
  Rng rng(1);
  const auto ctx = AlgebraCtx::make(3);
  const std::vector<Operator> a{Operator(ctx, random_ginibre(rng, 3))};
  const auto c = vdc_gap(a, 0);
  EXPECT_NEAR(c.gap_min_eig, 0.0, 1e-12);
  EXPECT_NEAR(c.gap_norm, 0.0, 1e-12);
  EXPECT_TRUE(c.operator_certified());
}

TEST(VdcGap, IdentityTermsScalarArithmetic) {
  const auto ctx = AlgebraCtx::make(2);
  for (int n : {1, 2, 5, 8}) {
    for (int m = 0; m < n; ++m) {
      const auto a = constant_terms(Operator::identity(ctx), n);
      const auto c = vdc_gap(a, m);
      // (n+m)/(m+1) sum_{|h|<=m} (1-|h|/(m+1)) (n-|h|) - n^2
      double rhs = 0.0;
      for (int h = -m; h <= m; ++h) rhs += (1.0 - std::abs(h) / (m + 1.0)) * (n - std::abs(h));
      rhs *= (n + m) / (m + 1.0);
      EXPECT_NEAR(c.gap_min_eig, rhs - n * n, 1e-10 * rhs) << n << " " << m;
      EXPECT_GE(c.gap_min_eig, -1e-12);
    }
  }
}

TEST(VdcGap, RandomInstancesAgainstDoubleSumOracle) {
  Rng rng(2);
  std::uniform_int_distribution<int> nd(1, 8), dd(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = nd(rng), dim = dd(rng);
    const auto ctx = AlgebraCtx::make(dim);
    std::vector<Operator> a;
    std::vector<Mat> raw;
    for (int k = 0; k < n; ++k) {
      raw.push_back(random_ginibre(rng, dim));
      a.emplace_back(ctx, raw.back());
    }
    const int m = std::uniform_int_distribution<int>(0, n - 1)(rng);
    const auto c = vdc_certificate(a, m);
    const Mat ref = oracle::vdc_gap(raw, m);
    EXPECT_NEAR(c.gap_min_eig, oracle::min_eig_general(ref), 1e-9 * std::max(1.0, c.gap_norm));
    EXPECT_GE(c.gap_min_eig, -1e-9 * std::max(1.0, c.gap_norm));
    EXPECT_TRUE(c.norm_certified());
    EXPECT_TRUE(c.sum_norm_certified());
  }
}

TEST(VdcGap, MOutOfRange) {
  const auto ctx = AlgebraCtx::make(2);
  const auto a = constant_terms(Operator::identity(ctx), 3);
  EXPECT_THROW(vdc_gap(a, 3), DomainError);
  EXPECT_THROW(vdc_gap(a, -1), DomainError);
  EXPECT_THROW(vdc_gap(std::span<const Operator>{}, 0), DomainError);
}

TEST(VdcNormBound, Examples) {
  const auto ctx = AlgebraCtx::make(2);
  const auto z = vdc_norm_bound(constant_terms(Operator::zero(ctx), 4), 2);
  EXPECT_EQ(z.lhs_norm, 0.0);
  EXPECT_EQ(z.rhs_norm_bound, 0.0);
  EXPECT_TRUE(z.norm_certified());
  const auto one = vdc_norm_bound(constant_terms(Operator::identity(ctx), 5), 0);
  EXPECT_NEAR(one.lhs_norm, 1.0, 1e-14);
  EXPECT_NEAR(one.rhs_norm_bound, 2.0, 1e-14);
}

TEST(Lemma2, Identity) {
  Rng rng(3);
  const auto ctx = AlgebraCtx::make(4);
  for (int i = 0; i < 20; ++i) {
    const Operator a(ctx, random_ginibre(rng, 4)), b(ctx, random_ginibre(rng, 4));
    EXPECT_LE(lemma2_identity_check(a, b, Projection::identity(ctx)), 1e-12);
    EXPECT_EQ(lemma2_identity_check(a, b, Projection::zero(ctx)), 0.0);
    const Projection e = spectral_projection(Operator(ctx, random_hermitian(rng, 4)), 0.0, 100.0);
    const double ref = oracle::opnorm((a.mat() * e.mat()).adjoint() * (b.mat() * e.mat()) -
                                      e.mat() * a.mat().adjoint() * b.mat() * e.mat());
    EXPECT_LE(lemma2_identity_check(a, b, e), 1e-12);
    EXPECT_NEAR(lemma2_identity_check(a, b, e), ref, 1e-13);
  }
}

TEST(BoundChain, ZeroObservable) {
  const auto ctx = AlgebraCtx::make(5);
  const auto pt = ww_bound_chain(Dynamics::cyclic_shift(ctx), Operator::zero(ctx), Projection::identity(ctx), 20, 3,
                                 LambdaGrid::uniform(16));
  EXPECT_EQ(pt.uniform_sup_sq, 0.0);
  EXPECT_EQ(pt.bound, 0.0);
}

TEST(BoundChain, MZeroRandomHomomorphisms) {
  Rng rng(4);
  const auto ctx = AlgebraCtx::make(3);
  for (int i = 0; i < 5; ++i) {
    const Mat u = random_unitary(rng, 3);
    const Dynamics d = Dynamics::unitary(Operator(ctx, u));
    const Operator x(ctx, random_ginibre(rng, 3));
    const Projection p = spectral_projection(Operator(ctx, random_hermitian(rng, 3)), -0.2, 100.0);
    const int n = 30;
    const auto pt = ww_bound_chain(d, x, p, n, 0, LambdaGrid::uniform(64));
    // direct evaluation of both sides
    const Mat xx = ergodic_avg(d, x.adjoint() * x, n).mat();
    EXPECT_NEAR(pt.bound, 2.0 * oracle::opnorm(p.mat() * xx * p.mat()), 1e-12);
    double sup = 0.0;
    for (int j = 0; j < 64; ++j)
      sup = std::max(sup, oracle::opnorm(oracle::weighted_avg(oracle::conjugation(u), x.mat(), j / 64.0L, n) * p.mat()));
    EXPECT_NEAR(pt.uniform_sup_sq, sup * sup, 1e-12);
    EXPECT_TRUE(pt.holds());
  }
}

TEST(BoundChain, RejectsNonHomomorphism) {
  Rng rng(5);
  const auto ctx = AlgebraCtx::make(2);
  const Dynamics k =
      Dynamics::kraus({{0.5, Operator(ctx, random_unitary(rng, 2))}, {0.5, Operator(ctx, random_unitary(rng, 2))}});
  EXPECT_THROW(ww_bound_chain(k, Operator::identity(ctx), Projection::identity(ctx), 4, 1, LambdaGrid::uniform(4)),
               HypothesisError);
}

TEST(BoundChain, QCycleNearAsymptotic) {
  const int q = 12, m = 16, n = 50 * q;
  const auto ctx = AlgebraCtx::make(q);
  Rng rng(6);
  std::vector<double> f(q);
  for (auto& v : f) v = std::normal_distribution<double>()(rng);
  double mean = 0.0;
  for (double v : f) mean += v / q;
  for (auto& v : f) v -= mean;
  const Operator x = Operator::diagonal(ctx, std::span<const double>(f));
  const Dynamics d = Dynamics::cyclic_shift(ctx);
  const auto pt = ww_bound_chain(d, x, Projection::identity(ctx), n, m, LambdaGrid::uniform(256), Sector::Diagonal);
  EXPECT_TRUE(pt.holds());
  // gamma-based prediction computed from the oracle correlation
  const auto g = oracle::correlation(oracle::permutation([&] {
                                       std::vector<int> p(q);
                                       for (int j = 0; j < q; ++j) p[static_cast<std::size_t>(j)] = (j + 1) % q;
                                       return p;
                                     }()),
                                     x.mat(), m + 1);
  double s = 0.0;
  for (int l = 1; l <= m; ++l) s += std::abs(g[static_cast<std::size_t>(l)]);
  const double asym = 2.0 / (m + 1) * g[0].real() + 4.0 / (m + 1) * s;
  EXPECT_NEAR(asym, ww_bound_asymptotic(correlation(d, x, m), m), 1e-12);
  EXPECT_LE(std::abs(pt.bound - asym), 0.1 * asym);
}
