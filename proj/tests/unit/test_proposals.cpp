#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "amis/errors.hpp"
#include "amis/proposals.hpp"
#include "amis/quadrature.hpp"
#include "oracles.hpp"

namespace {

using amis::Box;
using amis::FamilySpec;
using amis::HStat;
using amis::Matrix;
using amis::Normalization;
using amis::ProposalParams;
using amis::Vector;

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

ProposalParams standard(int d) {
  return ProposalParams::from_mean_cov(Vector::Zero(d), Matrix::Identity(d, d));
}

TEST(Sample, Deterministic) {
  const auto p = ProposalParams::from_mean_cov(vec({1.0, 2.0}), Matrix::Identity(2, 2) * 3.0);
  const FamilySpec fam{2, std::nullopt, false};
  const Matrix a = amis::sample(p, fam, 5, {42, 3});
  const Matrix b = amis::sample(p, fam, 5, {42, 3});
  EXPECT_TRUE((a.array() == b.array()).all());
  const Matrix c = amis::sample(p, fam, 5, {43, 3});
  EXPECT_FALSE((a.array() == c.array()).all());
}

TEST(Sample, SubstreamsIndependentOfBatchLayout) {
  const auto p = standard(2);
  const FamilySpec fam{2, std::nullopt, false};
  const Matrix whole = amis::sample(p, fam, 10, {7, 1});
  const Matrix tail = amis::sample(p, fam, 4, {7, 1}, 6);
  EXPECT_TRUE((whole.rightCols(4).array() == tail.array()).all());
}

TEST(Sample, WideBoxKeepsEverything) {
  const FamilySpec fam{2, Box{Vector::Constant(2, -10.0), Vector::Constant(2, 10.0)}, false};
  const Matrix x = amis::sample(standard(2), fam, 1000, {1, 1});
  ASSERT_EQ(x.cols(), 1000);
  for (Eigen::Index i = 0; i < x.cols(); ++i) EXPECT_TRUE(fam.truncation->contains(x.col(i)));
  EXPECT_NEAR(amis::log_box_mass(standard(2), fam), 0.0, 1e-15);
}

TEST(Sample, NarrowBoxStaysInside) {
  const FamilySpec fam{2, Box{vec({0.5, -0.2}), vec({1.5, 0.3})}, false};
  const Matrix x = amis::sample(standard(2), fam, 500, {2, 1});
  for (Eigen::Index i = 0; i < x.cols(); ++i) EXPECT_TRUE(fam.truncation->contains(x.col(i)));
}

TEST(Sample, EscapedMassThrows) {
  const FamilySpec fam{1, Box{vec({20.0}), vec({21.0})}, false};
  EXPECT_THROW(amis::sample(standard(1), fam, 10, {1, 1}), amis::SupportEscapeError);
}

TEST(Sample, MeanWithinCltBound) {
  const FamilySpec fam{1, std::nullopt, false};
  const Matrix x = amis::sample(standard(1), fam, 100000, {123, 1});
  EXPECT_LT(std::abs(x.mean()), 4.0 / std::sqrt(1e5));
  const double var = (x.array() - x.mean()).square().sum() / (x.cols() - 1);
  EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(LogDensity, ClosedForms) {
  const FamilySpec f1{1, std::nullopt, false};
  EXPECT_NEAR(amis::log_density(vec({0.0}), standard(1), f1), -0.918939, 1e-6);

  const FamilySpec f2{2, std::nullopt, false};
  Matrix c = Matrix::Zero(2, 2);
  c.diagonal() << 1.0, 4.0;
  const auto p = ProposalParams::from_mean_cov(Vector::Zero(2), c);
  const double expected = -(std::log(2.0 * std::numbers::pi) + 0.5 * std::log(4.0) + 0.5 * (1.0 + 1.0));
  EXPECT_NEAR(amis::log_density(vec({1.0, 2.0}), p, f2), expected, 1e-13);
  EXPECT_NEAR(expected, -3.531, 5e-4);
}

TEST(LogDensity, OutsideBoxIsNegativeInfinity) {
  const FamilySpec fam{2, Box{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)}, false};
  EXPECT_EQ(amis::log_density(vec({1.5, 0.0}), standard(2), fam), -kInf);
  EXPECT_TRUE(std::isfinite(amis::log_density(vec({0.5, 0.0}), standard(2), fam)));
}

TEST(LogDensity, AgreesWithOracle) {
  std::mt19937_64 rng(17);
  const FamilySpec fam{2, std::nullopt, false};
  for (int rep = 0; rep < 100; ++rep) {
    const Vector m = Vector::Random(2) * 2.0;
    const Matrix c = oracle::random_spd(2, rng);
    const auto p = ProposalParams::from_mean_cov(m, c);
    const Vector x = Vector::Random(2) * 4.0;
    EXPECT_NEAR(amis::log_density(x, p, fam), std::log(oracle::gaussian_pdf(x, m, c)), 1e-11);
  }
}

TEST(LogDensity, TruncatedIntegratesToOne) {
  Matrix c = Matrix::Zero(2, 2);
  c.diagonal() << 1.5, 0.6;
  const auto p = ProposalParams::from_mean_cov(vec({0.3, -0.4}), c);
  const Box box{vec({-1.0, -1.5}), vec({2.0, 0.5})};
  const FamilySpec fam{2, box, false};
  const auto f = [&](const Vector& x) { return std::exp(amis::log_density(x, p, fam)); };
  EXPECT_NEAR(oracle::trapezoid(f, box.lower, box.upper, 400), 1.0, 1e-3);
}

TEST(ImportanceIdentity, BoxVolume) {
  const auto p = ProposalParams::from_mean_cov(vec({0.0, 0.0}), Matrix::Identity(2, 2) * 2.0);
  const FamilySpec fam{2, std::nullopt, false};
  const Box box{vec({-1.0, -0.5}), vec({1.0, 1.5})};
  const std::size_t n = 100000;
  const Matrix x = amis::sample(p, fam, n, {99, 1});
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.cols(); ++i)
    if (box.contains(x.col(i))) s += std::exp(-amis::log_density(x.col(i), p, fam));
  EXPECT_NEAR(s / static_cast<double>(n), 4.0, 0.05 * 4.0);
}

TEST(HStat, ZeroWeightLeavesStatUnchanged) {
  HStat s(2, Normalization::SelfNormalized);
  s = amis::accumulate_h(s, vec({1.0, 2.0}), 0.0);
  s = amis::accumulate_h(s, vec({-1.0, 0.5}), std::log(3.0));
  const HStat t = amis::accumulate_h(s, vec({100.0, -50.0}), -kInf);
  EXPECT_TRUE((t.raw_m1().array() == s.raw_m1().array()).all());
  EXPECT_TRUE((t.raw_m2().array() == s.raw_m2().array()).all());
  EXPECT_EQ(t.log_weight_sum(), s.log_weight_sum());
  EXPECT_EQ(t.positive_count(), s.positive_count());
  EXPECT_EQ(t.count(), s.count() + 1);
}

TEST(HStat, SymmetricPairHasZeroMean) {
  HStat s(2, Normalization::SelfNormalized);
  s.add(vec({0.7, -2.3}), 0.4);
  s.add(vec({-0.7, 2.3}), 0.4);
  EXPECT_NEAR(s.raw_m1().norm(), 0.0, 1e-15);
}

TEST(HStat, MatchesTwoPassOracle) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> lw(-5.0, 5.0);
  Matrix pts(2, 100);
  std::vector<double> logw(100), w(100);
  for (int i = 0; i < 100; ++i) {
    pts(0, i) = 3.0 + z(rng);
    pts(1, i) = -1.0 + 2.0 * z(rng);
    logw[i] = lw(rng);
    w[i] = std::exp(logw[i]);
  }
  HStat s(2, Normalization::SelfNormalized);
  for (int i = 0; i < 100; ++i) s.add(pts.col(i), logw[i]);
  const auto ref = oracle::two_pass_moments(pts, w);
  for (int k = 0; k < 2; ++k) EXPECT_NEAR(s.mean()[k], ref.mean[k], 1e-12 * std::abs(ref.mean[k]));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      EXPECT_NEAR(s.cov()(a, b), ref.cov(a, b), 1e-12 * ref.cov.cwiseAbs().maxCoeff());
  EXPECT_NEAR(s.log_weight_sum(), std::log(ref.total_weight), 1e-12);
  EXPECT_LT((s.raw_m2() - s.raw_m2().transpose()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(HStat, NormalizedDividesByCount) {
  HStat s(1, Normalization::Normalized);
  s.add(vec({2.0}), std::log(3.0));
  s.add(vec({4.0}), std::log(1.0));
  s.add(vec({9.0}), -kInf);
  EXPECT_NEAR(s.raw_m1()[0], (3.0 * 2.0 + 4.0) / 3.0, 1e-14);
  EXPECT_NEAR(s.raw_m2()(0, 0), (3.0 * 4.0 + 16.0) / 3.0, 1e-14);
  EXPECT_NEAR(s.total_logw(), std::log(3.0), 1e-15);
}

TEST(HStat, MergeEqualsSequential) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  HStat all(2, Normalization::SelfNormalized), left(2, Normalization::SelfNormalized),
      right(2, Normalization::SelfNormalized);
  for (int i = 0; i < 64; ++i) {
    const Vector x = vec({z(rng), z(rng)});
    const double lw = 3.0 * z(rng);
    all.add(x, lw);
    (i < 30 ? left : right).add(x, lw);
  }
  left.merge(right);
  EXPECT_LT((left.mean() - all.mean()).norm(), 1e-12);
  EXPECT_LT((left.cov() - all.cov()).norm(), 1e-12);
  EXPECT_EQ(left.count(), all.count());
}

TEST(MomentsToParams, FourPointCross) {
  HStat s(2, Normalization::SelfNormalized);
  for (const Vector& x : {vec({1, 0}), vec({-1, 0}), vec({0, 1}), vec({0, -1})}) s.add(x, 0.0);
  const auto p = amis::moments_to_params(s, FamilySpec{2, std::nullopt, false});
  EXPECT_NEAR(p.mean().norm(), 0.0, 1e-15);
  EXPECT_NEAR(p.cov()(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(p.cov()(1, 1), 0.5, 1e-15);
  EXPECT_NEAR(p.cov()(0, 1), 0.0, 1e-15);
}

TEST(MomentsToParams, SinglePointMassFails) {
  HStat s(2, Normalization::SelfNormalized);
  for (int i = 0; i < 5; ++i) s.add(vec({1.0, 2.0}), 0.0);
  EXPECT_THROW(amis::moments_to_params(s, FamilySpec{2, std::nullopt, false}), amis::AdaptationFailure);
}

TEST(MomentsToParams, ZeroWeightIsDegenerate) {
  HStat s(1, Normalization::SelfNormalized);
  s.add(vec({1.0}), -kInf);
  s.add(vec({2.0}), -kInf);
  EXPECT_THROW(amis::moments_to_params(s, FamilySpec{1, std::nullopt, false}), amis::DegenerateSampleError);
}

TEST(MomentsToParams, RecoversGaussianMean) {
  const auto p = ProposalParams::from_mean_cov(vec({1.0, -1.0}), Matrix::Identity(2, 2));
  const FamilySpec fam{2, std::nullopt, false};
  const Matrix x = amis::sample(p, fam, 10000, {5, 1});
  HStat s(2, Normalization::SelfNormalized);
  for (Eigen::Index i = 0; i < x.cols(); ++i) s.add(x.col(i), 0.0);
  const auto q = amis::moments_to_params(s, fam);
  EXPECT_LT((q.mean() - vec({1.0, -1.0})).cwiseAbs().maxCoeff(), 0.05);
}

TEST(MomentsToParams, UnweightedSampleMatchesTwoPass) {
  const auto p = ProposalParams::from_mean_cov(vec({50.0, -20.0}), Matrix::Identity(2, 2) * 0.01);
  const FamilySpec fam{2, std::nullopt, false};
  const Matrix x = amis::sample(p, fam, 2000, {8, 1});
  HStat s(2, Normalization::SelfNormalized);
  for (Eigen::Index i = 0; i < x.cols(); ++i) s.add(x.col(i), 0.0);
  const auto q = amis::moments_to_params(s, fam);
  const auto ref = oracle::two_pass_moments(x, std::vector<double>(2000, 1.0));
  EXPECT_LT(((q.mean() - ref.mean).array() / ref.mean.array()).abs().maxCoeff(), 1e-12);
  EXPECT_LT((q.cov() - ref.cov).cwiseAbs().maxCoeff() / ref.cov.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MomentsToParams, DiagonalFamilyDropsCorrelation) {
  HStat s(2, Normalization::SelfNormalized);
  for (int i = -3; i <= 3; ++i) s.add(vec({double(i), 0.5 * i + (i % 2)}), 0.0);
  const auto p = amis::moments_to_params(s, FamilySpec{2, std::nullopt, true});
  EXPECT_EQ(p.cov()(0, 1), 0.0);
  EXPECT_EQ(p.cov()(1, 0), 0.0);
}

TEST(FamilySpec, RejectsInvertedBox) {
  const FamilySpec fam{1, Box{vec({1.0}), vec({0.0})}, false};
  EXPECT_THROW(fam.validate(), amis::ContractViolation);
}

TEST(Quadrature, GaussianMass) {
  const auto p = standard(2);
  const Box box{Vector::Constant(2, -8.0), Vector::Constant(2, 8.0)};
  const FamilySpec fam{2, std::nullopt, false};
  const double v = amis::integrate_box(
      [&](const amis::ConstPoint& x) { return std::exp(amis::log_density(x, p, fam)); }, box);
  EXPECT_NEAR(v, 1.0, 1e-8);
  const double cell = amis::integrate_cell(
      [&](const amis::ConstPoint& x) { return std::exp(amis::log_density(x, p, fam)); },
      Box{Vector::Constant(2, -8.0), Vector::Zero(2)}, 4, 4);
  EXPECT_NEAR(cell, 0.25, 1e-10);
}

}  // namespace
