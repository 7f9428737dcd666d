#include "amis/types.hpp"

#include <cmath>
#include <numeric>

#include "amis/errors.hpp"

namespace amis {

char algorithm_letter(Algorithm a) {
  switch (a) {
    case Algorithm::NaiveRecycling: return 'a';
    case Algorithm::OriginalAmis: return 'b';
    case Algorithm::ModifiedAmis: return 'c';
  }
  return '?';
}

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::NaiveRecycling: return "naive-recycling";
    case Algorithm::OriginalAmis: return "original-amis";
    case Algorithm::ModifiedAmis: return "modified-amis";
  }
  return "unknown";
}

std::optional<Algorithm> algorithm_from_letter(char c) {
  switch (c) {
    case 'a': return Algorithm::NaiveRecycling;
    case 'b': return Algorithm::OriginalAmis;
    case 'c': return Algorithm::ModifiedAmis;
    default: return std::nullopt;
  }
}

std::string_view normalization_name(Normalization n) {
  return n == Normalization::Normalized ? "normalized" : "self-normalized";
}

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr int kRepairAttempts = 3;

bool try_cholesky(const Matrix& cov, Matrix& lower) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) return false;
  lower = llt.matrixL();
  for (Eigen::Index i = 0; i < lower.rows(); ++i) {
    if (!(lower(i, i) > 0.0) || !std::isfinite(lower(i, i))) return false;
  }
  return true;
}

void check_shapes(const Vector& mean, const Matrix& cov) {
  if (mean.size() == 0) throw ContractViolation("proposal: zero dimension");
  if (cov.rows() != mean.size() || cov.cols() != mean.size())
    throw ContractViolation("proposal: covariance shape does not match mean");
  if (!mean.allFinite() || !cov.allFinite())
    throw ContractViolation("proposal: non-finite parameters");
}

}  // namespace

ProposalParams ProposalParams::from_mean_cov(Vector mean, Matrix cov) {
  check_shapes(mean, cov);
  if (((cov - cov.transpose()).cwiseAbs().array() > kSymmetryTol).any())
    throw ContractViolation("proposal: covariance is not symmetric");
  ProposalParams p;
  if (!try_cholesky(cov, p.chol_))
    throw ContractViolation("proposal: covariance is not positive definite");
  p.raw_m1_ = mean;
  p.raw_m2_ = cov + mean * mean.transpose();
  p.mean_ = std::move(mean);
  p.cov_ = std::move(cov);
  p.log_det_ = 2.0 * p.chol_.diagonal().array().log().sum();
  return p;
}

ProposalParams ProposalParams::repaired(Vector mean, Matrix cov) {
  check_shapes(mean, cov);
  // Symmetrize; accumulated outer products drift by rounding only.
  cov = 0.5 * (cov + cov.transpose()).eval();
  const double d = static_cast<double>(mean.size());
  const double jitter = 1e-9 * cov.trace() / d;
  Matrix lower;
  bool ok = try_cholesky(cov, lower);
  for (int attempt = 0; !ok && attempt < kRepairAttempts; ++attempt) {
    if (!(jitter > 0.0)) break;
    cov.diagonal().array() += jitter;
    ok = try_cholesky(cov, lower);
  }
  if (!ok) throw AdaptationFailure("covariance is not positive definite after jitter repair");
  ProposalParams p;
  p.chol_ = std::move(lower);
  p.raw_m1_ = mean;
  p.raw_m2_ = cov + mean * mean.transpose();
  p.mean_ = std::move(mean);
  p.cov_ = std::move(cov);
  p.log_det_ = 2.0 * p.chol_.diagonal().array().log().sum();
  return p;
}

ProposalParams ProposalParams::from_raw_moments(const Vector& m1, const Matrix& m2) {
  check_shapes(m1, m2);
  return repaired(m1, m2 - m1 * m1.transpose());
}

Vector ProposalParams::flatten() const {
  const Eigen::Index d = mean_.size();
  Vector v(d + d * d);
  v.head(d) = mean_;
  v.tail(d * d) = Eigen::Map<const Vector>(cov_.data(), d * d);
  return v;
}

bool operator==(const ProposalParams& a, const ProposalParams& b) {
  return a.mean_ == b.mean_ && a.cov_ == b.cov_ && a.raw_m1_ == b.raw_m1_ &&
         a.raw_m2_ == b.raw_m2_;
}

double theta_distance(const ProposalParams& a, const ProposalParams& b) {
  if (a.dim() != b.dim()) throw ContractViolation("theta_distance: dimension mismatch");
  return (a.flatten() - b.flatten()).norm();
}

Schedule::Schedule(ScheduleKind kind, std::size_t base, std::vector<std::size_t> sizes)
    : kind_(kind), base_(base), sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw ContractViolation("schedule: no iterations");
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] == 0) throw ContractViolation("schedule: sample sizes must be positive");
    if (i > 0 && sizes_[i] < sizes_[i - 1])
      throw ContractViolation("schedule: sample sizes must be non-decreasing");
  }
  total_ = std::accumulate(sizes_.begin(), sizes_.end(), std::size_t{0});
}

Schedule Schedule::linear(std::size_t n, int iterations) {
  if (n == 0 || iterations < 1) throw ContractViolation("schedule: N and T must be positive");
  std::vector<std::size_t> s(static_cast<std::size_t>(iterations));
  for (int t = 1; t <= iterations; ++t) s[static_cast<std::size_t>(t - 1)] = n * static_cast<std::size_t>(t);
  return Schedule(ScheduleKind::Linear, n, std::move(s));
}

Schedule Schedule::quadratic(std::size_t n, int iterations) {
  if (n == 0 || iterations < 1) throw ContractViolation("schedule: N and T must be positive");
  std::vector<std::size_t> s(static_cast<std::size_t>(iterations));
  for (int t = 1; t <= iterations; ++t) {
    const auto tt = static_cast<std::size_t>(t);
    s[tt - 1] = n * tt * tt;
  }
  return Schedule(ScheduleKind::Quadratic, n, std::move(s));
}

Schedule Schedule::explicit_sizes(std::vector<std::size_t> sizes) {
  return Schedule(ScheduleKind::Explicit, 0, std::move(sizes));
}

std::size_t Schedule::prefix_total(int iterations) const {
  if (iterations < 0 || iterations > this->iterations())
    throw ContractViolation("schedule: prefix out of range");
  return std::accumulate(sizes_.begin(), sizes_.begin() + iterations, std::size_t{0});
}

const std::vector<double>& ParticleSystem::recycled_log_w() const {
  if (!recycled_log_w_) throw ContractViolation("particle system: recycling pass has not run");
  return *recycled_log_w_;
}

std::size_t ParticleSystem::batch_size(int t) const {
  const auto i = static_cast<std::size_t>(t);
  const std::size_t end = i + 1 < batch_offsets_.size() ? batch_offsets_[i + 1] : size();
  return end - batch_offsets_.at(i);
}

void ParticleSystem::append_batch(const Matrix& points, std::vector<double> log_target,
                                  std::vector<double> simple_log_w) {
  const auto n = static_cast<std::size_t>(points.cols());
  if (points.rows() != dim_) throw ContractViolation("particle system: point dimension mismatch");
  if (log_target.size() != n || simple_log_w.size() != n)
    throw ContractViolation("particle system: batch arrays differ in length");
  const int t = iterations();
  batch_offsets_.push_back(size());
  points_.insert(points_.end(), points.data(), points.data() + points.size());
  iter_of_.insert(iter_of_.end(), n, t);
  log_target_.insert(log_target_.end(), log_target.begin(), log_target.end());
  simple_log_w_.insert(simple_log_w_.end(), simple_log_w.begin(), simple_log_w.end());
  recycled_log_w_.reset();
}

void ParticleSystem::set_recycled_log_w(std::vector<double> w) {
  if (w.size() != size()) throw ContractViolation("particle system: recycled weights length mismatch");
  recycled_log_w_ = std::move(w);
}

}  // namespace amis
