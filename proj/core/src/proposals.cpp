#include "amis/proposals.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>

#include "amis/errors.hpp"
#include "amis/gaussian.hpp"
#include "amis/rng.hpp"

namespace amis {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kRejectionBudget = 1'000'000;
constexpr double kMinAcceptance = 1e-4;

std::atomic<bool> g_warned_correlated_box{false};

bool is_diagonal(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

// log(Phi(b) - Phi(a)) for a < b, using whichever tail keeps precision.
double log_normal_interval(double a, double b) {
  const double s = std::numbers::sqrt2;
  double p;
  if (a > 0.0) {
    p = 0.5 * (std::erfc(a / s) - std::erfc(b / s));
  } else if (b < 0.0) {
    p = 0.5 * (std::erfc(-b / s) - std::erfc(-a / s));
  } else {
    p = 1.0 - 0.5 * std::erfc(-a / s) - 0.5 * std::erfc(b / s);
  }
  return std::log(p);
}

}  // namespace

bool Box::contains(const ConstPoint& x) const {
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

void FamilySpec::validate() const {
  if (dim < 1) throw ContractViolation("family: dimension must be positive");
  if (truncation) {
    if (truncation->lower.size() != dim || truncation->upper.size() != dim)
      throw ContractViolation("family: truncation box dimension mismatch");
    if (!(truncation->lower.array() < truncation->upper.array()).all())
      throw ContractViolation("family: truncation box needs lower < upper");
  }
}

Matrix sample(const ProposalParams& params, const FamilySpec& family, std::size_t n,
              StreamKey key, std::size_t first_index) {
  if (params.dim() != family.dim) throw ContractViolation("sample: dimension mismatch");
  if (n == 0) throw ContractViolation("sample: n must be positive");
  const int d = family.dim;
  Matrix out(d, static_cast<Eigen::Index>(n));
  Vector z(d);
  std::size_t attempts = 0;
  for (std::size_t j = 0; j < n; ++j) {
    CounterRng rng(key.seed, key.iteration, first_index + j);
    while (true) {
      for (int k = 0; k < d; ++k) z[k] = rng.normal();
      out.col(static_cast<Eigen::Index>(j)) = params.mean() + params.chol() * z;
      ++attempts;
      if (!family.truncation || family.truncation->contains(out.col(static_cast<Eigen::Index>(j))))
        break;
      if (attempts >= kRejectionBudget &&
          static_cast<double>(j) < kMinAcceptance * static_cast<double>(attempts))
        throw SupportEscapeError("proposal mass escapes support");
    }
  }
  return out;
}

double log_box_mass(const ProposalParams& params, const FamilySpec& family) {
  if (!family.truncation) return 0.0;
  if (!is_diagonal(params.cov())) {
    if (!g_warned_correlated_box.exchange(true)) {
      std::clog << "amis: warning: truncation mass of a correlated Gaussian is taken as 1\n";
    }
    return 0.0;
  }
  double s = 0.0;
  for (int k = 0; k < family.dim; ++k) {
    const double sd = std::sqrt(params.cov()(k, k));
    const double mu = params.mean()[k];
    s += log_normal_interval((family.truncation->lower[k] - mu) / sd,
                             (family.truncation->upper[k] - mu) / sd);
  }
  return s;
}

double log_density(const ConstPoint& x, const ProposalParams& params, const FamilySpec& family) {
  if (!family.truncation) return gaussian_log_density(x, params);
  if (!family.truncation->contains(x)) return kNegInf;
  return gaussian_log_density(x, params) - log_box_mass(params, family);
}

HStat::HStat(int dim, Normalization mode)
    : dim_(dim),
      mode_(mode),
      shift_(Vector::Zero(dim)),
      log_scale_(kNegInf),
      m1_(Vector::Zero(dim)),
      m2_(Matrix::Zero(dim, dim)) {
  if (dim < 1) throw ContractViolation("HStat: dimension must be positive");
}

void HStat::rescale(double new_log_scale) {
  if (log_scale_ != kNegInf) {
    const double f = std::exp(log_scale_ - new_log_scale);
    sum_w_ *= f;
    m1_ *= f;
    m2_ *= f;
  }
  log_scale_ = new_log_scale;
}

void HStat::add(const ConstPoint& x, double log_w) {
  if (x.size() != dim_) throw ContractViolation("HStat: dimension mismatch");
  if (std::isnan(log_w) || log_w == std::numeric_limits<double>::infinity())
    throw ContractViolation("HStat: log-weight must be finite or -inf");
  ++count_;
  if (log_w == kNegInf) return;
  ++positive_;
  if (!has_shift_) {
    shift_ = x;
    has_shift_ = true;
  }
  if (log_w > log_scale_) rescale(log_w);
  const double w = std::exp(log_w - log_scale_);
  const Vector c = x - shift_;
  sum_w_ += w;
  m1_ += w * c;
  m2_.noalias() += w * c * c.transpose();
}

void HStat::merge(const HStat& other) {
  if (other.dim_ != dim_ || other.mode_ != mode_)
    throw ContractViolation("HStat: merging incompatible accumulators");
  count_ += other.count_;
  if (other.positive_ == 0) return;
  positive_ += other.positive_;
  if (!has_shift_) {
    shift_ = other.shift_;
    has_shift_ = true;
  }
  if (other.log_scale_ > log_scale_) rescale(other.log_scale_);
  const double f = std::exp(other.log_scale_ - log_scale_);
  const Vector delta = other.shift_ - shift_;
  const double sw = f * other.sum_w_;
  const Vector om1 = f * other.m1_;
  sum_w_ += sw;
  m1_ += om1 + sw * delta;
  m2_ += f * other.m2_ + om1 * delta.transpose() + delta * om1.transpose() +
         sw * delta * delta.transpose();
}

double HStat::log_weight_sum() const {
  if (positive_ == 0) return kNegInf;
  return log_scale_ + std::log(sum_w_);
}

double HStat::total_logw() const {
  return mode_ == Normalization::SelfNormalized ? log_weight_sum()
                                                : std::log(static_cast<double>(count_));
}

double HStat::scale_to_normalizer() const {
  if (positive_ == 0) throw DegenerateSampleError("zero total weight");
  if (mode_ == Normalization::SelfNormalized) return 1.0 / sum_w_;
  return std::exp(log_scale_ - std::log(static_cast<double>(count_)));
}

Vector HStat::mean() const {
  const double f = scale_to_normalizer();
  const double a = mode_ == Normalization::SelfNormalized ? 1.0 : f * sum_w_;
  return a * shift_ + f * m1_;
}

Matrix HStat::cov() const {
  const double f = scale_to_normalizer();
  const Vector u = f * m1_;
  Matrix c = f * m2_ - u * u.transpose();
  if (mode_ == Normalization::Normalized) {
    const double a = f * sum_w_;
    c += (1.0 - a) * (shift_ * u.transpose() + u * shift_.transpose()) +
         a * (1.0 - a) * shift_ * shift_.transpose();
  }
  return c;
}

Vector HStat::raw_m1() const { return mean(); }

Matrix HStat::raw_m2() const {
  const Vector m = mean();
  return cov() + m * m.transpose();
}

HStat accumulate_h(HStat stat, const ConstPoint& x, double log_w) {
  stat.add(x, log_w);
  return stat;
}

ProposalParams moments_to_params(const HStat& stat, const FamilySpec& family) {
  if (stat.dim() != family.dim) throw ContractViolation("moments_to_params: dimension mismatch");
  if (stat.positive_count() == 0) throw DegenerateSampleError("zero total weight");
  if (stat.count() < static_cast<std::size_t>(family.dim) + 1)
    throw DegenerateSampleError("fewer than d+1 points in the learning sample");
  Vector mean = stat.mean();
  Matrix cov = stat.cov();
  if (!mean.allFinite() || !cov.allFinite())
    throw AdaptationFailure("non-finite moments");
  if (family.diagonal) cov = Matrix(cov.diagonal().asDiagonal());
  return ProposalParams::repaired(std::move(mean), std::move(cov));
}

}  // namespace amis
