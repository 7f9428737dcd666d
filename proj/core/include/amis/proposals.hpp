#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "amis/types.hpp"

namespace amis {

// Axis-aligned box, lower < upper componentwise.
struct Box {
  Vector lower;
  Vector upper;

  bool contains(const ConstPoint& x) const;
  int dim() const noexcept { return static_cast<int>(lower.size()); }
};

// The proposal family Q(theta): d-dimensional Gaussians, optionally
// truncated to a box. With `diagonal` set, learned covariances keep only
// their diagonal (marginal variances).
struct FamilySpec {
  int dim = 1;
  std::optional<Box> truncation;
  bool diagonal = false;

  // Throws ContractViolation on a malformed family.
  void validate() const;
};

// Identifies the random substreams of one sampling call: particle i of
// iteration t draws from CounterRng(seed, t, i) whatever the batch size or
// thread layout.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t iteration = 0;
};

// Draws n points (returned as the columns of a d x n matrix). Particle j uses
// substream first_index + j. Truncated families use rejection; once 10^6
// candidates have been drawn with an acceptance rate under 1e-4 a
// SupportEscapeError is thrown.
Matrix sample(const ProposalParams& params, const FamilySpec& family, std::size_t n,
              StreamKey key, std::size_t first_index = 0);

// log q(x, theta). Truncated families subtract the log box mass and return
// -inf outside the box. The box mass is exact for diagonal covariances; for
// correlated ones it is taken as 1 and a warning is printed once per process.
double log_density(const ConstPoint& x, const ProposalParams& params, const FamilySpec& family);

// log of the Gaussian mass inside the truncation box (0 when untruncated).
double log_box_mass(const ProposalParams& params, const FamilySpec& family);

// Weighted accumulator of h(x) = (x, x x^T).
//
// Sums are stored relative to a shift point (the first particle with positive
// weight) and to a running log-scale (the largest log-weight seen), which keeps
// the second moment well conditioned and the weights finite.
class HStat {
 public:
  HStat(int dim, Normalization mode);

  int dim() const noexcept { return dim_; }
  Normalization mode() const noexcept { return mode_; }

  // Adds h(x) with weight exp(log_w). -inf weights only count towards N.
  void add(const ConstPoint& x, double log_w);

  // Folds another accumulator (same dimension and mode) into this one.
  void merge(const HStat& other);

  // Number of points added, and number with positive weight.
  std::size_t count() const noexcept { return count_; }
  std::size_t positive_count() const noexcept { return positive_; }

  // log(sum w).
  double log_weight_sum() const;
  // log of the normalizer: log(sum w) when self-normalized, log N otherwise.
  double total_logw() const;

  // sum w h(x) / normalizer, split into its two blocks.
  Vector raw_m1() const;
  Matrix raw_m2() const;

  // Mean and covariance implied by raw_m1 / raw_m2, computed from the shifted
  // sums without forming raw_m2 - m1 m1^T.
  Vector mean() const;
  Matrix cov() const;

 private:
  double scale_to_normalizer() const;
  void rescale(double new_log_scale);

  int dim_;
  Normalization mode_;
  std::size_t count_ = 0;
  std::size_t positive_ = 0;
  bool has_shift_ = false;
  Vector shift_;
  double log_scale_;
  double sum_w_ = 0.0;  // scaled by exp(-log_scale_)
  Vector m1_;           // sum w (x - shift), scaled
  Matrix m2_;           // sum w (x - shift)(x - shift)^T, scaled
};

// Functional form of HStat::add.
HStat accumulate_h(HStat stat, const ConstPoint& x, double log_w);

// Maps accumulated moments to proposal parameters: mean = m1/W,
// cov = m2/W - mean mean^T, repaired per ProposalParams::repaired. Requires at
// least d+1 positively weighted points; throws DegenerateSampleError on zero
// total weight and AdaptationFailure when repair is exhausted.
ProposalParams moments_to_params(const HStat& stat, const FamilySpec& family);

}  // namespace amis
