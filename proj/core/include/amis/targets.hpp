#pragma once

#include <optional>
#include <string>
#include <vector>

#include "amis/proposals.hpp"
#include "amis/types.hpp"

namespace amis {

// Regular evaluation grid for distribution functions (d = 1 or 2). Axis k
// has `counts[k]` cells of width (upper - lower) / counts[k]; node j sits at
// the upper edge of cell j, lower + (j + 1) * width. For d = 1 the second
// count is 1.
struct GridSpec {
  Vector lower;
  Vector upper;
  int nx = 100;
  int ny = 100;

  int dim() const noexcept { return static_cast<int>(lower.size()); }
  double step(int axis) const;
  double node(int axis, int j) const;
  double cell_area() const;
  void validate() const;
};

// A target distribution with its ground truth.
struct TargetModel {
  std::string name;
  int dim = 1;
  PointFunction log_density;
  // True when exp(log_density) integrates to 1.
  bool normalized = true;
  // The moment parameter int h dPi (mean and covariance), when known.
  std::optional<ProposalParams> theta_star;
  // log of int exp(log_density), when known.
  std::optional<double> log_norm_const;
  // Box carrying all but a negligible fraction of the mass; quadrature runs
  // over it.
  Box support;

  double operator()(const ConstPoint& x) const { return log_density(x); }
};

// N(mean, cov). Throws ContractViolation if cov is not positive definite.
TargetModel make_gaussian_target(const Vector& mean, const Matrix& cov);

// sum_i w_i N(mean_i, cov_i). Weights must be positive and sum to 1 within
// 1e-12. theta_star is exact: m1 = sum w_i mu_i, m2 = sum w_i (S_i + mu_i mu_i^T).
TargetModel make_mixture_target(const std::vector<double>& weights,
                                const std::vector<Vector>& means,
                                const std::vector<Matrix>& covs);

// Law of (z1, z2 + b (z1^2 - sigma1_sq)) for z ~ N(0, diag(sigma1_sq, 1)).
// theta_star is computed by quadrature.
TargetModel make_banana_target(double b, double sigma1_sq);

// Wraps an arbitrary log-density. theta_star is computed by quadrature over
// `support` when d <= 2.
TargetModel make_custom_target(std::string name, int dim, PointFunction log_density,
                               Box support, bool normalized);

// Same target with log_density shifted by `log_constant`, flagged
// unnormalized. Models a posterior known only up to a constant.
TargetModel with_hidden_constant(TargetModel target, double log_constant);

// int exp(log_density) over the support (d <= 2).
double normalization_by_quadrature(const TargetModel& target, double tol = 1e-8);

// Mean and covariance of the target by quadrature (d <= 2).
ProposalParams moments_by_quadrature(const TargetModel& target, double tol = 1e-8);

// The target's mean +/- k marginal standard deviations, n cells per axis.
GridSpec default_grid(const TargetModel& target, int cells = 100, double half_width_sd = 5.0);

// F(g) at every grid node, rows indexed by the first axis. Cell masses are
// integrated by Gauss-Legendre and accumulated; the region between the support
// and the grid's lower edge is folded into the first row/column. Throws
// UnsupportedError for d > 2.
Matrix true_cdf_grid(const TargetModel& target, const GridSpec& grid);

}  // namespace amis
