#include "amis/targets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "amis/errors.hpp"
#include "amis/gaussian.hpp"
#include "amis/log_math.hpp"
#include "amis/quadrature.hpp"

namespace amis {

namespace {

constexpr double kSupportSd = 10.0;

Box gaussian_support(const Vector& mean, const Matrix& cov) {
  const Vector sd = cov.diagonal().cwiseSqrt();
  return Box{mean - kSupportSd * sd, mean + kSupportSd * sd};
}

void require_low_dim(int d, const char* what) {
  if (d > 2) throw UnsupportedError(std::string(what) + ": only d <= 2 is supported");
}

}  // namespace

double GridSpec::step(int axis) const {
  const int n = axis == 0 ? nx : ny;
  return (upper[axis] - lower[axis]) / static_cast<double>(n);
}

double GridSpec::node(int axis, int j) const { return lower[axis] + (j + 1) * step(axis); }

double GridSpec::cell_area() const {
  double a = step(0);
  if (dim() == 2) a *= step(1);
  return a;
}

void GridSpec::validate() const {
  if (dim() < 1 || dim() > 2) throw UnsupportedError("grid: only d <= 2 is supported");
  if (upper.size() != lower.size()) throw ContractViolation("grid: bound dimension mismatch");
  if (!(lower.array() < upper.array()).all()) throw ContractViolation("grid: needs lower < upper");
  if (nx < 1 || ny < 1) throw ContractViolation("grid: cell counts must be positive");
  if (dim() == 1 && ny != 1) throw ContractViolation("grid: one-dimensional grids have ny = 1");
}

TargetModel make_gaussian_target(const Vector& mean, const Matrix& cov) {
  auto params = ProposalParams::from_mean_cov(mean, cov);
  TargetModel t;
  t.name = "gaussian";
  t.dim = params.dim();
  t.log_density = [params](const ConstPoint& x) { return gaussian_log_density(x, params); };
  t.normalized = true;
  t.log_norm_const = 0.0;
  t.support = gaussian_support(mean, cov);
  t.theta_star = std::move(params);
  return t;
}

TargetModel make_mixture_target(const std::vector<double>& weights,
                                const std::vector<Vector>& means,
                                const std::vector<Matrix>& covs) {
  if (weights.empty() || weights.size() != means.size() || weights.size() != covs.size())
    throw ContractViolation("mixture target: weights, means and covs differ in length");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw ContractViolation("mixture target: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ContractViolation("mixture target: weights must sum to 1");

  const int d = static_cast<int>(means.front().size());
  std::vector<ProposalParams> comps;
  std::vector<double> log_w;
  Vector m1 = Vector::Zero(d);
  Matrix m2 = Matrix::Zero(d, d);
  Box support{Vector::Constant(d, std::numeric_limits<double>::infinity()),
              Vector::Constant(d, -std::numeric_limits<double>::infinity())};
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (means[i].size() != d) throw ContractViolation("mixture target: dimension mismatch");
    comps.push_back(ProposalParams::from_mean_cov(means[i], covs[i]));
    log_w.push_back(std::log(weights[i]));
    m1 += weights[i] * means[i];
    m2 += weights[i] * (covs[i] + means[i] * means[i].transpose());
    const Box b = gaussian_support(means[i], covs[i]);
    support.lower = support.lower.cwiseMin(b.lower);
    support.upper = support.upper.cwiseMax(b.upper);
  }

  TargetModel t;
  t.name = weights.size() == 1 ? "gaussian" : "mixture";
  t.dim = d;
  t.log_density = [comps, log_w](const ConstPoint& x) {
    std::vector<double> terms(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i)
      terms[i] = log_w[i] + gaussian_log_density(x, comps[i]);
    return log_sum_exp(terms);
  };
  t.normalized = true;
  t.log_norm_const = 0.0;
  t.support = support;
  Matrix cov = m2 - m1 * m1.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  t.theta_star = ProposalParams::from_mean_cov(m1, cov);
  return t;
}

TargetModel make_banana_target(double b, double sigma1_sq) {
  if (!(sigma1_sq > 0.0)) throw ContractViolation("banana target: sigma1_sq must be positive");
  if (!std::isfinite(b)) throw ContractViolation("banana target: b must be finite");
  const double sd1 = std::sqrt(sigma1_sq);
  const double log_c1 = -0.5 * std::log(2.0 * std::numbers::pi * sigma1_sq);
  const double log_c2 = -0.5 * std::log(2.0 * std::numbers::pi);
  constexpr double k = 8.0;
  const double lo_twist = std::min(-b * sigma1_sq, b * (k * k - 1.0) * sigma1_sq);
  const double hi_twist = std::max(-b * sigma1_sq, b * (k * k - 1.0) * sigma1_sq);
  Box support{Vector(2), Vector(2)};
  support.lower << -k * sd1, lo_twist - k;
  support.upper << k * sd1, hi_twist + k;

  auto log_density = [b, sigma1_sq, log_c1, log_c2](const ConstPoint& x) {
    const double z2 = x[1] - b * (x[0] * x[0] - sigma1_sq);
    return log_c1 - 0.5 * x[0] * x[0] / sigma1_sq + log_c2 - 0.5 * z2 * z2;
  };
  TargetModel t = make_custom_target("banana", 2, log_density, support, true);
  t.log_norm_const = 0.0;
  return t;
}

TargetModel make_custom_target(std::string name, int dim, PointFunction log_density, Box support,
                               bool normalized) {
  if (dim < 1) throw ContractViolation("target: dimension must be positive");
  if (support.dim() != dim) throw ContractViolation("target: support dimension mismatch");
  TargetModel t;
  t.name = std::move(name);
  t.dim = dim;
  t.log_density = std::move(log_density);
  t.normalized = normalized;
  t.support = std::move(support);
  if (normalized) t.log_norm_const = 0.0;
  if (dim <= 2) t.theta_star = moments_by_quadrature(t);
  return t;
}

TargetModel with_hidden_constant(TargetModel target, double log_constant) {
  auto inner = std::move(target.log_density);
  target.log_density = [inner = std::move(inner), log_constant](const ConstPoint& x) {
    return inner(x) + log_constant;
  };
  target.normalized = false;
  target.log_norm_const = target.log_norm_const.value_or(0.0) + log_constant;
  return target;
}

double normalization_by_quadrature(const TargetModel& target, double tol) {
  require_low_dim(target.dim, "normalization_by_quadrature");
  return integrate_box([&](const ConstPoint& x) { return std::exp(target.log_density(x)); },
                       target.support, tol);
}

ProposalParams moments_by_quadrature(const TargetModel& target, double tol) {
  require_low_dim(target.dim, "moments_by_quadrature");
  const int d = target.dim;
  const auto first = integrate_box(
      [&](const ConstPoint& x) {
        const double p = std::exp(target.log_density(x));
        Vector v(d + 1);
        v[0] = p;
        v.tail(d) = p * x;
        return v;
      },
      target.support, tol);
  const double z = first.value[0];
  const Vector mean = first.value.tail(d) / z;
  const auto second = integrate_box(
      [&](const ConstPoint& x) {
        const double p = std::exp(target.log_density(x));
        const Vector c = x - mean;
        const Matrix outer = p * c * c.transpose();
        return Vector(Eigen::Map<const Vector>(outer.data(), d * d));
      },
      target.support, tol);
  Matrix cov = Eigen::Map<const Matrix>(second.value.data(), d, d) / z;
  cov = 0.5 * (cov + cov.transpose()).eval();
  return ProposalParams::from_mean_cov(mean, cov);
}

GridSpec default_grid(const TargetModel& target, int cells, double half_width_sd) {
  GridSpec g;
  if (target.theta_star) {
    const Vector sd = target.theta_star->cov().diagonal().cwiseSqrt();
    g.lower = target.theta_star->mean() - half_width_sd * sd;
    g.upper = target.theta_star->mean() + half_width_sd * sd;
  } else {
    g.lower = target.support.lower;
    g.upper = target.support.upper;
  }
  g.nx = cells;
  g.ny = target.dim == 1 ? 1 : cells;
  return g;
}

Matrix true_cdf_grid(const TargetModel& target, const GridSpec& grid) {
  require_low_dim(target.dim, "true_cdf_grid");
  grid.validate();
  if (grid.dim() != target.dim) throw ContractViolation("true_cdf_grid: grid dimension mismatch");
  const int d = target.dim;

  double log_z = 0.0;
  if (target.log_norm_const) {
    log_z = *target.log_norm_const;
  } else if (!target.normalized) {
    log_z = std::log(normalization_by_quadrature(target));
  }
  const PointFunction density = [&](const ConstPoint& x) {
    return std::exp(target.log_density(x) - log_z);
  };

  // Cell edges per axis; edge 0 reaches down to the support so that the tail
  // below the grid is included in the first cell.
  auto edges_for = [&](int axis, int n) {
    std::vector<double> e(static_cast<std::size_t>(n) + 1);
    e[0] = std::min(grid.lower[axis], target.support.lower[axis]);
    for (int j = 0; j < n; ++j) e[static_cast<std::size_t>(j) + 1] = grid.node(axis, j);
    return e;
  };
  auto pieces_for = [&](const std::vector<double>& e, int axis, std::size_t j) {
    return static_cast<int>(std::ceil((e[j + 1] - e[j]) / grid.step(axis) - 1e-9));
  };

  const int nx = grid.nx;
  const int ny = d == 2 ? grid.ny : 1;
  const auto ex = edges_for(0, nx);
  Matrix cdf(nx, ny);
  if (d == 1) {
    double acc = 0.0;
    for (int i = 0; i < nx; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      Box cell{Vector::Constant(1, ex[ii]), Vector::Constant(1, ex[ii + 1])};
      acc += integrate_cell(density, cell, pieces_for(ex, 0, ii));
      cdf(i, 0) = acc;
    }
    return cdf;
  }
  const auto ey = edges_for(1, ny);
  Matrix mass(nx, ny);
  for (int i = 0; i < nx; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const int px = pieces_for(ex, 0, ii);
    for (int j = 0; j < ny; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      Box cell{Vector(2), Vector(2)};
      cell.lower << ex[ii], ey[jj];
      cell.upper << ex[ii + 1], ey[jj + 1];
      mass(i, j) = integrate_cell(density, cell, px, pieces_for(ey, 1, jj));
    }
  }
  for (int i = 0; i < nx; ++i) {
    double row = 0.0;
    for (int j = 0; j < ny; ++j) {
      row += mass(i, j);
      cdf(i, j) = row + (i > 0 ? cdf(i - 1, j) : 0.0);
    }
  }
  return cdf;
}

}  // namespace amis
