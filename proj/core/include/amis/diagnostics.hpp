#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "amis/algorithms.hpp"
#include "amis/proposals.hpp"
#include "amis/targets.hpp"
#include "amis/types.hpp"

namespace amis {

// Effective sample size (sum w)^2 / sum w^2 from log-weights. Throws
// DegenerateSampleError when every weight is zero.
double ess(std::span<const double> log_w);

// Weighted empirical distribution function at the grid nodes:
// F(g) = sum_p wbar_p 1{x_p <= g}, weights self-normalized. Uses the recycled
// weights when `use_recycled` is set, the per-iteration ones otherwise.
Matrix empirical_cdf(const ParticleSystem& system, const GridSpec& grid, bool use_recycled);

// Same, from raw columns of points and log-weights.
Matrix empirical_cdf(const Matrix& points, std::span<const double> log_w, const GridSpec& grid);

// Distances between an estimated and a true distribution function on a grid.
//   cvm  = sum_g (Fhat - F)^2(g) dF(g), dF the true mass of the cell ending at g
//   l2   = sqrt(sum_g (Fhat - F)^2(g) * cell area)
//   linf = max_g |Fhat - F|(g)
struct DistanceReport {
  double cvm = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  GridSpec grid;
};

DistanceReport distances(const Matrix& f_hat, const Matrix& f_true, const GridSpec& grid);

// Closed ball around a proposal parameter, in the metric of theta_distance.
// The ball is explored on a deterministic lattice: directions are the
// normalized surface points of a cube grid with `directions_per_axis` steps per
// coordinate, at radii radius * j / radial_steps. With `mean_only` the
// covariance is held at the centre's and only the mean moves.
struct BallSpec {
  std::optional<ProposalParams> center;  // defaults to the target's theta_star
  double radius = 0.0;
  int directions_per_axis = 8;
  int radial_steps = 4;
  bool mean_only = false;
};

// Lattice of parameters inside the ball (centre first). Points whose
// covariance is not positive definite are skipped.
std::vector<ProposalParams> ball_lattice(const ProposalParams& center, const BallSpec& ball);

// log m_eps(x) = min over the lattice of log q(x, theta).
double log_m_eps(const ConstPoint& x, std::span<const ProposalParams> lattice,
                 const FamilySpec& family);

// m_eps at every grid node (rows indexed by the first axis).
Matrix m_eps_bound(const TargetModel& target, const BallSpec& ball, const GridSpec& grid,
                   const FamilySpec& family);

// Empirical check of the triangular-array law of large numbers behind the
// learning step. For each replicate the learning loop of `config` is run with
// seed config.seed + r; for each tested iteration t the row sum
// sum_i V_{t,i} = N_t^-1 sum_i w_i h(X_i^t) is compared with theta_star.
struct WllnReport {
  std::vector<int> rows;                      // 1-based iterations
  std::vector<std::size_t> sizes;             // N_t of each row
  std::vector<std::vector<double>> deviations;  // [row][replicate]
  std::vector<double> fractions;              // share of deviations > delta
  double delta = 0.0;
  int replicates = 0;
  // Strictly decreasing fractions along the rows.
  bool decreasing = false;

  double fraction_exceeding(std::size_t row, double threshold) const;
};

// `rows` defaults to {1, T}. `jobs` worker threads share the replicates.
WllnReport wlln_check(const RunConfig& config, int replicates, double delta,
                      std::vector<int> rows = {}, int jobs = 1);

}  // namespace amis
