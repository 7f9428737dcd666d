#include "amis/diagnostics.hpp"

#include <algorithm>
#include <exception>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "amis/errors.hpp"
#include "amis/log_math.hpp"

namespace amis {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Index of the first node g_j with g_j >= v, or n when there is none.
int first_node_at_or_above(const GridSpec& grid, int axis, int n, double v) {
  const double h = grid.step(axis);
  int j = static_cast<int>(std::ceil((v - grid.lower[axis]) / h - 1.0));
  j = std::clamp(j, 0, n);
  while (j > 0 && grid.node(axis, j - 1) >= v) --j;
  while (j < n && grid.node(axis, j) < v) ++j;
  return j;
}

std::vector<double> normalized_weights(std::span<const double> log_w) {
  if (log_w.empty()) throw DegenerateSampleError("no particles");
  const double m = *std::max_element(log_w.begin(), log_w.end());
  if (m == kNegInf) throw DegenerateSampleError("all weights are zero");
  std::vector<double> w(log_w.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_w[i] - m);
  const double s = pairwise_sum(w);
  for (double& v : w) v /= s;
  return w;
}

}  // namespace

double ess(std::span<const double> log_w) {
  if (log_w.empty()) throw DegenerateSampleError("ess: no weights");
  const double m = *std::max_element(log_w.begin(), log_w.end());
  if (m == kNegInf) throw DegenerateSampleError("ess: all weights are zero");
  std::vector<double> w(log_w.size());
  std::vector<double> w2(log_w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(log_w[i] - m);
    w2[i] = w[i] * w[i];
  }
  const double s = pairwise_sum(w);
  return s * s / pairwise_sum(w2);
}

Matrix empirical_cdf(const Matrix& points, std::span<const double> log_w, const GridSpec& grid) {
  grid.validate();
  if (points.rows() != grid.dim()) throw ContractViolation("empirical_cdf: dimension mismatch");
  if (static_cast<std::size_t>(points.cols()) != log_w.size())
    throw ContractViolation("empirical_cdf: points and weights differ in length");
  const auto w = normalized_weights(log_w);
  const int nx = grid.nx;
  const int ny = grid.dim() == 2 ? grid.ny : 1;
  // Mass of particles whose first dominating node is (i, j).
  Matrix bins = Matrix::Zero(nx + 1, ny + 1);
  for (Eigen::Index p = 0; p < points.cols(); ++p) {
    const int i = first_node_at_or_above(grid, 0, nx, points(0, p));
    const int j = grid.dim() == 2 ? first_node_at_or_above(grid, 1, ny, points(1, p)) : 0;
    bins(i, j) += w[static_cast<std::size_t>(p)];
  }
  Matrix cdf(nx, ny);
  for (int i = 0; i < nx; ++i) {
    double row = 0.0;
    for (int j = 0; j < ny; ++j) {
      row += bins(i, j);
      cdf(i, j) = std::min(1.0, row + (i > 0 ? cdf(i - 1, j) : 0.0));
    }
  }
  return cdf;
}

Matrix empirical_cdf(const ParticleSystem& system, const GridSpec& grid, bool use_recycled) {
  const auto& lw = use_recycled ? system.recycled_log_w() : system.simple_log_w();
  return empirical_cdf(Matrix(system.points()), lw, grid);
}

DistanceReport distances(const Matrix& f_hat, const Matrix& f_true, const GridSpec& grid) {
  if (f_hat.rows() != f_true.rows() || f_hat.cols() != f_true.cols())
    throw ContractViolation("distances: matrices differ in shape");
  const int ny = grid.dim() == 2 ? grid.ny : 1;
  if (f_true.rows() != grid.nx || f_true.cols() != ny)
    throw ContractViolation("distances: matrices do not match the grid");
  const auto n = static_cast<std::size_t>(f_true.size());
  std::vector<double> cvm_terms(n);
  std::vector<double> sq_terms(n);
  double linf = 0.0;
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < f_true.rows(); ++i) {
    for (Eigen::Index j = 0; j < f_true.cols(); ++j, ++k) {
      const double diff = f_hat(i, j) - f_true(i, j);
      const double below = i > 0 ? f_true(i - 1, j) : 0.0;
      const double left = j > 0 ? f_true(i, j - 1) : 0.0;
      const double corner = (i > 0 && j > 0) ? f_true(i - 1, j - 1) : 0.0;
      const double mass = f_true(i, j) - below - left + corner;
      cvm_terms[k] = diff * diff * mass;
      sq_terms[k] = diff * diff;
      linf = std::max(linf, std::abs(diff));
    }
  }
  DistanceReport r;
  r.cvm = pairwise_sum(cvm_terms);
  r.l2 = std::sqrt(pairwise_sum(sq_terms) * grid.cell_area());
  r.linf = linf;
  r.grid = grid;
  return r;
}

std::vector<ProposalParams> ball_lattice(const ProposalParams& center, const BallSpec& ball) {
  if (!(ball.radius >= 0.0)) throw ContractViolation("ball: radius must be non-negative");
  std::vector<ProposalParams> out{center};
  if (ball.radius == 0.0) return out;
  const int d = center.dim();
  const int p = ball.mean_only ? d : d + d * (d + 1) / 2;
  const int k = std::max(ball.directions_per_axis, 1);
  const int radial = std::max(ball.radial_steps, 1);

  // Enumerate {-1, -1 + 2/k, ..., 1}^p and keep the cube surface.
  std::vector<int> idx(static_cast<std::size_t>(p), 0);
  std::vector<Vector> directions;
  while (true) {
    Vector v(p);
    double maxabs = 0.0;
    for (int c = 0; c < p; ++c) {
      v[c] = -1.0 + 2.0 * idx[static_cast<std::size_t>(c)] / k;
      maxabs = std::max(maxabs, std::abs(v[c]));
    }
    if (maxabs == 1.0) directions.push_back(v / v.norm());
    int c = 0;
    while (c < p && ++idx[static_cast<std::size_t>(c)] > k) idx[static_cast<std::size_t>(c++)] = 0;
    if (c == p) break;
  }

  for (int r = 1; r <= radial; ++r) {
    const double rad = ball.radius * r / radial;
    for (const auto& dir : directions) {
      Vector mean = center.mean() + rad * dir.head(d);
      Matrix cov = center.cov();
      if (!ball.mean_only) {
        int c = d;
        for (int col = 0; col < d; ++col) {
          for (int row = col; row < d; ++row, ++c) {
            // Off-diagonal entries appear twice in vec(cov).
            const double delta = row == col ? rad * dir[c] : rad * dir[c] / std::numbers::sqrt2;
            cov(row, col) += delta;
            if (row != col) cov(col, row) += delta;
          }
        }
      }
      try {
        out.push_back(ProposalParams::from_mean_cov(std::move(mean), std::move(cov)));
      } catch (const ContractViolation&) {
        // Outside the positive definite cone; not a parameter.
      }
    }
  }
  return out;
}

double log_m_eps(const ConstPoint& x, std::span<const ProposalParams> lattice,
                 const FamilySpec& family) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& theta : lattice) m = std::min(m, log_density(x, theta, family));
  return m;
}

Matrix m_eps_bound(const TargetModel& target, const BallSpec& ball, const GridSpec& grid,
                   const FamilySpec& family) {
  grid.validate();
  const ProposalParams* center = ball.center ? &*ball.center
                                             : (target.theta_star ? &*target.theta_star : nullptr);
  if (!center) throw ContractViolation("m_eps_bound: no ball centre and no theta_star");
  const auto lattice = ball_lattice(*center, ball);
  const int d = grid.dim();
  const int ny = d == 2 ? grid.ny : 1;
  Matrix out(grid.nx, ny);
  Vector x(d);
  for (int i = 0; i < grid.nx; ++i) {
    x[0] = grid.node(0, i);
    for (int j = 0; j < ny; ++j) {
      if (d == 2) x[1] = grid.node(1, j);
      out(i, j) = std::exp(log_m_eps(x, lattice, family));
    }
  }
  return out;
}

double WllnReport::fraction_exceeding(std::size_t row, double threshold) const {
  const auto& dev = deviations.at(row);
  const auto n = std::count_if(dev.begin(), dev.end(), [&](double v) { return v > threshold; });
  return static_cast<double>(n) / static_cast<double>(dev.size());
}

WllnReport wlln_check(const RunConfig& config, int replicates, double delta, std::vector<int> rows,
                      int jobs) {
  if (replicates < 100) throw ContractViolation("wlln_check: needs at least 100 replicates");
  if (!config.target.theta_star) throw ContractViolation("wlln_check: target has no theta_star");
  if (!config.target.normalized && !config.target.log_norm_const)
    throw ContractViolation("wlln_check: target normalizing constant unknown");
  const int T = config.schedule.iterations();
  if (rows.empty()) rows = T == 1 ? std::vector<int>{1} : std::vector<int>{1, T};
  for (int r : rows)
    if (r < 1 || r > T) throw ContractViolation("wlln_check: row outside the schedule");

  const double log_z = config.target.log_norm_const.value_or(0.0);
  const auto& star = *config.target.theta_star;
  const int d = config.family.dim;

  WllnReport rep;
  rep.rows = rows;
  rep.delta = delta;
  rep.replicates = replicates;
  for (int r : rows) rep.sizes.push_back(config.schedule.size_at(r - 1));
  rep.deviations.assign(rows.size(), std::vector<double>(static_cast<std::size_t>(replicates)));

  auto work = [&](int first, int stride) {
    for (int rep_i = first; rep_i < replicates; rep_i += stride) {
      RunConfig cfg = config;
      cfg.seed = config.seed + static_cast<std::uint64_t>(rep_i);
      const RunOutput out = run_learning(cfg);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const int t = rows[k] - 1;
        HStat s(d, Normalization::Normalized);
        const std::size_t b = out.system.batch_begin(t);
        for (std::size_t p = b; p < b + out.system.batch_size(t); ++p)
          s.add(out.system.point(p), out.system.simple_log_w()[p] - log_z);
        Vector diff(d + d * d);
        diff.head(d) = s.raw_m1() - star.raw_m1();
        const Matrix dm2 = s.raw_m2() - star.raw_m2();
        diff.tail(d * d) = Eigen::Map<const Vector>(dm2.data(), d * d);
        rep.deviations[k][static_cast<std::size_t>(rep_i)] = diff.norm();
      }
    }
  };
  jobs = std::max(1, std::min(jobs, replicates));
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back([&, j] {
        try {
          work(j, jobs);
        } catch (...) {
          errors[static_cast<std::size_t>(j)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  rep.decreasing = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rep.fractions.push_back(rep.fraction_exceeding(k, delta));
    if (k > 0 && !(rep.fractions[k] < rep.fractions[k - 1])) rep.decreasing = false;
  }
  return rep;
}

}  // namespace amis
