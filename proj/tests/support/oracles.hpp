#pragma once

// Slow, direct reference implementations used only by the tests. Nothing here
// shares code with the library's fast paths.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Gaussian density straight from the textbook formula (LU inverse and
// determinant, no logs).
inline double gaussian_pdf(const Vec& x, const Vec& mean, const Mat& cov) {
  const Eigen::FullPivLU<Mat> lu(cov);
  const Vec c = x - mean;
  const double q = c.dot(lu.inverse() * c);
  const double d = static_cast<double>(x.size());
  return std::exp(-0.5 * q) / std::sqrt(std::pow(2.0 * std::numbers::pi, d) * lu.determinant());
}

// sum_k (N_k / sum N) pdf_k(x).
inline double mixture_pdf(const Vec& x, const std::vector<Vec>& means, const std::vector<Mat>& covs,
                          const std::vector<double>& counts) {
  double total = 0.0;
  for (double n : counts) total += n;
  double s = 0.0;
  for (std::size_t k = 0; k < means.size(); ++k) s += counts[k] / total * gaussian_pdf(x, means[k], covs[k]);
  return s;
}

struct WeightedMoments {
  Vec mean;
  Mat cov;
  double total_weight;
};

// Two passes: weighted mean first, then centred second moment.
inline WeightedMoments two_pass_moments(const Mat& points, const std::vector<double>& w) {
  const auto d = points.rows();
  double sw = 0.0;
  Vec m = Vec::Zero(d);
  for (Eigen::Index p = 0; p < points.cols(); ++p) {
    sw += w[static_cast<std::size_t>(p)];
    m += w[static_cast<std::size_t>(p)] * points.col(p);
  }
  m /= sw;
  Mat c = Mat::Zero(d, d);
  for (Eigen::Index p = 0; p < points.cols(); ++p) {
    const Vec z = points.col(p) - m;
    c += w[static_cast<std::size_t>(p)] * z * z.transpose();
  }
  return {m, c / sw, sw};
}

// F(g) = sum_p wbar_p 1{x_p <= g} by direct double loop over nodes and particles.
// Nodes on axis k: lower + (j + 1) * (upper - lower) / n_k.
inline Mat slow_empirical_cdf(const Mat& points, const std::vector<double>& log_w, const Vec& lower,
                              const Vec& upper, int nx, int ny) {
  const double m = *std::max_element(log_w.begin(), log_w.end());
  std::vector<double> w(log_w.size());
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(log_w[i] - m);
    s += w[i];
  }
  const int d = static_cast<int>(points.rows());
  Mat f = Mat::Zero(nx, ny);
  for (int i = 0; i < nx; ++i) {
    const double gx = lower[0] + (i + 1) * ((upper[0] - lower[0]) / nx);
    for (int j = 0; j < ny; ++j) {
      const double gy = d == 2 ? lower[1] + (j + 1) * ((upper[1] - lower[1]) / ny) : 0.0;
      double acc = 0.0;
      for (Eigen::Index p = 0; p < points.cols(); ++p) {
        if (points(0, p) <= gx && (d == 1 || points(1, p) <= gy)) acc += w[static_cast<std::size_t>(p)];
      }
      f(i, j) = acc / s;
    }
  }
  return f;
}

struct Dist {
  double cvm;
  double l2;
  double linf;
};

// Distances by plain loops: cell masses from inclusion-exclusion on F,
// naive accumulation.
inline Dist slow_distances(const Mat& fh, const Mat& f, double cell_area) {
  Dist r{0.0, 0.0, 0.0};
  double sq = 0.0;
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    for (Eigen::Index j = 0; j < f.cols(); ++j) {
      auto at = [&](Eigen::Index a, Eigen::Index b) { return (a < 0 || b < 0) ? 0.0 : f(a, b); };
      const double mass = at(i, j) - at(i - 1, j) - at(i, j - 1) + at(i - 1, j - 1);
      const double e = fh(i, j) - f(i, j);
      r.cvm += e * e * mass;
      sq += e * e;
      r.linf = std::max(r.linf, std::abs(e));
    }
  }
  r.l2 = std::sqrt(sq * cell_area);
  return r;
}

// Draws from sum_i w_i N(mu_i, S_i) with the standard library.
inline Mat sample_mixture(const std::vector<double>& weights, const std::vector<Vec>& means,
                          const std::vector<Mat>& covs, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::normal_distribution<double> z01;
  std::vector<Mat> chol;
  for (const auto& c : covs) chol.push_back(Eigen::LLT<Mat>(c).matrixL());
  const auto d = means.front().size();
  Mat out(d, static_cast<Eigen::Index>(n));
  Vec z(d);
  for (std::size_t p = 0; p < n; ++p) {
    const int k = pick(rng);
    for (Eigen::Index i = 0; i < d; ++i) z[i] = z01(rng);
    out.col(static_cast<Eigen::Index>(p)) = means[static_cast<std::size_t>(k)] + chol[static_cast<std::size_t>(k)] * z;
  }
  return out;
}

// Composite trapezoid over [lo, hi] (d = 1) or [lo0, hi0] x [lo1, hi1] (d = 2)
// with n intervals per axis.
inline double trapezoid(const std::function<double(const Vec&)>& f, const Vec& lo, const Vec& hi, int n) {
  const auto d = lo.size();
  Vec x(d);
  const Vec h = (hi - lo) / n;
  double s = 0.0;
  if (d == 1) {
    for (int i = 0; i <= n; ++i) {
      x[0] = lo[0] + i * h[0];
      s += (i == 0 || i == n ? 0.5 : 1.0) * f(x);
    }
    return s * h[0];
  }
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      x[0] = lo[0] + i * h[0];
      x[1] = lo[1] + j * h[1];
      s += (i == 0 || i == n ? 0.5 : 1.0) * (j == 0 || j == n ? 0.5 : 1.0) * f(x);
    }
  }
  return s * h[0] * h[1];
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Random symmetric positive definite d x d matrix with eigenvalues in
// [lo, hi].
template <class Rng>
Mat random_spd(int d, Rng& rng, double lo = 0.3, double hi = 3.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ev(lo, hi);
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = u(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  const Mat q = qr.householderQ();
  Vec e(d);
  for (int i = 0; i < d; ++i) e[i] = ev(rng);
  Mat s = q * e.asDiagonal() * q.transpose();
  return 0.5 * (s + s.transpose());
}

}  // namespace oracle
