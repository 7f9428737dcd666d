#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace amis {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ConstPoint = Eigen::Ref<const Eigen::VectorXd>;

// A real-valued function of a point, e.g. an integrand psi.
using PointFunction = std::function<double(const ConstPoint&)>;

enum class Algorithm { NaiveRecycling, OriginalAmis, ModifiedAmis };
enum class Normalization { Normalized, SelfNormalized };

// Benchmark letters: a = naive recycling, b = original AMIS, c = modified AMIS.
char algorithm_letter(Algorithm a);
std::string_view algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_letter(char c);
std::string_view normalization_name(Normalization n);

// Parameters of one Gaussian proposal. Holds both the natural parameters
// (mean, covariance) used for sampling and density evaluation, and the raw
// moments (E[x], E[xx^T]) which are what the learning step averages.
//
// Instances are always valid: construction checks symmetry and positive
// definiteness and caches the Cholesky factor.
class ProposalParams {
 public:
  // Throws ContractViolation if cov is not symmetric or not positive definite.
  static ProposalParams from_mean_cov(Vector mean, Matrix cov);

  // Converts raw moments to (mean, cov). Cholesky failures are repaired by
  // adding 1e-9 * trace(cov) / d to the diagonal, up to three times; after
  // that AdaptationFailure is thrown.
  static ProposalParams from_raw_moments(const Vector& m1, const Matrix& m2);

  // Same repair policy, starting from an already centred covariance.
  static ProposalParams repaired(Vector mean, Matrix cov);

  int dim() const noexcept { return static_cast<int>(mean_.size()); }
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& cov() const noexcept { return cov_; }
  const Vector& raw_m1() const noexcept { return raw_m1_; }
  const Matrix& raw_m2() const noexcept { return raw_m2_; }

  // Lower Cholesky factor of cov.
  const Matrix& chol() const noexcept { return chol_; }
  double log_det_cov() const noexcept { return log_det_; }

  // (mean, column-major vec(cov)), the vector on which parameter distances are
  // measured.
  Vector flatten() const;

  friend bool operator==(const ProposalParams& a, const ProposalParams& b);

 private:
  ProposalParams() = default;

  Vector mean_;
  Matrix cov_;
  Vector raw_m1_;
  Matrix raw_m2_;
  Matrix chol_;
  double log_det_ = 0.0;
};

// Euclidean distance between flatten() images.
double theta_distance(const ProposalParams& a, const ProposalParams& b);

enum class ScheduleKind { Linear, Quadratic, Explicit };

// Per-iteration sample sizes N_1..N_T. Non-decreasing, all positive.
class Schedule {
 public:
  // N_t = n * t.
  static Schedule linear(std::size_t n, int iterations);
  // N_t = n * t^2; sum 1/N_t converges.
  static Schedule quadratic(std::size_t n, int iterations);
  static Schedule explicit_sizes(std::vector<std::size_t> sizes);

  ScheduleKind kind() const noexcept { return kind_; }
  std::size_t base() const noexcept { return base_; }
  int iterations() const noexcept { return static_cast<int>(sizes_.size()); }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
  std::size_t size_at(int t) const { return sizes_.at(static_cast<std::size_t>(t)); }

  // Omega_T = N_1 + ... + N_T.
  std::size_t total() const noexcept { return total_; }
  // Omega_t for the first `iterations` entries.
  std::size_t prefix_total(int iterations) const;

  // True when sum_t 1/N_t is bounded as T grows (Quadratic); Linear and
  // Explicit schedules make no such promise.
  bool summable() const noexcept { return kind_ == ScheduleKind::Quadratic; }

 private:
  Schedule(ScheduleKind kind, std::size_t base, std::vector<std::size_t> sizes);

  ScheduleKind kind_;
  std::size_t base_;
  std::vector<std::size_t> sizes_;
  std::size_t total_;
};

// Every particle drawn during a run, in (iteration, index) order.
class ParticleSystem {
 public:
  explicit ParticleSystem(int dim) : dim_(dim) {}

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return iter_of_.size(); }
  int iterations() const noexcept { return static_cast<int>(batch_offsets_.size()); }

  Eigen::Map<const Vector> point(std::size_t p) const {
    return Eigen::Map<const Vector>(points_.data() + p * static_cast<std::size_t>(dim_), dim_);
  }
  // All points as a d x size() column-major view.
  Eigen::Map<const Matrix> points() const {
    return Eigen::Map<const Matrix>(points_.data(), dim_, static_cast<Eigen::Index>(size()));
  }
  std::span<const double> raw_points() const noexcept { return points_; }

  const std::vector<int>& iter_of() const noexcept { return iter_of_; }
  const std::vector<double>& log_target() const noexcept { return log_target_; }
  const std::vector<double>& simple_log_w() const noexcept { return simple_log_w_; }
  bool recycled() const noexcept { return recycled_log_w_.has_value(); }
  // Throws ContractViolation if the recycling pass has not run.
  const std::vector<double>& recycled_log_w() const;

  // First particle index and count of a 0-based iteration.
  std::size_t batch_begin(int t) const { return batch_offsets_.at(static_cast<std::size_t>(t)); }
  std::size_t batch_size(int t) const;

  // Appends the particles of the next iteration. `points` is d x n.
  void append_batch(const Matrix& points, std::vector<double> log_target,
                    std::vector<double> simple_log_w);

  // Installs final weights. Points and log_target are not touched.
  void set_recycled_log_w(std::vector<double> w);

 private:
  int dim_;
  std::vector<double> points_;
  std::vector<int> iter_of_;
  std::vector<double> log_target_;
  std::vector<double> simple_log_w_;
  std::optional<std::vector<double>> recycled_log_w_;
  std::vector<std::size_t> batch_offsets_;
};

// Full trace of one run.
struct RunOutput {
  Algorithm algorithm = Algorithm::ModifiedAmis;
  std::uint64_t seed = 0;
  std::vector<ProposalParams> thetas;  // theta_1 .. theta_{T+1}
  ParticleSystem system{1};
  std::vector<double> ess_per_iter;
  std::map<std::string, double> estimates;
};

}  // namespace amis
