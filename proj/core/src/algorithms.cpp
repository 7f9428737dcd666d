#include "amis/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "amis/diagnostics.hpp"
#include "amis/errors.hpp"
#include "amis/gaussian.hpp"
#include "amis/log_math.hpp"

namespace amis {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kLearnBlock = 64;

// Merges the block accumulators [begin, end) pairwise.
HStat merge_tree(std::vector<HStat>& blocks, std::size_t begin, std::size_t end) {
  if (end - begin == 1) return blocks[begin];
  const std::size_t mid = begin + (end - begin) / 2;
  HStat left = merge_tree(blocks, begin, mid);
  left.merge(merge_tree(blocks, mid, end));
  return left;
}

struct Batch {
  Matrix points;
  std::vector<double> log_target;
  std::vector<double> log_q;
  std::vector<double> simple_log_w;
};

Batch draw_batch(const RunConfig& cfg, const ProposalParams& theta, int t) {
  const std::size_t n = cfg.schedule.size_at(t);
  Batch b;
  b.points = sample(theta, cfg.family, n, StreamKey{cfg.seed, static_cast<std::uint64_t>(t) + 1});
  b.log_target.resize(n);
  b.log_q.resize(n);
  b.simple_log_w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = b.points.col(static_cast<Eigen::Index>(i));
    b.log_target[i] = cfg.target.log_density(x);
    b.log_q[i] = log_density(x, theta, cfg.family);
    b.simple_log_w[i] = simple_log_weight(b.log_target[i], b.log_q[i]);
  }
  return b;
}

ProposalParams learn_or_fail(const Matrix& points, std::span<const double> log_w,
                             const RunConfig& cfg, int t) {
  try {
    return learn_step(points, log_w, cfg.family, cfg.normalization);
  } catch (const AdaptationFailure& e) {
    throw AdaptationFailure(e.what(), t + 1);
  } catch (const DegenerateSampleError& e) {
    throw AdaptationFailure(e.what(), t + 1);
  }
}

void fill_estimates(RunOutput& out, const RunConfig& cfg) {
  for (const auto& f : cfg.integrands)
    out.estimates[f.name] = estimate(out.system, f.fn, cfg.normalization);
}

// Shared learning loop of the modified and naive schemes.
RunOutput learn_on_current_sample(const RunConfig& cfg) {
  cfg.validate();
  RunOutput out;
  out.algorithm = cfg.algorithm;
  out.seed = cfg.seed;
  out.system = ParticleSystem(cfg.family.dim);
  out.thetas.push_back(cfg.theta1);
  const int T = cfg.schedule.iterations();
  for (int t = 0; t < T; ++t) {
    Batch b = draw_batch(cfg, out.thetas.back(), t);
    out.ess_per_iter.push_back(ess(b.simple_log_w));
    out.thetas.push_back(cfg.frozen_proposal ? cfg.theta1
                                             : learn_or_fail(b.points, b.simple_log_w, cfg, t));
    out.system.append_batch(b.points, std::move(b.log_target), std::move(b.simple_log_w));
  }
  return out;
}

std::vector<double> mixture_weights(const ParticleSystem& system,
                                    std::span<const ProposalParams> thetas,
                                    std::span<const std::size_t> counts,
                                    const FamilySpec& family) {
  std::vector<double> out(system.size());
  std::vector<double> log_q(thetas.size());
  for (std::size_t p = 0; p < system.size(); ++p) {
    const auto x = system.point(p);
    for (std::size_t k = 0; k < thetas.size(); ++k) log_q[k] = log_density(x, thetas[k], family);
    out[p] = simple_log_weight(system.log_target()[p], mixture_log_density(log_q, counts));
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  family.validate();
  if (theta1.dim() != family.dim) throw ContractViolation("run: theta1 dimension does not match family");
  if (target.dim != family.dim) throw ContractViolation("run: target dimension does not match family");
  if (!target.log_density) throw ContractViolation("run: target has no log-density");
}

ProposalParams learn_step(const Matrix& points, std::span<const double> simple_log_w,
                          const FamilySpec& family, Normalization mode) {
  const auto n = static_cast<std::size_t>(points.cols());
  if (simple_log_w.size() != n) throw ContractViolation("learn_step: points and weights differ in length");
  if (points.rows() != family.dim) throw ContractViolation("learn_step: dimension mismatch");
  if (n < static_cast<std::size_t>(family.dim) + 1)
    throw DegenerateSampleError("learn_step: fewer than d+1 particles");
  std::vector<HStat> blocks;
  blocks.reserve((n + kLearnBlock - 1) / kLearnBlock);
  for (std::size_t begin = 0; begin < n; begin += kLearnBlock) {
    HStat s(family.dim, mode);
    const std::size_t end = std::min(n, begin + kLearnBlock);
    for (std::size_t i = begin; i < end; ++i)
      s.add(points.col(static_cast<Eigen::Index>(i)), simple_log_w[i]);
    blocks.push_back(std::move(s));
  }
  return moments_to_params(merge_tree(blocks, 0, blocks.size()), family);
}

RunOutput run_learning(const RunConfig& config) { return learn_on_current_sample(config); }

RunOutput run_modified_amis(const RunConfig& config) {
  if (config.algorithm != Algorithm::ModifiedAmis)
    throw ContractViolation("run_modified_amis: config names another algorithm");
  RunOutput out = learn_on_current_sample(config);
  const int T = config.schedule.iterations();
  out.system = recycle(std::move(out.system), std::span(out.thetas).first(static_cast<std::size_t>(T)),
                       config.schedule, config.family);
  fill_estimates(out, config);
  return out;
}

RunOutput run_naive(const RunConfig& config) {
  if (config.algorithm != Algorithm::NaiveRecycling)
    throw ContractViolation("run_naive: config names another algorithm");
  RunOutput out = learn_on_current_sample(config);
  out.system.set_recycled_log_w(out.system.simple_log_w());
  fill_estimates(out, config);
  return out;
}

RunOutput run_original_amis(const RunConfig& config) {
  if (config.algorithm != Algorithm::OriginalAmis)
    throw ContractViolation("run_original_amis: config names another algorithm");
  config.validate();
  RunOutput out;
  out.algorithm = config.algorithm;
  out.seed = config.seed;
  out.system = ParticleSystem(config.family.dim);
  out.thetas.push_back(config.theta1);
  const int T = config.schedule.iterations();
  const auto& sizes = config.schedule.sizes();

  // log q(x_p, theta_k) for every particle p and proposal k used so far.
  std::vector<std::vector<double>> log_q_cache;
  for (int t = 0; t < T; ++t) {
    const auto& theta = out.thetas.back();
    Batch b = draw_batch(config, theta, t);
    out.ess_per_iter.push_back(ess(b.simple_log_w));
    const std::size_t old_size = out.system.size();
    const Matrix batch_points = b.points;
    out.system.append_batch(b.points, std::move(b.log_target), std::move(b.simple_log_w));

    for (std::size_t k = 0; k < log_q_cache.size(); ++k) {
      for (std::size_t i = 0; i < static_cast<std::size_t>(batch_points.cols()); ++i)
        log_q_cache[k].push_back(
            log_density(batch_points.col(static_cast<Eigen::Index>(i)), out.thetas[k], config.family));
    }
    std::vector<double> newest(out.system.size());
    for (std::size_t p = 0; p < old_size; ++p)
      newest[p] = log_density(out.system.point(p), theta, config.family);
    std::copy(b.log_q.begin(), b.log_q.end(), newest.begin() + static_cast<std::ptrdiff_t>(old_size));
    log_q_cache.push_back(std::move(newest));

    const auto counts = std::span(sizes).first(static_cast<std::size_t>(t) + 1);
    std::vector<double> log_w(out.system.size());
    std::vector<double> column(log_q_cache.size());
    for (std::size_t p = 0; p < out.system.size(); ++p) {
      for (std::size_t k = 0; k < log_q_cache.size(); ++k) column[k] = log_q_cache[k][p];
      log_w[p] = simple_log_weight(out.system.log_target()[p], mixture_log_density(column, counts));
    }

    out.thetas.push_back(config.frozen_proposal
                             ? config.theta1
                             : learn_or_fail(out.system.points(), log_w, config, t));
    if (t + 1 == T) out.system.set_recycled_log_w(std::move(log_w));
  }
  fill_estimates(out, config);
  return out;
}

RunOutput run(const RunConfig& config) {
  switch (config.algorithm) {
    case Algorithm::ModifiedAmis: return run_modified_amis(config);
    case Algorithm::OriginalAmis: return run_original_amis(config);
    case Algorithm::NaiveRecycling: return run_naive(config);
  }
  throw ContractViolation("run: unknown algorithm");
}

ParticleSystem recycle(ParticleSystem system, std::span<const ProposalParams> thetas,
                       const Schedule& schedule, const FamilySpec& family) {
  const auto T = static_cast<std::size_t>(schedule.iterations());
  if (thetas.size() != T) throw ContractViolation("recycle: need one theta per iteration");
  if (system.iterations() != schedule.iterations())
    throw ContractViolation("recycle: particle system does not cover the schedule");
  for (int t = 0; t < schedule.iterations(); ++t)
    if (system.batch_size(t) != schedule.size_at(t))
      throw ContractViolation("recycle: batch sizes do not match the schedule");
  auto w = mixture_weights(system, thetas, schedule.sizes(), family);
  system.set_recycled_log_w(std::move(w));
  return system;
}

double weighted_average(std::span<const double> log_w, std::span<const double> values,
                        Normalization mode) {
  if (log_w.size() != values.size()) throw ContractViolation("weighted_average: length mismatch");
  if (log_w.empty()) throw ContractViolation("weighted_average: empty system");
  const double m = *std::max_element(log_w.begin(), log_w.end());
  if (m == kNegInf) {
    if (mode == Normalization::SelfNormalized)
      throw DegenerateSampleError("all weights are zero");
    return 0.0;
  }
  std::vector<double> scaled(log_w.size());
  std::vector<double> weighted(log_w.size());
  if (mode == Normalization::SelfNormalized) {
    // Centred on the first value, so constant integrands come back exactly.
    const double ref = values[0];
    for (std::size_t p = 0; p < log_w.size(); ++p) {
      scaled[p] = std::exp(log_w[p] - m);
      weighted[p] = scaled[p] == 0.0 ? 0.0 : scaled[p] * (values[p] - ref);
    }
    return ref + pairwise_sum(weighted) / pairwise_sum(scaled);
  }
  for (std::size_t p = 0; p < log_w.size(); ++p) {
    scaled[p] = std::exp(log_w[p] - m);
    weighted[p] = scaled[p] * values[p];
  }
  return std::exp(m) * pairwise_sum(weighted) / static_cast<double>(log_w.size());
}

double estimate(const ParticleSystem& system, const PointFunction& psi, Normalization mode) {
  const auto& lw = system.recycled_log_w();
  std::vector<double> values(system.size());
  for (std::size_t p = 0; p < system.size(); ++p) values[p] = psi(system.point(p));
  return weighted_average(lw, values, mode);
}

double oracle_estimate(const ParticleSystem& system, const ProposalParams& theta_star,
                       const FamilySpec& family, const PointFunction& psi, Normalization mode) {
  std::vector<double> lw(system.size());
  std::vector<double> values(system.size());
  for (std::size_t p = 0; p < system.size(); ++p) {
    const auto x = system.point(p);
    lw[p] = simple_log_weight(system.log_target()[p], log_density(x, theta_star, family));
    values[p] = psi(x);
  }
  return weighted_average(lw, values, mode);
}

}  // namespace amis
