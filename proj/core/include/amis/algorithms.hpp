#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "amis/proposals.hpp"
#include "amis/targets.hpp"
#include "amis/types.hpp"

namespace amis {

struct NamedIntegrand {
  std::string name;
  PointFunction fn;
};

struct RunConfig {
  TargetModel target;
  FamilySpec family;
  ProposalParams theta1;
  Schedule schedule;
  std::uint64_t seed = 0;
  Normalization normalization = Normalization::SelfNormalized;
  Algorithm algorithm = Algorithm::ModifiedAmis;
  // Estimated on the final weighted system and stored in RunOutput::estimates.
  std::vector<NamedIntegrand> integrands;
  // Keep theta_t = theta_1 for every t instead of learning. Used to compare
  // schemes on a common proposal sequence.
  bool frozen_proposal = false;

  void validate() const;
};

// One adaptation step: raw moments sum_i w_i h(x_i) divided by N (Normalized)
// or by sum_i w_i (SelfNormalized), mapped to (mean, cov). `points` is d x N.
// Partial sums over fixed blocks of particles are merged in block order.
ProposalParams learn_step(const Matrix& points, std::span<const double> simple_log_w,
                          const FamilySpec& family, Normalization mode);

// Modified AMIS: each theta_{t+1} is learned from iteration t's particles
// only, then a single final pass reweights every particle by the
// deterministic mixture of theta_1..theta_T.
RunOutput run_modified_amis(const RunConfig& config);

// Original AMIS: at every iteration all particles drawn so far are reweighted
// by the mixture of the proposals used so far, and theta_{t+1} is learned from
// all of them.
RunOutput run_original_amis(const RunConfig& config);

// Learning as in modified AMIS; the final system keeps the per-iteration
// weights pi / q(., theta_t).
RunOutput run_naive(const RunConfig& config);

// The learning loop alone (no final reweighting): draws every batch, stores
// the per-iteration weights and theta_1..theta_{T+1}. The returned system has
// no recycled weights.
RunOutput run_learning(const RunConfig& config);

// Dispatches on config.algorithm.
RunOutput run(const RunConfig& config);

// Final weights log pi(x_p) - log D_T(x_p) with
// D_T = sum_k (N_k / Omega_T) q(., theta_k). `thetas` holds theta_1..theta_T.
ParticleSystem recycle(ParticleSystem system, std::span<const ProposalParams> thetas,
                       const Schedule& schedule, const FamilySpec& family);

// Integral estimate from the recycled weights: Omega^-1 sum_p w_p psi(x_p)
// (Normalized) or sum_p w_p psi(x_p) / sum_p w_p (SelfNormalized).
double estimate(const ParticleSystem& system, const PointFunction& psi, Normalization mode);

// Same reduction with every weight replaced by pi(x_p) / q(x_p, theta_star).
// Only computable when theta_star is known.
double oracle_estimate(const ParticleSystem& system, const ProposalParams& theta_star,
                       const FamilySpec& family, const PointFunction& psi,
                       Normalization mode = Normalization::Normalized);

// Weighted reduction shared by the estimators. Weights are exponentiated
// relative to their maximum; sums are pairwise in particle order.
double weighted_average(std::span<const double> log_w, std::span<const double> values,
                        Normalization mode);

}  // namespace amis
