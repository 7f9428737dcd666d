#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "amis/types.hpp"

namespace amis {

// Log-density of N(mean, cov) at x, via the cached Cholesky factor.
double gaussian_log_density(const ConstPoint& x, const ProposalParams& params);

// log D(x) = log[ sum_k (N_k / Omega) q_k(x) ] given per-component
// log-densities log q_k(x). With a single component the result is exactly
// component_log_q[0].
double mixture_log_density(std::span<const double> component_log_q,
                           std::span<const std::size_t> counts);

// Same, for plain Gaussian components.
double mixture_log_density(const ConstPoint& x, std::span<const ProposalParams> params,
                           std::span<const std::size_t> counts);

// log(N_k / Omega) for each component.
std::vector<double> mixture_log_coefficients(std::span<const std::size_t> counts);

// log pi - log q. -inf when pi vanishes; AbsoluteContinuityError when q
// vanishes and pi does not.
double simple_log_weight(double log_pi, double log_q);

}  // namespace amis
