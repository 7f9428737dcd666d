#include "amis/gaussian.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "amis/errors.hpp"
#include "amis/log_math.hpp"

namespace amis {

double gaussian_log_density(const ConstPoint& x, const ProposalParams& params) {
  const Vector z = params.chol().triangularView<Eigen::Lower>().solve(x - params.mean());
  const double d = static_cast<double>(params.dim());
  return -0.5 * (d * std::log(2.0 * std::numbers::pi) + params.log_det_cov() + z.squaredNorm());
}

std::vector<double> mixture_log_coefficients(std::span<const std::size_t> counts) {
  if (counts.empty()) throw ContractViolation("mixture: no components");
  std::size_t total = 0;
  for (auto n : counts) {
    if (n == 0) throw ContractViolation("mixture: component counts must be positive");
    total += n;
  }
  std::vector<double> out(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k)
    out[k] = std::log(static_cast<double>(counts[k]) / static_cast<double>(total));
  return out;
}

double mixture_log_density(std::span<const double> component_log_q,
                           std::span<const std::size_t> counts) {
  if (component_log_q.size() != counts.size())
    throw ContractViolation("mixture: params and counts differ in length");
  const auto coef = mixture_log_coefficients(counts);
  std::vector<double> terms(coef.size());
  for (std::size_t k = 0; k < coef.size(); ++k) terms[k] = component_log_q[k] + coef[k];
  return log_sum_exp(terms);
}

double mixture_log_density(const ConstPoint& x, std::span<const ProposalParams> params,
                           std::span<const std::size_t> counts) {
  if (params.size() != counts.size())
    throw ContractViolation("mixture: params and counts differ in length");
  std::vector<double> log_q(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k].dim() != x.size()) throw ContractViolation("mixture: dimension mismatch");
    log_q[k] = gaussian_log_density(x, params[k]);
  }
  return mixture_log_density(log_q, counts);
}

double simple_log_weight(double log_pi, double log_q) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (log_pi == kNegInf) return kNegInf;
  if (log_q == kNegInf)
    throw AbsoluteContinuityError("proposal density vanishes where the target does not");
  return log_pi - log_q;
}

}  // namespace amis
