#pragma once

#include <cstddef>
#include <span>

namespace amis {

// log(sum(exp(values))). Shifted by the maximum so that large inputs do not
// overflow; -inf entries contribute nothing. Throws ContractViolation on
// empty input.
double log_sum_exp(std::span<const double> values);

// Pairwise (cascade) summation over the given order. The reduction tree
// depends only on the length, so results are reproducible.
double pairwise_sum(std::span<const double> values);

// log(exp(a) + exp(b)).
double log_add_exp(double a, double b);

}  // namespace amis
