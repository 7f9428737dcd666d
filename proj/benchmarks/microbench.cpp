#include <benchmark/benchmark.h>

#include <vector>

#include "amis/algorithms.hpp"
#include "amis/diagnostics.hpp"
#include "amis/gaussian.hpp"
#include "amis/proposals.hpp"

namespace {

using amis::FamilySpec;
using amis::Matrix;
using amis::ProposalParams;
using amis::Vector;

ProposalParams params(double shift) {
  Matrix c(2, 2);
  c << 1.0 + shift, 0.3, 0.3, 2.0;
  return ProposalParams::from_mean_cov(Vector::Constant(2, shift), c);
}

// Mixture density at one point against T components.
void BM_MixtureLogDensity(benchmark::State& state) {
  const auto components = static_cast<std::size_t>(state.range(0));
  std::vector<ProposalParams> ps;
  std::vector<std::size_t> counts;
  for (std::size_t k = 0; k < components; ++k) {
    ps.push_back(params(0.1 * static_cast<double>(k)));
    counts.push_back(50 * (k + 1) * (k + 1));
  }
  Vector x(2);
  x << 0.3, -0.7;
  for (auto _ : state) benchmark::DoNotOptimize(amis::mixture_log_density(x, ps, counts));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(components));
}
BENCHMARK(BM_MixtureLogDensity)->Arg(1)->Arg(10)->Arg(45);

void BM_LearnStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FamilySpec fam{2, std::nullopt, false};
  const Matrix x = amis::sample(params(0.0), fam, n, {1, 1});
  std::vector<double> lw(n);
  for (std::size_t i = 0; i < n; ++i) lw[i] = -0.01 * static_cast<double>(i % 97);
  for (auto _ : state)
    benchmark::DoNotOptimize(amis::learn_step(x, lw, fam, amis::Normalization::SelfNormalized));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_LearnStep)->Arg(1000)->Arg(100000);

void BM_EmpiricalCdf(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FamilySpec fam{2, std::nullopt, false};
  const Matrix x = amis::sample(params(0.0), fam, n, {2, 1});
  const std::vector<double> lw(n, 0.0);
  const amis::GridSpec g{Vector::Constant(2, -5.0), Vector::Constant(2, 5.0), 100, 100};
  for (auto _ : state) benchmark::DoNotOptimize(amis::empirical_cdf(x, lw, g));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_EmpiricalCdf)->Arg(1000)->Arg(100000);

void BM_Sample(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FamilySpec fam{2, std::nullopt, false};
  const auto p = params(0.0);
  for (auto _ : state) benchmark::DoNotOptimize(amis::sample(p, fam, n, {3, 1}));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_Sample)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
