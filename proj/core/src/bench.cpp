#include "amis/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "amis/errors.hpp"

namespace amis::bench {

namespace {

struct Task {
  std::uint64_t seed;
  Algorithm algorithm;
};

std::string trace_csv(const RunOutput& out, const std::optional<ProposalParams>& star) {
  std::ostringstream s;
  const int d = out.thetas.front().dim();
  s << "t,N_t,ess,theta_error";
  for (int k = 0; k < d; ++k) s << ",mean_" << k + 1;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s << ",cov_" << i + 1 << j + 1;
  s << '\n';
  for (std::size_t t = 0; t < out.thetas.size(); ++t) {
    const auto& th = out.thetas[t];
    s << t + 1 << ',';
    if (t < out.ess_per_iter.size()) {
      s << out.system.batch_size(static_cast<int>(t)) << ',' << format_double(out.ess_per_iter[t]);
    } else {
      s << ',';
    }
    s << ',' << (star ? format_double(theta_distance(th, *star)) : "");
    for (int k = 0; k < d; ++k) s << ',' << format_double(th.mean()[k]);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) s << ',' << format_double(th.cov()(i, j));
    s << '\n';
  }
  return s.str();
}

std::string render_csv(const BenchResult& r) {
  std::ostringstream s;
  s << "seed,algorithm,T,omega_T,ess_final,cvm,l2,linf";
  for (const auto& n : r.psi_names) s << ",est_" << n;
  s << ",theta_error_final,wall_ms,status\n";
  for (const auto& row : r.rows) {
    const bool ok = row.status == "ok";
    auto num = [ok](double v) { return ok ? format_double(v) : std::string(); };
    s << row.seed << ',' << algorithm_letter(row.algorithm) << ',' << row.iterations << ','
      << row.omega << ',' << num(row.ess_final) << ',' << num(row.dist.cvm) << ','
      << num(row.dist.l2) << ',' << num(row.dist.linf);
    for (std::size_t k = 0; k < r.psi_names.size(); ++k)
      s << ',' << (ok ? format_double(row.estimates[k]) : std::string());
    s << ',' << num(row.theta_error_final) << ','
      << (row.wall_ms ? format_double(*row.wall_ms) : std::string()) << ',' << row.status << '\n';
  }
  return s.str();
}

std::string render_summary(const BenchConfig& config, const BenchResult& r) {
  std::ostringstream s;
  s << "# amis benchmark summary\n";
  s << "# target=" << config.target.kind << " T=" << config.schedule.build().iterations()
    << " omega_T=" << config.schedule.build().total() << " replicates=" << config.seeds.size()
    << " normalization=" << normalization_name(config.normalization) << '\n';
  s << "# quantiles: linear interpolation between order statistics; failed rows excluded\n";
  s << "algorithm,metric,n,median,q1,q3,iqr\n";
  std::vector<std::string> metrics{"ess_final", "cvm", "l2", "linf"};
  for (const auto& n : r.psi_names) metrics.push_back("est_" + n);
  metrics.push_back("theta_error_final");
  for (Algorithm a : config.algorithms) {
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      std::vector<double> v;
      for (const auto& row : r.rows) {
        if (row.algorithm != a || row.status != "ok") continue;
        double x = 0.0;
        if (m == 0) x = row.ess_final;
        else if (m == 1) x = row.dist.cvm;
        else if (m == 2) x = row.dist.l2;
        else if (m == 3) x = row.dist.linf;
        else if (m + 1 == metrics.size()) x = row.theta_error_final;
        else x = row.estimates[m - 4];
        v.push_back(x);
      }
      s << algorithm_letter(a) << ',' << metrics[m] << ',' << v.size();
      if (v.empty()) {
        s << ",,,,\n";
        continue;
      }
      const double q1 = quantile(v, 0.25);
      const double q3 = quantile(v, 0.75);
      s << ',' << format_double(quantile(v, 0.5)) << ',' << format_double(q1) << ','
        << format_double(q3) << ',' << format_double(q3 - q1) << '\n';
    }
  }
  const auto failed = std::count_if(r.rows.begin(), r.rows.end(),
                                    [](const BenchRow& row) { return row.status != "ok"; });
  s << "# failed_rows=" << failed << '\n';
  return s.str();
}

}  // namespace

TargetModel TargetSpec::build() const {
  TargetModel t;
  if (kind == "gaussian") t = make_gaussian_target(mean, cov);
  else if (kind == "mixture") t = make_mixture_target(weights, means, covs);
  else if (kind == "banana") t = make_banana_target(b, sigma1_sq);
  else throw ConfigError({"target.kind: unknown target '" + kind + "'"});
  if (log_constant) t = with_hidden_constant(std::move(t), *log_constant);
  return t;
}

Schedule ScheduleSpec::build() const {
  switch (kind) {
    case ScheduleKind::Linear: return Schedule::linear(n, iterations);
    case ScheduleKind::Quadratic: return Schedule::quadratic(n, iterations);
    case ScheduleKind::Explicit: return Schedule::explicit_sizes(sizes);
  }
  throw ConfigError({"schedule.kind: unknown"});
}

PointFunction IntegrandSpec::build() const {
  if (kind == "monomial") {
    return [powers = powers](const ConstPoint& x) {
      double v = 1.0;
      for (std::size_t k = 0; k < powers.size(); ++k)
        for (int p = 0; p < powers[k]; ++p) v *= x[static_cast<Eigen::Index>(k)];
      return v;
    };
  }
  if (kind == "indicator") {
    return [axis = axis, greater = greater, th = threshold](const ConstPoint& x) {
      return (greater ? x[axis] > th : x[axis] < th) ? 1.0 : 0.0;
    };
  }
  if (kind == "constant") {
    return [v = value](const ConstPoint&) { return v; };
  }
  throw ConfigError({"psi." + name + ": unknown integrand kind"});
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ContractViolation("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BenchResult run_benchmark(const BenchConfig& config, const BenchOptions& options) {
  const TargetModel target = config.target.build();
  const Schedule schedule = config.schedule.build();
  const ProposalParams theta1 = ProposalParams::from_mean_cov(config.theta1_mean, config.theta1_cov);

  GridSpec grid = default_grid(target, config.grid_cells, config.grid_half_width_sd);
  if (config.grid_lower) {
    grid.lower = *config.grid_lower;
    grid.upper = *config.grid_upper;
  }
  const Matrix true_cdf = true_cdf_grid(target, grid);

  std::vector<NamedIntegrand> integrands;
  BenchResult result;
  for (const auto& p : config.psi) {
    integrands.push_back({p.name, p.build()});
    result.psi_names.push_back(p.name);
  }

  std::vector<std::uint64_t> seeds = config.seeds;
  if (options.seed_override) {
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = *options.seed_override + i;
  }
  std::sort(seeds.begin(), seeds.end());

  std::vector<Task> tasks;
  for (auto s : seeds)
    for (auto a : config.algorithms) tasks.push_back({s, a});
  std::sort(tasks.begin(), tasks.end(), [](const Task& x, const Task& y) {
    return x.seed != y.seed ? x.seed < y.seed : algorithm_letter(x.algorithm) < algorithm_letter(y.algorithm);
  });

  result.rows.resize(tasks.size());
  std::vector<std::string> traces(tasks.size());

  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t k = first; k < tasks.size(); k += stride) {
      BenchRow& row = result.rows[k];
      row.seed = tasks[k].seed;
      row.algorithm = tasks[k].algorithm;
      row.iterations = schedule.iterations();
      row.omega = schedule.total();
      const auto start = std::chrono::steady_clock::now();
      try {
        RunConfig rc{target, config.family, theta1, schedule, tasks[k].seed,
                     config.normalization, tasks[k].algorithm, integrands, false};
        const RunOutput out = run(rc);
        const auto& lw = out.system.recycled_log_w();
        row.ess_final = ess(lw);
        row.dist = distances(empirical_cdf(out.system, grid, true), true_cdf, grid);
        for (const auto& name : result.psi_names) row.estimates.push_back(out.estimates.at(name));
        row.theta_error_final =
            target.theta_star ? theta_distance(out.thetas.back(), *target.theta_star) : std::nan("");
        if (options.traces) traces[k] = trace_csv(out, target.theta_star);
      } catch (const AdaptationFailure&) {
        row.status = "adaptation_failure";
      } catch (const AbsoluteContinuityError&) {
        row.status = "absolute_continuity";
      } catch (const SupportEscapeError&) {
        row.status = "support_escape";
      } catch (const DegenerateSampleError&) {
        row.status = "degenerate_weights";
      } catch (const std::exception&) {
        row.status = "error";
      }
      if (options.record_timing) {
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      }
    }
  };

  const auto jobs = static_cast<std::size_t>(std::max(1, options.jobs));
  if (jobs == 1 || tasks.size() <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < std::min(jobs, tasks.size()); ++j)
      pool.emplace_back(work, j, std::min(jobs, tasks.size()));
    for (auto& th : pool) th.join();
  }

  if (options.traces) {
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      if (traces[k].empty()) continue;
      result.traces.emplace_back("trace_" + std::to_string(tasks[k].seed) + "_" +
                                     algorithm_letter(tasks[k].algorithm) + ".csv",
                                 std::move(traces[k]));
    }
  }
  result.csv = render_csv(result);
  result.summary = render_summary(config, result);
  return result;
}

void write_outputs(const BenchResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir / name).string());
    f << body;
  };
  write("results.csv", result.csv);
  write("summary.txt", result.summary);
  for (const auto& [name, body] : result.traces) write(name, body);
}

}  // namespace amis::bench
