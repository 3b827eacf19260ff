#pragma once

// Experiment orchestration: benchmark parameter defaults, budget-matched
// multi-seed runs with paired start points, success-rate/f_best aggregation,
// and CSV/JSON emission, plus the cap-probability figure data.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dfds/domain.hpp"
#include "dfds/geometry.hpp"
#include "dfds/objectives.hpp"
#include "dfds/random.hpp"
#include "dfds/solvers.hpp"
#include "dfds/vec.hpp"

namespace dfds {

enum class Algo { dfds, prs, ihr };

inline std::string algo_name(Algo a) {
  switch (a) {
    case Algo::dfds: return "dfds";
    case Algo::prs: return "prs";
    case Algo::ihr: return "ihr";
  }
  throw std::invalid_argument("unknown algorithm");
}

inline Algo algo_from_name(const std::string& name) {
  if (name == "dfds") return Algo::dfds;
  if (name == "prs") return Algo::prs;
  if (name == "ihr") return Algo::ihr;
  throw std::invalid_argument("unknown algorithm name: " + name);
}

enum class BudgetLevel { low, medium, high };

inline std::string level_name(BudgetLevel l) {
  switch (l) {
    case BudgetLevel::low: return "low";
    case BudgetLevel::medium: return "medium";
    case BudgetLevel::high: return "high";
  }
  throw std::invalid_argument("unknown budget level");
}

inline BudgetLevel level_from_name(const std::string& name) {
  if (name == "low") return BudgetLevel::low;
  if (name == "medium") return BudgetLevel::medium;
  if (name == "high") return BudgetLevel::high;
  throw std::invalid_argument("unknown budget level name: " + name);
}

struct ExperimentSpec {
  BenchmarkId problem = BenchmarkId::six_hump_camel;
  int dim = 2;
  std::vector<Algo> algos = {Algo::dfds, Algo::prs, Algo::ihr};
  std::optional<BudgetLevel> budget_level;  // named budget ...
  std::optional<std::uint64_t> n_feval;     // ... or an explicit one
  std::uint64_t runs = 20;
  std::uint64_t base_seed = 0;
  double epsilon = 1e-4;
  std::optional<double> r0_override;
  std::uint64_t refine_budget = 0;  // 0 selects the default of 200 * dim
  unsigned workers = 0;             // 0 selects the hardware concurrency

  void validate() const {
    if (runs < 1) {
      throw std::invalid_argument("ExperimentSpec: runs must be at least 1");
    }
    if (dim < 1) {
      throw std::invalid_argument("ExperimentSpec: dimension must be positive");
    }
    if (algos.empty()) {
      throw std::invalid_argument("ExperimentSpec: no algorithms selected");
    }
    if (!budget_level && !n_feval) {
      throw std::invalid_argument(
          "ExperimentSpec: either a budget level or an explicit n_feval is "
          "required");
    }
    if (budget_level && n_feval) {
      throw std::invalid_argument(
          "ExperimentSpec: a budget level and an explicit n_feval are "
          "mutually exclusive");
    }
    if (n_feval && *n_feval < 1) {
      throw std::invalid_argument("ExperimentSpec: n_feval must be at least 1");
    }
    if (!(epsilon > 0.0)) {
      throw std::invalid_argument("ExperimentSpec: epsilon must be positive");
    }
    if (r0_override && !(*r0_override > 0.0)) {
      throw std::invalid_argument(
          "ExperimentSpec: r0_override must be positive");
    }
  }
};

struct RunSummary {
  std::uint64_t run = 0;
  std::uint64_t seed = 0;
  std::uint64_t evals_used = 0;
  std::uint64_t refine_evals_used = 0;
  double f_final = std::numeric_limits<double>::quiet_NaN();
  double f_refined = std::numeric_limits<double>::quiet_NaN();
  bool success = false;
  StopReason terminated_by = StopReason::refined;
  std::optional<std::string> error;
};

struct AggregateStats {
  double success_rate = 0.0;
  double f_best = std::numeric_limits<double>::quiet_NaN();
  std::vector<RunSummary> per_run;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::uint64_t n_feval = 0;  // resolved budget
  double r0 = 0.0;            // resolved step size
  std::map<Algo, AggregateStats> stats;
};

// Benchmark-protocol step size: 0.5 / 0.2 for the two fixed 2-D problems,
// sqrt(N) / (2*sqrt(2)) for the dimension-scaled families.
inline double default_r0(BenchmarkId problem, int dim) {
  switch (problem) {
    case BenchmarkId::six_hump_camel:
      if (dim != 2) {
        throw std::invalid_argument("six_hump_camel is two-dimensional");
      }
      return 0.5;
    case BenchmarkId::goldstein_price:
      if (dim != 2) {
        throw std::invalid_argument("goldstein_price is two-dimensional");
      }
      return 0.2;
    case BenchmarkId::ackley:
    case BenchmarkId::levy:
    case BenchmarkId::alpine:
      if (dim < 1) {
        throw std::invalid_argument("dimension must be positive");
      }
      return std::sqrt(static_cast<double>(dim)) / (2.0 * std::sqrt(2.0));
  }
  throw std::invalid_argument("unknown benchmark");
}

// Benchmark-protocol budgets: {125,250,500} for the fixed 2-D problems,
// {125,250,500} * 2^N for ackley/levy, {625,1250,2500} * 2^N for alpine.
inline std::uint64_t default_n_feval(BenchmarkId problem, int dim,
                                     BudgetLevel level) {
  const int idx = static_cast<int>(level);
  switch (problem) {
    case BenchmarkId::six_hump_camel:
    case BenchmarkId::goldstein_price: {
      if (dim != 2) {
        throw std::invalid_argument("fixed benchmark is two-dimensional");
      }
      const std::uint64_t base[3] = {125, 250, 500};
      return base[idx];
    }
    case BenchmarkId::ackley:
    case BenchmarkId::levy:
    case BenchmarkId::alpine: {
      if (dim < 1 || dim > 50) {
        throw std::invalid_argument(
            "dimension out of range for budget scaling");
      }
      const std::uint64_t base_al[3] = {125, 250, 500};
      const std::uint64_t base_alp[3] = {625, 1250, 2500};
      const std::uint64_t base = problem == BenchmarkId::alpine
                                     ? base_alp[idx]
                                     : base_al[idx];
      return base << static_cast<unsigned>(dim);
    }
  }
  throw std::invalid_argument("unknown benchmark");
}

inline std::pair<std::uint64_t, double> default_parameters(BenchmarkId problem,
                                                           int dim,
                                                           BudgetLevel level) {
  return {default_n_feval(problem, dim, level), default_r0(problem, dim)};
}

using ProblemFactory =
    std::function<std::pair<Objective, BoxDomain>(BenchmarkId, int)>;

namespace detail {

// Seed-stream identifiers: stream 0 feeds the shared start points, so the
// same run index gives the same x0 to every solver that uses one; each
// algorithm draws its own search randomness from its private stream.
inline std::uint64_t seed_stream(Algo a) {
  switch (a) {
    case Algo::dfds: return 1;
    case Algo::prs: return 2;
    case Algo::ihr: return 3;
  }
  throw std::invalid_argument("unknown algorithm");
}

inline constexpr std::uint64_t kStartPointStream = 0;

inline RunSummary execute_single_run(const ExperimentSpec& spec,
                                     const ProblemFactory& factory,
                                     std::uint64_t n_feval, double r0,
                                     Algo algo, std::uint64_t run) {
  RunSummary out;
  out.run = run;
  out.seed = mix_seed(spec.base_seed, seed_stream(algo), run);
  try {
    auto [obj, box] = factory(spec.problem, spec.dim);
    SolverConfig cfg;
    cfg.epsilon = spec.epsilon;
    cfg.r0 = r0;
    cfg.max_directions = kUnboundedDirections;
    cfg.budget = n_feval;
    cfg.seed = out.seed;

    RunRecord rec;
    if (algo == Algo::prs) {
      rec = prs_run(obj, box, cfg);
    } else {
      RandomStream x0_rng(mix_seed(spec.base_seed, kStartPointStream, run));
      const Vec x0 = box.sample_uniform(x0_rng);
      rec = algo == Algo::dfds ? dfds_run(obj, box, cfg, x0)
                               : ihr_run(obj, box, cfg, x0);
    }

    const std::uint64_t before_refine = obj.eval_count();
    auto [xr, fr] = refine_local(obj, box, rec.x_final, spec.refine_budget);
    rec.refine_evals_used += obj.eval_count() - before_refine;
    rec.x_refined = std::move(xr);
    rec.f_refined = fr;
    rec.terminated_by = StopReason::refined;

    out.evals_used = rec.evals_used;
    out.refine_evals_used = rec.refine_evals_used;
    out.f_final = rec.f_final;
    out.f_refined = rec.f_refined;
    out.terminated_by = rec.terminated_by;
    out.success = is_epsilon_optimal(obj, rec.f_refined, spec.epsilon);
  } catch (const std::exception& e) {
    out.error = e.what();
    out.success = false;
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// Runs the full experiment grid (every selected algorithm times `runs`
// seeds), refines each final point, classifies epsilon-optimality, and
// aggregates.  Runs execute concurrently on `workers` threads; results are
// keyed by (algorithm, run index) so the outcome is schedule-independent.
inline ExperimentResult run_experiment(const ExperimentSpec& spec,
                                       const ProblemFactory& factory) {
  spec.validate();
  const std::uint64_t n_feval =
      spec.n_feval ? *spec.n_feval
                   : default_n_feval(spec.problem, spec.dim,
                                     *spec.budget_level);
  const double r0 = spec.r0_override
                        ? *spec.r0_override
                        : default_r0(spec.problem, spec.dim);

  // Canonical algorithm order, deduplicated.
  std::vector<Algo> algos;
  for (Algo a : {Algo::dfds, Algo::prs, Algo::ihr}) {
    for (Algo chosen : spec.algos) {
      if (chosen == a) {
        algos.push_back(a);
        break;
      }
    }
  }

  struct Task {
    Algo algo;
    std::uint64_t run;
  };
  std::vector<Task> tasks;
  tasks.reserve(algos.size() * spec.runs);
  for (Algo a : algos) {
    for (std::uint64_t i = 0; i < spec.runs; ++i) tasks.push_back({a, i});
  }

  std::vector<RunSummary> results(tasks.size());
  std::atomic<std::size_t> cursor{0};
  auto work = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= tasks.size()) break;
      results[i] = detail::execute_single_run(spec, factory, n_feval, r0,
                                              tasks[i].algo, tasks[i].run);
    }
  };
  unsigned n_workers = spec.workers != 0 ? spec.workers
                                         : std::thread::hardware_concurrency();
  if (n_workers == 0) n_workers = 1;
  n_workers = static_cast<unsigned>(
      std::min<std::size_t>(n_workers, tasks.size()));
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  ExperimentResult result;
  result.spec = spec;
  result.n_feval = n_feval;
  result.r0 = r0;
  std::size_t offset = 0;
  for (Algo a : algos) {
    AggregateStats st;
    st.per_run.assign(results.begin() + static_cast<std::ptrdiff_t>(offset),
                      results.begin() +
                          static_cast<std::ptrdiff_t>(offset + spec.runs));
    offset += spec.runs;
    std::uint64_t successes = 0;
    double best = std::numeric_limits<double>::infinity();
    bool any_valid = false;
    for (const RunSummary& r : st.per_run) {
      if (r.success) ++successes;
      if (!r.error) {
        best = std::min(best, r.f_refined);
        any_valid = true;
      }
    }
    st.success_rate =
        static_cast<double>(successes) / static_cast<double>(spec.runs);
    st.f_best = any_valid ? best : std::numeric_limits<double>::quiet_NaN();
    result.stats.emplace(a, std::move(st));
  }
  return result;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  return run_experiment(spec, [](BenchmarkId id, int dim) {
    return make_benchmark(id, dim);
  });
}

enum class OutputFormat { csv, json };

// Serializes an experiment: CSV as one row per (algorithm, run) in canonical
// order, JSON as the aggregate table cell plus full per-run detail.
inline std::string emit_results(const ExperimentResult& res,
                                OutputFormat format) {
  const std::string level = res.spec.budget_level
                                ? level_name(*res.spec.budget_level)
                                : "custom";
  if (format == OutputFormat::csv) {
    std::string out =
        "problem,dim,algo,budget_level,n_feval,run,seed,evals_used,"
        "f_final,f_refined,success\n";
    for (const auto& [algo, st] : res.stats) {
      for (const RunSummary& r : st.per_run) {
        out += benchmark_name(res.spec.problem);
        out += ',' + std::to_string(res.spec.dim);
        out += ',' + algo_name(algo);
        out += ',' + level;
        out += ',' + std::to_string(res.n_feval);
        out += ',' + std::to_string(r.run);
        out += ',' + std::to_string(r.seed);
        out += ',' + std::to_string(r.evals_used);
        out += ',' + detail::format_double(r.f_final);
        out += ',' + detail::format_double(r.f_refined);
        out += ',';
        out += r.success ? '1' : '0';
        out += '\n';
      }
    }
    return out;
  }

  nlohmann::json j;
  j["problem"] = benchmark_name(res.spec.problem);
  j["dim"] = res.spec.dim;
  j["budget_level"] = level;
  j["n_feval"] = res.n_feval;
  j["r0"] = res.r0;
  j["epsilon"] = res.spec.epsilon;
  j["runs"] = res.spec.runs;
  j["base_seed"] = res.spec.base_seed;
  j["refine_budget"] = res.spec.refine_budget;
  nlohmann::json algos = nlohmann::json::object();
  for (const auto& [algo, st] : res.stats) {
    nlohmann::json cell;
    cell["success_rate"] = st.success_rate;
    if (std::isfinite(st.f_best)) {
      cell["f_best"] = st.f_best;
    } else {
      cell["f_best"] = nullptr;
    }
    nlohmann::json runs = nlohmann::json::array();
    nlohmann::json errors = nlohmann::json::array();
    for (const RunSummary& r : st.per_run) {
      nlohmann::json row;
      row["run"] = r.run;
      row["seed"] = r.seed;
      row["evals_used"] = r.evals_used;
      row["refine_evals_used"] = r.refine_evals_used;
      if (std::isfinite(r.f_final)) row["f_final"] = r.f_final;
      if (std::isfinite(r.f_refined)) row["f_refined"] = r.f_refined;
      row["success"] = r.success;
      row["terminated_by"] = to_string(r.terminated_by);
      if (r.error) {
        row["error"] = *r.error;
        errors.push_back({{"run", r.run}, {"message", *r.error}});
      }
      runs.push_back(std::move(row));
    }
    cell["runs"] = std::move(runs);
    cell["errors"] = std::move(errors);
    algos[algo_name(algo)] = std::move(cell);
  }
  j["algorithms"] = std::move(algos);
  return j.dump(2) + "\n";
}

struct Fig3Row {
  int n = 0;
  double log10_exact = 0.0;
  std::optional<double> log10_lower;
};

// Exact cap probability and its analytic lower bound on a log10 scale, per
// dimension — the data behind the probability-decay figure.
inline std::vector<Fig3Row> emit_fig3_data(int n_min, int n_max,
                                           double alpha) {
  if (n_min < 2 || n_min > n_max) {
    throw std::invalid_argument(
        "emit_fig3_data: need 2 <= n_min <= n_max");
  }
  std::vector<Fig3Row> rows;
  rows.reserve(static_cast<std::size_t>(n_max - n_min + 1));
  const bool bound_valid = alpha > 0.0 && alpha < M_PI / 2.0;
  for (int n = n_min; n <= n_max; ++n) {
    Fig3Row row;
    row.n = n;
    row.log10_exact =
        std::log10(cap_probability_closed_form({n, alpha}).value);
    if (n >= 4 && bound_valid) {
      row.log10_lower =
          std::log10(cap_probability_lower_bound({n, alpha}).value);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dfds
