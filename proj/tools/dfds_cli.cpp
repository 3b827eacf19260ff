// Command-line front end for the direct-search library.
//
// Subcommands:
//   solve   one solver run on one benchmark (optionally with a descent trace)
//   bench   multi-seed experiment grid with CSV/JSON emission
//   theory  iteration/probability/evaluation bounds and the cap-decay table
//   verify  cross-checks the cap probability across independent methods
//
// `bench` accepts --config <file> (JSON mirroring the experiment fields;
// explicit command-line flags win).  Relative --out paths are resolved
// against $DFDS_OUT_DIR when it is set.  Exit status is nonzero iff any run
// errored (solve: iff the run errored; verify: iff the methods disagree).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dfds/dfds.hpp"

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_bound(const dfds::TheoryBound& b) {
  std::string s = fmt(b.value);
  if (b.overflowed) s += " (overflow: not attainable in finite arithmetic)";
  return s;
}

std::filesystem::path resolve_out_path(const std::string& out) {
  std::filesystem::path p(out);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("DFDS_OUT_DIR")) {
      if (*dir != '\0') p = std::filesystem::path(dir) / p;
    }
  }
  return p;
}

void write_output(const std::string& payload, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << payload;
    return;
  }
  const std::filesystem::path path = resolve_out_path(out);
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("cannot open output file: " + path.string());
  }
  f << payload;
  if (!f) {
    throw std::runtime_error("write failed: " + path.string());
  }
  std::cerr << "wrote " << path.string() << "\n";
}

// ---------------------------------------------------------------- solve ----

int run_solve(const std::string& problem, int dim, const std::string& algo,
              std::uint64_t budget, std::uint64_t seed,
              std::optional<double> r0, double epsilon, bool trace,
              std::uint64_t refine_budget) {
  auto [obj, box] = dfds::make_benchmark(dfds::benchmark_from_name(problem),
                                         dim);
  dfds::SolverConfig cfg;
  cfg.epsilon = epsilon;
  cfg.budget = budget;
  cfg.seed = dfds::mix_seed(seed, dfds::detail::seed_stream(
                                      dfds::algo_from_name(algo)),
                            0);
  cfg.r0 = r0 ? *r0 : dfds::default_r0(dfds::benchmark_from_name(problem),
                                       dim);
  cfg.record_trace = trace;

  dfds::RunRecord rec;
  const dfds::Algo a = dfds::algo_from_name(algo);
  if (a == dfds::Algo::prs) {
    rec = dfds::prs_run(obj, box, cfg);
  } else {
    dfds::RandomStream x0_rng(
        dfds::mix_seed(seed, dfds::detail::kStartPointStream, 0));
    const dfds::Vec x0 = box.sample_uniform(x0_rng);
    rec = a == dfds::Algo::dfds ? dfds::dfds_run(obj, box, cfg, x0)
                                : dfds::ihr_run(obj, box, cfg, x0);
  }
  const std::uint64_t before_refine = obj.eval_count();
  auto [xr, fr] = dfds::refine_local(obj, box, rec.x_final, refine_budget);
  rec.refine_evals_used += obj.eval_count() - before_refine;

  std::cout << "problem:            " << problem << " (dim " << dim << ")\n";
  std::cout << "algo:               " << algo << "\n";
  std::cout << "budget:             " << budget << "\n";
  std::cout << "r0:                 " << fmt(cfg.r0) << "\n";
  std::cout << "seed:               " << seed << " (stream seed "
            << cfg.seed << ")\n";
  std::cout << "stopped by:         " << dfds::to_string(rec.terminated_by)
            << "\n";
  std::cout << "search evals:       " << rec.evals_used << "\n";
  std::cout << "improvements:       " << rec.iterations << "\n";
  std::cout << "f_final:            " << fmt(rec.f_final) << "\n";
  std::cout << "x_final:           ";
  for (double v : rec.x_final) std::cout << ' ' << fmt(v);
  std::cout << "\n";
  std::cout << "refine evals:       " << rec.refine_evals_used << "\n";
  std::cout << "f_refined:          " << fmt(fr) << "\n";
  std::cout << "x_refined:         ";
  for (double v : xr) std::cout << ' ' << fmt(v);
  std::cout << "\n";
  if (obj.known_optimum()) {
    std::cout << "f*:                 " << fmt(obj.known_optimum()->f_star)
              << "\n";
    std::cout << "epsilon-optimal:    "
              << (dfds::is_epsilon_optimal(obj, fr, epsilon) ? "yes" : "no")
              << " (epsilon " << fmt(epsilon) << ")\n";
  }
  if (rec.trace) {
    std::cout << "trace (improvement, f, x):\n";
    for (const dfds::TracePoint& t : *rec.trace) {
      std::cout << "  " << t.k << "  " << fmt(t.f) << " ";
      for (double v : t.x) std::cout << ' ' << fmt(v);
      std::cout << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------- bench ----

void apply_config_file(const std::string& path, const CLI::App* cmd,
                       dfds::ExperimentSpec& spec, std::string& out,
                       std::string& format) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  f >> j;

  const auto unset = [&](const std::string& flag) {
    return cmd->get_option(flag)->count() == 0;
  };
  if (j.contains("problem") && unset("--problem")) {
    spec.problem = dfds::benchmark_from_name(j["problem"].get<std::string>());
  }
  if (j.contains("dim") && unset("--dim")) spec.dim = j["dim"].get<int>();
  if (j.contains("algos") && unset("--algo")) {
    spec.algos.clear();
    for (const auto& name : j["algos"]) {
      spec.algos.push_back(dfds::algo_from_name(name.get<std::string>()));
    }
  }
  if (j.contains("budget_level") && unset("--budget-level")) {
    spec.budget_level =
        dfds::level_from_name(j["budget_level"].get<std::string>());
  }
  if (j.contains("n_feval") && unset("--n-feval")) {
    spec.n_feval = j["n_feval"].get<std::uint64_t>();
  }
  if (j.contains("runs") && unset("--runs")) {
    spec.runs = j["runs"].get<std::uint64_t>();
  }
  if (j.contains("base_seed") && unset("--base-seed")) {
    spec.base_seed = j["base_seed"].get<std::uint64_t>();
  }
  if (j.contains("epsilon") && unset("--epsilon")) {
    spec.epsilon = j["epsilon"].get<double>();
  }
  if (j.contains("r0_override") && unset("--r0")) {
    spec.r0_override = j["r0_override"].get<double>();
  }
  if (j.contains("refine_budget") && unset("--refine-budget")) {
    spec.refine_budget = j["refine_budget"].get<std::uint64_t>();
  }
  if (j.contains("workers") && unset("--workers")) {
    spec.workers = j["workers"].get<unsigned>();
  }
  if (j.contains("out") && unset("--out")) {
    out = j["out"].get<std::string>();
  }
  if (j.contains("format") && unset("--format")) {
    format = j["format"].get<std::string>();
  }
}

std::uint64_t count_errors(const dfds::ExperimentResult& res) {
  std::uint64_t n = 0;
  for (const auto& [algo, st] : res.stats) {
    for (const auto& r : st.per_run) {
      if (r.error) ++n;
    }
  }
  return n;
}

int run_bench(dfds::ExperimentSpec spec, const std::string& out,
              const std::string& format, bool full, int max_dim) {
  const dfds::OutputFormat of = format == "json" ? dfds::OutputFormat::json
                                                 : dfds::OutputFormat::csv;
  std::uint64_t errors = 0;

  if (!full) {
    if (!spec.budget_level && !spec.n_feval) {
      spec.budget_level = dfds::BudgetLevel::high;
    }
    const dfds::ExperimentResult res = dfds::run_experiment(spec);
    errors = count_errors(res);
    write_output(dfds::emit_results(res, of), out);
    if (errors != 0) {
      std::cerr << errors << " run(s) errored\n";
      return 1;
    }
    return 0;
  }

  // Full protocol: every budget level and, for the dimension-scaled
  // families, a dimension sweep that halts once at least two algorithms
  // drop below 50% success at the high budget.
  if (spec.budget_level || spec.n_feval) {
    throw CLI::ValidationError(
        "--full runs all budget levels; do not combine it with "
        "--budget-level or --n-feval");
  }
  const bool scaled = spec.problem == dfds::BenchmarkId::ackley ||
                      spec.problem == dfds::BenchmarkId::levy ||
                      spec.problem == dfds::BenchmarkId::alpine;
  std::vector<dfds::ExperimentResult> all;
  int dim = scaled ? 2 : spec.dim;
  for (;;) {
    bool halt = !scaled;
    for (dfds::BudgetLevel lvl : {dfds::BudgetLevel::low,
                                  dfds::BudgetLevel::medium,
                                  dfds::BudgetLevel::high}) {
      dfds::ExperimentSpec s = spec;
      s.dim = dim;
      s.budget_level = lvl;
      dfds::ExperimentResult res = dfds::run_experiment(s);
      errors += count_errors(res);
      if (lvl == dfds::BudgetLevel::high) {
        int weak = 0;
        for (const auto& [algo, st] : res.stats) {
          if (st.success_rate < 0.5) ++weak;
        }
        if (weak >= 2) halt = true;
      }
      all.push_back(std::move(res));
    }
    ++dim;
    if (halt || dim > max_dim) break;
  }

  std::string payload;
  if (of == dfds::OutputFormat::csv) {
    for (std::size_t i = 0; i < all.size(); ++i) {
      std::string block = dfds::emit_results(all[i], of);
      if (i > 0) block.erase(0, block.find('\n') + 1);  // keep one header
      payload += block;
    }
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& res : all) {
      arr.push_back(nlohmann::json::parse(dfds::emit_results(res, of)));
    }
    payload = arr.dump(2) + "\n";
  }
  write_output(payload, out);
  if (errors != 0) {
    std::cerr << errors << " run(s) errored\n";
    return 1;
  }
  return 0;
}

// --------------------------------------------------------------- theory ----

int run_theory_bounds(const std::vector<double>& b,
                      std::optional<std::uint64_t> directions) {
  dfds::BoundInputs in;
  in.f0_gap = b[0];
  in.epsilon = b[1];
  in.dim = static_cast<int>(b[2]);
  in.diameter = b[3];
  in.r_eps = b[4];
  in.validate();

  std::cout << "inputs: gap " << fmt(in.f0_gap) << ", epsilon "
            << fmt(in.epsilon) << ", dim " << in.dim << ", diameter "
            << fmt(in.diameter) << ", step radius " << fmt(in.r_eps) << "\n";

  const std::uint64_t kmax = dfds::k_max_bound(in.f0_gap, in.epsilon);
  std::cout << "iteration cap (descent quantum argument):    " << kmax
            << "\n";

  if (dfds::step_spans_domain(in)) {
    std::cout << "step radius covers the whole domain; the per-iteration "
                 "success probability is 1/2 and the walk is one step.\n";
    std::cout << "expected directions upper bound:             "
              << fmt(2.0 * static_cast<double>(kmax)) << "\n";
    std::cout << "expected evaluations upper bound:            "
              << fmt_bound(dfds::expected_evals_upper_bound(in)) << "\n";
    return 0;
  }

  const double alpha = dfds::worst_case_alpha(in.diameter, in.r_eps);
  std::cout << "worst-case useful-cone half-angle (radians): " << fmt(alpha)
            << "\n";
  const double p =
      dfds::cap_probability_closed_form({in.dim, alpha}).value;
  std::cout << "per-direction success probability >=         " << fmt(p)
            << "\n";
  if (directions) {
    std::cout << "success probability with " << *directions
              << " directions >=  "
              << fmt(dfds::success_probability_lower_bound(p, *directions))
              << "\n";
  }
  std::cout << "expected directions upper bound:             "
            << fmt_bound(dfds::expected_directions_upper_bound(in)) << "\n";
  std::cout << "expected evaluations upper bound:            "
            << fmt_bound(dfds::expected_evals_upper_bound(in)) << "\n";
  return 0;
}

int run_theory_fig3(int n_min, int n_max, double alpha) {
  const auto rows = dfds::emit_fig3_data(n_min, n_max, alpha);
  std::cout << "N,log10_p_exact,log10_p_lower_bound\n";
  for (const dfds::Fig3Row& r : rows) {
    std::cout << r.n << ',' << fmt(r.log10_exact) << ',';
    if (r.log10_lower) std::cout << fmt(*r.log10_lower);
    std::cout << "\n";
  }
  return 0;
}

// --------------------------------------------------------------- verify ----

int run_verify_cap(int n, double alpha, std::uint64_t mc_samples,
                   std::uint64_t mc_seed) {
  const dfds::CapSpec cap{n, alpha};
  const dfds::CapProbability closed =
      dfds::cap_probability_closed_form(cap);
  const dfds::CapProbability quad =
      dfds::cap_probability_quadrature(cap, 1e-13);
  dfds::RandomStream mc_rng(mc_seed);
  const dfds::CapProbability mc =
      dfds::cap_probability_monte_carlo(cap, mc_samples, mc_rng);

  std::cout << "spherical cap probability, dim " << n << ", colatitude "
            << fmt(alpha) << "\n";
  std::cout << "closed form:  " << fmt(closed.value) << "\n";
  std::cout << "quadrature:   " << fmt(quad.value) << "\n";
  std::cout << "monte carlo:  " << fmt(mc.value) << "  (std error "
            << fmt(mc.std_error) << ", " << mc_samples << " samples)\n";
  if (n >= 4 && alpha > 0.0 && alpha < M_PI / 2.0) {
    std::cout << "lower bound:  "
              << fmt(dfds::cap_probability_lower_bound(cap).value) << "\n";
  }

  const double scale = std::max({closed.value, quad.value, 1e-300});
  const double rel_cq = std::abs(closed.value - quad.value) / scale;
  const double z = mc.std_error > 0.0
                       ? std::abs(mc.value - closed.value) / mc.std_error
                       : 0.0;
  std::cout << "closed vs quadrature relative difference: " << fmt(rel_cq)
            << "\n";
  std::cout << "monte carlo z-score vs closed form:       " << fmt(z)
            << "\n";
  const bool ok = rel_cq <= 1e-8 && z <= 5.0;
  std::cout << (ok ? "AGREE" : "DISAGREE") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Derivative-free direct search with expanding step walks: solver, "
      "benchmark harness, and theory calculators"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "run one solver on a benchmark");
  std::string sv_problem = "six_hump_camel";
  int sv_dim = 2;
  std::string sv_algo = "dfds";
  std::uint64_t sv_budget = 500;
  std::uint64_t sv_seed = 0;
  double sv_r0 = 0.0;
  double sv_epsilon = 1e-4;
  std::uint64_t sv_refine = 0;
  bool sv_trace = false;
  solve->add_option("--problem", sv_problem,
                    "six_hump_camel|goldstein_price|ackley|levy|alpine");
  solve->add_option("--dim", sv_dim, "problem dimension");
  solve->add_option("--algo", sv_algo, "dfds|prs|ihr");
  solve->add_option("--budget", sv_budget, "objective evaluation budget");
  solve->add_option("--seed", sv_seed, "base seed");
  auto* sv_r0_opt =
      solve->add_option("--r0", sv_r0, "step radius (default: benchmark)");
  solve->add_option("--epsilon", sv_epsilon, "target accuracy");
  solve->add_option("--refine-budget", sv_refine,
                    "refinement evaluation cap (0: 200 per dimension)");
  solve->add_flag("--trace", sv_trace, "print the improvement trace");

  // bench
  auto* bench = app.add_subcommand("bench", "run a multi-seed experiment");
  std::string bn_problem = "six_hump_camel";
  int bn_dim = 2;
  std::vector<std::string> bn_algos;
  std::string bn_level;
  std::uint64_t bn_nfeval = 0;
  std::uint64_t bn_runs = 20;
  std::uint64_t bn_seed = 0;
  double bn_epsilon = 1e-4;
  double bn_r0 = 0.0;
  std::uint64_t bn_refine = 0;
  unsigned bn_workers = 0;
  std::string bn_out;
  std::string bn_format = "csv";
  std::string bn_config;
  bool bn_full = false;
  int bn_max_dim = 14;
  bench->add_option("--problem", bn_problem,
                    "six_hump_camel|goldstein_price|ackley|levy|alpine");
  bench->add_option("--dim", bn_dim, "problem dimension");
  bench->add_option("--algo", bn_algos,
                    "algorithms to run (repeatable; default: all)");
  bench->add_option("--budget-level", bn_level, "low|medium|high");
  bench->add_option("--n-feval", bn_nfeval, "explicit evaluation budget");
  bench->add_option("--runs", bn_runs, "independent runs per algorithm");
  bench->add_option("--base-seed", bn_seed, "base seed");
  bench->add_option("--epsilon", bn_epsilon, "target accuracy");
  bench->add_option("--r0", bn_r0, "step radius override");
  bench->add_option("--refine-budget", bn_refine,
                    "refinement evaluation cap (0: 200 per dimension)");
  bench->add_option("--workers", bn_workers,
                    "worker threads (0: hardware concurrency)");
  bench->add_option("--out", bn_out,
                    "output file ('-' or empty: stdout; relative paths "
                    "resolve under $DFDS_OUT_DIR)");
  bench->add_option("--format", bn_format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("--config", bn_config,
                    "JSON config file mirroring the experiment fields; "
                    "explicit flags override it");
  bench->add_flag("--full", bn_full,
                  "all budget levels, with a dimension sweep for the "
                  "dimension-scaled problems (halts once two algorithms "
                  "drop below 50% success at the high budget)");
  bench->add_option("--max-dim", bn_max_dim,
                    "dimension sweep safety cap for --full");

  // theory
  auto* theory =
      app.add_subcommand("theory", "bound calculators and figure data");
  std::vector<double> th_bounds;
  std::uint64_t th_dirs = 0;
  std::vector<double> th_fig3;
  auto* th_bounds_opt = theory->add_option(
      "--bounds", th_bounds,
      "gap epsilon dim diameter step_radius -> iteration/probability/"
      "evaluation bounds");
  th_bounds_opt->expected(5);
  auto* th_dirs_opt = theory->add_option(
      "--directions", th_dirs,
      "direction cap for the success-probability bound");
  std::ignore = th_dirs_opt;
  auto* th_fig3_opt = theory->add_option(
      "--fig3", th_fig3,
      "n_min n_max alpha -> cap probability decay table (CSV)");
  th_fig3_opt->expected(3);

  // verify
  auto* verify =
      app.add_subcommand("verify", "cross-check the cap probability");
  std::vector<double> vf_cap;
  std::uint64_t vf_samples = 2'000'000;
  std::uint64_t vf_seed = 12345;
  auto* vf_cap_opt = verify->add_option(
      "--cap-probability", vf_cap,
      "N alpha -> closed form vs quadrature vs Monte Carlo report");
  vf_cap_opt->expected(2);
  verify->add_option("--samples", vf_samples, "Monte Carlo sample count");
  verify->add_option("--seed", vf_seed, "Monte Carlo seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      std::optional<double> r0;
      if (sv_r0_opt->count() > 0) r0 = sv_r0;
      return run_solve(sv_problem, sv_dim, sv_algo, sv_budget, sv_seed, r0,
                       sv_epsilon, sv_trace, sv_refine);
    }
    if (bench->parsed()) {
      dfds::ExperimentSpec spec;
      spec.problem = dfds::benchmark_from_name(bn_problem);
      spec.dim = bn_dim;
      if (!bn_algos.empty()) {
        spec.algos.clear();
        for (const std::string& a : bn_algos) {
          spec.algos.push_back(dfds::algo_from_name(a));
        }
      }
      if (bench->get_option("--budget-level")->count() > 0) {
        spec.budget_level = dfds::level_from_name(bn_level);
      }
      if (bench->get_option("--n-feval")->count() > 0) {
        spec.n_feval = bn_nfeval;
      }
      spec.runs = bn_runs;
      spec.base_seed = bn_seed;
      spec.epsilon = bn_epsilon;
      if (bench->get_option("--r0")->count() > 0) spec.r0_override = bn_r0;
      spec.refine_budget = bn_refine;
      spec.workers = bn_workers;
      if (!bn_config.empty()) {
        apply_config_file(bn_config, bench, spec, bn_out, bn_format);
      }
      return run_bench(std::move(spec), bn_out, bn_format, bn_full,
                       bn_max_dim);
    }
    if (theory->parsed()) {
      if (th_bounds_opt->count() == 0 && th_fig3_opt->count() == 0) {
        throw CLI::ValidationError("theory needs --bounds or --fig3");
      }
      int rc = 0;
      if (th_bounds_opt->count() > 0) {
        std::optional<std::uint64_t> dirs;
        if (theory->get_option("--directions")->count() > 0) dirs = th_dirs;
        rc = run_theory_bounds(th_bounds, dirs);
      }
      if (rc == 0 && th_fig3_opt->count() > 0) {
        rc = run_theory_fig3(static_cast<int>(th_fig3[0]),
                             static_cast<int>(th_fig3[1]), th_fig3[2]);
      }
      return rc;
    }
    if (verify->parsed()) {
      if (vf_cap_opt->count() == 0) {
        throw CLI::ValidationError("verify needs --cap-probability");
      }
      return run_verify_cap(static_cast<int>(vf_cap[0]), vf_cap[1],
                            vf_samples, vf_seed);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
