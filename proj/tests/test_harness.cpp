#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dfds/harness.hpp"

using dfds::AggregateStats;
using dfds::Algo;
using dfds::BenchmarkId;
using dfds::BudgetLevel;
using dfds::ExperimentResult;
using dfds::ExperimentSpec;
using dfds::Vec;

namespace {

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string f;
  while (std::getline(in, f, ',')) fields.push_back(f);
  return fields;
}

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.problem = BenchmarkId::six_hump_camel;
  spec.dim = 2;
  spec.algos = {Algo::dfds, Algo::prs, Algo::ihr};
  spec.n_feval = 200;
  spec.runs = 2;
  spec.base_seed = 20240817;
  return spec;
}

}  // namespace

TEST_CASE("table defaults match the benchmark protocol", "[harness]") {
  {
    auto [n, r0] = dfds::default_parameters(BenchmarkId::goldstein_price, 2,
                                            BudgetLevel::high);
    REQUIRE(n == 500);
    REQUIRE(r0 == 0.2);
  }
  {
    auto [n, r0] =
        dfds::default_parameters(BenchmarkId::six_hump_camel, 2,
                                 BudgetLevel::low);
    REQUIRE(n == 125);
    REQUIRE(r0 == 0.5);
  }
  {
    auto [n, r0] =
        dfds::default_parameters(BenchmarkId::ackley, 5, BudgetLevel::low);
    REQUIRE(n == 125ULL * 32);
    REQUIRE(r0 == Catch::Approx(std::sqrt(5.0) / (2.0 * std::sqrt(2.0)))
                      .margin(1e-15));
  }
  {
    auto [n, r0] =
        dfds::default_parameters(BenchmarkId::alpine, 8, BudgetLevel::high);
    REQUIRE(n == 640000);
    REQUIRE(r0 == Catch::Approx(1.0).margin(1e-15));
  }
  {
    auto [n, r0] =
        dfds::default_parameters(BenchmarkId::levy, 14, BudgetLevel::high);
    REQUIRE(n == 8192000ULL);
    REQUIRE(r0 == Catch::Approx(std::sqrt(14.0) / (2.0 * std::sqrt(2.0)))
                      .margin(1e-15));
  }
  {
    auto [n, r0] =
        dfds::default_parameters(BenchmarkId::levy, 3, BudgetLevel::medium);
    REQUIRE(n == 2000);
    (void)r0;
  }
  {
    auto [n, r0] =
        dfds::default_parameters(BenchmarkId::alpine, 2, BudgetLevel::medium);
    REQUIRE(n == 5000);
    (void)r0;
  }
  REQUIRE_THROWS_AS(
      dfds::default_parameters(BenchmarkId::six_hump_camel, 3,
                               BudgetLevel::low),
      std::invalid_argument);
}

TEST_CASE("algo and level names round-trip", "[harness]") {
  for (Algo a : {Algo::dfds, Algo::prs, Algo::ihr}) {
    REQUIRE(dfds::algo_from_name(dfds::algo_name(a)) == a);
  }
  for (BudgetLevel l :
       {BudgetLevel::low, BudgetLevel::medium, BudgetLevel::high}) {
    REQUIRE(dfds::level_from_name(dfds::level_name(l)) == l);
  }
  REQUIRE_THROWS_AS(dfds::algo_from_name("cma-es"), std::invalid_argument);
  REQUIRE_THROWS_AS(dfds::level_from_name("ultra"), std::invalid_argument);
}

TEST_CASE("spec validation", "[harness]") {
  ExperimentSpec spec = small_spec();
  REQUIRE_NOTHROW(spec.validate());
  spec.runs = 0;
  REQUIRE_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = small_spec();
  spec.n_feval = 0;
  REQUIRE_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = small_spec();
  spec.n_feval.reset();  // neither a level nor an explicit budget
  REQUIRE_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = small_spec();
  spec.budget_level = BudgetLevel::low;  // both set is ambiguous
  REQUIRE_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = small_spec();
  spec.algos.clear();
  REQUIRE_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = small_spec();
  spec.epsilon = 0.0;
  REQUIRE_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("experiments are deterministic and emit identical bytes",
          "[harness]") {
  const ExperimentSpec spec = small_spec();
  const ExperimentResult a = dfds::run_experiment(spec);
  const ExperimentResult b = dfds::run_experiment(spec);

  REQUIRE(a.n_feval == 200);
  for (Algo algo : spec.algos) {
    const AggregateStats& sa = a.stats.at(algo);
    const AggregateStats& sb = b.stats.at(algo);
    REQUIRE(sa.success_rate == sb.success_rate);
    REQUIRE(sa.f_best == sb.f_best);
    REQUIRE(sa.per_run.size() == sb.per_run.size());
    for (std::size_t i = 0; i < sa.per_run.size(); ++i) {
      REQUIRE(sa.per_run[i].seed == sb.per_run[i].seed);
      REQUIRE(sa.per_run[i].evals_used == sb.per_run[i].evals_used);
      REQUIRE(sa.per_run[i].f_final == sb.per_run[i].f_final);
      REQUIRE(sa.per_run[i].f_refined == sb.per_run[i].f_refined);
    }
  }
  REQUIRE(dfds::emit_results(a, dfds::OutputFormat::csv) ==
          dfds::emit_results(b, dfds::OutputFormat::csv));
  REQUIRE(dfds::emit_results(a, dfds::OutputFormat::json) ==
          dfds::emit_results(b, dfds::OutputFormat::json));
}

TEST_CASE("worker count never changes the results", "[harness]") {
  ExperimentSpec spec = small_spec();
  spec.runs = 4;
  spec.workers = 1;
  const std::string serial = dfds::emit_results(dfds::run_experiment(spec),
                                                dfds::OutputFormat::csv);
  spec.workers = 4;
  const std::string parallel = dfds::emit_results(dfds::run_experiment(spec),
                                                  dfds::OutputFormat::csv);
  REQUIRE(serial == parallel);
}

TEST_CASE("adding an algorithm never perturbs another's runs", "[harness]") {
  ExperimentSpec lone = small_spec();
  lone.algos = {Algo::dfds};
  ExperimentSpec all = small_spec();

  const ExperimentResult r1 = dfds::run_experiment(lone);
  const ExperimentResult r2 = dfds::run_experiment(all);
  const auto& solo = r1.stats.at(Algo::dfds).per_run;
  const auto& with = r2.stats.at(Algo::dfds).per_run;
  REQUIRE(solo.size() == with.size());
  for (std::size_t i = 0; i < solo.size(); ++i) {
    REQUIRE(solo[i].seed == with[i].seed);
    REQUIRE(solo[i].f_final == with[i].f_final);
    REQUIRE(solo[i].f_refined == with[i].f_refined);
    REQUIRE(solo[i].evals_used == with[i].evals_used);
  }
}

TEST_CASE("csv shape, ordering, and the budget audit", "[harness]") {
  ExperimentSpec spec = small_spec();
  spec.runs = 3;
  const ExperimentResult res = dfds::run_experiment(spec);
  const std::string csv = dfds::emit_results(res, dfds::OutputFormat::csv);
  const auto lines = split_lines(csv);

  REQUIRE(lines.size() == 1 + 3 * 3);  // header + |algos| * runs
  REQUIRE(lines[0] ==
          "problem,dim,algo,budget_level,n_feval,run,seed,evals_used,"
          "f_final,f_refined,success");

  const std::vector<std::string> algo_order{"dfds", "dfds", "dfds", "prs",
                                            "prs",  "prs",  "ihr",  "ihr",
                                            "ihr"};
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_csv(lines[i]);
    REQUIRE(f.size() == 11);
    REQUIRE(f[0] == "six_hump_camel");
    REQUIRE(f[1] == "2");
    REQUIRE(f[2] == algo_order[i - 1]);
    REQUIRE(f[3] == "custom");  // explicit n_feval, no named level
    REQUIRE(f[4] == "200");
    REQUIRE(std::stoull(f[5]) == (i - 1) % 3);
    REQUIRE(std::stoull(f[7]) <= 200);  // evals_used <= n_feval
    REQUIRE((f[10] == "0" || f[10] == "1"));
    // Seed column equals the recorded per-run seed.
    const Algo algo = dfds::algo_from_name(f[2]);
    REQUIRE(std::stoull(f[6]) ==
            res.stats.at(algo).per_run[(i - 1) % 3].seed);
  }

  SECTION("single run emits exactly one data row") {
    ExperimentSpec one = small_spec();
    one.runs = 1;
    one.algos = {Algo::prs};
    const auto r = dfds::run_experiment(one);
    const auto l = split_lines(dfds::emit_results(r, dfds::OutputFormat::csv));
    REQUIRE(l.size() == 2);
  }
}

TEST_CASE("success flag encodes epsilon-optimality of the refined value",
          "[harness]") {
  ExperimentSpec spec;
  spec.problem = BenchmarkId::six_hump_camel;
  spec.dim = 2;
  spec.algos = {Algo::dfds, Algo::prs};
  spec.budget_level = BudgetLevel::high;
  spec.runs = 3;
  spec.base_seed = 9;
  const ExperimentResult res = dfds::run_experiment(spec);
  const std::string csv = dfds::emit_results(res, dfds::OutputFormat::csv);
  const double f_star = -1.0316;
  for (std::size_t i = 1; i < split_lines(csv).size(); ++i) {
    const auto f = split_csv(split_lines(csv)[i]);
    const double f_refined = std::stod(f[9]);
    const bool expect = f_refined <= f_star + spec.epsilon;
    REQUIRE(f[10] == (expect ? "1" : "0"));
  }
}

TEST_CASE("aggregate invariants hold", "[harness]") {
  ExperimentSpec spec = small_spec();
  spec.runs = 5;
  const ExperimentResult res = dfds::run_experiment(spec);
  for (const auto& [algo, st] : res.stats) {
    REQUIRE(st.success_rate >= 0.0);
    REQUIRE(st.success_rate <= 1.0);
    for (const auto& r : st.per_run) {
      REQUIRE(st.f_best <= r.f_refined);
      REQUIRE(r.f_refined <= r.f_final + 1e-12);
      REQUIRE(r.evals_used <= res.n_feval);
    }
  }
}

TEST_CASE("run errors are counted in the denominator and surfaced",
          "[harness]") {
  ExperimentSpec spec = small_spec();
  spec.runs = 3;
  spec.algos = {Algo::dfds, Algo::prs};
  // Injected factory yields an objective that always evaluates non-finite.
  auto factory = [](BenchmarkId, int dim) {
    dfds::Objective bad(dim, [](const Vec&) {
      return std::numeric_limits<double>::quiet_NaN();
    });
    return std::pair(std::move(bad),
                     dfds::BoxDomain(Vec(dim, -1.0), Vec(dim, 1.0)));
  };
  const ExperimentResult res = dfds::run_experiment(spec, factory);
  for (const auto& [algo, st] : res.stats) {
    REQUIRE(st.success_rate == 0.0);
    REQUIRE(st.per_run.size() == 3);
    for (const auto& r : st.per_run) {
      REQUIRE(r.error.has_value());
      REQUIRE_FALSE(r.success);
    }
    REQUIRE(std::isnan(st.f_best));
  }
  // Emission still works and surfaces the errors.
  const std::string json = dfds::emit_results(res, dfds::OutputFormat::json);
  const auto parsed = nlohmann::json::parse(json);
  REQUIRE(parsed["algorithms"]["dfds"]["errors"].size() == 3);
  const std::string csv = dfds::emit_results(res, dfds::OutputFormat::csv);
  REQUIRE(split_lines(csv).size() == 1 + 2 * 3);
}

TEST_CASE("json output mirrors the aggregate cells and round-trips",
          "[harness]") {
  ExperimentSpec spec = small_spec();
  spec.runs = 2;
  const ExperimentResult res = dfds::run_experiment(spec);
  const std::string json = dfds::emit_results(res, dfds::OutputFormat::json);
  const auto j = nlohmann::json::parse(json);

  REQUIRE(j["problem"] == "six_hump_camel");
  REQUIRE(j["dim"] == 2);
  REQUIRE(j["budget_level"] == "custom");
  REQUIRE(j["n_feval"] == 200);
  REQUIRE(j["runs"] == 2);
  REQUIRE(j["base_seed"] == 20240817);
  for (Algo a : spec.algos) {
    const auto& cell = j["algorithms"][dfds::algo_name(a)];
    REQUIRE(cell["success_rate"] == res.stats.at(a).success_rate);
    REQUIRE(cell["f_best"] == res.stats.at(a).f_best);
    REQUIRE(cell["runs"].size() == 2);
  }
}

TEST_CASE("high-budget reference results hold on the easy 2-D problems",
          "[harness]") {
  ExperimentSpec spec;
  spec.problem = BenchmarkId::goldstein_price;
  spec.dim = 2;
  spec.algos = {Algo::dfds, Algo::prs, Algo::ihr};
  spec.budget_level = BudgetLevel::high;
  spec.runs = 20;
  spec.base_seed = 1234;
  const ExperimentResult res = dfds::run_experiment(spec);
  for (Algo a : spec.algos) {
    INFO("algo " << dfds::algo_name(a));
    REQUIRE(res.stats.at(a).success_rate >= 0.9);
  }
}

TEST_CASE("moderate-dimension ordering: direct search beats blind sampling",
          "[harness]") {
  ExperimentSpec spec;
  spec.problem = BenchmarkId::ackley;
  spec.dim = 5;
  spec.algos = {Algo::dfds, Algo::prs};
  spec.budget_level = BudgetLevel::high;
  spec.runs = 20;
  spec.base_seed = 77;
  const ExperimentResult res = dfds::run_experiment(spec);
  const double sr_dfds = res.stats.at(Algo::dfds).success_rate;
  const double sr_prs = res.stats.at(Algo::prs).success_rate;
  REQUIRE(sr_dfds >= 0.8);
  REQUIRE(sr_dfds >= sr_prs);
}

TEST_CASE("cap probability figure data", "[harness]") {
  const double alpha = M_PI / 4.0;
  const auto rows = dfds::emit_fig3_data(2, 40, alpha);
  REQUIRE(rows.size() == 39);
  REQUIRE(rows[0].n == 2);
  REQUIRE(rows[0].log10_exact ==
          Catch::Approx(std::log10(0.25)).margin(1e-12));
  REQUIRE_FALSE(rows[0].log10_lower.has_value());
  REQUIRE(rows[1].log10_exact ==
          Catch::Approx(std::log10((1.0 - std::sqrt(2.0) / 2.0) / 2.0))
              .margin(1e-12));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(rows[i].n == static_cast<int>(i) + 2);
    if (i > 0) REQUIRE(rows[i].log10_exact < rows[i - 1].log10_exact);
    if (rows[i].n >= 4) {
      REQUIRE(rows[i].log10_lower.has_value());
      REQUIRE(*rows[i].log10_lower <= rows[i].log10_exact);
    } else {
      REQUIRE_FALSE(rows[i].log10_lower.has_value());
    }
  }
  REQUIRE_THROWS_AS(dfds::emit_fig3_data(1, 10, alpha),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(dfds::emit_fig3_data(10, 2, alpha),
                    std::invalid_argument);
}
