#pragma once

// The three randomized solvers plus the post-run local refinement step.
//
//  * dfds_run — fixed-step direct search: sample a direction, march along it
//    in multiples of r0 while staying within the r0-extended box, accept the
//    first point that improves the incumbent by at least epsilon/3.
//  * prs_run — pure random search over the box.
//  * ihr_run — improving hit-and-run along uniformly sampled chords.
//  * refine_local — bounded simplex descent (reflect/expand/contract/shrink)
//    used to polish a solver's final point.
//
// All solvers observe a common evaluation-budget contract: at most
// cfg.budget objective evaluations in the search phase, with refinement
// evaluations accounted separately in RunRecord::refine_evals_used.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dfds/domain.hpp"
#include "dfds/geometry.hpp"
#include "dfds/objectives.hpp"
#include "dfds/random.hpp"
#include "dfds/vec.hpp"

namespace dfds {

inline constexpr std::uint64_t kUnboundedDirections =
    std::numeric_limits<std::uint64_t>::max();

struct SolverConfig {
  double epsilon = 1e-4;   // objective-units improvement tolerance
  double r0 = 1.0;         // step size, decision-variable units
  std::uint64_t max_directions = kUnboundedDirections;
  std::uint64_t budget = 1000;  // search-phase evaluation budget
  std::uint64_t seed = 0;
  bool record_trace = false;

  void validate() const {
    if (!(epsilon > 0.0)) {
      throw std::invalid_argument("SolverConfig: epsilon must be positive");
    }
    if (!(r0 > 0.0)) {
      throw std::invalid_argument("SolverConfig: r0 must be positive");
    }
    if (budget < 1) {
      throw std::invalid_argument("SolverConfig: budget must be at least 1");
    }
  }
};

enum class StopReason { budget, direction_cap, refined };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::budget: return "budget";
    case StopReason::direction_cap: return "direction_cap";
    case StopReason::refined: return "refined";
  }
  return "unknown";
}

struct TracePoint {
  std::uint64_t k = 0;
  Vec x;
  double f = 0.0;
};

struct RunRecord {
  Vec x_final;
  double f_final = 0.0;
  Vec x_refined;
  double f_refined = 0.0;
  std::uint64_t evals_used = 0;
  std::uint64_t refine_evals_used = 0;
  std::uint64_t iterations = 0;  // accepted steps
  StopReason terminated_by = StopReason::budget;
  std::optional<std::vector<TracePoint>> trace;
};

namespace detail {

inline void check_solver_inputs(const Objective& obj, const BoxDomain& box,
                                const SolverConfig& cfg) {
  cfg.validate();
  if (obj.dim() != box.dim()) {
    throw std::invalid_argument("solver: objective/domain dimension mismatch");
  }
}

inline void check_start_point(const BoxDomain& box, const Vec& x0) {
  if (static_cast<int>(x0.size()) != box.dim()) {
    throw std::invalid_argument("solver: start point has wrong dimension");
  }
  if (!box.contains(x0)) {
    throw std::invalid_argument("solver: start point outside the domain");
  }
}

}  // namespace detail

// Fixed-step direct search.  From the current iterate, sample directions
// uniformly on the sphere; walk each one in steps r0, 2*r0, ... while the
// probe stays within distance r0 of the box; accept the first probe whose
// value improves the incumbent by at least epsilon/3, which resets the
// consecutive-failure count.  A direction is abandoned (without spending an
// evaluation) as soon as a probe leaves the extended set.  The run stops when
// the budget is spent or max_directions consecutive directions fail; the
// reported point is the final iterate projected back onto the box.
inline RunRecord dfds_run(Objective& obj, const BoxDomain& box,
                          const SolverConfig& cfg, const Vec& x0) {
  detail::check_solver_inputs(obj, box, cfg);
  detail::check_start_point(box, x0);

  RandomStream rng(cfg.seed);
  const double quantum = cfg.epsilon / 3.0;

  RunRecord rec;
  Vec x = x0;
  double fx = obj(x);
  rec.evals_used = 1;
  if (cfg.record_trace) {
    rec.trace.emplace();
    rec.trace->push_back({0, x, fx});
  }

  std::uint64_t failures = 0;  // consecutive abandoned directions
  std::uint64_t sterile = 0;   // consecutive directions with zero evaluations
  StopReason reason = StopReason::budget;
  while (true) {
    if (rec.evals_used >= cfg.budget) {
      reason = StopReason::budget;
      break;
    }
    if (failures >= cfg.max_directions) {
      reason = StopReason::direction_cap;
      break;
    }
    const UnitDirection dir = sample_unit_direction(box.dim(), rng);
    const Vec& d = dir.components();

    bool accepted = false;
    bool evaluated_any = false;
    bool out_of_budget = false;
    for (std::uint64_t j = 1;; ++j) {
      Vec y = axpy(x, static_cast<double>(j) * cfg.r0, d);
      if (!box.contains_extended(y, cfg.r0)) break;  // abandon, free of charge
      if (rec.evals_used >= cfg.budget) {
        out_of_budget = true;
        break;
      }
      const double fy = obj(y);
      ++rec.evals_used;
      evaluated_any = true;
      if (fy <= fx - quantum) {
        x = std::move(y);
        fx = fy;
        ++rec.iterations;
        accepted = true;
        if (rec.trace) rec.trace->push_back({rec.iterations, x, fx});
        break;
      }
    }
    if (out_of_budget) {
      reason = StopReason::budget;
      break;
    }
    if (accepted) {
      failures = 0;
      sterile = 0;
      continue;
    }
    ++failures;
    if (evaluated_any) {
      sterile = 0;
    } else if (++sterile > 10'000'000) {
      // Safeguard against a step size so large that no probe from a
      // shell iterate ever lands in the extended set.
      throw std::runtime_error(
          "dfds_run: step size appears too large for the domain");
    }
  }

  rec.x_final = box.project(x);
  if (rec.x_final == x) {
    rec.f_final = fx;  // value already known, no extra evaluation
  } else {
    rec.f_final = obj(rec.x_final);
    rec.refine_evals_used = 1;
  }
  rec.x_refined = rec.x_final;
  rec.f_refined = rec.f_final;
  rec.terminated_by = reason;
  return rec;
}

// Pure random search: draw cfg.budget points uniformly over the box and keep
// the best one, first-wins on ties.
inline RunRecord prs_run(Objective& obj, const BoxDomain& box,
                         const SolverConfig& cfg) {
  detail::check_solver_inputs(obj, box, cfg);

  RandomStream rng(cfg.seed);
  RunRecord rec;
  if (cfg.record_trace) rec.trace.emplace();
  Vec best_x;
  double best_f = 0.0;
  for (std::uint64_t i = 0; i < cfg.budget; ++i) {
    Vec x = box.sample_uniform(rng);
    const double fx = obj(x);
    ++rec.evals_used;
    if (i == 0 || fx < best_f) {
      if (i > 0) ++rec.iterations;
      best_f = fx;
      best_x = std::move(x);
      if (rec.trace) rec.trace->push_back({rec.iterations, best_x, best_f});
    }
  }
  rec.x_final = std::move(best_x);
  rec.f_final = best_f;
  rec.x_refined = rec.x_final;
  rec.f_refined = rec.f_final;
  rec.terminated_by = StopReason::budget;
  return rec;
}

// Improving hit-and-run: sample a direction, draw a candidate uniformly on
// the chord of the box through the iterate along that direction, and accept
// on strict improvement.  Stops on budget exhaustion or max_directions
// consecutive rejections.
inline RunRecord ihr_run(Objective& obj, const BoxDomain& box,
                         const SolverConfig& cfg, const Vec& x0) {
  detail::check_solver_inputs(obj, box, cfg);
  detail::check_start_point(box, x0);

  RandomStream rng(cfg.seed);
  RunRecord rec;
  Vec x = x0;
  double fx = obj(x);
  rec.evals_used = 1;
  if (cfg.record_trace) {
    rec.trace.emplace();
    rec.trace->push_back({0, x, fx});
  }

  std::uint64_t rejections = 0;
  StopReason reason = StopReason::budget;
  while (true) {
    if (rec.evals_used >= cfg.budget) {
      reason = StopReason::budget;
      break;
    }
    if (rejections >= cfg.max_directions) {
      reason = StopReason::direction_cap;
      break;
    }
    const UnitDirection dir = sample_unit_direction(box.dim(), rng);
    const Chord chord = box.chord_interval(x, dir);
    const double t = rng.uniform(chord.t_lo, chord.t_hi);
    // Projection guards against the candidate drifting a few ulps outside.
    Vec y = box.project(axpy(x, t, dir.components()));
    const double fy = obj(y);
    ++rec.evals_used;
    if (fy < fx) {
      x = std::move(y);
      fx = fy;
      ++rec.iterations;
      rejections = 0;
      if (rec.trace) rec.trace->push_back({rec.iterations, x, fx});
    } else {
      ++rejections;
    }
  }

  rec.x_final = std::move(x);
  rec.f_final = fx;
  rec.x_refined = rec.x_final;
  rec.f_refined = rec.f_final;
  rec.terminated_by = reason;
  return rec;
}

// Bounded simplex descent confined to the box by projection.  Uses the
// classic reflect(1)/expand(2)/contract(0.5)/shrink(0.5) coefficients, spends
// at most refine_budget evaluations (0 selects the default of 200 per
// dimension), and returns the best point seen — never worse than the input.
inline std::pair<Vec, double> refine_local(Objective& obj,
                                           const BoxDomain& box, const Vec& x,
                                           std::uint64_t refine_budget = 0) {
  detail::check_start_point(box, x);
  if (obj.dim() != box.dim()) {
    throw std::invalid_argument("refine_local: dimension mismatch");
  }
  const int n = box.dim();
  const std::uint64_t budget =
      refine_budget == 0 ? 200 * static_cast<std::uint64_t>(n) : refine_budget;

  std::uint64_t evals = 0;
  Vec best_x = x;
  double best_f = std::numeric_limits<double>::infinity();
  bool have_best = false;

  // Projects, evaluates, and tracks the best point; empty when out of budget.
  auto probe = [&](Vec p) -> std::optional<std::pair<Vec, double>> {
    if (evals >= budget) return std::nullopt;
    p = box.project(std::move(p));
    const double f = obj(p);
    ++evals;
    if (!have_best || f < best_f) {
      best_f = f;
      best_x = p;
      have_best = true;
    }
    return std::make_pair(std::move(p), f);
  };

  struct Vertex {
    Vec x;
    double f;
  };

  auto seed = probe(x);
  if (!seed) return {best_x, best_f};  // zero budget leaves the input as-is

  std::vector<Vertex> simplex;
  simplex.push_back({seed->first, seed->second});
  for (int i = 0; i < n; ++i) {
    Vec v = x;
    double h = 0.05 * (box.upper()[i] - box.lower()[i]);
    if (v[i] + h > box.upper()[i]) h = -h;
    v[i] += h;
    auto r = probe(std::move(v));
    if (!r) return {best_x, best_f};
    simplex.push_back({r->first, r->second});
  }

  const double rho = 1.0, chi = 2.0, gamma = 0.5, sigma = 0.5;
  while (evals < budget) {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    double diam = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      diam = std::max(diam, distance(simplex[i].x, simplex[0].x));
    }
    if (diam < 1e-10) break;

    Vec centroid(n, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < n; ++c) centroid[c] += simplex[i].x[c];
    }
    for (int c = 0; c < n; ++c) centroid[c] /= n;
    Vertex& worst = simplex.back();
    const Vec away = sub(centroid, worst.x);

    auto reflected = probe(axpy(centroid, rho, away));
    if (!reflected) break;
    if (reflected->second < simplex[0].f) {
      auto expanded = probe(axpy(centroid, rho * chi, away));
      if (expanded && expanded->second < reflected->second) {
        worst = {expanded->first, expanded->second};
      } else {
        worst = {reflected->first, reflected->second};
      }
      continue;
    }
    if (reflected->second < simplex[simplex.size() - 2].f) {
      worst = {reflected->first, reflected->second};
      continue;
    }
    if (reflected->second < worst.f) {
      auto outside = probe(axpy(centroid, gamma * rho, away));
      if (!outside) break;
      if (outside->second <= reflected->second) {
        worst = {outside->first, outside->second};
        continue;
      }
    } else {
      auto inside = probe(axpy(centroid, -gamma, away));
      if (!inside) break;
      if (inside->second < worst.f) {
        worst = {inside->first, inside->second};
        continue;
      }
    }
    // Shrink everything toward the best vertex.
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      Vec v = simplex[0].x;
      axpy_inplace(v, sigma, sub(simplex[i].x, simplex[0].x));
      auto r = probe(std::move(v));
      if (!r) return {best_x, best_f};
      simplex[i] = {r->first, r->second};
    }
  }
  return {best_x, best_f};
}

}  // namespace dfds
