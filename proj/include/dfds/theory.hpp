#pragma once

// Executable planning bounds for the fixed-step direct search: how many
// accepted iterates a run can have, how likely a direction batch is to
// succeed, the worst-case spherical-cap angle over a domain, and the
// resulting expected direction/evaluation counts, plus the Lipschitz step
// size recipe and a deterministic step-walk hit check.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "dfds/domain.hpp"
#include "dfds/geometry.hpp"
#include "dfds/vec.hpp"

namespace dfds {

struct BoundInputs {
  double f0_gap = 0.0;    // f(x0) - f*, objective units
  double epsilon = 1e-4;  // improvement tolerance
  int dim = 2;
  double diameter = 1.0;  // domain diameter D0
  double r_eps = 1.0;     // step size

  void validate() const {
    if (f0_gap < 0.0) {
      throw std::invalid_argument("BoundInputs: f0_gap must be nonnegative");
    }
    if (!(epsilon > 0.0)) {
      throw std::invalid_argument("BoundInputs: epsilon must be positive");
    }
    if (dim < 2) {
      throw std::invalid_argument("BoundInputs: dimension must be at least 2");
    }
    if (!(diameter > 0.0)) {
      throw std::invalid_argument("BoundInputs: diameter must be positive");
    }
    if (!(r_eps > 0.0)) {
      throw std::invalid_argument("BoundInputs: r_eps must be positive");
    }
  }
};

// True when a single step can span the whole domain.  Legal, but the bounds
// lose their geometric meaning, so planners should be warned.
inline bool step_spans_domain(const BoundInputs& inp) {
  inp.validate();
  return inp.r_eps >= inp.diameter;
}

// A bound value together with an underflow/overflow marker: for extreme
// dimensions the cap probability drops below the smallest double and the
// bound legitimately exceeds the representable range.
struct TheoryBound {
  double value = 0.0;
  bool overflowed = false;
};

namespace detail {

// floor(q) with a snap to the nearest integer when q sits within one part in
// 1e9 of it, so quotients like 1.0/(1e-4/3) == 29999.999999999996 land on the
// intended 30000 instead of one below it.
inline std::uint64_t robust_floor_count(double q) {
  if (q < 0.0) {
    throw std::domain_error("robust_floor_count: negative quotient");
  }
  if (q > 9.0e18) {
    throw std::overflow_error("robust_floor_count: quotient exceeds count range");
  }
  const double nearest = std::nearbyint(q);
  if (nearest >= 1.0 && std::abs(q - nearest) <= 1e-9 * std::max(1.0, q)) {
    return static_cast<std::uint64_t>(nearest);
  }
  return static_cast<std::uint64_t>(std::floor(q));
}

}  // namespace detail

// Largest possible number of accepted iterates: floor(gap / (epsilon/3)).
// Every accepted step descends by at least epsilon/3, so the descent path
// from f(x0) to f* cannot hold more steps than this.
inline std::uint64_t k_max_bound(double f0_gap, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("k_max_bound: epsilon must be positive");
  }
  if (f0_gap < 0.0) {
    throw std::domain_error("k_max_bound: gap must be nonnegative");
  }
  return detail::robust_floor_count(f0_gap / (epsilon / 3.0));
}

// 1 - (1-p)^M, the chance that at least one of M independent trials with
// per-trial success probability p succeeds, in a form stable for tiny p.
inline double success_probability_lower_bound(double p, std::uint64_t m) {
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw std::domain_error(
        "success_probability_lower_bound: p must lie in [0,1]");
  }
  if (m < 1) {
    throw std::invalid_argument(
        "success_probability_lower_bound: M must be at least 1");
  }
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  const double v = -std::expm1(static_cast<double>(m) * std::log1p(-p));
  return std::min(1.0, std::max(0.0, v));
}

// Smallest cap angle encountered anywhere in the domain:
// arcsin(sqrt(3) * r_eps / (2 * (D0 + r_eps))).  The argument is always
// below sqrt(3)/2, so the angle stays below pi/3.
inline double worst_case_alpha(double diameter, double r_eps) {
  if (!(diameter > 0.0) || !(r_eps > 0.0)) {
    throw std::invalid_argument("worst_case_alpha: inputs must be positive");
  }
  return std::asin(std::sqrt(3.0) * r_eps / (2.0 * (diameter + r_eps)));
}

// Expected number of sampled directions, bounded by k_max / p_{N,alpha} at
// the worst-case angle.  Underflow of the cap probability is reported as an
// infinite bound with the flag set rather than thrown.
inline TheoryBound expected_directions_upper_bound(const BoundInputs& inp) {
  inp.validate();
  const std::uint64_t kmax = k_max_bound(inp.f0_gap, inp.epsilon);
  if (kmax == 0) return {0.0, false};
  const double alpha = worst_case_alpha(inp.diameter, inp.r_eps);
  const double p = cap_probability_closed_form({inp.dim, alpha}).value;
  if (p <= 0.0) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  const double v = static_cast<double>(kmax) / p;
  return {v, std::isinf(v)};
}

// Expected number of objective evaluations: the direction bound times the
// per-direction walk length floor(D0 / r_eps) + 2.
inline TheoryBound expected_evals_upper_bound(const BoundInputs& inp) {
  const TheoryBound dirs = expected_directions_upper_bound(inp);
  if (dirs.overflowed) return dirs;
  const double steps = static_cast<double>(
                           detail::robust_floor_count(inp.diameter / inp.r_eps)) +
                       2.0;
  const double v = dirs.value * steps;
  return {v, std::isinf(v)};
}

// Step size recipe for an L-Lipschitz objective: min(R, epsilon / (3L)).
// Any move of at most this length changes f by at most epsilon/3.
inline double r_epsilon_lipschitz(double epsilon, double lipschitz,
                                  double r_cap) {
  if (!(epsilon > 0.0) || !(lipschitz > 0.0) || !(r_cap > 0.0)) {
    throw std::invalid_argument("r_epsilon_lipschitz: inputs must be positive");
  }
  return std::min(r_cap, epsilon / (3.0 * lipschitz));
}

// Deterministic walk check: does the step lattice x_k + j*r_eps*d pass
// through the closed ball of radius r_eps around x_star before leaving the
// r_eps-extended box?  For any direction within alpha_for(x_k, x_star,
// r_eps) of the target line this is guaranteed, because the lattice spacing
// cannot jump a chord of length at least r_eps.
inline bool cap_hit_guarantee_check(const Vec& x_k, const Vec& x_star,
                                    double r_eps, const UnitDirection& d,
                                    const BoxDomain& box) {
  if (!(r_eps > 0.0)) {
    throw std::invalid_argument("cap_hit_guarantee_check: r_eps must be positive");
  }
  require_same_dim(x_k, x_star, "cap_hit_guarantee_check");
  if (distance(x_k, x_star) <= r_eps) {
    throw std::invalid_argument(
        "cap_hit_guarantee_check: target already within one step");
  }
  if (!box.contains_extended(x_star, r_eps)) {
    throw std::invalid_argument(
        "cap_hit_guarantee_check: target outside the extended box");
  }
  for (std::uint64_t j = 1;; ++j) {
    const Vec p = axpy(x_k, static_cast<double>(j) * r_eps, d.components());
    if (!box.contains_extended(p, r_eps)) return false;
    if (distance(p, x_star) <= r_eps) return true;
  }
}

}  // namespace dfds
