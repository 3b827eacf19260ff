#pragma once

// Uniform sampling on the unit sphere S^(N-1) and the spherical-cap
// probability p(N, alpha): the chance that a uniformly random direction lies
// within angle alpha of a fixed axis. Four evaluation routes are provided --
// parity-cased closed forms, a parity lower bound, adaptive quadrature of the
// defining integral, and Monte Carlo -- so each can serve as an oracle for
// the others.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dfds/random.hpp"
#include "dfds/vec.hpp"

namespace dfds {

class UnitDirection {
 public:
  explicit UnitDirection(Vec components) : v_(std::move(components)) {
    if (v_.empty()) {
      throw std::invalid_argument("UnitDirection: dimension must be >= 1");
    }
    if (std::abs(norm(v_) - 1.0) > 1e-12) {
      throw std::invalid_argument("UnitDirection: norm must be 1 within 1e-12");
    }
  }

  int dim() const { return static_cast<int>(v_.size()); }
  double operator[](std::size_t i) const { return v_[i]; }
  const Vec& components() const { return v_; }

 private:
  Vec v_;
};

struct CapSpec {
  int dimension = 2;       // N >= 2 for the probability formulas
  double colatitude = 0.0; // alpha in [0, pi]
};

enum class CapMethod { closed_form, lower_bound, quadrature, monte_carlo };

struct CapProbability {
  double value = 0.0;
  CapMethod method = CapMethod::closed_form;
  double std_error = 0.0;  // 0 for deterministic methods
};

namespace detail {

inline void validate_cap(const CapSpec& cap, int min_dim = 2) {
  if (cap.dimension < min_dim) {
    throw std::invalid_argument("cap probability: dimension must be >= " +
                                std::to_string(min_dim));
  }
  if (!(cap.colatitude >= 0.0 && cap.colatitude <= std::numbers::pi)) {
    throw std::domain_error("cap probability: colatitude must be in [0, pi]");
  }
}

// log(n!!) with the empty-product convention 0!! = (-1)!! = 1.
inline double log_double_factorial(int n) {
  if (n <= 0) return 0.0;
  if (n % 2 == 0) {
    const int m = n / 2;  // n!! = 2^m * m!
    return m * std::numbers::ln2 + std::lgamma(m + 1.0);
  }
  const int m = (n - 1) / 2;  // n!! = (2m+1)! / (2^m * m!)
  return std::lgamma(n + 1.0) - m * std::numbers::ln2 - std::lgamma(m + 1.0);
}

// Gauss 7 / Kronrod 15 rule on [a, b]: returns {integral, error estimate}.
template <class F>
std::pair<double, double> gauss_kronrod_15(const F& f, double a, double b) {
  static constexpr double xgk[8] = {
      0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
      0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
      0.2077849550078985, 0.0};
  static constexpr double wgk[8] = {
      0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
      0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
      0.2044329400752989, 0.2094821410847278};
  static constexpr double wg[4] = {0.1294849661688697, 0.2797053914892766,
                                   0.3818300505051189, 0.4179591836734694};
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = wgk[7] * fc;
  double gauss = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double x = h * xgk[i];
    const double fsum = f(c - x) + f(c + x);
    kronrod += wgk[i] * fsum;
    if (i % 2 == 1) gauss += wg[i / 2] * fsum;
  }
  kronrod *= h;
  gauss *= h;
  return {kronrod, std::abs(kronrod - gauss)};
}

// Adaptive bisection driver with an absolute tolerance budget split
// proportionally to panel width. Panel cap guards against runaway loops.
template <class F>
double integrate_adaptive(const F& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  struct Panel {
    double a, b;
  };
  std::vector<Panel> stack{{a, b}};
  const double span = b - a;
  double total = 0.0;
  int panels = 0;
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    if (++panels > 10000) {
      throw std::runtime_error("quadrature failed to converge within the panel cap");
    }
    const auto [value, err] = gauss_kronrod_15(f, p.a, p.b);
    if (err <= tol * ((p.b - p.a) / span) || (p.b - p.a) < 1e-14) {
      total += value;
    } else {
      const double m = 0.5 * (p.a + p.b);
      stack.push_back({p.a, m});
      stack.push_back({m, p.b});
    }
  }
  return total;
}

}  // namespace detail

// Uniform direction on S^(dim-1): normalized standard Gaussian vector. Odd
// dimensions consume a full Box-Muller pair for the last coordinate so the
// draw count per attempt is fixed at 2*ceil(dim/2); underflowing norms
// (< 1e-300) trigger a redraw.
inline UnitDirection sample_unit_direction(int dim, RandomStream& rng) {
  if (dim < 1) {
    throw std::invalid_argument("sample_unit_direction: dimension must be >= 1");
  }
  if (dim == 1) {
    return UnitDirection(Vec{rng.uniform01() < 0.5 ? -1.0 : 1.0});
  }
  Vec v(dim);
  while (true) {
    for (int i = 0; i + 1 < dim; i += 2) {
      const auto [z0, z1] = rng.normal_pair();
      v[i] = z0;
      v[i + 1] = z1;
    }
    if (dim % 2 == 1) {
      v[dim - 1] = rng.normal_pair().first;
    }
    const double n = norm(v);
    if (n >= 1e-300) {
      for (double& c : v) c /= n;
      // Renormalize once more: a single pass can leave ~2 ulp of drift in
      // high dimensions.
      const double n2 = norm(v);
      for (double& c : v) c /= n2;
      return UnitDirection(std::move(v));
    }
  }
}

inline double angle_between(const Vec& u, const Vec& v) {
  require_same_dim(u, v, "angle_between");
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) {
    throw std::domain_error("angle_between: zero vector has no direction");
  }
  const double c = std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
  return std::acos(c);
}

// Cap half-angle guaranteeing a chord of length >= r_eps through the ball
// B(x_star, r_eps): alpha = arcsin(sqrt(3) * r_eps / (2 * dist)).
inline double alpha_for(const Vec& x_k, const Vec& x_star, double r_eps) {
  if (r_eps <= 0.0) {
    throw std::invalid_argument("alpha_for: r_eps must be positive");
  }
  const double d = distance(x_star, x_k);
  if (d <= r_eps) {
    throw std::domain_error(
        "alpha_for: iterate is already within r_eps of the target");
  }
  return std::asin(std::sqrt(3.0) * r_eps / (2.0 * d));
}

// Surface area of S^m embedded in R^(m+1): w_m = 2 pi^((m+1)/2) / Gamma((m+1)/2).
// m = 0 returns 2 by convention (counting measure of the two-point sphere).
inline double sphere_surface_area(int dim_minus_1) {
  if (dim_minus_1 < 0) {
    throw std::invalid_argument("sphere_surface_area: dimension must be >= 0");
  }
  if (dim_minus_1 == 0) return 2.0;
  const double n = dim_minus_1 + 1;
  return std::exp(std::numbers::ln2 + 0.5 * n * std::log(std::numbers::pi) -
                  std::lgamma(0.5 * n));
}

// Parity-cased closed forms. The finite sums are accumulated via term
// ratios, never materializing double factorials.
inline CapProbability cap_probability_closed_form(const CapSpec& cap) {
  detail::validate_cap(cap);
  const int n = cap.dimension;
  const double a = cap.colatitude;
  const double s = std::sin(a);
  const double c = std::cos(a);
  const double s2 = s * s;
  // The parity sums below telescope against alpha (even n) or 1/cos(alpha)
  // (odd n): the series c*s*sum_t (2t)!!/(2t+1)!! sin^(2t) converges to
  // alpha, and sum_t (2t-1)!!/(2t)!! sin^(2t) converges to 1/cos (binomial
  // series), both for alpha < pi/2.  A small cap makes the direct difference
  // cancel almost completely, so in that regime the complementary positive
  // tail of the same series is summed instead — the identical quantity,
  // evaluated without cancellation.
  const bool use_tail = a < std::numbers::pi / 2 && s2 <= 0.99;
  auto sum_tail = [s2](double term, int start_t, bool even) {
    double tail = 0.0;
    for (int t = start_t; t < start_t + 2000000; ++t) {
      tail += term;
      const double ratio =
          even ? (2.0 * t) / (2.0 * t + 1.0) : (2.0 * t - 1.0) / (2.0 * t);
      const double next = term * ratio * s2;
      if (!(next > tail * 1e-18)) break;
      term = next;
    }
    return tail;
  };
  double p;
  if (n == 2) {
    p = a / std::numbers::pi;
  } else if (n == 3) {
    const double h = std::sin(0.5 * a);
    p = h * h;  // == (1 - cos a)/2, exact and stable for small caps
  } else if (n % 2 == 0) {
    // p = (alpha - sum_{t=0}^{n/2-2} (2t)!!/(2t+1)!! cos(a) sin^(2t+1)(a)) / pi
    double term = c * s;
    if (use_tail) {
      for (int t = 1; t <= n / 2 - 1; ++t) {
        term *= (2.0 * t) / (2.0 * t + 1.0) * s2;
      }
      p = sum_tail(term, n / 2, true) / std::numbers::pi;
    } else {
      double sum = term;
      for (int t = 1; t <= n / 2 - 2; ++t) {
        term *= (2.0 * t) / (2.0 * t + 1.0) * s2;
        sum += term;
      }
      p = (a - sum) / std::numbers::pi;
    }
  } else {
    // p = (1 - cos(a) * (1 + sum_{t=1}^{(n-3)/2} (2t-1)!!/(2t)!! sin^(2t)(a))) / 2
    if (use_tail) {
      double term = 1.0;
      for (int t = 1; t <= (n - 3) / 2 + 1; ++t) {
        term *= (2.0 * t - 1.0) / (2.0 * t) * s2;
      }
      p = 0.5 * c * sum_tail(term, (n - 3) / 2 + 2, false);
    } else {
      double term = 1.0;
      double inner = 1.0;
      for (int t = 1; t <= (n - 3) / 2; ++t) {
        term *= (2.0 * t - 1.0) / (2.0 * t) * s2;
        inner += term;
      }
      p = 0.5 * (1.0 - c * inner);
    }
  }
  return {std::clamp(p, 0.0, 1.0), CapMethod::closed_form, 0.0};
}

// Parity lower bounds, valid for N >= 4 and alpha in (0, pi/2). Prefactors
// are double-factorial ratios evaluated in log space.
inline CapProbability cap_probability_lower_bound(const CapSpec& cap) {
  if (cap.dimension < 4) {
    throw std::invalid_argument(
        "cap_probability_lower_bound: requires dimension >= 4");
  }
  if (!(cap.colatitude > 0.0 && cap.colatitude < std::numbers::pi / 2)) {
    throw std::domain_error(
        "cap_probability_lower_bound: colatitude must lie in (0, pi/2)");
  }
  const int n = cap.dimension;
  const double a = cap.colatitude;
  const double log_s = std::log(std::sin(a));
  const double log_c = std::log(std::cos(a));
  double log_value;
  if (n % 2 == 0) {
    // (n-2)!! / (pi * n * (n-3)!!) * cos(a) * sin^n(a)
    log_value = detail::log_double_factorial(n - 2) -
                detail::log_double_factorial(n - 3) -
                std::log(std::numbers::pi * n) + log_c + n * log_s;
  } else {
    // (n-2)!! / (2 * (n-1)!!) * cos(a) * sin^(n-1)(a)
    log_value = detail::log_double_factorial(n - 2) -
                detail::log_double_factorial(n - 1) - std::numbers::ln2 +
                log_c + (n - 1) * log_s;
  }
  const double v = std::exp(log_value);
  return {std::clamp(v, 0.0, 1.0), CapMethod::lower_bound, 0.0};
}

// Defining integral: p = (w_(N-2) / w_(N-1)) * integral_0^alpha sin^(N-2).
// Independent evaluation path used as the oracle for the closed forms.
inline CapProbability cap_probability_quadrature(const CapSpec& cap,
                                                 double tol) {
  detail::validate_cap(cap);
  if (!(tol > 0.0)) {
    throw std::invalid_argument(
        "cap_probability_quadrature: tolerance must be positive");
  }
  const int n = cap.dimension;
  // w_(N-2)/w_(N-1) = Gamma(N/2) / (sqrt(pi) * Gamma((N-1)/2))
  const double ratio = std::exp(std::lgamma(0.5 * n) -
                                std::lgamma(0.5 * (n - 1)) -
                                0.5 * std::log(std::numbers::pi));
  auto integrand = [n](double t) { return std::pow(std::sin(t), n - 2); };
  const double integral = detail::integrate_adaptive(
      integrand, 0.0, cap.colatitude, tol / std::max(ratio, 1.0));
  const double p = std::clamp(ratio * integral, 0.0, 1.0);
  return {p, CapMethod::quadrature, 0.0};
}

// Empirical cap frequency of sample_unit_direction draws against the axis
// e1; the estimate carries its binomial standard error.
inline CapProbability cap_probability_monte_carlo(const CapSpec& cap,
                                                  std::uint64_t samples,
                                                  RandomStream& rng) {
  detail::validate_cap(cap);
  if (samples == 0) {
    throw std::invalid_argument(
        "cap_probability_monte_carlo: need at least one sample");
  }
  const double threshold = std::cos(cap.colatitude);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const UnitDirection d = sample_unit_direction(cap.dimension, rng);
    if (d[0] >= threshold) ++hits;
  }
  const double phat = static_cast<double>(hits) / static_cast<double>(samples);
  const double se =
      std::sqrt(phat * (1.0 - phat) / static_cast<double>(samples));
  return {phat, CapMethod::monte_carlo, se};
}

// I(n, alpha) = integral_0^alpha sin^n, by the two-term recurrence
// I_n = (n-1)/n * I_(n-2) - cos(alpha) sin^(n-1)(alpha) / n
// from the parity-matching base case I_0 = alpha, I_1 = 1 - cos(alpha).
inline double integral_recurrence(int n, double alpha) {
  if (n < 0) {
    throw std::invalid_argument("integral_recurrence: order must be >= 0");
  }
  if (!(alpha >= 0.0 && alpha <= std::numbers::pi)) {
    throw std::domain_error("integral_recurrence: alpha must be in [0, pi]");
  }
  const double s = std::sin(alpha);
  const double c = std::cos(alpha);
  const double s2 = s * s;
  double value;
  int k;
  double spow;  // sin^(k-1)(alpha) maintained incrementally
  if (n % 2 == 0) {
    value = alpha;
    k = 2;
    spow = s;
  } else {
    value = 1.0 - c;
    k = 3;
    spow = s2;
  }
  for (; k <= n; k += 2) {
    value = (k - 1.0) / k * value - c * spow / k;
    spow *= s2;
  }
  return value;
}

}  // namespace dfds
