#pragma once

// Benchmark objective functions and evaluation-count bookkeeping.
//
// An Objective wraps a raw function together with its dimension, an
// evaluation counter, and (optionally) the known global optimum used for
// success classification.  The five stock benchmarks are constructed by
// make_benchmark, which also returns the box each one is minimized over.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dfds/domain.hpp"
#include "dfds/vec.hpp"

namespace dfds {

struct KnownOptimum {
  double f_star = 0.0;
  std::vector<Vec> minimizers;  // may be empty if only the value is known
};

class Objective {
 public:
  using Fn = std::function<double(const Vec&)>;

  Objective(int dim, Fn fn, std::optional<KnownOptimum> optimum = std::nullopt,
            std::string name = "")
      : dim_(dim),
        fn_(std::move(fn)),
        optimum_(std::move(optimum)),
        name_(std::move(name)) {
    if (dim_ < 1) {
      throw std::invalid_argument("objective dimension must be positive");
    }
    if (!fn_) {
      throw std::invalid_argument("objective requires a callable");
    }
  }

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  std::uint64_t eval_count() const { return count_; }
  void reset_count() { count_ = 0; }
  const std::optional<KnownOptimum>& known_optimum() const { return optimum_; }

  double operator()(const Vec& x) {
    if (static_cast<int>(x.size()) != dim_) {
      throw std::invalid_argument("objective evaluated at wrong dimension");
    }
    const double v = fn_(x);
    if (!std::isfinite(v)) {
      throw std::runtime_error("objective returned a non-finite value");
    }
    ++count_;
    return v;
  }

 private:
  int dim_;
  Fn fn_;
  std::uint64_t count_ = 0;
  std::optional<KnownOptimum> optimum_;
  std::string name_;
};

// Evaluates the objective at x, incrementing its counter by exactly one.
inline double evaluate(Objective& f, const Vec& x) { return f(x); }

// True when f_found is within epsilon of the known minimum value.
inline bool is_epsilon_optimal(const Objective& f, double f_found,
                               double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  if (!f.known_optimum().has_value()) {
    throw std::runtime_error(
        "epsilon-optimality requires a known optimum value");
  }
  return f_found <= f.known_optimum()->f_star + epsilon;
}

enum class BenchmarkId {
  six_hump_camel,
  goldstein_price,
  ackley,
  levy,
  alpine,
};

inline std::string benchmark_name(BenchmarkId id) {
  switch (id) {
    case BenchmarkId::six_hump_camel: return "six_hump_camel";
    case BenchmarkId::goldstein_price: return "goldstein_price";
    case BenchmarkId::ackley: return "ackley";
    case BenchmarkId::levy: return "levy";
    case BenchmarkId::alpine: return "alpine";
  }
  throw std::invalid_argument("unknown benchmark id");
}

inline BenchmarkId benchmark_from_name(const std::string& name) {
  if (name == "six_hump_camel") return BenchmarkId::six_hump_camel;
  if (name == "goldstein_price") return BenchmarkId::goldstein_price;
  if (name == "ackley") return BenchmarkId::ackley;
  if (name == "levy") return BenchmarkId::levy;
  if (name == "alpine") return BenchmarkId::alpine;
  throw std::invalid_argument("unknown benchmark name: " + name);
}

namespace detail {

inline double six_hump_camel_raw(const Vec& x) {
  const double a = x[0], b = x[1];
  const double a2 = a * a;
  return (4.0 - 2.1 * a2 + a2 * a2 / 3.0) * a2 + a * b +
         (-4.0 + 4.0 * b * b) * b * b;
}

inline double goldstein_price_raw(const Vec& x) {
  const double a = x[0], b = x[1];
  const double u = a + b + 1.0;
  const double p = 1.0 + u * u *
                             (19.0 - 14.0 * a + 3.0 * a * a - 14.0 * b +
                              6.0 * a * b + 3.0 * b * b);
  const double v = 2.0 * a - 3.0 * b;
  const double q = 30.0 + v * v *
                              (18.0 - 32.0 * a + 12.0 * a * a + 48.0 * b -
                               36.0 * a * b + 27.0 * b * b);
  return p * q;
}

inline double ackley_raw(const Vec& x) {
  const double n = static_cast<double>(x.size());
  double sum_sq = 0.0;
  double sum_cos = 0.0;
  for (double xi : x) {
    sum_sq += xi * xi;
    sum_cos += std::cos(2.0 * M_PI * xi);
  }
  return -20.0 * std::exp(-0.2 * std::sqrt(sum_sq / n)) -
         std::exp(sum_cos / n) + 20.0 + std::exp(1.0);
}

inline double levy_raw(const Vec& x) {
  const std::size_t n = x.size();
  auto w = [&](std::size_t i) { return 1.0 + (x[i] - 1.0) / 4.0; };
  const double s1 = std::sin(M_PI * w(0));
  double total = s1 * s1;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double wi = w(i);
    const double s = std::sin(M_PI * wi + 1.0);
    total += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * s * s);
  }
  const double wn = w(n - 1);
  const double s2 = std::sin(2.0 * M_PI * wn);
  total += (wn - 1.0) * (wn - 1.0) * (1.0 + s2 * s2);
  return total;
}

// Per-coordinate factor sqrt(|x|)*sin(x), saturated above the domain's upper
// bound.  Solvers legitimately probe a band just outside [0,10]^N: |x| keeps
// slightly negative coordinates defined, and holding the factor at its x=10
// value above the bound keeps the function continuous there without
// manufacturing out-of-domain optima deeper than the true one (for x a bit
// past 10 the unsaturated factor's magnitude would exceed the per-coordinate
// optimum, making pairs of such coordinates beat the global minimum).
inline double alpine_raw(const Vec& x) {
  double prod = 1.0;
  for (double xi : x) {
    const double t = std::min(xi, 10.0);
    prod *= std::sqrt(std::abs(t)) * std::sin(t);
  }
  return -prod;
}

// Argmax of sqrt(x)*sin(x) on [2*pi, 3*pi] by golden-section search.  The
// factor is positive on the open interval and zero at both ends, so the
// interior maximizer found here is the location of the deepest value of the
// separable alpine product per coordinate.
inline double alpine_coordinate_minimizer() {
  auto g = [](double x) { return std::sqrt(x) * std::sin(x); };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 2.0 * M_PI, hi = 3.0 * M_PI;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double gc = g(c), gd = g(d);
  while (hi - lo > 1e-13) {
    if (gc > gd) {
      hi = d;
      d = c;
      gd = gc;
      c = hi - inv_phi * (hi - lo);
      gc = g(c);
    } else {
      lo = c;
      c = d;
      gc = gd;
      d = lo + inv_phi * (hi - lo);
      gd = g(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Builds one of the stock benchmarks in the given dimension, returning the
// objective (with its known optimum attached) and the box it is solved over.
inline std::pair<Objective, BoxDomain> make_benchmark(BenchmarkId id,
                                                      int dim) {
  if (dim < 1) {
    throw std::invalid_argument("benchmark dimension must be positive");
  }
  switch (id) {
    case BenchmarkId::six_hump_camel: {
      if (dim != 2) {
        throw std::invalid_argument("six_hump_camel is two-dimensional");
      }
      KnownOptimum opt{-1.0316,
                       {Vec{-0.0898, 0.7126}, Vec{0.0898, -0.7126}}};
      return {Objective(2, detail::six_hump_camel_raw, opt, "six_hump_camel"),
              BoxDomain(Vec{-5.0, -5.0}, Vec{5.0, 5.0})};
    }
    case BenchmarkId::goldstein_price: {
      if (dim != 2) {
        throw std::invalid_argument("goldstein_price is two-dimensional");
      }
      KnownOptimum opt{3.0, {Vec{0.0, -1.0}}};
      return {
          Objective(2, detail::goldstein_price_raw, opt, "goldstein_price"),
          BoxDomain(Vec{-2.0, -2.0}, Vec{2.0, 2.0})};
    }
    case BenchmarkId::ackley: {
      KnownOptimum opt{0.0, {Vec(dim, 0.0)}};
      return {Objective(dim, detail::ackley_raw, opt, "ackley"),
              BoxDomain(Vec(dim, -10.0), Vec(dim, 10.0))};
    }
    case BenchmarkId::levy: {
      KnownOptimum opt{0.0, {Vec(dim, 1.0)}};
      return {Objective(dim, detail::levy_raw, opt, "levy"),
              BoxDomain(Vec(dim, -10.0), Vec(dim, 10.0))};
    }
    case BenchmarkId::alpine: {
      const double xhat = detail::alpine_coordinate_minimizer();
      const Vec minimizer(dim, xhat);
      KnownOptimum opt{detail::alpine_raw(minimizer), {minimizer}};
      return {Objective(dim, detail::alpine_raw, opt, "alpine"),
              BoxDomain(Vec(dim, 0.0), Vec(dim, 10.0))};
    }
  }
  throw std::invalid_argument("unknown benchmark id");
}

}  // namespace dfds
