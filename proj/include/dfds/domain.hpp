#pragma once

// Feasible sets. The solvers only need a handful of geometric queries --
// membership, distance, projection, chords, uniform sampling -- expressed by
// the abstract Domain interface so other convex bodies can slot in later.
// BoxDomain is the one concrete implementation; every query on a box is
// exact componentwise arithmetic.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dfds/geometry.hpp"
#include "dfds/random.hpp"
#include "dfds/vec.hpp"

namespace dfds {

// Feasible parameter interval {t : x + t*d inside the set} along a line.
struct Chord {
  double t_lo = 0.0;
  double t_hi = 0.0;
  bool empty = true;
};

class Domain {
 public:
  virtual ~Domain() = default;
  virtual int dim() const = 0;
  virtual bool contains(const Vec& x) const = 0;
  virtual double distance_to(const Vec& x) const = 0;
  virtual Vec project(const Vec& x) const = 0;
  virtual Chord chord_interval(const Vec& x, const UnitDirection& d) const = 0;
  virtual Vec sample_uniform(RandomStream& rng) const = 0;
  virtual double diameter() const = 0;

  // Membership in the R-extended set: all points within distance r.
  bool contains_extended(const Vec& x, double r) const {
    if (r < 0.0) {
      throw std::invalid_argument("contains_extended: radius must be >= 0");
    }
    return distance_to(x) <= r;
  }
};

class BoxDomain final : public Domain {
 public:
  BoxDomain(Vec lower, Vec upper)
      : lo_(std::move(lower)), hi_(std::move(upper)) {
    if (lo_.empty() || lo_.size() != hi_.size()) {
      throw std::invalid_argument(
          "BoxDomain: bounds must be nonempty and of equal dimension");
    }
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      if (!(lo_[i] < hi_[i])) {
        throw std::invalid_argument(
            "BoxDomain: lower bound must be strictly below upper bound");
      }
    }
  }

  int dim() const override { return static_cast<int>(lo_.size()); }
  const Vec& lower() const { return lo_; }
  const Vec& upper() const { return hi_; }

  bool contains(const Vec& x) const override {
    check_dim(x);
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
    }
    return true;
  }

  double distance_to(const Vec& x) const override {
    check_dim(x);
    double s = 0.0;
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      const double d = x[i] < lo_[i] ? lo_[i] - x[i]
                     : x[i] > hi_[i] ? x[i] - hi_[i]
                                     : 0.0;
      s += d * d;
    }
    return std::sqrt(s);
  }

  Vec project(const Vec& x) const override {
    check_dim(x);
    Vec p(x.size());
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      p[i] = x[i] < lo_[i] ? lo_[i] : x[i] > hi_[i] ? hi_[i] : x[i];
    }
    return p;
  }

  // Slab method. Zero direction components contribute no constraint (the
  // base point is required to be feasible, so those coordinates stay valid
  // for every t).
  Chord chord_interval(const Vec& x, const UnitDirection& d) const override {
    check_dim(x);
    check_dim(d.components());
    if (!contains(x)) {
      throw std::invalid_argument("chord_interval: base point must be feasible");
    }
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      if (d[i] == 0.0) continue;
      const double a = (lo_[i] - x[i]) / d[i];
      const double b = (hi_[i] - x[i]) / d[i];
      t_lo = std::max(t_lo, std::min(a, b));
      t_hi = std::min(t_hi, std::max(a, b));
    }
    if (!std::isfinite(t_lo) || !std::isfinite(t_hi)) {
      // All components zero is impossible for a UnitDirection; guard anyway.
      throw std::invalid_argument("chord_interval: degenerate direction");
    }
    return {t_lo, t_hi, false};
  }

  Vec sample_uniform(RandomStream& rng) const override {
    Vec x(lo_.size());
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      x[i] = rng.uniform(lo_[i], hi_[i]);
    }
    return x;
  }

  double diameter() const override { return dfds::distance(hi_, lo_); }

 private:
  void check_dim(const Vec& x) const {
    if (x.size() != lo_.size()) {
      throw std::invalid_argument("BoxDomain: dimension mismatch");
    }
  }

  Vec lo_;
  Vec hi_;
};

}  // namespace dfds
