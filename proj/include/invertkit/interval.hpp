#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace invertkit {

// Closed real interval [lo, hi] with finite bounds.
class Interval {
 public:
  Interval() : lo_(0.0), hi_(0.0) {}
  Interval(double lo, double hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double width() const { return hi_ - lo_; }
  double mid() const { return (lo_ + hi_) / 2.0; }

  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& other) const {
    return lo_ <= other.lo_ && other.hi_ <= hi_;
  }
  // other lies in the open interior (lo, hi).
  bool contains_strictly(const Interval& other) const {
    return lo_ < other.lo_ && other.hi_ < hi_;
  }

  bool operator==(const Interval& other) const = default;

 private:
  double lo_;
  double hi_;
};

std::optional<Interval> intersect(const Interval& a, const Interval& b);

// Axis-aligned product of intervals; dimension >= 1.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<Interval> axes);
  Box(std::initializer_list<Interval> axes);

  std::size_t dim() const { return axes_.size(); }
  const Interval& axis(std::size_t i) const { return axes_.at(i); }
  const std::vector<Interval>& axes() const { return axes_; }

  double volume() const;

  bool contains(std::span<const double> point) const;
  bool contains(const Box& other) const;
  bool contains_strictly(const Box& other) const;

  bool operator==(const Box& other) const = default;

 private:
  std::vector<Interval> axes_;
};

std::optional<Box> intersect(const Box& a, const Box& b);

double volume(const Box& b);

// Splits every axis at its midpoint, yielding up to 2^d children ordered by
// binary counting (axis 0 is the least significant bit, low half first).
// An axis whose midpoint coincides with an endpoint is left unsplit. Throws
// on zero-volume boxes; returns an empty list when no axis can split.
std::vector<Box> bisect_all(const Box& b);

// Result of an inversion run: a partition of the search domain into boxes
// whose image lies inside the performance box (accepted), outside of it
// (rejected), or is undecided at the configured volume resolution (boundary).
struct Paving {
  double resolution = 0.0;
  std::vector<std::string> model;  // one S-expression per output component
  Box domain;                      // the searched adjustment box
  Box performance;                 // the target output box
  std::vector<Box> accepted;
  std::vector<Box> rejected;
  std::vector<Box> boundary;

  std::size_t total_boxes() const {
    return accepted.size() + rejected.size() + boundary.size();
  }
  double class_volume(const std::vector<Box>& list) const;
  double accepted_volume() const { return class_volume(accepted); }
  double rejected_volume() const { return class_volume(rejected); }
  double boundary_volume() const { return class_volume(boundary); }
};

}  // namespace invertkit
