#include "invertkit/interval.hpp"

#include <algorithm>
#include <cmath>

namespace invertkit {

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("interval bounds must be finite");
  }
  if (lo > hi) {
    throw std::invalid_argument("interval lower bound exceeds upper bound");
  }
}

std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  const double lo = std::max(a.lo(), b.lo());
  const double hi = std::min(a.hi(), b.hi());
  if (lo > hi) return std::nullopt;
  return Interval(lo, hi);
}

Box::Box(std::vector<Interval> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw std::invalid_argument("box needs dimension >= 1");
}

Box::Box(std::initializer_list<Interval> axes)
    : Box(std::vector<Interval>(axes)) {}

double Box::volume() const {
  double v = 1.0;
  for (const Interval& iv : axes_) v *= iv.width();
  return v;
}

bool Box::contains(std::span<const double> point) const {
  if (point.size() != axes_.size()) {
    throw std::invalid_argument("point dimension mismatch");
  }
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (!axes_[i].contains(point[i])) return false;
  }
  return true;
}

bool Box::contains(const Box& other) const {
  if (other.dim() != dim()) {
    throw std::invalid_argument("box dimension mismatch");
  }
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (!axes_[i].contains(other.axes_[i])) return false;
  }
  return true;
}

bool Box::contains_strictly(const Box& other) const {
  if (other.dim() != dim()) {
    throw std::invalid_argument("box dimension mismatch");
  }
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (!axes_[i].contains_strictly(other.axes_[i])) return false;
  }
  return true;
}

std::optional<Box> intersect(const Box& a, const Box& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("box dimension mismatch");
  }
  std::vector<Interval> axes;
  axes.reserve(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    auto iv = intersect(a.axis(i), b.axis(i));
    if (!iv) return std::nullopt;
    axes.push_back(*iv);
  }
  return Box(std::move(axes));
}

double volume(const Box& b) { return b.volume(); }

std::vector<Box> bisect_all(const Box& b) {
  if (b.volume() <= 0.0) {
    throw std::invalid_argument("cannot bisect a zero-volume box");
  }
  const std::size_t d = b.dim();
  // Axes where the midpoint strictly separates both halves.
  std::vector<std::size_t> splittable;
  std::vector<double> mids(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const Interval& iv = b.axis(i);
    const double m = iv.mid();
    if (m > iv.lo() && m < iv.hi()) {
      splittable.push_back(i);
      mids[i] = m;
    }
  }
  std::vector<Box> children;
  if (splittable.empty()) return children;

  const std::size_t n_children = std::size_t{1} << splittable.size();
  children.reserve(n_children);
  for (std::size_t mask = 0; mask < n_children; ++mask) {
    std::vector<Interval> axes(b.axes());
    for (std::size_t j = 0; j < splittable.size(); ++j) {
      const std::size_t ax = splittable[j];
      const Interval& iv = b.axis(ax);
      axes[ax] = ((mask >> j) & 1) ? Interval(mids[ax], iv.hi())
                                   : Interval(iv.lo(), mids[ax]);
    }
    children.emplace_back(std::move(axes));
  }
  return children;
}

double Paving::class_volume(const std::vector<Box>& list) const {
  double v = 0.0;
  for (const Box& b : list) v += b.volume();
  return v;
}

}  // namespace invertkit
