#pragma once

#include <optional>
#include <span>
#include <vector>

#include "invertkit/expr.hpp"
#include "invertkit/interval.hpp"

namespace invertkit {

// tan arguments closer than this to pi/2 + k*pi evaluate as invalid.
inline constexpr double kTanPoleTolerance = 1e-12;

bool tan_near_pole(double x);

// IEEE double evaluation. nullopt marks a domain violation somewhere in
// the tree: log of a non-positive value, division by zero, or tan near a
// pole. Overflow is not a violation; results may be non-finite.
std::optional<double> eval_scalar(const ExprNode& e,
                                  std::span<const double> point);
std::optional<std::vector<double>> eval_scalar(const ExprVector& f,
                                               std::span<const double> point);

// Natural interval extension with outward rounding: every valid scalar
// evaluation over the box lands inside the result. Invalid when an
// operation's interval domain is violated (division by an interval
// containing 0, log with lower bound <= 0, tan spanning a pole) or a
// bound leaves the finite range.
std::optional<Interval> eval_interval(const ExprNode& e, const Box& box);
std::optional<Box> eval_interval(const ExprVector& f, const Box& box);

}  // namespace invertkit
