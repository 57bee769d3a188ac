#include "invertkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace invertkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// One outward step covers a correctly rounded IEEE op, two cover libm's
// documented sub-ulp error.
double down1(double x) { return std::nextafter(x, -kInf); }
double up1(double x) { return std::nextafter(x, kInf); }
double down2(double x) { return down1(down1(x)); }
double up2(double x) { return up1(up1(x)); }

std::optional<Interval> checked(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) return std::nullopt;
  return Interval(lo, hi);
}

// True when some c0 + k*period lies within margin of [lo, hi]. The margin
// absorbs the rounding of c0 + k*period plus the tan pole tolerance, so a
// miss guarantees every point of the interval is clear of the lattice.
bool lattice_hit(double lo, double hi, double c0, double period) {
  if (std::max(std::abs(lo), std::abs(hi)) > 1e15) return true;
  if (hi - lo >= period + 1.0) return true;
  const double kmin = std::floor((lo - c0) / period) - 1.0;
  const double kmax = std::ceil((hi - c0) / period) + 1.0;
  for (double k = kmin; k <= kmax; k += 1.0) {
    const double c = c0 + k * period;
    const double margin = kTanPoleTolerance + std::abs(c) * 1e-15;
    if (c >= lo - margin && c <= hi + margin) return true;
  }
  return false;
}

std::optional<Interval> add_iv(const Interval& a, const Interval& b) {
  return checked(down1(a.lo() + b.lo()), up1(a.hi() + b.hi()));
}

std::optional<Interval> sub_iv(const Interval& a, const Interval& b) {
  return checked(down1(a.lo() - b.hi()), up1(a.hi() - b.lo()));
}

std::optional<Interval> mul_iv(const Interval& a, const Interval& b) {
  const double p1 = a.lo() * b.lo();
  const double p2 = a.lo() * b.hi();
  const double p3 = a.hi() * b.lo();
  const double p4 = a.hi() * b.hi();
  return checked(down1(std::min({p1, p2, p3, p4})),
                 up1(std::max({p1, p2, p3, p4})));
}

std::optional<Interval> div_iv(const Interval& a, const Interval& b) {
  if (b.lo() <= 0.0 && 0.0 <= b.hi()) return std::nullopt;
  const double q1 = a.lo() / b.lo();
  const double q2 = a.lo() / b.hi();
  const double q3 = a.hi() / b.lo();
  const double q4 = a.hi() / b.hi();
  return checked(down1(std::min({q1, q2, q3, q4})),
                 up1(std::max({q1, q2, q3, q4})));
}

std::optional<Interval> exp_iv(const Interval& a) {
  const double lo = std::max(0.0, down2(std::exp(a.lo())));
  return checked(lo, up2(std::exp(a.hi())));
}

std::optional<Interval> log_iv(const Interval& a) {
  if (a.lo() <= 0.0) return std::nullopt;
  return checked(down2(std::log(a.lo())), up2(std::log(a.hi())));
}

// Exact range up to outward rounding: endpoint values plus -1/+1 whenever
// a minimum/maximum point sits inside the interval.
std::optional<Interval> sin_iv(const Interval& a) {
  const bool has_max = lattice_hit(a.lo(), a.hi(), kHalfPi, kTwoPi);
  const bool has_min = lattice_hit(a.lo(), a.hi(), -kHalfPi, kTwoPi);
  const double slo = std::sin(a.lo());
  const double shi = std::sin(a.hi());
  const double lo =
      has_min ? -1.0 : std::max(-1.0, down2(std::min(slo, shi)));
  const double hi = has_max ? 1.0 : std::min(1.0, up2(std::max(slo, shi)));
  return checked(lo, hi);
}

std::optional<Interval> cos_iv(const Interval& a) {
  const bool has_max = lattice_hit(a.lo(), a.hi(), 0.0, kTwoPi);
  const bool has_min = lattice_hit(a.lo(), a.hi(), kPi, kTwoPi);
  const double clo = std::cos(a.lo());
  const double chi = std::cos(a.hi());
  const double lo =
      has_min ? -1.0 : std::max(-1.0, down2(std::min(clo, chi)));
  const double hi = has_max ? 1.0 : std::min(1.0, up2(std::max(clo, chi)));
  return checked(lo, hi);
}

std::optional<Interval> tan_iv(const Interval& a) {
  if (lattice_hit(a.lo(), a.hi(), kHalfPi, kPi)) return std::nullopt;
  return checked(down2(std::tan(a.lo())), up2(std::tan(a.hi())));
}

std::optional<double> eval_node(const ExprNode& e,
                                std::span<const double> point) {
  switch (e.op) {
    case Op::Const:
      return e.value;
    case Op::Var:
      return point[static_cast<std::size_t>(e.var)];
    default:
      break;
  }
  const auto a = eval_node(*e.left, point);
  if (!a) return std::nullopt;
  switch (e.op) {
    case Op::Neg:
      return -*a;
    case Op::Exp:
      return std::exp(*a);
    case Op::Log:
      if (*a <= 0.0) return std::nullopt;
      return std::log(*a);
    case Op::Sin:
      return std::sin(*a);
    case Op::Cos:
      return std::cos(*a);
    case Op::Tan:
      if (tan_near_pole(*a)) return std::nullopt;
      return std::tan(*a);
    default:
      break;
  }
  const auto b = eval_node(*e.right, point);
  if (!b) return std::nullopt;
  switch (e.op) {
    case Op::Add:
      return *a + *b;
    case Op::Sub:
      return *a - *b;
    case Op::Mul:
      return *a * *b;
    case Op::Div:
      if (*b == 0.0) return std::nullopt;
      return *a / *b;
    default:
      throw std::logic_error("bad node");
  }
}

std::optional<Interval> eval_node_iv(const ExprNode& e, const Box& box) {
  switch (e.op) {
    case Op::Const:
      return Interval(e.value, e.value);
    case Op::Var:
      return box.axis(static_cast<std::size_t>(e.var));
    default:
      break;
  }
  const auto a = eval_node_iv(*e.left, box);
  if (!a) return std::nullopt;
  switch (e.op) {
    case Op::Neg:
      return Interval(-a->hi(), -a->lo());
    case Op::Exp:
      return exp_iv(*a);
    case Op::Log:
      return log_iv(*a);
    case Op::Sin:
      return sin_iv(*a);
    case Op::Cos:
      return cos_iv(*a);
    case Op::Tan:
      return tan_iv(*a);
    default:
      break;
  }
  const auto b = eval_node_iv(*e.right, box);
  if (!b) return std::nullopt;
  switch (e.op) {
    case Op::Add:
      return add_iv(*a, *b);
    case Op::Sub:
      return sub_iv(*a, *b);
    case Op::Mul:
      return mul_iv(*a, *b);
    case Op::Div:
      return div_iv(*a, *b);
    default:
      throw std::logic_error("bad node");
  }
}

}  // namespace

bool tan_near_pole(double x) {
  return std::abs(std::remainder(x - kHalfPi, kPi)) < kTanPoleTolerance;
}

std::optional<double> eval_scalar(const ExprNode& e,
                                  std::span<const double> point) {
  if (e.max_var >= static_cast<int>(point.size())) {
    throw std::invalid_argument("point dimension below expression arity");
  }
  return eval_node(e, point);
}

std::optional<std::vector<double>> eval_scalar(const ExprVector& f,
                                               std::span<const double> point) {
  if (point.size() != static_cast<std::size_t>(f.arity())) {
    throw std::invalid_argument("point dimension does not match model arity");
  }
  std::vector<double> out;
  out.reserve(f.outputs());
  for (const ExprPtr& c : f.components()) {
    const auto v = eval_node(*c, point);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  return out;
}

std::optional<Interval> eval_interval(const ExprNode& e, const Box& box) {
  if (e.max_var >= static_cast<int>(box.dim())) {
    throw std::invalid_argument("box dimension below expression arity");
  }
  return eval_node_iv(e, box);
}

std::optional<Box> eval_interval(const ExprVector& f, const Box& box) {
  if (box.dim() != static_cast<std::size_t>(f.arity())) {
    throw std::invalid_argument("box dimension does not match model arity");
  }
  std::vector<Interval> axes;
  axes.reserve(f.outputs());
  for (const ExprPtr& c : f.components()) {
    const auto iv = eval_node_iv(*c, box);
    if (!iv) return std::nullopt;
    axes.push_back(*iv);
  }
  return Box(std::move(axes));
}

}  // namespace invertkit
