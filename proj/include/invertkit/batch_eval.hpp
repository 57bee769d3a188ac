#pragma once

#include <span>
#include <vector>

#include "invertkit/expr.hpp"

namespace invertkit {

// Evaluates expressions over a fixed point set, one kernel call per tree
// node. Per-row results are bit-identical to eval_scalar at that row; the
// transcendental loops call libm per element in row order.
class BatchEvaluator {
 public:
  // columns[i] holds variable i across all rows; columns must be equal
  // length and non-empty.
  explicit BatchEvaluator(std::vector<std::vector<double>> columns);

  std::size_t rows() const { return rows_; }
  std::size_t arity() const { return columns_.size(); }

  // False when any row hits a domain violation; out is only meaningful on
  // true returns.
  bool eval(const ExprNode& e, std::vector<double>& out);

  // Mean squared error against targets, summed in row order. +inf when
  // any row is invalid or the result is not finite.
  double mse(const ExprNode& e, std::span<const double> targets);

 private:
  std::vector<std::vector<double>> columns_;
  std::size_t rows_;
  std::vector<std::vector<double>> pool_;

  double* buffer(std::size_t slot);
};

}  // namespace invertkit
