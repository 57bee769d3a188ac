#include "invertkit/batch_eval.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "invertkit/eval.hpp"
#include "invertkit/kernels.hpp"

namespace invertkit {

namespace {

void apply_unary_libm(Op op, double* data, std::size_t n) {
  switch (op) {
    case Op::Exp:
      for (std::size_t i = 0; i < n; ++i) data[i] = std::exp(data[i]);
      break;
    case Op::Log:
      for (std::size_t i = 0; i < n; ++i) data[i] = std::log(data[i]);
      break;
    case Op::Sin:
      for (std::size_t i = 0; i < n; ++i) data[i] = std::sin(data[i]);
      break;
    case Op::Cos:
      for (std::size_t i = 0; i < n; ++i) data[i] = std::cos(data[i]);
      break;
    case Op::Tan:
      for (std::size_t i = 0; i < n; ++i) data[i] = std::tan(data[i]);
      break;
    default:
      throw std::logic_error("not a libm op");
  }
}

bool any_near_pole(const double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (tan_near_pole(data[i])) return true;
  }
  return false;
}

}  // namespace

BatchEvaluator::BatchEvaluator(std::vector<std::vector<double>> columns)
    : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("no input columns");
  rows_ = columns_.front().size();
  if (rows_ == 0) throw std::invalid_argument("empty input columns");
  for (const auto& col : columns_) {
    if (col.size() != rows_) throw std::invalid_argument("ragged columns");
  }
}

double* BatchEvaluator::buffer(std::size_t slot) {
  while (pool_.size() <= slot) pool_.emplace_back(rows_);
  return pool_[slot].data();
}

// Postfix walk with one value stack slot per live subtree. The domain
// scans run before the op that needs them and abort the whole batch, the
// same rows eval_scalar would reject.
bool BatchEvaluator::eval(const ExprNode& e, std::vector<double>& out) {
  if (e.max_var >= static_cast<int>(columns_.size())) {
    throw std::invalid_argument("batch arity below expression arity");
  }
  const kernels::KernelTable& k = kernels::active_table();

  std::vector<const ExprNode*> nodes;
  nodes.reserve(static_cast<std::size_t>(e.size));
  std::vector<const ExprNode*> walk = {&e};
  while (!walk.empty()) {
    const ExprNode* n = walk.back();
    walk.pop_back();
    nodes.push_back(n);
    if (n->left) walk.push_back(n->left.get());
    if (n->right) walk.push_back(n->right.get());
  }

  // nodes is root-right-left; the reverse is left-right-root postfix, so
  // stack[sp-2] is the left operand when a binary op fires.
  std::size_t sp = 0;
  std::vector<double*> stack(static_cast<std::size_t>(e.depth) + 1, nullptr);
  for (std::size_t idx = nodes.size(); idx-- > 0;) {
    const ExprNode* n = nodes[idx];
    switch (n->op) {
      case Op::Const: {
        double* dst = buffer(sp);
        k.fill(n->value, dst, rows_);
        stack[sp++] = dst;
        break;
      }
      case Op::Var: {
        double* dst = buffer(sp);
        const double* src = columns_[static_cast<std::size_t>(n->var)].data();
        for (std::size_t i = 0; i < rows_; ++i) dst[i] = src[i];
        stack[sp++] = dst;
        break;
      }
      case Op::Neg:
        k.neg(stack[sp - 1], stack[sp - 1], rows_);
        break;
      case Op::Log:
        if (k.any_nonpositive(stack[sp - 1], rows_)) return false;
        apply_unary_libm(Op::Log, stack[sp - 1], rows_);
        break;
      case Op::Tan:
        if (any_near_pole(stack[sp - 1], rows_)) return false;
        apply_unary_libm(Op::Tan, stack[sp - 1], rows_);
        break;
      case Op::Exp:
      case Op::Sin:
      case Op::Cos:
        apply_unary_libm(n->op, stack[sp - 1], rows_);
        break;
      case Op::Add:
        k.add(stack[sp - 2], stack[sp - 1], stack[sp - 2], rows_);
        --sp;
        break;
      case Op::Sub:
        k.sub(stack[sp - 2], stack[sp - 1], stack[sp - 2], rows_);
        --sp;
        break;
      case Op::Mul:
        k.mul(stack[sp - 2], stack[sp - 1], stack[sp - 2], rows_);
        --sp;
        break;
      case Op::Div:
        if (k.any_eq_zero(stack[sp - 1], rows_)) return false;
        k.div(stack[sp - 2], stack[sp - 1], stack[sp - 2], rows_);
        --sp;
        break;
    }
  }

  out.assign(stack[0], stack[0] + rows_);
  return true;
}

double BatchEvaluator::mse(const ExprNode& e, std::span<const double> targets) {
  if (targets.size() != rows_) {
    throw std::invalid_argument("target length does not match rows");
  }
  std::vector<double> values;
  if (!eval(e, values)) return std::numeric_limits<double>::infinity();
  if (!kernels::active_table().all_finite(values.data(), rows_)) {
    return std::numeric_limits<double>::infinity();
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    const double d = values[i] - targets[i];
    sum += d * d;
  }
  const double mean = sum / static_cast<double>(rows_);
  if (!std::isfinite(mean)) return std::numeric_limits<double>::infinity();
  return mean;
}

}  // namespace invertkit
