#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace invertkit {

enum class Op : std::uint8_t {
  Add,
  Sub,
  Mul,
  Div,
  Exp,
  Log,
  Sin,
  Cos,
  Tan,
  Neg,
  Var,
  Const,
};

bool is_binary(Op op);
bool is_unary(Op op);
const char* op_name(Op op);

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

// Immutable tree node. depth, size and max_var are fixed at construction;
// a lone terminal has depth 1 and size 1.
struct ExprNode {
  Op op = Op::Const;
  double value = 0.0;  // Const only
  int var = -1;        // Var only
  ExprPtr left;        // unary child or binary lhs
  ExprPtr right;       // binary rhs
  int depth = 1;
  int size = 1;
  int max_var = -1;    // largest Var index in the subtree, -1 if none
};

ExprPtr make_const(double value);
ExprPtr make_var(int index);
ExprPtr make_unary(Op op, ExprPtr child);
ExprPtr make_binary(Op op, ExprPtr left, ExprPtr right);

// Constants compare bitwise, so -0 and 0 are distinct and trees never
// hold NaN constants.
bool structurally_equal(const ExprNode& a, const ExprNode& b);

// Preorder node access; index in [0, root->size).
ExprPtr subtree_at(const ExprPtr& root, int index);
// 0-based depth of the node at preorder index (root is 0).
int depth_at(const ExprPtr& root, int index);
// New tree sharing untouched subtrees, with the node at `index` swapped out.
ExprPtr replace_at(const ExprPtr& root, int index, ExprPtr replacement);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position);
  std::size_t position;  // byte offset into the input text
};

// Parenthesized prefix form, e.g. "(* (sin (* 5 x)) (exp (neg (* x x))))".
// Atoms are decimal literals or variables: x, y, z name inputs 0..2 and
// xN names input N; every index must be < arity.
ExprPtr parse_sexpr(std::string_view text, int arity);

// Canonical single-space form; parse_sexpr(format_sexpr(e)) == e
// structurally. Inputs 0..2 print as x, y, z, higher ones as xN.
std::string format_sexpr(const ExprNode& e);
std::string format_sexpr(const ExprPtr& e);

// Component-wise model f : R^n -> R^p over one declared input arity.
class ExprVector {
 public:
  ExprVector(std::vector<ExprPtr> components, int arity);

  int arity() const { return arity_; }
  std::size_t outputs() const { return components_.size(); }
  const ExprPtr& component(std::size_t i) const { return components_.at(i); }
  const std::vector<ExprPtr>& components() const { return components_; }

  std::vector<std::string> format() const;

 private:
  std::vector<ExprPtr> components_;
  int arity_;
};

// Splits on ';' and parses each component.
ExprVector parse_model_text(std::string_view text, int arity);

}  // namespace invertkit
