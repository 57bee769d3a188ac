#include "invertkit/expr.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

namespace invertkit {

bool is_binary(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      return true;
    default:
      return false;
  }
}

bool is_unary(Op op) {
  switch (op) {
    case Op::Exp:
    case Op::Log:
    case Op::Sin:
    case Op::Cos:
    case Op::Tan:
    case Op::Neg:
      return true;
    default:
      return false;
  }
}

const char* op_name(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tan: return "tan";
    case Op::Neg: return "neg";
    case Op::Var: return "var";
    case Op::Const: return "const";
  }
  return "?";
}

ExprPtr make_const(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("constant must be finite");
  }
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Const;
  n->value = value;
  return n;
}

ExprPtr make_var(int index) {
  if (index < 0) throw std::invalid_argument("variable index must be >= 0");
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Var;
  n->var = index;
  n->max_var = index;
  return n;
}

ExprPtr make_unary(Op op, ExprPtr child) {
  if (!is_unary(op)) throw std::invalid_argument("not a unary operator");
  if (!child) throw std::invalid_argument("null child");
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->depth = child->depth + 1;
  n->size = child->size + 1;
  n->max_var = child->max_var;
  n->left = std::move(child);
  return n;
}

ExprPtr make_binary(Op op, ExprPtr left, ExprPtr right) {
  if (!is_binary(op)) throw std::invalid_argument("not a binary operator");
  if (!left || !right) throw std::invalid_argument("null child");
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->depth = 1 + std::max(left->depth, right->depth);
  n->size = 1 + left->size + right->size;
  n->max_var = std::max(left->max_var, right->max_var);
  n->left = std::move(left);
  n->right = std::move(right);
  return n;
}

bool structurally_equal(const ExprNode& a, const ExprNode& b) {
  if (a.op != b.op || a.size != b.size) return false;
  switch (a.op) {
    case Op::Const:
      return std::bit_cast<std::uint64_t>(a.value) ==
             std::bit_cast<std::uint64_t>(b.value);
    case Op::Var:
      return a.var == b.var;
    default:
      if (!structurally_equal(*a.left, *b.left)) return false;
      return !a.right || structurally_equal(*a.right, *b.right);
  }
}

static const ExprPtr* find_at(const ExprPtr& root, int index) {
  if (index == 0) return &root;
  index -= 1;
  if (index < root->left->size) return find_at(root->left, index);
  return find_at(root->right, index - root->left->size);
}

ExprPtr subtree_at(const ExprPtr& root, int index) {
  if (!root || index < 0 || index >= root->size) {
    throw std::out_of_range("node index out of range");
  }
  return *find_at(root, index);
}

int depth_at(const ExprPtr& root, int index) {
  if (!root || index < 0 || index >= root->size) {
    throw std::out_of_range("node index out of range");
  }
  const ExprPtr* cur = &root;
  int depth = 0;
  while (index != 0) {
    index -= 1;
    depth += 1;
    if (index < (*cur)->left->size) {
      cur = &(*cur)->left;
    } else {
      index -= (*cur)->left->size;
      cur = &(*cur)->right;
    }
  }
  return depth;
}

static ExprPtr rebuild(const ExprPtr& root, int index, ExprPtr replacement) {
  if (index == 0) return replacement;
  index -= 1;
  ExprPtr left = root->left;
  ExprPtr right = root->right;
  if (index < left->size) {
    left = rebuild(left, index, std::move(replacement));
  } else {
    right = rebuild(right, index - left->size, std::move(replacement));
  }
  if (is_binary(root->op)) {
    return make_binary(root->op, std::move(left), std::move(right));
  }
  return make_unary(root->op, std::move(left));
}

ExprPtr replace_at(const ExprPtr& root, int index, ExprPtr replacement) {
  if (!root || index < 0 || index >= root->size) {
    throw std::out_of_range("node index out of range");
  }
  if (!replacement) throw std::invalid_argument("null replacement");
  return rebuild(root, index, std::move(replacement));
}

ParseError::ParseError(const std::string& what, std::size_t pos)
    : std::runtime_error(what + " at position " + std::to_string(pos)),
      position(pos) {}

namespace {

struct Token {
  enum Kind { LParen, RParen, Atom, End } kind;
  std::string_view text;
  std::size_t pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (pos_ >= text_.size()) return {Token::End, {}, pos_};
    const std::size_t start = pos_;
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      return {Token::LParen, text_.substr(start, 1), start};
    }
    if (c == ')') {
      ++pos_;
      return {Token::RParen, text_.substr(start, 1), start};
    }
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    return {Token::Atom, text_.substr(start, pos_ - start), start};
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::optional<Op> lookup_op(std::string_view name) {
  if (name == "+") return Op::Add;
  if (name == "-") return Op::Sub;
  if (name == "*") return Op::Mul;
  if (name == "/") return Op::Div;
  if (name == "exp") return Op::Exp;
  if (name == "log") return Op::Log;
  if (name == "sin") return Op::Sin;
  if (name == "cos") return Op::Cos;
  if (name == "tan") return Op::Tan;
  if (name == "neg") return Op::Neg;
  return std::nullopt;
}

std::optional<int> lookup_var(std::string_view name) {
  if (name == "x") return 0;
  if (name == "y") return 1;
  if (name == "z") return 2;
  if (name.size() >= 2 && name[0] == 'x') {
    int index = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
    if (ec == std::errc() && ptr == name.data() + name.size() && index >= 0) {
      return index;
    }
  }
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view text, int arity) : lexer_(text), arity_(arity) {
    advance();
  }

  ExprPtr parse() {
    ExprPtr e = expression();
    if (tok_.kind != Token::End) {
      throw ParseError("trailing input after expression", tok_.pos);
    }
    return e;
  }

 private:
  Lexer lexer_;
  Token tok_;
  int arity_;

  void advance() { tok_ = lexer_.next(); }

  ExprPtr expression() {
    switch (tok_.kind) {
      case Token::Atom: {
        ExprPtr e = atom(tok_);
        advance();
        return e;
      }
      case Token::LParen:
        return application();
      case Token::RParen:
        throw ParseError("unexpected ')'", tok_.pos);
      case Token::End:
        throw ParseError("unexpected end of input", tok_.pos);
    }
    throw ParseError("unreachable", tok_.pos);
  }

  ExprPtr application() {
    advance();  // past '('
    if (tok_.kind != Token::Atom) {
      throw ParseError("expected an operator", tok_.pos);
    }
    const Token head = tok_;
    auto op = lookup_op(head.text);
    if (!op) {
      throw ParseError("unknown operator '" + std::string(head.text) + "'",
                       head.pos);
    }
    advance();
    ExprPtr first = expression();
    ExprPtr result;
    if (is_binary(*op)) {
      if (tok_.kind == Token::RParen) {
        throw ParseError("operator '" + std::string(head.text) +
                             "' expects 2 arguments",
                         tok_.pos);
      }
      ExprPtr second = expression();
      result = make_binary(*op, std::move(first), std::move(second));
    } else {
      result = make_unary(*op, std::move(first));
    }
    if (tok_.kind != Token::RParen) {
      throw ParseError(tok_.kind == Token::End
                           ? "missing ')'"
                           : "operator '" + std::string(head.text) +
                                 "' expects fewer arguments",
                       tok_.pos);
    }
    advance();
    return result;
  }

  ExprPtr atom(const Token& tok) {
    if (auto var = lookup_var(tok.text)) {
      if (*var >= arity_) {
        throw ParseError("variable '" + std::string(tok.text) +
                             "' exceeds arity " + std::to_string(arity_),
                         tok.pos);
      }
      return make_var(*var);
    }
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
    if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
      throw ParseError("unrecognized token '" + std::string(tok.text) + "'",
                       tok.pos);
    }
    if (!std::isfinite(value)) {
      throw ParseError("non-finite constant", tok.pos);
    }
    return make_const(value);
  }
};

void append_double(std::string& out, double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

void format_into(const ExprNode& e, std::string& out) {
  switch (e.op) {
    case Op::Const:
      append_double(out, e.value);
      return;
    case Op::Var:
      if (e.var == 0) {
        out += 'x';
      } else if (e.var == 1) {
        out += 'y';
      } else if (e.var == 2) {
        out += 'z';
      } else {
        out += 'x';
        out += std::to_string(e.var);
      }
      return;
    default:
      out += '(';
      out += op_name(e.op);
      out += ' ';
      format_into(*e.left, out);
      if (e.right) {
        out += ' ';
        format_into(*e.right, out);
      }
      out += ')';
  }
}

}  // namespace

ExprPtr parse_sexpr(std::string_view text, int arity) {
  if (arity < 1) throw std::invalid_argument("arity must be >= 1");
  return Parser(text, arity).parse();
}

std::string format_sexpr(const ExprNode& e) {
  std::string out;
  format_into(e, out);
  return out;
}

std::string format_sexpr(const ExprPtr& e) {
  if (!e) throw std::invalid_argument("null expression");
  return format_sexpr(*e);
}

ExprVector::ExprVector(std::vector<ExprPtr> components, int arity)
    : components_(std::move(components)), arity_(arity) {
  if (components_.empty()) {
    throw std::invalid_argument("model needs at least one component");
  }
  if (arity_ < 1) throw std::invalid_argument("arity must be >= 1");
  for (const ExprPtr& c : components_) {
    if (!c) throw std::invalid_argument("null component");
    if (c->max_var >= arity_) {
      throw std::invalid_argument("component uses variable " +
                                  std::to_string(c->max_var) +
                                  " beyond arity " + std::to_string(arity_));
    }
  }
}

std::vector<std::string> ExprVector::format() const {
  std::vector<std::string> out;
  out.reserve(components_.size());
  for (const ExprPtr& c : components_) out.push_back(format_sexpr(*c));
  return out;
}

ExprVector parse_model_text(std::string_view text, int arity) {
  std::vector<ExprPtr> components;
  std::size_t start = 0;
  while (true) {
    const std::size_t semi = text.find(';', start);
    std::string_view part = semi == std::string_view::npos
                                ? text.substr(start)
                                : text.substr(start, semi - start);
    components.push_back(parse_sexpr(part, arity));
    if (semi == std::string_view::npos) break;
    start = semi + 1;
  }
  return ExprVector(std::move(components), arity);
}

}  // namespace invertkit
