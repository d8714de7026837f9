#include "opcalc/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "opcalc/error.hpp"

namespace opcalc::expr {

enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log };

struct Node {
  Op op;
  Complex value{};
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  return std::make_shared<const Node>(Node{op, {}, std::move(lhs), std::move(rhs)});
}

NodePtr make_const(Complex v) { return std::make_shared<const Node>(Node{Op::Const, v, nullptr, nullptr}); }

bool is_const(const NodePtr& n, Complex v) { return n->op == Op::Const && n->value == v; }

Complex eval(const Node& n, Complex x) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return x;
    case Op::Add: return eval(*n.lhs, x) + eval(*n.rhs, x);
    case Op::Sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
    case Op::Mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
    case Op::Div: return eval(*n.lhs, x) / eval(*n.rhs, x);
    case Op::Pow: {
      const Complex base = eval(*n.lhs, x);
      if (n.rhs->op == Op::Const && n.rhs->value.imag() == 0.0) {
        const double p = n.rhs->value.real();
        if (p == std::floor(p) && std::abs(p) <= 64.0) {
          // Integer powers by repeated multiplication keep real bases real.
          Complex acc = 1.0;
          for (int k = 0; k < static_cast<int>(std::abs(p)); ++k) acc *= base;
          return p < 0 ? 1.0 / acc : acc;
        }
      }
      return std::pow(base, eval(*n.rhs, x));
    }
    case Op::Neg: return -eval(*n.lhs, x);
    case Op::Sin: return std::sin(eval(*n.lhs, x));
    case Op::Cos: return std::cos(eval(*n.lhs, x));
    case Op::Exp: return std::exp(eval(*n.lhs, x));
    case Op::Log: return std::log(eval(*n.lhs, x));
  }
  return 0.0;
}

void print(const Node& n, std::ostream& os) {
  switch (n.op) {
    case Op::Const:
      if (n.value.imag() == 0.0) {
        os << n.value.real();
      } else {
        os << "(" << n.value.real() << "+" << n.value.imag() << "*i)";
      }
      return;
    case Op::Var: os << "x"; return;
    case Op::Neg: os << "(-"; print(*n.lhs, os); os << ")"; return;
    case Op::Sin: os << "sin("; print(*n.lhs, os); os << ")"; return;
    case Op::Cos: os << "cos("; print(*n.lhs, os); os << ")"; return;
    case Op::Exp: os << "exp("; print(*n.lhs, os); os << ")"; return;
    case Op::Log: os << "log("; print(*n.lhs, os); os << ")"; return;
    default: break;
  }
  const char* sym = n.op == Op::Add ? "+" : n.op == Op::Sub ? "-" : n.op == Op::Mul ? "*" : n.op == Op::Div ? "/" : "^";
  os << "(";
  print(*n.lhs, os);
  os << sym;
  print(*n.rhs, os);
  os << ")";
}

class Parser {
 public:
  Parser(std::string_view text, std::string_view var) : text_(text), var_(var) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::ParseError, what + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'",
                static_cast<double>(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = add(lhs, term());
      } else if (accept('-')) {
        lhs = sub(lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = mul(lhs, unary());
      } else if (accept('/')) {
        lhs = div(lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return neg(unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return pow(base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (accept('(')) {
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const char* begin = text_.data() + pos_;
      const auto [ptr, ec] = std::from_chars(begin, text_.data() + text_.size(), v);
      if (ec != std::errc()) fail("malformed number");
      pos_ += static_cast<std::size_t>(ptr - begin);
      return make_const(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == var_) return make(Op::Var);
      if (name == "pi") return make_const(std::numbers::pi);
      if (name == "e") return make_const(std::numbers::e);
      if (name == "i") return make_const(Complex(0.0, 1.0));
      Op fn;
      if (name == "sin") {
        fn = Op::Sin;
      } else if (name == "cos") {
        fn = Op::Cos;
      } else if (name == "exp") {
        fn = Op::Exp;
      } else if (name == "log") {
        fn = Op::Log;
      } else {
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
      }
      if (!accept('(')) fail("expected '(' after function name");
      NodePtr arg = expr();
      if (!accept(')')) fail("expected ')'");
      return unary_fn(fn, arg);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

 public:
  static NodePtr add(NodePtr a, NodePtr b) {
    if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return make(Op::Add, std::move(a), std::move(b));
  }
  static NodePtr sub(NodePtr a, NodePtr b) {
    if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return neg(std::move(b));
    return make(Op::Sub, std::move(a), std::move(b));
  }
  static NodePtr mul(NodePtr a, NodePtr b) {
    if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    return make(Op::Mul, std::move(a), std::move(b));
  }
  static NodePtr div(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_const(0.0);
    if (is_const(b, 1.0)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value / b->value);
    return make(Op::Div, std::move(a), std::move(b));
  }
  static NodePtr pow(NodePtr a, NodePtr b) {
    if (is_const(b, 0.0)) return make_const(1.0);
    if (is_const(b, 1.0)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return make_const(std::pow(a->value, b->value));
    return make(Op::Pow, std::move(a), std::move(b));
  }
  static NodePtr neg(NodePtr a) {
    if (a->op == Op::Const) return make_const(-a->value);
    if (a->op == Op::Neg) return a->lhs;
    return make(Op::Neg, std::move(a));
  }
  static NodePtr unary_fn(Op fn, NodePtr a) {
    if (a->op == Op::Const) return make_const(eval(Node{fn, {}, a, nullptr}, 0.0));
    return make(fn, std::move(a));
  }

 private:
  std::string_view text_;
  std::string_view var_;
  std::size_t pos_ = 0;
};

NodePtr differentiate(const NodePtr& n) {
  using P = Parser;
  switch (n->op) {
    case Op::Const: return make_const(0.0);
    case Op::Var: return make_const(1.0);
    case Op::Add: return P::add(differentiate(n->lhs), differentiate(n->rhs));
    case Op::Sub: return P::sub(differentiate(n->lhs), differentiate(n->rhs));
    case Op::Neg: return P::neg(differentiate(n->lhs));
    case Op::Mul:
      return P::add(P::mul(differentiate(n->lhs), n->rhs), P::mul(n->lhs, differentiate(n->rhs)));
    case Op::Div: {
      NodePtr num = P::sub(P::mul(differentiate(n->lhs), n->rhs), P::mul(n->lhs, differentiate(n->rhs)));
      return P::div(num, P::mul(n->rhs, n->rhs));
    }
    case Op::Pow: {
      if (n->rhs->op == Op::Const) {
        const Complex p = n->rhs->value;
        return P::mul(P::mul(make_const(p), P::pow(n->lhs, make_const(p - 1.0))), differentiate(n->lhs));
      }
      // d(u^v) = u^v (v' log u + v u' / u)
      NodePtr inner = P::add(P::mul(differentiate(n->rhs), P::unary_fn(Op::Log, n->lhs)),
                             P::div(P::mul(n->rhs, differentiate(n->lhs)), n->lhs));
      return P::mul(n, inner);
    }
    case Op::Sin: return P::mul(P::unary_fn(Op::Cos, n->lhs), differentiate(n->lhs));
    case Op::Cos: return P::neg(P::mul(P::unary_fn(Op::Sin, n->lhs), differentiate(n->lhs)));
    case Op::Exp: return P::mul(n, differentiate(n->lhs));
    case Op::Log: return P::div(differentiate(n->lhs), n->lhs);
  }
  return make_const(0.0);
}

}  // namespace

Expr Expr::parse(std::string_view text, std::string_view var) { return Expr(Parser(text, var).parse()); }
Expr Expr::constant(Complex value) { return Expr(make_const(value)); }
Expr Expr::variable() { return Expr(make(Op::Var)); }

Complex Expr::operator()(Complex x) const { return eval(*node_, x); }
Expr Expr::derivative() const { return Expr(differentiate(node_)); }

Expr Expr::derivative(int order) const {
  Expr d = *this;
  for (int k = 0; k < order; ++k) d = d.derivative();
  return d;
}

bool Expr::is_constant() const { return node_->op == Op::Const; }

std::string Expr::str() const {
  std::ostringstream os;
  os.precision(17);
  print(*node_, os);
  return os.str();
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(Parser::add(a.node_, b.node_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(Parser::sub(a.node_, b.node_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(Parser::mul(a.node_, b.node_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(Parser::div(a.node_, b.node_)); }
Expr pow(const Expr& a, const Expr& b) { return Expr(Parser::pow(a.node_, b.node_)); }
Expr operator-(const Expr& a) { return Expr(Parser::neg(a.node_)); }
Expr sin(const Expr& a) { return Expr(Parser::unary_fn(Op::Sin, a.node_)); }
Expr cos(const Expr& a) { return Expr(Parser::unary_fn(Op::Cos, a.node_)); }
Expr exp(const Expr& a) { return Expr(Parser::unary_fn(Op::Exp, a.node_)); }
Expr log(const Expr& a) { return Expr(Parser::unary_fn(Op::Log, a.node_)); }

}  // namespace opcalc::expr
