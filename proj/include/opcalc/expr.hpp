#pragma once

#include <complex>
#include <memory>
#include <string>
#include <string_view>

namespace opcalc::expr {

using Complex = std::complex<double>;

struct Node;

/// Scalar expression in one variable, as used by generator profiles and
/// initial data in the JSON inputs. Grammar:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'pi' | 'e' | 'i' | <var> | fn '(' expr ')' | '(' expr ')'
///   fn      := 'sin' | 'cos' | 'exp' | 'log'
///
/// Expressions are immutable and differentiate symbolically, so profile
/// derivatives of any order are exact.
class Expr {
 public:
  static Expr parse(std::string_view text, std::string_view var = "t");
  static Expr constant(Complex value);
  static Expr variable();

  Complex operator()(Complex x) const;
  Expr derivative() const;
  Expr derivative(int order) const;

  bool is_constant() const;
  std::string str() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr pow(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr exp(const Expr& a);
  friend Expr log(const Expr& a);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

}  // namespace opcalc::expr
