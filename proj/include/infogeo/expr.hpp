#pragma once

// A small arithmetic expression language for potentials and log-densities.
// Parsed once against a declared variable list, then evaluated bottom-up on
// plain reals or Jet4 scalars.
//
// Grammar (EBNF, also documented in the README):
//   expr     = term { ("+" | "-") term } ;
//   term     = unary { ("*" | "/") unary } ;
//   unary    = "-" unary | power ;
//   power    = atom [ "^" exponent ] ;
//   exponent = [ "-" ] number | "(" expr ")"    (must fold to a constant) ;
//   atom     = number | ident | func "(" expr ")" | "(" expr ")" ;
//   func     = "exp" | "log" | "sqrt" ;
//
// "^" binds tighter than unary minus and is non-associative; "*"/"/" and
// "+"/"-" associate left. Every identifier must appear in the declared
// variable list (UnknownIdentifierError otherwise); malformed input raises
// SyntaxError with the byte offset of the offending character.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infogeo/errors.hpp"
#include "infogeo/jet.hpp"
#include "infogeo/scalar_field.hpp"

namespace infogeo {

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind {
    Constant,
    Variable,
    Neg,
    Exp,
    Log,
    Sqrt,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Sum,   // n-ary
    Prod,  // n-ary
  };

  Kind kind;
  double constant = 0.0;      // Constant
  int var = -1;               // Variable: position in the declared list
  double exponent = 0.0;      // Pow
  bool integer_exponent = false;
  std::vector<ExprPtr> args;
  std::size_t offset = 0;     // byte offset in the source text, for errors
};

class ExprAst {
 public:
  ExprAst() = default;

  /// Parses `text` against an ordered variable list.
  static ExprAst parse(std::string_view text, std::vector<std::string> vars);

  /// Programmatic constructors (the parser never emits Sum/Prod; these are
  /// for code that assembles expressions directly).
  static ExprAst constant(double c, std::vector<std::string> vars);
  static ExprAst variable(const std::string& name, std::vector<std::string> vars);
  static ExprAst sum(std::vector<ExprAst> terms);
  static ExprAst prod(std::vector<ExprAst> factors);

  bool valid() const { return root_ != nullptr; }
  const std::vector<std::string>& variables() const { return vars_; }
  int arity() const { return static_cast<int>(vars_.size()); }

  template <class Scalar>
  Scalar eval(std::span<const Scalar> bindings) const;

  double eval(const Eigen::VectorXd& y) const {
    return eval(std::span<const double>(y.data(), y.size()));
  }

  /// Stable round-trip form: parse(to_string(parse(t))) prints identically.
  std::string to_string() const;

  /// The expression as a ScalarField over its declared variables.
  ScalarField field() const;

  const ExprPtr& root() const { return root_; }

 private:
  ExprAst(ExprPtr root, std::vector<std::string> vars)
      : root_(std::move(root)), vars_(std::move(vars)) {}

  ExprPtr root_;
  std::vector<std::string> vars_;
};

extern template double ExprAst::eval<double>(std::span<const double>) const;
extern template Jet4 ExprAst::eval<Jet4>(std::span<const Jet4>) const;

}  // namespace infogeo
