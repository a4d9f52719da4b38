#include "infogeo/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace infogeo {

namespace {

using Kind = ExprNode::Kind;

ExprPtr make_node(Kind kind, std::size_t offset, std::vector<ExprPtr> args = {}) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->offset = offset;
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars)
      : text_(text), vars_(vars) {}

  ExprPtr run() {
    if (text_.empty()) throw SyntaxError("empty expression", 0);
    ExprPtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << msg << " at offset " << pos_;
    throw SyntaxError(os.str(), pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool consume(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }

  // Operands are named before entering the braced lists: gcc 11 fails to
  // destroy earlier initializer-list elements when a later one throws
  // (PR 66139), which would leak nodes on parse errors.
  ExprPtr expr() {
    ExprPtr lhs = term();
    while (true) {
      if (consume('+')) {
        std::size_t off = pos_ - 1;
        ExprPtr rhs = term();
        lhs = make_node(Kind::Add, off, {lhs, rhs});
      } else if (consume('-')) {
        std::size_t off = pos_ - 1;
        ExprPtr rhs = term();
        lhs = make_node(Kind::Sub, off, {lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    while (true) {
      if (consume('*')) {
        std::size_t off = pos_ - 1;
        ExprPtr rhs = unary();
        lhs = make_node(Kind::Mul, off, {lhs, rhs});
      } else if (consume('/')) {
        std::size_t off = pos_ - 1;
        ExprPtr rhs = unary();
        lhs = make_node(Kind::Div, off, {lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr unary() {
    if (consume('-')) {
      std::size_t off = pos_ - 1;
      return make_node(Kind::Neg, off, {unary()});
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (!consume('^')) return base;
    std::size_t off = pos_ - 1;
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Pow;
    n->offset = off;
    n->args = {base};
    parse_exponent(*n);
    if (peek('^')) fail("'^' is non-associative; parenthesize nested powers");
    return n;
  }

  void parse_exponent(ExprNode& n) {
    skip_ws();
    double value;
    if (consume('(')) {
      ExprPtr inner = expr();
      expect(')');
      if (!fold_constant(inner, value)) fail("power exponent must be a constant");
    } else {
      bool neg = consume('-');
      skip_ws();
      value = number();
      if (neg) value = -value;
    }
    n.exponent = value;
    double ip;
    n.integer_exponent = std::modf(value, &ip) == 0.0 && std::abs(value) <= 64.0;
  }

  static bool fold_constant(const ExprPtr& e, double& out) {
    switch (e->kind) {
      case Kind::Constant:
        out = e->constant;
        return true;
      case Kind::Neg: {
        double v;
        if (!fold_constant(e->args[0], v)) return false;
        out = -v;
        return true;
      }
      case Kind::Add:
      case Kind::Sub:
      case Kind::Mul:
      case Kind::Div: {
        double a, b;
        if (!fold_constant(e->args[0], a) || !fold_constant(e->args[1], b)) return false;
        out = e->kind == Kind::Add   ? a + b
              : e->kind == Kind::Sub ? a - b
              : e->kind == Kind::Mul ? a * b
                                     : a / b;
        return true;
      }
      default:
        return false;
    }
  }

  double number() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= text_.size() ||
        !(std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      fail("expected a number");
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;  // 'e' was not an exponent marker
      }
    }
    return std::stod(std::string(text_.substr(start, pos_ - start)));
  }

  ExprPtr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    std::size_t off = pos_;
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      auto n = std::make_shared<ExprNode>();
      n->kind = Kind::Constant;
      n->offset = off;
      n->constant = number();
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name = ident();
      if (name == "exp" || name == "log" || name == "sqrt") {
        expect('(');
        ExprPtr arg = expr();
        expect(')');
        Kind k = name == "exp" ? Kind::Exp : name == "log" ? Kind::Log : Kind::Sqrt;
        return make_node(k, off, {arg});
      }
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == name) {
          auto n = std::make_shared<ExprNode>();
          n->kind = Kind::Variable;
          n->offset = off;
          n->var = static_cast<int>(i);
          return n;
        }
      }
      throw UnknownIdentifierError("unknown identifier '" + name + "'", name);
    }
    fail("expected an expression");
  }

  std::string ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

template <class Scalar>
Scalar eval_node(const ExprNode& n, std::span<const Scalar> bind);

template <class Scalar>
Scalar eval_args_reduce(const ExprNode& n, std::span<const Scalar> bind, bool product) {
  Scalar acc = eval_node<Scalar>(*n.args[0], bind);
  for (std::size_t i = 1; i < n.args.size(); ++i) {
    Scalar v = eval_node<Scalar>(*n.args[i], bind);
    acc = product ? acc * v : acc + v;
  }
  return acc;
}

template <class Scalar>
Scalar make_const(double c, std::span<const Scalar> bind) {
  if constexpr (std::is_same_v<Scalar, double>) {
    (void)bind;
    return c;
  } else {
    return Jet4::constant(bind.empty() ? 1 : bind[0].dim(), c);
  }
}

template <class Scalar>
Scalar eval_node(const ExprNode& n, std::span<const Scalar> bind) {
  try {
    switch (n.kind) {
      case Kind::Constant:
        return make_const<Scalar>(n.constant, bind);
      case Kind::Variable:
        return bind[n.var];
      case Kind::Neg:
        return -eval_node<Scalar>(*n.args[0], bind);
      case Kind::Exp:
        return exp(eval_node<Scalar>(*n.args[0], bind));
      case Kind::Log:
        return log(eval_node<Scalar>(*n.args[0], bind));
      case Kind::Sqrt:
        return sqrt(eval_node<Scalar>(*n.args[0], bind));
      case Kind::Add:
        return eval_node<Scalar>(*n.args[0], bind) + eval_node<Scalar>(*n.args[1], bind);
      case Kind::Sub:
        return eval_node<Scalar>(*n.args[0], bind) - eval_node<Scalar>(*n.args[1], bind);
      case Kind::Mul:
        return eval_node<Scalar>(*n.args[0], bind) * eval_node<Scalar>(*n.args[1], bind);
      case Kind::Div: {
        Scalar den = eval_node<Scalar>(*n.args[1], bind);
        if (value_of(den) == 0.0) throw DomainError("division by zero");
        return eval_node<Scalar>(*n.args[0], bind) / den;
      }
      case Kind::Pow: {
        Scalar base = eval_node<Scalar>(*n.args[0], bind);
        if (n.integer_exponent) return pow(base, static_cast<int>(n.exponent));
        return pow(base, n.exponent);
      }
      case Kind::Sum:
        return eval_args_reduce<Scalar>(n, bind, false);
      case Kind::Prod:
        return eval_args_reduce<Scalar>(n, bind, true);
    }
    throw Error("corrupt expression node");
  } catch (const DomainError& e) {
    std::string msg = e.what();
    if (msg.find("at offset") == std::string::npos) {
      std::ostringstream os;
      os << msg << " at offset " << n.offset;
      throw DomainError(os.str());
    }
    throw;
  }
}

int precedence(Kind k) {
  switch (k) {
    case Kind::Add:
    case Kind::Sub:
    case Kind::Sum:
      return 1;
    case Kind::Mul:
    case Kind::Div:
    case Kind::Prod:
      return 2;
    case Kind::Neg:
      return 3;
    case Kind::Pow:
      return 4;
    default:
      return 5;
  }
}

void print_node(const ExprNode& n, const std::vector<std::string>& vars, std::ostream& os);

void print_child(const ExprNode& child, int parent_prec, bool force_paren,
                 const std::vector<std::string>& vars, std::ostream& os) {
  bool paren = force_paren || precedence(child.kind) < parent_prec;
  if (paren) os << '(';
  print_node(child, vars, os);
  if (paren) os << ')';
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print_node(const ExprNode& n, const std::vector<std::string>& vars, std::ostream& os) {
  switch (n.kind) {
    case Kind::Constant:
      os << format_double(n.constant);
      return;
    case Kind::Variable:
      os << vars[n.var];
      return;
    case Kind::Neg:
      os << '-';
      print_child(*n.args[0], precedence(Kind::Neg), false, vars, os);
      return;
    case Kind::Exp:
    case Kind::Log:
    case Kind::Sqrt:
      os << (n.kind == Kind::Exp ? "exp" : n.kind == Kind::Log ? "log" : "sqrt") << '(';
      print_node(*n.args[0], vars, os);
      os << ')';
      return;
    case Kind::Add:
    case Kind::Sub:
      print_child(*n.args[0], 1, false, vars, os);
      os << (n.kind == Kind::Add ? '+' : '-');
      // Right operand of '-' needs parens at equal precedence (left assoc).
      print_child(*n.args[1], 1, n.kind == Kind::Sub && precedence(n.args[1]->kind) == 1, vars,
                  os);
      return;
    case Kind::Mul:
    case Kind::Div:
      print_child(*n.args[0], 2, false, vars, os);
      os << (n.kind == Kind::Mul ? '*' : '/');
      print_child(*n.args[1], 2, n.kind == Kind::Div && precedence(n.args[1]->kind) == 2, vars,
                  os);
      return;
    case Kind::Pow:
      print_child(*n.args[0], 5, false, vars, os);
      os << '^';
      if (n.exponent < 0) {
        os << '(' << format_double(n.exponent) << ')';
      } else {
        os << format_double(n.exponent);
      }
      return;
    case Kind::Sum:
    case Kind::Prod: {
      char op = n.kind == Kind::Sum ? '+' : '*';
      int prec = precedence(n.kind);
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) os << op;
        print_child(*n.args[i], prec + (i ? 1 : 0), false, vars, os);
      }
      return;
    }
  }
}

}  // namespace

ExprAst ExprAst::parse(std::string_view text, std::vector<std::string> vars) {
  Parser p(text, vars);
  ExprPtr root = p.run();  // must finish before vars is moved from
  return ExprAst(std::move(root), std::move(vars));
}

ExprAst ExprAst::constant(double c, std::vector<std::string> vars) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Constant;
  n->constant = c;
  return ExprAst(std::move(n), std::move(vars));
}

ExprAst ExprAst::variable(const std::string& name, std::vector<std::string> vars) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Variable;
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == name) n->var = static_cast<int>(i);
  if (n->var < 0) throw UnknownIdentifierError("unknown identifier '" + name + "'", name);
  return ExprAst(std::move(n), std::move(vars));
}

ExprAst ExprAst::sum(std::vector<ExprAst> terms) {
  if (terms.empty()) throw Error("sum of zero terms");
  std::vector<ExprPtr> args;
  for (auto& t : terms) args.push_back(t.root());
  return ExprAst(make_node(ExprNode::Kind::Sum, 0, std::move(args)), terms[0].variables());
}

ExprAst ExprAst::prod(std::vector<ExprAst> factors) {
  if (factors.empty()) throw Error("product of zero factors");
  std::vector<ExprPtr> args;
  for (auto& t : factors) args.push_back(t.root());
  return ExprAst(make_node(ExprNode::Kind::Prod, 0, std::move(args)), factors[0].variables());
}

template <class Scalar>
Scalar ExprAst::eval(std::span<const Scalar> bindings) const {
  if (!root_) throw Error("evaluating an empty expression");
  if (bindings.size() != vars_.size()) throw DimensionError("binding count mismatch");
  return eval_node<Scalar>(*root_, bindings);
}

template double ExprAst::eval<double>(std::span<const double>) const;
template Jet4 ExprAst::eval<Jet4>(std::span<const Jet4>) const;

std::string ExprAst::to_string() const {
  if (!root_) return "";
  std::ostringstream os;
  print_node(*root_, vars_, os);
  return os.str();
}

ScalarField ExprAst::field() const {
  ExprAst copy = *this;
  return ScalarField(
      arity(), [copy](std::span<const double> y) { return copy.eval(y); },
      [copy](std::span<const Jet4> y) { return copy.eval(y); });
}

}  // namespace infogeo
