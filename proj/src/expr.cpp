#include "bsq/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "bsq/error.hpp"

namespace bsq {

namespace {

enum class Op : std::uint8_t { Num, X, Xi, Add, Sub, Mul, Div, Pow, Neg, Call };

enum class Fn : std::uint8_t { Sin, Cos, Tan, Tanh, Exp, Log, Sqrt, Abs, Atan2 };

struct FnInfo {
  std::string_view name;
  Fn fn;
  int arity;
};

constexpr std::array<FnInfo, 9> kFunctions{{
    {"sin", Fn::Sin, 1},
    {"cos", Fn::Cos, 1},
    {"tan", Fn::Tan, 1},
    {"tanh", Fn::Tanh, 1},
    {"exp", Fn::Exp, 1},
    {"log", Fn::Log, 1},
    {"sqrt", Fn::Sqrt, 1},
    {"abs", Fn::Abs, 1},
    {"atan2", Fn::Atan2, 2},
}};

std::string_view fn_name(Fn fn) {
  for (const auto& info : kFunctions)
    if (info.fn == fn) return info.name;
  return "?";
}

struct Node {
  Op op = Op::Num;
  Fn fn = Fn::Sin;
  int a = -1;
  int b = -1;
  double value = 0.0;
};

}  // namespace

struct Expr::Tree {
  std::vector<Node> nodes;
  int root = 0;
  bool uses_x = false;
  bool uses_xi = false;
};

namespace {

using Tree = Expr::Tree;

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Tree run() {
    tree_.root = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) {
      throw SyntaxError(pos_, "unexpected '" + std::string(1, text_[pos_]) +
                                  "', expected operator or end of input");
    }
    for (const auto& n : tree_.nodes) {
      tree_.uses_x |= n.op == Op::X;
      tree_.uses_xi |= n.op == Op::Xi;
    }
    return std::move(tree_);
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, std::string_view context) {
    if (!accept(c)) {
      throw SyntaxError(pos_, "expected '" + std::string(1, c) + "' " +
                                  std::string(context));
    }
  }

  int add(Node n) {
    tree_.nodes.push_back(n);
    return static_cast<int>(tree_.nodes.size()) - 1;
  }

  int binary(Op op, int a, int b) {
    Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    return add(n);
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = binary(Op::Add, lhs, parse_term());
      else if (accept('-'))
        lhs = binary(Op::Sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      if (accept('*'))
        lhs = binary(Op::Mul, lhs, parse_unary());
      else if (accept('/'))
        lhs = binary(Op::Div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  int parse_unary() {
    if (accept('-')) {
      Node n;
      n.op = Op::Neg;
      n.a = parse_unary();
      return add(n);
    }
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    if (accept('^')) return binary(Op::Pow, base, parse_unary());
    return base;
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= text_.size())
      throw SyntaxError(pos_, "unexpected end of input, expected operand");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      int inner = parse_expr();
      expect(')', "to close '('");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw SyntaxError(pos_, "unexpected '" + std::string(1, c) + "', expected operand");
  }

  int parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw SyntaxError(start, "malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw SyntaxError(pos_, "malformed exponent");
    }
    double value = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || !std::isfinite(value))
      throw SyntaxError(start, "number out of range");
    Node n;
    n.op = Op::Num;
    n.value = value;
    return add(n);
  }

  int parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view id = text_.substr(start, pos_ - start);
    Node n;
    if (id == "x") {
      n.op = Op::X;
      return add(n);
    }
    if (id == "xi") {
      n.op = Op::Xi;
      return add(n);
    }
    if (id == "pi") {
      n.op = Op::Num;
      n.value = M_PI;
      return add(n);
    }
    for (const auto& info : kFunctions) {
      if (info.name != id) continue;
      expect('(', "after function name '" + std::string(id) + "'");
      n.op = Op::Call;
      n.fn = info.fn;
      n.a = parse_expr();
      if (info.arity == 2) {
        expect(',', "between arguments of '" + std::string(id) + "'");
        n.b = parse_expr();
      }
      expect(')', "to close argument list of '" + std::string(id) + "'");
      return add(n);
    }
    throw Error(ErrorKind::UnknownIdentifier,
                "offset " + std::to_string(start) + ": unknown identifier '" +
                    std::string(id) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Tree tree_;
};

[[noreturn]] void domain_error(std::string_view what, double arg, double x, double xi) {
  throw Error(ErrorKind::DomainError,
              std::string(what) + " (argument " + format_number(arg) + ") at x=" +
                  format_number(x) + ", xi=" + format_number(xi));
}

double eval_node(const Tree& t, int i, double x, double xi) {
  const Node& n = t.nodes[static_cast<std::size_t>(i)];
  switch (n.op) {
    case Op::Num: return n.value;
    case Op::X: return x;
    case Op::Xi: return xi;
    case Op::Neg: return -eval_node(t, n.a, x, xi);
    case Op::Add: return eval_node(t, n.a, x, xi) + eval_node(t, n.b, x, xi);
    case Op::Sub: return eval_node(t, n.a, x, xi) - eval_node(t, n.b, x, xi);
    case Op::Mul: return eval_node(t, n.a, x, xi) * eval_node(t, n.b, x, xi);
    case Op::Div: {
      const double num = eval_node(t, n.a, x, xi);
      const double den = eval_node(t, n.b, x, xi);
      if (den == 0.0) domain_error("division by zero", den, x, xi);
      return num / den;
    }
    case Op::Pow: {
      const double base = eval_node(t, n.a, x, xi);
      const double ex = eval_node(t, n.b, x, xi);
      if (base < 0.0 && ex != std::floor(ex))
        domain_error("negative base with non-integer exponent", base, x, xi);
      if (base == 0.0 && ex < 0.0) domain_error("zero to a negative power", ex, x, xi);
      if (ex == 2.0) return base * base;
      return std::pow(base, ex);
    }
    case Op::Call: {
      const double a = eval_node(t, n.a, x, xi);
      switch (n.fn) {
        case Fn::Sin: return std::sin(a);
        case Fn::Cos: return std::cos(a);
        case Fn::Tan: return std::tan(a);
        case Fn::Tanh: return std::tanh(a);
        case Fn::Exp: return std::exp(a);
        case Fn::Abs: return std::abs(a);
        case Fn::Sqrt:
          if (a < 0.0) domain_error("sqrt of negative", a, x, xi);
          return std::sqrt(a);
        case Fn::Log:
          if (a <= 0.0) domain_error("log of non-positive", a, x, xi);
          return std::log(a);
        case Fn::Atan2: return std::atan2(a, eval_node(t, n.b, x, xi));
      }
    }
  }
  return 0.0;
}

// Printing precedence: sums 1, products 2, negation 3, powers 4, atoms 5.
int precedence(const Tree& t, int i) {
  const Node& n = t.nodes[static_cast<std::size_t>(i)];
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    case Op::Num: return (n.value < 0.0 || std::signbit(n.value)) ? 3 : 5;
    default: return 5;
  }
}

void print_node(const Tree& t, int i, std::string& out);

void print_wrapped(const Tree& t, int i, bool parens, std::string& out) {
  if (parens) out += '(';
  print_node(t, i, out);
  if (parens) out += ')';
}

void print_node(const Tree& t, int i, std::string& out) {
  const Node& n = t.nodes[static_cast<std::size_t>(i)];
  const int p = precedence(t, i);
  switch (n.op) {
    case Op::Num:
      if (n.value == M_PI) {
        out += "pi";
      } else {
        out += format_number(n.value);
      }
      return;
    case Op::X: out += "x"; return;
    case Op::Xi: out += "xi"; return;
    case Op::Neg:
      out += '-';
      print_wrapped(t, n.a, precedence(t, n.a) < 3, out);
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      static constexpr std::array<std::string_view, 4> sym{" + ", " - ", "*", "/"};
      print_wrapped(t, n.a, precedence(t, n.a) < p, out);
      out += sym[static_cast<std::size_t>(n.op) - static_cast<std::size_t>(Op::Add)];
      print_wrapped(t, n.b, precedence(t, n.b) <= p, out);
      return;
    }
    case Op::Pow:
      print_wrapped(t, n.a, precedence(t, n.a) <= 4, out);
      out += '^';
      print_wrapped(t, n.b, precedence(t, n.b) < 3, out);
      return;
    case Op::Call:
      out += fn_name(n.fn);
      out += '(';
      print_node(t, n.a, out);
      if (n.fn == Fn::Atan2) {
        out += ", ";
        print_node(t, n.b, out);
      }
      out += ')';
      return;
  }
}

std::shared_ptr<const Tree> literal_tree(double value) {
  auto tree = std::make_shared<Tree>();
  Node n;
  n.op = Op::Num;
  n.value = value;
  tree->nodes.push_back(n);
  return tree;
}

}  // namespace

Expr::Expr() : tree_(literal_tree(0.0)) {}

Expr::Expr(std::shared_ptr<const Tree> tree) : tree_(std::move(tree)) {}

Expr Expr::parse(std::string_view text) {
  return Expr(std::make_shared<const Tree>(Parser(text).run()));
}

Expr Expr::constant(double value) {
  if (!std::isfinite(value))
    throw Error(ErrorKind::DomainError, "non-finite constant");
  return Expr(literal_tree(value));
}

double Expr::eval(double x, double xi) const {
  const double v = eval_node(*tree_, tree_->root, x, xi);
  if (!std::isfinite(v)) domain_error("non-finite result", v, x, xi);
  return v;
}

std::pair<double, double> Expr::grad(double x, double xi, double scale) const {
  static const double kStep = std::cbrt(std::numeric_limits<double>::epsilon());
  auto central = [&](double d, bool along_x) {
    if (along_x) return (eval(x + d, xi) - eval(x - d, xi)) / (2.0 * d);
    return (eval(x, xi + d) - eval(x, xi - d)) / (2.0 * d);
  };
  auto partial = [&](bool along_x, bool depends) {
    if (!depends) return 0.0;
    const double v = along_x ? x : xi;
    const double d = scale * std::max(1.0, std::abs(v)) * kStep;
    return (4.0 * central(0.5 * d, along_x) - central(d, along_x)) / 3.0;
  };
  return {partial(true, tree_->uses_x), partial(false, tree_->uses_xi)};
}

std::string Expr::str() const {
  std::string out;
  print_node(*tree_, tree_->root, out);
  return out;
}

bool Expr::depends_on_x() const noexcept { return tree_->uses_x; }
bool Expr::depends_on_xi() const noexcept { return tree_->uses_xi; }

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

}  // namespace bsq
