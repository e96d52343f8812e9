#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>

namespace bsq {

/// Immutable real-valued scalar field f(x, xi) parsed from text.
///
/// Grammar (whitespace insignificant):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?          right associative
///     primary := number | 'x' | 'xi' | 'pi' | func '(' args ')' | '(' expr ')'
///
/// Functions: sin cos tan tanh exp log sqrt abs (one argument), atan2 (two).
/// Copies share the parsed tree; evaluation is reentrant.
class Expr {
 public:
  /// The literal 0.
  Expr();

  static Expr parse(std::string_view text);
  static Expr constant(double value);

  /// Throws Error{DomainError} instead of producing NaN or infinity.
  double eval(double x, double xi) const;

  /// Central differences with one Richardson level. The step for each variable
  /// is scale * max(1, |v|) * eps^(1/3).
  std::pair<double, double> grad(double x, double xi, double scale = 1.0) const;

  /// Canonical text; parse(str()) prints back identically.
  std::string str() const;

  bool depends_on_x() const noexcept;
  bool depends_on_xi() const noexcept;

  struct Tree;

 private:
  explicit Expr(std::shared_ptr<const Tree> tree);
  std::shared_ptr<const Tree> tree_;
};

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

}  // namespace bsq
