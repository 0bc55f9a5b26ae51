#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ssde {

class ExpressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scalar expression in one variable `x`.
///
/// Grammar:
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | primary
///   primary := number | 'x' | ('sqrt' | 'abs') '(' expr ')' | '(' expr ')'
class Expression {
 public:
  struct Node;

  static Expression parse(std::string_view text);

  double operator()(double x) const;
  const std::string& source() const { return source_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

}  // namespace ssde
