#include "ssde/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>

namespace ssde {

struct Expression::Node {
  enum class Op { constant, variable, add, sub, mul, div, neg, sqrt, abs };
  Op op = Op::constant;
  double value = 0.0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->value = value;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected character");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExpressionError("expression '" + std::string(text_) + "': " + what + " at column " +
                          std::to_string(pos_ + 1));
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) n = make(Op::add, n, term());
      else if (accept('-')) n = make(Op::sub, n, term());
      else return n;
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = make(Op::mul, n, unary());
      else if (accept('/')) n = make(Op::div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::neg, unary());
    return primary();
  }

  NodePtr primary() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) ++end;
      const std::string_view word = text_.substr(pos_, end - pos_);
      pos_ = end;
      if (word == "x") return make(Op::variable);
      if (word == "sqrt" || word == "abs") {
        if (!accept('(')) fail("expected '(' after " + std::string(word));
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make(word == "sqrt" ? Op::sqrt : Op::abs, arg);
      }
      fail("unknown identifier '" + std::string(word) + "'");
    }
    fail("unexpected character");
  }

  NodePtr number() {
    const std::string tail(text_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(tail.c_str(), &end);
    if (end == tail.c_str()) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - tail.c_str());
    return make(Op::constant, nullptr, nullptr, v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double eval(const Expression::Node& n, double x) {
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::variable: return x;
    case Op::add: return eval(*n.lhs, x) + eval(*n.rhs, x);
    case Op::sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
    case Op::mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
    case Op::div: return eval(*n.lhs, x) / eval(*n.rhs, x);
    case Op::neg: return -eval(*n.lhs, x);
    case Op::sqrt: return std::sqrt(eval(*n.lhs, x));
    case Op::abs: return std::abs(eval(*n.lhs, x));
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.root_ = Parser(text).parse();
  e.source_ = std::string(text);
  return e;
}

double Expression::operator()(double x) const { return eval(*root_, x); }

}  // namespace ssde
