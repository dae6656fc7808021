// Copyright 2026 The pathint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PATHINT_EXPR_HPP
#define PATHINT_EXPR_HPP

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include "pathint/errors.hpp"

/**
 * \file
 * \brief Scalar arithmetic expressions over t and x.
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := unary (('*' | '/') unary)*
 *   unary   := '-' unary | power
 *   power   := primary ('^' unary)?
 *   primary := number | 't' | 'x' | ('log' | 'exp') '(' expr ')' | '(' expr ')'
 *
 * '^' binds tighter than unary minus on its left and is right-associative, so -x^2 is -(x^2)
 * and 2^3^2 is 2^9.
 */

namespace pathint {

class ExpressionError : public InvalidArgument {
 public:
  ExpressionError(const std::string& source, std::size_t column, const std::string& what)
      : InvalidArgument("expression '" + source + "', column " + std::to_string(column + 1) +
                        ": " + what),
        column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class Expression {
 public:
  Expression() = default;

  static Expression parse(std::string_view source) {
    Parser p{source, 0};
    Expression e;
    e.source_ = std::string(source);
    e.root_ = p.expr();
    p.skip_space();
    if (p.pos != source.size()) {
      p.fail("unexpected '" + std::string(1, source[p.pos]) + "'");
    }
    return e;
  }

  double operator()(double t, double x) const {
    if (!root_) {
      throw InvalidArgument("empty expression");
    }
    return root_->eval(t, x);
  }

  const std::string& source() const noexcept { return source_; }

 private:
  enum class Op { number, t, x, add, sub, mul, div, pow, neg, log, exp };

  struct Node {
    Op op = Op::number;
    double value = 0.0;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;

    double eval(double t, double x) const {
      switch (op) {
        case Op::number: return value;
        case Op::t: return t;
        case Op::x: return x;
        case Op::add: return a->eval(t, x) + b->eval(t, x);
        case Op::sub: return a->eval(t, x) - b->eval(t, x);
        case Op::mul: return a->eval(t, x) * b->eval(t, x);
        case Op::div: return a->eval(t, x) / b->eval(t, x);
        case Op::pow: return std::pow(a->eval(t, x), b->eval(t, x));
        case Op::neg: return -a->eval(t, x);
        case Op::log: return std::log(a->eval(t, x));
        case Op::exp: return std::exp(a->eval(t, x));
      }
      return 0.0;
    }
  };
  using NodePtr = std::shared_ptr<const Node>;

  static NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double value = 0.0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = value;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  struct Parser {
    std::string_view src;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      throw ExpressionError(std::string(src), pos, what);
    }

    void skip_space() {
      while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])) != 0) {
        ++pos;
      }
    }

    bool accept(char c) {
      skip_space();
      if (pos < src.size() && src[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    void expect(char c) {
      if (!accept(c)) {
        fail(std::string("expected '") + c + "'");
      }
    }

    NodePtr expr() {
      NodePtr lhs = term();
      for (;;) {
        if (accept('+')) {
          lhs = make(Op::add, lhs, term());
        } else if (accept('-')) {
          lhs = make(Op::sub, lhs, term());
        } else {
          return lhs;
        }
      }
    }

    NodePtr term() {
      NodePtr lhs = unary();
      for (;;) {
        if (accept('*')) {
          lhs = make(Op::mul, lhs, unary());
        } else if (accept('/')) {
          lhs = make(Op::div, lhs, unary());
        } else {
          return lhs;
        }
      }
    }

    NodePtr unary() {
      if (accept('-')) {
        return make(Op::neg, unary());
      }
      return power();
    }

    NodePtr power() {
      NodePtr base = primary();
      if (accept('^')) {
        return make(Op::pow, base, unary());
      }
      return base;
    }

    NodePtr primary() {
      skip_space();
      if (pos >= src.size()) {
        fail("unexpected end of expression");
      }
      const char c = src[pos];
      if (c == '(') {
        ++pos;
        NodePtr inner = expr();
        expect(')');
        return inner;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '.') {
        return number();
      }
      if (std::isalpha(static_cast<unsigned char>(c)) != 0) {
        const std::size_t start = pos;
        while (pos < src.size() && std::isalpha(static_cast<unsigned char>(src[pos])) != 0) {
          ++pos;
        }
        const std::string_view word = src.substr(start, pos - start);
        if (word == "t") {
          return make(Op::t);
        }
        if (word == "x") {
          return make(Op::x);
        }
        if (word == "log" || word == "exp") {
          expect('(');
          NodePtr arg = expr();
          expect(')');
          return make(word == "log" ? Op::log : Op::exp, arg);
        }
        pos = start;
        fail("unknown identifier '" + std::string(word) + "'");
      }
      fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
      double v = 0.0;
      const char* first = src.data() + pos;
      const char* last = src.data() + src.size();
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr == first) {
        fail("malformed number");
      }
      pos += static_cast<std::size_t>(ptr - first);
      return make(Op::number, nullptr, nullptr, v);
    }
  };

  std::string source_;
  NodePtr root_;
};

}  // namespace pathint

#endif  // PATHINT_EXPR_HPP
