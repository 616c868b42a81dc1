#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vexlab/error.hpp"
#include "vexlab/numeric.hpp"

namespace vexlab {

// Double logarithm extended by zero inside the ball |x| < e:
// log(log t) for t >= e, 0 otherwise. Continuous at t = e.
inline double loglog_or_zero(double t) {
  return t >= std::numbers::e ? std::log(std::log(t)) : 0.0;
}

// Small closed-form expression language over points of R^n.
//
//   numbers, e, pi, inf
//   x, x1, x2, x3          coordinates (x is x1)
//   |x|, r                 Euclidean norm of the point
//   + - * / ^ and unary -, parentheses, |expr| for absolute value
//   log exp sin cos sqrt abs loglog      (loglog: log log t, 0 for t < e)
//   min(a,b) max(a,b)
//   chi(a,b)               1 on the annulus a <= |x| < b
//   indicator(a,b)         1 on the cube [a,b]^n
//
// Parsed once into an immutable node array; evaluation is reentrant.
class Expression {
 public:
  static Expression parse(std::string_view text) {
    Parser parser{text, {}, 0};
    auto nodes = std::make_shared<std::vector<Node>>();
    parser.nodes = nodes.get();
    const int root = parser.expr();
    parser.skip_space();
    if (parser.pos != text.size()) parser.fail("unexpected trailing input");
    Expression out;
    out.text_ = std::string(text);
    out.nodes_ = std::move(nodes);
    out.root_ = root;
    for (const auto& n : *out.nodes_) {
      if (n.op == Op::coord) {
        out.max_coord_ = std::max(out.max_coord_, n.index + 1);
        out.radial_ = false;
      }
      if (n.op == Op::indicator) out.radial_ = false;
    }
    return out;
  }

  double operator()(std::span<const double> x) const {
    return eval(root_, Ctx{x, euclidean_norm(x)});
  }

  // Evaluation from the norm alone; only meaningful when radial().
  double at_radius(double r) const { return eval(root_, Ctx{{}, r}); }

  const std::string& text() const noexcept { return text_; }
  // Highest coordinate index referenced (1-based), 0 if none.
  int max_coordinate() const noexcept { return max_coord_; }
  // True when the expression depends on the point only through |x|.
  bool radial() const noexcept { return radial_; }

 private:
  enum class Op {
    constant, coord, norm, add, sub, mul, div, pow, neg,
    log, exp, sin, cos, sqrt, abs, loglog, min, max, chi, indicator
  };

  struct Node {
    Op op;
    double value = 0.0;
    int index = 0;
    int a = -1;
    int b = -1;
  };

  struct Ctx {
    std::span<const double> x;
    double norm;
  };

  double eval(int i, const Ctx& c) const {
    const Node& n = (*nodes_)[static_cast<std::size_t>(i)];
    switch (n.op) {
      case Op::constant: return n.value;
      case Op::coord:
        return static_cast<std::size_t>(n.index) < c.x.size()
                   ? c.x[static_cast<std::size_t>(n.index)]
                   : 0.0;
      case Op::norm: return c.norm;
      case Op::add: return eval(n.a, c) + eval(n.b, c);
      case Op::sub: return eval(n.a, c) - eval(n.b, c);
      case Op::mul: return eval(n.a, c) * eval(n.b, c);
      case Op::div: return eval(n.a, c) / eval(n.b, c);
      case Op::pow: return std::pow(eval(n.a, c), eval(n.b, c));
      case Op::neg: return -eval(n.a, c);
      case Op::log: return std::log(eval(n.a, c));
      case Op::exp: return std::exp(eval(n.a, c));
      case Op::sin: return std::sin(eval(n.a, c));
      case Op::cos: return std::cos(eval(n.a, c));
      case Op::sqrt: return std::sqrt(eval(n.a, c));
      case Op::abs: return std::abs(eval(n.a, c));
      case Op::loglog: return loglog_or_zero(eval(n.a, c));
      case Op::min: return std::min(eval(n.a, c), eval(n.b, c));
      case Op::max: return std::max(eval(n.a, c), eval(n.b, c));
      case Op::chi: {
        const double lo = eval(n.a, c), hi = eval(n.b, c);
        return (c.norm >= lo && c.norm < hi) ? 1.0 : 0.0;
      }
      case Op::indicator: {
        const double lo = eval(n.a, c), hi = eval(n.b, c);
        for (double xi : c.x)
          if (!(xi >= lo && xi <= hi)) return 0.0;
        return c.x.empty() ? 0.0 : 1.0;
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  struct Parser {
    std::string_view src;
    std::vector<Node>* nodes;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& msg) const {
      throw SpecError("expression '" + std::string(src) + "': " + msg +
                      " at offset " + std::to_string(pos));
    }

    int push(Node n) {
      nodes->push_back(n);
      return static_cast<int>(nodes->size() - 1);
    }

    void skip_space() {
      while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    bool accept(char ch) {
      skip_space();
      if (pos < src.size() && src[pos] == ch) {
        ++pos;
        return true;
      }
      return false;
    }

    void expect(char ch) {
      if (!accept(ch)) fail(std::string("expected '") + ch + "'");
    }

    int expr() {
      int lhs = term();
      for (;;) {
        if (accept('+')) lhs = push({Op::add, 0, 0, lhs, term()});
        else if (accept('-')) lhs = push({Op::sub, 0, 0, lhs, term()});
        else return lhs;
      }
    }

    int term() {
      int lhs = unary();
      for (;;) {
        if (accept('*')) lhs = push({Op::mul, 0, 0, lhs, unary()});
        else if (accept('/')) lhs = push({Op::div, 0, 0, lhs, unary()});
        else return lhs;
      }
    }

    int unary() {
      if (accept('-')) return push({Op::neg, 0, 0, unary()});
      if (accept('+')) return unary();
      return power();
    }

    int power() {
      const int base = primary();
      if (accept('^')) return push({Op::pow, 0, 0, base, unary()});
      return base;
    }

    std::string identifier() {
      const std::size_t start = pos;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
        ++pos;
      return std::string(src.substr(start, pos - start));
    }

    int primary() {
      skip_space();
      if (pos >= src.size()) fail("unexpected end of input");
      const char ch = src[pos];
      if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return number();
      if (ch == '(') {
        ++pos;
        const int inner = expr();
        expect(')');
        return inner;
      }
      if (ch == '|') {
        ++pos;
        skip_space();
        // |x| is the Euclidean norm; anything else is an absolute value.
        if (src.substr(pos, 1) == "x") {
          const std::size_t save = pos;
          ++pos;
          if (accept('|')) return push({Op::norm});
          pos = save;
        }
        const int inner = expr();
        expect('|');
        return push({Op::abs, 0, 0, inner});
      }
      if (std::isalpha(static_cast<unsigned char>(ch))) return named();
      fail(std::string("unexpected character '") + ch + "'");
    }

    int number() {
      const std::string tail(src.substr(pos));
      char* end = nullptr;
      const double v = std::strtod(tail.c_str(), &end);
      const auto used = static_cast<std::size_t>(end - tail.c_str());
      if (used == 0) fail("bad number");
      pos += used;
      return push({Op::constant, v});
    }

    int named() {
      const std::string name = identifier();
      skip_space();
      const bool call = pos < src.size() && src[pos] == '(';
      if (!call) {
        if (name == "x" || name == "x1") return push({Op::coord, 0, 0});
        if (name == "x2") return push({Op::coord, 0, 1});
        if (name == "x3") return push({Op::coord, 0, 2});
        if (name == "r") return push({Op::norm});
        if (name == "e") return push({Op::constant, std::numbers::e});
        if (name == "pi") return push({Op::constant, std::numbers::pi});
        if (name == "inf") return push({Op::constant, std::numeric_limits<double>::infinity()});
        fail("unknown identifier '" + name + "'");
      }
      ++pos;  // '('
      struct Fn {
        const char* name;
        Op op;
        int arity;
      };
      static constexpr Fn kFns[] = {
          {"log", Op::log, 1},       {"exp", Op::exp, 1},       {"sin", Op::sin, 1},
          {"cos", Op::cos, 1},       {"sqrt", Op::sqrt, 1},     {"abs", Op::abs, 1},
          {"loglog", Op::loglog, 1}, {"min", Op::min, 2},       {"max", Op::max, 2},
          {"chi", Op::chi, 2},       {"indicator", Op::indicator, 2},
      };
      for (const auto& fn : kFns) {
        if (name != fn.name) continue;
        const int a = expr();
        int b = -1;
        if (fn.arity == 2) {
          expect(',');
          b = expr();
        }
        expect(')');
        return push({fn.op, 0, 0, a, b});
      }
      fail("unknown function '" + name + "'");
    }
  };

  std::string text_;
  std::shared_ptr<const std::vector<Node>> nodes_;
  int root_ = 0;
  int max_coord_ = 0;
  bool radial_ = true;
};

}  // namespace vexlab
