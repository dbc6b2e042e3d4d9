#include "pmelab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "pmelab/error.hpp"

namespace pmelab {

struct Expr::Node {
  enum Kind { number, var_t, var_x, var_y, neg, add, sub, mul, div, pow, exp, abs } kind;
  double value = 0.0;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(double t, double x, double y) const {
    auto a = [&](int i) { return args[i]->eval(t, x, y); };
    switch (kind) {
      case number: return value;
      case var_t: return t;
      case var_x: return x;
      case var_y: return y;
      case neg: return -a(0);
      case add: return a(0) + a(1);
      case sub: return a(0) - a(1);
      case mul: return a(0) * a(1);
      case div: return a(0) / a(1);
      case pow: return std::pow(a(0), a(1));
      case exp: return std::exp(a(0));
      case abs: return std::abs(a(0));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Expr::Node::Kind k, std::vector<NodePtr> args = {}, double v = 0.0) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = k;
  n->value = v;
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    auto e = sum();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void error(const std::string& msg) const {
    fail(Errc::config_error, "expression '" + s_ + "' at offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) error(std::string("expected '") + c + "'");
  }

  NodePtr sum() {
    auto lhs = product();
    for (;;) {
      if (accept('+'))
        lhs = make(Expr::Node::add, {lhs, product()});
      else if (accept('-'))
        lhs = make(Expr::Node::sub, {lhs, product()});
      else
        return lhs;
    }
  }

  NodePtr product() {
    auto lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make(Expr::Node::mul, {lhs, unary()});
      else if (accept('/'))
        lhs = make(Expr::Node::div, {lhs, unary()});
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Expr::Node::neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  // Right associative, binds tighter than unary minus on its left: -x^2 = -(x^2).
  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make(Expr::Node::pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    const char c = s_[pos_];
    if (accept('(')) {
      auto e = sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) error("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Expr::Node::number, {}, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "t") return make(Expr::Node::var_t);
      if (id == "x") return make(Expr::Node::var_x);
      if (id == "y") return make(Expr::Node::var_y);
      if (id == "pow") {
        expect('(');
        auto a = sum();
        expect(',');
        auto b = sum();
        expect(')');
        return make(Expr::Node::pow, {a, b});
      }
      if (id == "exp" || id == "abs") {
        expect('(');
        auto a = sum();
        expect(')');
        return make(id == "exp" ? Expr::Node::exp : Expr::Node::abs, {a});
      }
      pos_ = start;
      error("unknown identifier '" + id + "'");
    }
    error("unexpected '" + std::string(1, c) + "'");
  }
};

}  // namespace

Expr Expr::parse(const std::string& text) {
  Expr e;
  e.root_ = Parser(text).parse();
  e.text_ = text;
  return e;
}

double Expr::operator()(double t, double x, double y) const { return root_->eval(t, x, y); }

}  // namespace pmelab
