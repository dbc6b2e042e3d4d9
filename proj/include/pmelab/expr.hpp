#pragma once

#include <memory>
#include <string>

namespace pmelab {

/// Arithmetic expression in t, x, y with + - * / ^, unary minus, numeric
/// literals and the functions pow(a, b), exp(a), abs(a). Parsed once,
/// evaluated many times.
class Expr {
 public:
  struct Node;

  static Expr parse(const std::string& text);

  double operator()(double t, double x, double y = 0.0) const;
  const std::string& text() const { return text_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace pmelab
