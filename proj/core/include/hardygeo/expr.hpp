#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace hardygeo {

struct ExprError : std::runtime_error {
  std::size_t pos;  // 0-based offset into the source string
  ExprError(std::size_t p, const std::string& msg)
      : std::runtime_error(msg), pos(p) {}
};

// Scalar expression in the variables x, y, z. Supports + - * / ^ (right
// associative), unary minus, parentheses, numeric literals, the constant pi,
// and the functions sqrt, sin, cos, tan, asin, acos, atan, exp, log, abs,
// pow(a,b), min(a,b), max(a,b), hypot(a,b).
class Expr {
 public:
  struct Node;

  Expr() = default;
  static Expr parse(const std::string& src);  // throws ExprError
  double eval(double x, double y, double z) const;
  bool valid() const { return root_ != nullptr; }
  const std::string& source() const { return src_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string src_;
};

}  // namespace hardygeo
