#include "hardygeo/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace hardygeo {

namespace {

enum class Op {
  kConst, kVar,            // leaf
  kAdd, kSub, kMul, kDiv, kPow, kNeg,
  kSqrt, kSin, kCos, kTan, kAsin, kAcos, kAtan, kExp, kLog, kAbs,
  kMin, kMax, kHypot
};

}  // namespace

struct Expr::Node {
  Op op = Op::kConst;
  double value = 0.0;  // kConst
  int var = 0;         // kVar: 0=x 1=y 2=z
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) { throw ExprError(pos_, msg); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+')) lhs = make(Op::kAdd, lhs, term());
      else if (eat('-')) lhs = make(Op::kSub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*')) lhs = make(Op::kMul, lhs, unary());
      else if (eat('/')) lhs = make(Op::kDiv, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(Op::kNeg, unary());
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return make(Op::kPow, base, unary());  // right associative
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("invalid number");
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<Expr::Node>();
    n->op = Op::kConst;
    n->value = v;
    return n;
  }

  NodePtr ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string name = s_.substr(start, pos_ - start);
    if (name == "x" || name == "y" || name == "z") {
      auto n = std::make_shared<Expr::Node>();
      n->op = Op::kVar;
      n->var = name == "x" ? 0 : name == "y" ? 1 : 2;
      return n;
    }
    if (name == "pi") {
      auto n = std::make_shared<Expr::Node>();
      n->op = Op::kConst;
      n->value = 3.14159265358979323846;
      return n;
    }
    struct Fn { const char* name; Op op; int arity; };
    static const Fn fns[] = {
        {"sqrt", Op::kSqrt, 1}, {"sin", Op::kSin, 1},   {"cos", Op::kCos, 1},
        {"tan", Op::kTan, 1},   {"asin", Op::kAsin, 1}, {"acos", Op::kAcos, 1},
        {"atan", Op::kAtan, 1}, {"exp", Op::kExp, 1},   {"log", Op::kLog, 1},
        {"abs", Op::kAbs, 1},   {"pow", Op::kPow, 2},   {"min", Op::kMin, 2},
        {"max", Op::kMax, 2},   {"hypot", Op::kHypot, 2}};
    for (const Fn& f : fns) {
      if (name == f.name) {
        if (!eat('(')) fail("expected '(' after function name");
        NodePtr a = expr();
        NodePtr b;
        if (f.arity == 2) {
          if (!eat(',')) fail("expected ',' in two-argument function");
          b = expr();
        }
        if (!eat(')')) fail("expected ')'");
        return make(f.op, a, b);
      }
    }
    pos_ = start;
    fail("unknown identifier '" + name + "'");
  }
};

double eval_node(const Expr::Node* n, double x, double y, double z) {
  switch (n->op) {
    case Op::kConst: return n->value;
    case Op::kVar: return n->var == 0 ? x : n->var == 1 ? y : z;
    case Op::kAdd: return eval_node(n->a.get(), x, y, z) + eval_node(n->b.get(), x, y, z);
    case Op::kSub: return eval_node(n->a.get(), x, y, z) - eval_node(n->b.get(), x, y, z);
    case Op::kMul: return eval_node(n->a.get(), x, y, z) * eval_node(n->b.get(), x, y, z);
    case Op::kDiv: return eval_node(n->a.get(), x, y, z) / eval_node(n->b.get(), x, y, z);
    case Op::kPow: return std::pow(eval_node(n->a.get(), x, y, z), eval_node(n->b.get(), x, y, z));
    case Op::kNeg: return -eval_node(n->a.get(), x, y, z);
    case Op::kSqrt: return std::sqrt(eval_node(n->a.get(), x, y, z));
    case Op::kSin: return std::sin(eval_node(n->a.get(), x, y, z));
    case Op::kCos: return std::cos(eval_node(n->a.get(), x, y, z));
    case Op::kTan: return std::tan(eval_node(n->a.get(), x, y, z));
    case Op::kAsin: return std::asin(eval_node(n->a.get(), x, y, z));
    case Op::kAcos: return std::acos(eval_node(n->a.get(), x, y, z));
    case Op::kAtan: return std::atan(eval_node(n->a.get(), x, y, z));
    case Op::kExp: return std::exp(eval_node(n->a.get(), x, y, z));
    case Op::kLog: return std::log(eval_node(n->a.get(), x, y, z));
    case Op::kAbs: return std::fabs(eval_node(n->a.get(), x, y, z));
    case Op::kMin: return std::fmin(eval_node(n->a.get(), x, y, z), eval_node(n->b.get(), x, y, z));
    case Op::kMax: return std::fmax(eval_node(n->a.get(), x, y, z), eval_node(n->b.get(), x, y, z));
    case Op::kHypot: return std::hypot(eval_node(n->a.get(), x, y, z), eval_node(n->b.get(), x, y, z));
  }
  return 0.0;
}

}  // namespace

Expr Expr::parse(const std::string& src) {
  Parser p(src);
  Expr e;
  e.root_ = p.run();
  e.src_ = src;
  return e;
}

double Expr::eval(double x, double y, double z) const {
  return eval_node(root_.get(), x, y, z);
}

}  // namespace hardygeo
