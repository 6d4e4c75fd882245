#pragma once

// Scalar expressions u(x) over R^n.
//
// Grammar (precedence from loosest to tightest):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | 'r' | 'x' index | func '(' expr ')' | '(' expr ')'
//   func    := exp | log | sqrt | sin | cos | abs
//
// Numbers are decimal with an optional exponent. There is no implicit
// multiplication. `r` is the Euclidean radius |x| and is a primitive, so its
// derivatives are exact and x = 0 is reported as a singular point.

#include <array>
#include <memory>
#include <string>
#include <string_view>

#include "gsf/types.hpp"

namespace gsf {

enum class NodeKind { kNumber, kVariable, kRadius, kAdd, kSub, kMul, kDiv, kPow, kNeg, kCall };
enum class Function { kExp, kLog, kSqrt, kSin, kCos, kAbs };

struct Node {
  NodeKind kind = NodeKind::kNumber;
  double number = 0.0;
  int variable = 0;  // zero-based coordinate index
  Function function = Function::kExp;
  std::shared_ptr<const Node> lhs;  // operand of unary nodes and calls
  std::shared_ptr<const Node> rhs;
};

// Immutable expression tree bound to a dimension n. Cheap to copy; subtrees
// are shared.
class Expr {
 public:
  Expr() = default;
  Expr(std::shared_ptr<const Node> root, int n);

  int dim() const { return n_; }
  bool empty() const { return root_ == nullptr; }
  const Node& root() const { return *root_; }
  const std::shared_ptr<const Node>& root_ptr() const { return root_; }

  bool uses_coordinates() const;
  bool uses_radius() const;
  // True when the expression depends on x only through r = |x|.
  bool is_radial() const { return !uses_coordinates(); }
  bool is_constant() const { return !uses_coordinates() && !uses_radius(); }

  static Expr constant(double value, int n);
  static Expr coordinate(int index, int n);
  static Expr radius(int n);
  static Expr call(Function f, const Expr& arg);
  static Expr pow(const Expr& base, const Expr& exponent);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

 private:
  std::shared_ptr<const Node> root_;
  int n_ = 0;
};

Expr parse(std::string_view text, int n);

// Canonical rendering with the minimal parentheses the grammar needs;
// parse(render(e)) is structurally equal to e for every parsed e.
std::string render(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

// e(factor * x): every coordinate and r is multiplied by factor.
Expr scale_arguments(const Expr& e, double factor);

// Value, gradient and diagonal of the Hessian. The diagonal is closed under
// the chain rule for every supported operation and is all the Laplacian needs.
struct Dual2 {
  double value = 0.0;
  int n = 0;
  std::array<double, kMaxDim> grad{};
  std::array<double, kMaxDim> hess_diag{};

  double laplacian() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += hess_diag[i];
    return s;
  }
};

double eval_u(const Expr& e, Point x);
Dual2 eval_dual(const Expr& e, Point x);
Vec grad_u(const Expr& e, Point x);
double laplacian_u(const Expr& e, Point x);

}  // namespace gsf
