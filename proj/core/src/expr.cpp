#include "gsf/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "gsf/error.hpp"

namespace gsf {

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

NodePtr make_binary(NodeKind kind, NodePtr a, NodePtr b) {
  Node n;
  n.kind = kind;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make_node(std::move(n));
}

NodePtr make_unary(NodeKind kind, NodePtr a) {
  Node n;
  n.kind = kind;
  n.lhs = std::move(a);
  return make_node(std::move(n));
}

bool any_node(const Node& n, NodeKind kind) {
  if (n.kind == kind) return true;
  if (n.lhs && any_node(*n.lhs, kind)) return true;
  if (n.rhs && any_node(*n.rhs, kind)) return true;
  return false;
}

bool is_constant_tree(const Node& n) {
  return !any_node(n, NodeKind::kVariable) && !any_node(n, NodeKind::kRadius);
}

const char* function_name(Function f) {
  switch (f) {
    case Function::kExp: return "exp";
    case Function::kLog: return "log";
    case Function::kSqrt: return "sqrt";
    case Function::kSin: return "sin";
    case Function::kCos: return "cos";
    case Function::kAbs: return "abs";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::string_view text, int n) : text_(text), n_(n) {}

  NodePtr parse_all() {
    skip_ws();
    if (pos_ >= text_.size()) throw SyntaxError("empty expression", pos_);
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ < text_.size()) {
      throw SyntaxError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      throw SyntaxError(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary(NodeKind::kAdd, lhs, parse_term());
      } else if (accept('-')) {
        lhs = make_binary(NodeKind::kSub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary(NodeKind::kMul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_binary(NodeKind::kDiv, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_unary(NodeKind::kNeg, parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) return make_binary(NodeKind::kPow, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t count = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++count;
      }
      return count;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw SyntaxError("malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw SyntaxError("malformed exponent", pos_);
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw SyntaxError("malformed number", start);
    Node n;
    n.kind = NodeKind::kNumber;
    n.number = value;
    return make_node(std::move(n));
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    if (name == "r") {
      Node n;
      n.kind = NodeKind::kRadius;
      return make_node(std::move(n));
    }
    if (name.size() > 1 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int index = std::stoi(name.substr(1));
      if (index < 1 || index > n_) {
        throw VariableOutOfRange(name + " in dimension " + std::to_string(n_));
      }
      Node n;
      n.kind = NodeKind::kVariable;
      n.variable = index - 1;
      return make_node(std::move(n));
    }
    static constexpr std::array<std::pair<std::string_view, Function>, 6> kFunctions{{
        {"exp", Function::kExp},
        {"log", Function::kLog},
        {"sqrt", Function::kSqrt},
        {"sin", Function::kSin},
        {"cos", Function::kCos},
        {"abs", Function::kAbs},
    }};
    for (const auto& [fname, f] : kFunctions) {
      if (name == fname) {
        if (!accept('(')) throw SyntaxError("expected '(' after " + name, pos_);
        NodePtr arg = parse_expr();
        expect(')');
        Node n;
        n.kind = NodeKind::kCall;
        n.function = f;
        n.lhs = std::move(arg);
        return make_node(std::move(n));
      }
    }
    throw UnknownIdentifier("'" + name + "' at " + std::to_string(start));
  }

  std::string_view text_;
  int n_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Rendering

constexpr int kUnaryPrecedence = 3;

int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::kAdd:
    case NodeKind::kSub: return 1;
    case NodeKind::kMul:
    case NodeKind::kDiv: return 2;
    case NodeKind::kNeg: return kUnaryPrecedence;
    case NodeKind::kPow: return 4;
    default: return 5;
  }
}

void render_number(double v, std::string& out) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

void render_node(const Node& n, std::string& out);

void render_child(const Node& child, bool parens, std::string& out) {
  if (parens) out += '(';
  render_node(child, out);
  if (parens) out += ')';
}

void render_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::kNumber:
      if (n.number < 0) {
        out += "(-";
        render_number(-n.number, out);
        out += ')';
      } else {
        render_number(n.number, out);
      }
      return;
    case NodeKind::kVariable:
      out += 'x';
      out += std::to_string(n.variable + 1);
      return;
    case NodeKind::kRadius:
      out += 'r';
      return;
    case NodeKind::kCall:
      out += function_name(n.function);
      out += '(';
      render_node(*n.lhs, out);
      out += ')';
      return;
    case NodeKind::kNeg:
      out += '-';
      render_child(*n.lhs, precedence(*n.lhs) < precedence(n), out);
      return;
    case NodeKind::kPow:
      render_child(*n.lhs, precedence(*n.lhs) <= precedence(n), out);
      out += '^';
      // The exponent is parsed as a unary, so negations and powers need none.
      render_child(*n.rhs, precedence(*n.rhs) < kUnaryPrecedence, out);
      return;
    default: {
      const int p = precedence(n);
      render_child(*n.lhs, precedence(*n.lhs) < p, out);
      switch (n.kind) {
        case NodeKind::kAdd: out += " + "; break;
        case NodeKind::kSub: out += " - "; break;
        case NodeKind::kMul: out += '*'; break;
        default: out += '/'; break;
      }
      render_child(*n.rhs, precedence(*n.rhs) <= p, out);
      return;
    }
  }
}

bool equal_nodes(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::kNumber: return a.number == b.number;
    case NodeKind::kVariable: return a.variable == b.variable;
    case NodeKind::kRadius: return true;
    case NodeKind::kCall: return a.function == b.function && equal_nodes(*a.lhs, *b.lhs);
    case NodeKind::kNeg: return equal_nodes(*a.lhs, *b.lhs);
    default: return equal_nodes(*a.lhs, *b.lhs) && equal_nodes(*a.rhs, *b.rhs);
  }
}

// ---------------------------------------------------------------------------
// Plain evaluation

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
  return v;
}

double eval_node(const Node& n, Point x, double r) {
  switch (n.kind) {
    case NodeKind::kNumber: return n.number;
    case NodeKind::kVariable: return x[n.variable];
    case NodeKind::kRadius: return r;
    case NodeKind::kNeg: return -eval_node(*n.lhs, x, r);
    case NodeKind::kAdd: return eval_node(*n.lhs, x, r) + eval_node(*n.rhs, x, r);
    case NodeKind::kSub: return eval_node(*n.lhs, x, r) - eval_node(*n.rhs, x, r);
    case NodeKind::kMul: return eval_node(*n.lhs, x, r) * eval_node(*n.rhs, x, r);
    case NodeKind::kDiv: {
      const double den = eval_node(*n.rhs, x, r);
      if (den == 0.0) throw DomainError("division by zero");
      return eval_node(*n.lhs, x, r) / den;
    }
    case NodeKind::kPow: {
      const double base = eval_node(*n.lhs, x, r);
      const double expo = eval_node(*n.rhs, x, r);
      if (base < 0.0 && std::trunc(expo) != expo) {
        throw DomainError("negative base with non-integer exponent");
      }
      if (base == 0.0 && expo < 0.0) throw DomainError("zero to a negative power");
      return checked(std::pow(base, expo), "pow");
    }
    case NodeKind::kCall: {
      const double a = eval_node(*n.lhs, x, r);
      switch (n.function) {
        case Function::kExp: return checked(std::exp(a), "exp");
        case Function::kLog:
          if (a <= 0.0) throw DomainError("log of non-positive value");
          return std::log(a);
        case Function::kSqrt:
          if (a < 0.0) throw DomainError("sqrt of negative value");
          return std::sqrt(a);
        case Function::kSin: return std::sin(a);
        case Function::kCos: return std::cos(a);
        case Function::kAbs: return std::abs(a);
      }
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Dual evaluation

Dual2 constant_dual(double v, int n) {
  Dual2 d;
  d.value = v;
  d.n = n;
  return d;
}

// h(f) with h' and h'' evaluated at f.value.
Dual2 chain(const Dual2& f, double h, double dh, double d2h) {
  Dual2 out;
  out.n = f.n;
  out.value = h;
  for (int i = 0; i < f.n; ++i) {
    out.grad[i] = dh * f.grad[i];
    out.hess_diag[i] = d2h * f.grad[i] * f.grad[i] + dh * f.hess_diag[i];
  }
  return out;
}

Dual2 mul(const Dual2& a, const Dual2& b) {
  Dual2 out;
  out.n = a.n;
  out.value = a.value * b.value;
  for (int i = 0; i < a.n; ++i) {
    out.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
    out.hess_diag[i] =
        a.hess_diag[i] * b.value + 2.0 * a.grad[i] * b.grad[i] + a.value * b.hess_diag[i];
  }
  return out;
}

Dual2 add(const Dual2& a, const Dual2& b, double sign) {
  Dual2 out;
  out.n = a.n;
  out.value = a.value + sign * b.value;
  for (int i = 0; i < a.n; ++i) {
    out.grad[i] = a.grad[i] + sign * b.grad[i];
    out.hess_diag[i] = a.hess_diag[i] + sign * b.hess_diag[i];
  }
  return out;
}

Dual2 power_const(const Dual2& f, double c) {
  const double v = f.value;
  if (v < 0.0 && std::trunc(c) != c) throw DomainError("negative base with non-integer exponent");
  if (v == 0.0 && c < 2.0 && c != 0.0 && c != 1.0) {
    throw DomainError("power not twice differentiable at zero base");
  }
  const double h = std::pow(v, c);
  const double dh = (c == 0.0) ? 0.0 : c * std::pow(v, c - 1.0);
  const double d2h = (c == 0.0 || c == 1.0) ? 0.0 : c * (c - 1.0) * std::pow(v, c - 2.0);
  if (!std::isfinite(h) || !std::isfinite(dh) || !std::isfinite(d2h)) {
    throw DomainError("non-finite power");
  }
  return chain(f, h, dh, d2h);
}

Dual2 eval_dual_node(const Node& n, Point x, double r) {
  const int dim = static_cast<int>(x.size());
  switch (n.kind) {
    case NodeKind::kNumber: return constant_dual(n.number, dim);
    case NodeKind::kVariable: {
      Dual2 d = constant_dual(x[n.variable], dim);
      d.grad[n.variable] = 1.0;
      return d;
    }
    case NodeKind::kRadius: {
      if (r == 0.0) throw SingularPoint("derivative of r at the origin");
      Dual2 d = constant_dual(r, dim);
      const double r3 = r * r * r;
      for (int i = 0; i < dim; ++i) {
        d.grad[i] = x[i] / r;
        d.hess_diag[i] = 1.0 / r - x[i] * x[i] / r3;
      }
      return d;
    }
    case NodeKind::kNeg: {
      Dual2 d = eval_dual_node(*n.lhs, x, r);
      d.value = -d.value;
      for (int i = 0; i < dim; ++i) {
        d.grad[i] = -d.grad[i];
        d.hess_diag[i] = -d.hess_diag[i];
      }
      return d;
    }
    case NodeKind::kAdd: return add(eval_dual_node(*n.lhs, x, r), eval_dual_node(*n.rhs, x, r), 1.0);
    case NodeKind::kSub: return add(eval_dual_node(*n.lhs, x, r), eval_dual_node(*n.rhs, x, r), -1.0);
    case NodeKind::kMul: return mul(eval_dual_node(*n.lhs, x, r), eval_dual_node(*n.rhs, x, r));
    case NodeKind::kDiv: {
      const Dual2 b = eval_dual_node(*n.rhs, x, r);
      if (b.value == 0.0) throw DomainError("division by zero");
      const double inv = 1.0 / b.value;
      const Dual2 recip = chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
      return mul(eval_dual_node(*n.lhs, x, r), recip);
    }
    case NodeKind::kPow: {
      const Dual2 base = eval_dual_node(*n.lhs, x, r);
      if (is_constant_tree(*n.rhs)) return power_const(base, eval_node(*n.rhs, x, r));
      if (base.value <= 0.0) throw DomainError("variable exponent needs a positive base");
      const Dual2 expo = eval_dual_node(*n.rhs, x, r);
      const double lv = std::log(base.value);
      const Dual2 logb = chain(base, lv, 1.0 / base.value, -1.0 / (base.value * base.value));
      const Dual2 prod = mul(expo, logb);
      const double e = checked(std::exp(prod.value), "pow");
      return chain(prod, e, e, e);
    }
    case NodeKind::kCall: {
      const Dual2 a = eval_dual_node(*n.lhs, x, r);
      const double v = a.value;
      switch (n.function) {
        case Function::kExp: {
          const double e = checked(std::exp(v), "exp");
          return chain(a, e, e, e);
        }
        case Function::kLog:
          if (v <= 0.0) throw DomainError("log of non-positive value");
          return chain(a, std::log(v), 1.0 / v, -1.0 / (v * v));
        case Function::kSqrt: {
          if (v <= 0.0) throw DomainError("sqrt not differentiable at non-positive value");
          const double s = std::sqrt(v);
          return chain(a, s, 0.5 / s, -0.25 / (s * v));
        }
        case Function::kSin: return chain(a, std::sin(v), std::cos(v), -std::sin(v));
        case Function::kCos: return chain(a, std::cos(v), -std::sin(v), -std::cos(v));
        case Function::kAbs:
          if (v == 0.0) throw DomainError("abs not differentiable at zero");
          return chain(a, std::abs(v), v > 0 ? 1.0 : -1.0, 0.0);
      }
    }
  }
  return constant_dual(0.0, dim);
}

void check_point(const Expr& e, Point x) {
  if (e.empty()) throw InvalidArgument("empty expression");
  if (static_cast<int>(x.size()) != e.dim()) {
    throw DimensionMismatch("point of dimension " + std::to_string(x.size()) +
                            " for expression in dimension " + std::to_string(e.dim()));
  }
}

}  // namespace

Expr::Expr(std::shared_ptr<const Node> root, int n) : root_(std::move(root)), n_(n) {
  if (n_ < 1 || n_ > kMaxDim) {
    throw InvalidArgument("dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
}

bool Expr::uses_coordinates() const { return root_ && any_node(*root_, NodeKind::kVariable); }
bool Expr::uses_radius() const { return root_ && any_node(*root_, NodeKind::kRadius); }

Expr Expr::constant(double value, int n) {
  Node node;
  node.kind = NodeKind::kNumber;
  node.number = std::abs(value);
  NodePtr p = make_node(std::move(node));
  if (value < 0) p = make_unary(NodeKind::kNeg, p);
  return Expr(p, n);
}

Expr Expr::coordinate(int index, int n) {
  if (index < 0 || index >= n) throw VariableOutOfRange("coordinate index " + std::to_string(index));
  Node node;
  node.kind = NodeKind::kVariable;
  node.variable = index;
  return Expr(make_node(std::move(node)), n);
}

Expr Expr::radius(int n) {
  Node node;
  node.kind = NodeKind::kRadius;
  return Expr(make_node(std::move(node)), n);
}

Expr Expr::call(Function f, const Expr& arg) {
  Node node;
  node.kind = NodeKind::kCall;
  node.function = f;
  node.lhs = arg.root_;
  return Expr(make_node(std::move(node)), arg.n_);
}

Expr Expr::pow(const Expr& base, const Expr& exponent) {
  return Expr(make_binary(NodeKind::kPow, base.root_, exponent.root_), base.n_);
}

Expr operator+(const Expr& a, const Expr& b) {
  return Expr(make_binary(NodeKind::kAdd, a.root_, b.root_), a.n_);
}
Expr operator-(const Expr& a, const Expr& b) {
  return Expr(make_binary(NodeKind::kSub, a.root_, b.root_), a.n_);
}
Expr operator*(const Expr& a, const Expr& b) {
  return Expr(make_binary(NodeKind::kMul, a.root_, b.root_), a.n_);
}
Expr operator/(const Expr& a, const Expr& b) {
  return Expr(make_binary(NodeKind::kDiv, a.root_, b.root_), a.n_);
}
Expr operator-(const Expr& a) { return Expr(make_unary(NodeKind::kNeg, a.root_), a.n_); }

Expr parse(std::string_view text, int n) {
  if (n < 1 || n > kMaxDim) {
    throw InvalidArgument("dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  Parser parser(text, n);
  return Expr(parser.parse_all(), n);
}

std::string render(const Expr& e) {
  std::string out;
  if (!e.empty()) render_node(e.root(), out);
  return out;
}

// Rebuild the tree with x_i -> x_i * factor and r -> r * factor.
static std::shared_ptr<const Node> substitute_scaled(const std::shared_ptr<const Node>& node, double factor) {
  if (!node) return node;
  if (node->kind == NodeKind::kVariable || node->kind == NodeKind::kRadius) {
    Node c;
    c.kind = NodeKind::kNumber;
    c.number = factor;
    Node m;
    m.kind = NodeKind::kMul;
    m.lhs = node;
    m.rhs = std::make_shared<const Node>(c);
    return std::make_shared<const Node>(m);
  }
  auto lhs = substitute_scaled(node->lhs, factor);
  auto rhs = substitute_scaled(node->rhs, factor);
  if (lhs == node->lhs && rhs == node->rhs) return node;
  Node copy = *node;
  copy.lhs = lhs;
  copy.rhs = rhs;
  return std::make_shared<const Node>(copy);
}


Expr scale_arguments(const Expr& e, double factor) {
  return Expr(substitute_scaled(e.root_ptr(), factor), e.dim());
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return a.empty() == b.empty();
  return a.dim() == b.dim() && equal_nodes(a.root(), b.root());
}

double eval_u(const Expr& e, Point x) {
  check_point(e, x);
  return eval_node(e.root(), x, norm(x));
}

Dual2 eval_dual(const Expr& e, Point x) {
  check_point(e, x);
  return eval_dual_node(e.root(), x, norm(x));
}

Vec grad_u(const Expr& e, Point x) {
  const Dual2 d = eval_dual(e, x);
  return Vec(d.grad.begin(), d.grad.begin() + d.n);
}

double laplacian_u(const Expr& e, Point x) { return eval_dual(e, x).laplacian(); }

}  // namespace gsf
