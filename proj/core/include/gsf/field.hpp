#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gsf/expr.hpp"
#include "gsf/types.hpp"

namespace gsf {

// X(x) = alpha * x / |x|^p on R^n.
struct RadialPowerField {
  double alpha = 1.0;
  double p = 0.0;
  int n = 3;
};

// X = grad u for a parsed scalar potential u.
struct GradientField {
  Expr u;
  int dim() const { return u.dim(); }
};

// A field given component-wise. Not necessarily a gradient; it exists so that
// non-gradient inputs can be represented and rejected by the ground-state
// solver.
struct ComponentField {
  std::vector<Expr> components;
  int dim() const { return static_cast<int>(components.size()); }
};

using VectorField = std::variant<RadialPowerField, GradientField, ComponentField>;

enum class Tristate { kFalse, kTrue, kUnknown };

struct Admissibility {
  Tristate norm_sq_loc_integrable = Tristate::kUnknown;
  Tristate div_loc_integrable = Tristate::kUnknown;

  // Admissible unless one of the flags is known to fail.
  bool admissible() const {
    return norm_sq_loc_integrable != Tristate::kFalse && div_loc_integrable != Tristate::kFalse;
  }
};

int dimension(const VectorField& field);
bool is_radial(const VectorField& field);
std::string describe(const VectorField& field);

Vec eval_field(const VectorField& field, Point x);
void eval_field_into(const VectorField& field, Point x, std::span<double> out);
double field_div(const VectorField& field, Point x);
double field_norm_sq(const VectorField& field, Point x);

// |X|^2 is locally integrable iff p < 1 + n/2, div X iff p < 1 + n. Equality is
// not admissible.
Admissibility admissibility(const VectorField& field);

// X_lambda(x) = X(x / lambda) / lambda.
VectorField scale_field(const VectorField& field, double lambda);

// X + Y. Radial power fields with equal exponents stay in the family; any
// other combination becomes the gradient of u_X + u_Y.
VectorField add_fields(const VectorField& a, const VectorField& b);

// Scalar potential u with X = grad u: alpha/(2-p) r^(2-p), or alpha log r at
// p = 2.
Expr potential_expression(const RadialPowerField& field);
std::optional<Expr> field_potential(const VectorField& field);

// Identifies u = c r^q style potentials so a gradient spec such as
// "0.5*r^2" is treated like the equivalent radial power field.
std::optional<RadialPowerField> recognize_radial_power(const GradientField& field);

// x_i X_j - x_j X_i; identically zero for radial fields.
double max_angular_momentum_density(const VectorField& field, Point x);

// Finite-difference-free test of d_i X_j = d_j X_i at a point (dual numbers).
double curl_magnitude(const VectorField& field, Point x);

// V(x) = |X|^2 - div X + lambda, or any other pointwise potential.
class PotentialFunction {
 public:
  using Evaluator = std::function<double(Point)>;

  PotentialFunction(int n, Evaluator eval, double lambda, std::string description, bool radial);

  static PotentialFunction from_expression(const Expr& v, std::string description = {});

  double operator()(Point x) const { return eval_(x) + lambda_; }
  // V at distance r along the first axis; meaningful for radial potentials.
  double radial_value(double r) const;

  int dim() const { return n_; }
  double lambda() const { return lambda_; }
  bool radial() const { return radial_; }
  const std::string& description() const { return description_; }

 private:
  int n_;
  Evaluator eval_;
  double lambda_;
  std::string description_;
  bool radial_;
};

PotentialFunction schrodinger_potential(const VectorField& field, double lambda);

}  // namespace gsf
