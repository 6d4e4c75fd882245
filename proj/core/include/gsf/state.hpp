#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gsf/expr.hpp"
#include "gsf/field.hpp"
#include "gsf/harmonics.hpp"
#include "gsf/quadrature.hpp"
#include "gsf/types.hpp"

namespace gsf {

// A real function on R^n that can be integrated and differentiated once.
class ScalarState {
 public:
  virtual ~ScalarState() = default;

  virtual int dim() const = 0;
  virtual double value(Point x) const = 0;
  // Returns the value and writes the gradient.
  virtual double value_gradient(Point x, std::span<double> grad) const = 0;
  virtual bool radial() const = 0;
  virtual HalfLineHints hints() const = 0;
  virtual std::string describe() const = 0;

  // -grad log phi. Raises NonPositiveState where phi <= 0.
  virtual Vec log_gradient(Point x) const;
};

// phi(x) = C P(x) exp(-u(x)).
class GroundState : public ScalarState {
 public:
  GroundState(Expr u, std::optional<HarmonicPolynomial> poly, double normalization, bool admissible,
              std::string reason);

  int dim() const override { return u_.dim(); }
  double value(Point x) const override;
  double value_gradient(Point x, std::span<double> grad) const override;
  bool radial() const override { return u_.is_radial() && !poly_; }
  HalfLineHints hints() const override;
  std::string describe() const override;

  // Value, gradient and Hessian diagonal.
  Dual2 eval_dual(Point x) const;

  const Expr& potential() const { return u_; }
  const std::optional<HarmonicPolynomial>& polynomial() const { return poly_; }
  double normalization() const { return c_; }
  bool admissible() const { return admissible_; }
  const std::string& reason() const { return reason_; }

  // Radial power terms whose potentials sum to u, when u came from them.
  const std::vector<RadialPowerField>& radial_terms() const { return terms_; }
  void set_radial_terms(std::vector<RadialPowerField> terms) { terms_ = std::move(terms); }
  // Length scale override for quadrature placement.
  void set_scale(double s) { scale_ = s; }

  GroundState with_normalization(double c) const;

 private:
  Expr u_;
  std::optional<HarmonicPolynomial> poly_;
  double c_;
  bool admissible_;
  std::string reason_;
  std::vector<RadialPowerField> terms_;
  std::optional<double> scale_;
};

// A exp(-|x - c|^2 / (2 w^2)) with A chosen so that the L2 norm is 1.
class GaussianTrial : public ScalarState {
 public:
  GaussianTrial(Vec center, double width);

  int dim() const override { return static_cast<int>(center_.size()); }
  double value(Point x) const override;
  double value_gradient(Point x, std::span<double> grad) const override;
  bool radial() const override;
  HalfLineHints hints() const override;
  std::string describe() const override;
  Vec log_gradient(Point x) const override;

  const Vec& center() const { return center_; }
  double width() const { return width_; }

 private:
  Vec center_;
  double width_;
  double amplitude_;
};

// g(|x|) with a supplied derivative.
class RadialTrial : public ScalarState {
 public:
  RadialTrial(int n, std::function<double(double)> g, std::function<double(double)> dg, HalfLineHints hints,
              std::string description);

  int dim() const override { return n_; }
  double value(Point x) const override;
  double value_gradient(Point x, std::span<double> grad) const override;
  bool radial() const override { return true; }
  HalfLineHints hints() const override { return hints_; }
  std::string describe() const override { return description_; }

  double profile(double r) const { return g_(r); }
  double profile_derivative(double r) const { return dg_(r); }

 private:
  int n_;
  std::function<double(double)> g_;
  std::function<double(double)> dg_;
  HalfLineHints hints_;
  std::string description_;
};

// exp(1 / (|x|^2 - 1)) inside the unit ball, zero outside.
class BumpState : public ScalarState {
 public:
  explicit BumpState(int n);

  int dim() const override { return n_; }
  double value(Point x) const override;
  double value_gradient(Point x, std::span<double> grad) const override;
  bool radial() const override { return true; }
  HalfLineHints hints() const override;
  std::string describe() const override { return "bump exp(1/(|x|^2-1)) on the unit ball"; }
  // Closed form 2x / (1 - |x|^2)^2, valid where phi underflows.
  Vec log_gradient(Point x) const override;

 private:
  int n_;
};

// Closed-form ground state of grad phi + phi X = 0. Radial power fields use
// u = alpha/(2-p) r^(2-p), or alpha log r at p = 2, and are never admissible
// at p = 2. Gradient fields reduce to that family when recognizable; other
// gradient fields are checked numerically. Component fields raise
// NotGradient.
GroundState solve_ground_state(const VectorField& field);

// C with int |phi|^2 = 1. Raises NotNormalizable on divergence or for
// states already known not to be admissible.
GroundState normalize(const GroundState& state, const QuadratureOptions& opts = {});
QuadratureEstimate norm_sq(const ScalarState& state, const QuadratureOptions& opts = {});

// Generic integral over R^n of a pointwise function built from a state.
QuadratureEstimate integrate_state(const ScalarState& state, const std::function<double(Point)>& f, bool radial,
                                   const QuadratureOptions& opts = {});

QuadratureEstimate jx_energy(const ScalarState& phi, const VectorField& field, const QuadratureOptions& opts = {});
QuadratureEstimate kinetic_energy(const ScalarState& phi, const QuadratureOptions& opts = {});
// int |X|^2 |phi|^2.
QuadratureEstimate field_moment(const ScalarState& phi, const VectorField& field, const QuadratureOptions& opts = {});
// int div X |phi|^2.
QuadratureEstimate divergence_moment(const ScalarState& phi, const VectorField& field,
                                     const QuadratureOptions& opts = {});
// int V |phi|^2.
QuadratureEstimate potential_moment(const ScalarState& phi, const PotentialFunction& v,
                                    const QuadratureOptions& opts = {});

// X = grad u - grad log P.
VectorField field_from_state(const GroundState& state);

// State for X + Y from ground states of X and Y.
GroundState product_state(const GroundState& a, const GroundState& b);

// lambda^(n/2) phi(lambda x).
GroundState scale_state(const GroundState& state, double lambda);

// P phi0 for a harmonic P of degree k.
GroundState excited_state(const HarmonicPolynomial& poly, const GroundState& ground);

// P_k exp(-a_k |x|) for the operator -Delta - alpha (n-1) / |x|.
GroundState coulomb_excited_state(const HarmonicPolynomial& poly, double alpha);

// |grad phi + phi X|.
double first_order_residual(const GroundState& state, const VectorField& field, Point x);
// -Delta phi + (|X|^2 - div X + shift(x)) phi.
double euler_residual(const GroundState& state, const VectorField& field, Point x,
                      const std::function<double(Point)>& shift = {});
// -Delta phi + V phi - E phi.
double schrodinger_residual(const GroundState& state, const PotentialFunction& v, double energy, Point x);

}  // namespace gsf
