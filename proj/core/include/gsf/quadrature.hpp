#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gsf/harmonics.hpp"
#include "gsf/types.hpp"

namespace gsf {

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_depth = 60;
  double divergence_bound = 1e12;
  int max_panels = 4000;
};

struct QuadratureEstimate {
  double value = 0.0;
  double error = 0.0;
  std::string method;
  long long nodes = 0;
};

// Placement hints for integrals over (0, inf).
struct HalfLineHints {
  double scale = 1.0;                      // where the mass sits
  std::optional<double> origin_exponent;   // integrand ~ r^a as r -> 0
  std::vector<double> breakpoints;         // kinks, support ends
  double support = std::numeric_limits<double>::infinity();
};

// Globally adaptive Gauss-Kronrod (7/15) on [a, b].
QuadratureEstimate interval_integral(const std::function<double(double)>& f, double a, double b,
                                     const QuadratureOptions& opts = {});

// Integral of h over (0, inf). The first panel uses r = b t^beta, with beta
// taken from the origin exponent (estimated from samples when not given); the
// tail uses r = R + scale t / (1 - t). No node is ever placed at r = 0.
QuadratureEstimate half_line_integral(const std::function<double(double)>& h, const HalfLineHints& hints,
                                      const QuadratureOptions& opts = {});

// omega_{n-1} * int_0^inf r^(n-1+s) g(r) dr.
struct RadialIntegrand {
  std::function<double(double)> g;
  double moment_power = 0.0;
  int n = 1;
  HalfLineHints hints;
};

QuadratureEstimate radial_integral(const RadialIntegrand& f, const QuadratureOptions& opts = {});

// Integral over R^n. Radial integrands reduce to radial_integral; others use
// a product rule on the sphere (Gauss-Legendre in the polar angles,
// trapezoid in the azimuth) under the adaptive radial rule.
struct SpaceIntegrand {
  std::function<double(Point)> f;
  int n = 1;
  bool radial = false;
  HalfLineHints hints;
  int angular_order = 0;  // 0 selects the order adaptively
};

QuadratureEstimate space_integral(const SpaceIntegrand& f, const QuadratureOptions& opts = {});

// 2 pi^(n/2) / Gamma(n/2).
double sphere_area(int n);
double sphere_monomial_integral(const MultiIndex& a);
// Integral of P^2 over the unit sphere.
double sphere_poly_moment(const Polynomial& p);

struct SphereRule {
  std::vector<Vec> points;
  Vec weights;
};

SphereRule sphere_rule(int n, int order);

// Trapezoid rule on [-L, L]^n with m nodes per axis (endpoints included); the
// error estimate compares against a rule with about half the nodes.
QuadratureEstimate tensor_grid_integral(const std::function<double(Point)>& f, int n, double half_width, int m);

}  // namespace gsf
