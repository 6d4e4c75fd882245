#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gsf/field.hpp"
#include "gsf/quadrature.hpp"
#include "gsf/state.hpp"
#include "gsf/types.hpp"

namespace gsf {

// Interior nodes x_i = -L + (i+1) h, h = 2L/(m+1), on each axis of [-L, L]^n.
// The origin is a node exactly when m is odd.
struct Grid {
  int n = 1;
  double half_width = 1.0;
  int m = 3;

  Grid() = default;
  Grid(int n, double half_width, int m);

  double spacing() const { return 2.0 * half_width / (m + 1); }
  double coordinate(int i) const { return -half_width + (i + 1) * spacing(); }
  std::size_t size() const;
  bool has_origin_node() const { return m % 2 == 1; }
};

// -Delta_h + diag(V) with homogeneous Dirichlet data, applied matrix-free.
class DiscreteOperator {
 public:
  DiscreteOperator(Grid grid, Vec potential);

  const Grid& grid() const { return grid_; }
  const Vec& potential() const { return potential_; }
  std::size_t size() const { return potential_.size(); }

  void apply(const Vec& in, Vec& out) const;
  // Entry (i, j); used by tests of symmetry and stencil shape.
  double entry(std::size_t i, std::size_t j) const;

 private:
  Grid grid_;
  Vec potential_;
  std::vector<std::size_t> stride_;
};

DiscreteOperator discretize(const PotentialFunction& v, const Grid& grid);

struct Eigenpair {
  double value = 0.0;
  Vec vector;
  double residual = 0.0;
  long long matvecs = 0;
};

// Smallest eigenpair: Sturm bisection with inverse iteration in 1-D,
// single-vector LOBPCG otherwise. The vector has unit norm and a positive
// largest-magnitude entry.
Eigenpair smallest_eigenpair(const DiscreteOperator& op, double tol = 1e-8, long long max_matvecs = 10000);

// Smallest eigenvalue of a symmetric tridiagonal matrix.
double tridiagonal_smallest(const Vec& diag, const Vec& offdiag);

// Radial sector of -Delta + V for radial V on the ball of radius R with
// Dirichlet data. Discretized in flux form on cell centres r_i = (i - 1/2) h,
// which treats the substitution psi = r^((n-1)/2) phi implicitly.
struct RadialProblem {
  std::function<double(double)> potential;
  int n = 3;
  double radius = 0.0;  // 0 picks R automatically
  double step = 0.01;
  // Profile of the expected ground state; R is chosen where it drops below
  // 1e-12 of its peak.
  std::function<double(double)> reference_state;
};

struct RadialStep {
  double radius = 0.0;
  double step = 0.0;
  double coarse = 0.0;
  double fine = 0.0;
  double extrapolated = 0.0;
};

struct RadialResult {
  double energy = 0.0;
  double error_estimate = 0.0;
  std::vector<RadialStep> history;
};

RadialResult radial_solve_detailed(const RadialProblem& problem, double tol = 1e-8);
double radial_solve(const RadialProblem& problem, double tol = 1e-8);

// (|grad phi|^2 + int V |phi|^2) / |phi|^2.
QuadratureEstimate rayleigh(const ScalarState& phi, const PotentialFunction& v, const QuadratureOptions& opts = {});

struct OracleOptions {
  double tol = 1e-8;
  double half_width = 8.0;  // grid solves only
  int m = 64;
};

// E0(|X|^2 - div X). Radial fields use radial_solve; others a full grid.
double lambda_estimate(const VectorField& field, const OracleOptions& opts = {});

// Grid-sampled state with multilinear interpolation, zero outside the box.
class GridState : public ScalarState {
 public:
  GridState(Grid grid, Vec values);

  int dim() const override { return grid_.n; }
  double value(Point x) const override;
  double value_gradient(Point x, std::span<double> grad) const override;
  bool radial() const override { return false; }
  HalfLineHints hints() const override;
  std::string describe() const override;

  const Grid& grid() const { return grid_; }
  const Vec& values() const { return values_; }
  // Number of nodes with sign opposite to the largest entry, ignoring
  // entries below 1e-9 of it.
  std::size_t sign_changes() const;

 private:
  Grid grid_;
  Vec values_;
};

// Node sum of |D phi + phi X|^2 h^n with central differences.
double grid_jx_energy(const GridState& phi, const VectorField& field);

}  // namespace gsf
