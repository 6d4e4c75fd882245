#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gsf/expr.hpp"
#include "gsf/field.hpp"
#include "gsf/types.hpp"

namespace gsf {

using MultiIndex = std::vector<int>;

// Real polynomial in n variables, stored sparsely by exponent vector.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int n);

  static Polynomial constant(double c, int n);
  static Polynomial monomial(const MultiIndex& a, double c = 1.0);

  int dim() const { return n_; }
  const std::map<MultiIndex, double>& terms() const { return terms_; }
  void add_term(const MultiIndex& a, double c);

  // -1 for the zero polynomial.
  int degree() const;
  bool is_homogeneous(int k) const;
  double max_abs_coefficient() const;

  double operator()(Point x) const;
  Dual2 eval_dual(Point x) const;
  Polynomial derivative(int i) const;
  Polynomial laplacian() const;

  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator+(const Polynomial& other) const;
  Polynomial scaled(double c) const;

 private:
  int n_ = 0;
  std::map<MultiIndex, double> terms_;
};

// The same polynomial as an expression tree.
Expr to_expr(const Polynomial& p);

struct HarmonicPolynomial {
  int n = 0;
  int k = 0;
  Polynomial poly;
  bool exact = false;  // basis obtained by exact rational elimination
};

// Degree-k exponent vectors in n variables, x1^k first.
std::vector<MultiIndex> monomials(int n, int k);

// C(n+k-1, n-1) - C(n+k-3, n-1).
long long harmonic_dimension(int n, int k);

// Basis of the kernel of the Laplacian from degree-k to degree-(k-2)
// homogeneous polynomials. Exact rational elimination for moderate sizes,
// otherwise an SVD with singular-value cutoff 1e-10. Each element is scaled to
// unit largest coefficient.
std::vector<HarmonicPolynomial> harmonic_basis(int n, int k);

// W with 2 grad P . X + W P = 0. Closed form -2 alpha k / |x|^p for radial
// power fields; pointwise quotient otherwise.
std::function<double(Point)> w_function(const HarmonicPolynomial& poly, const VectorField& field);

struct SpectrumEntry {
  int k = 0;
  double energy = 0.0;
  long long degeneracy = 0;
  // Exponent scale of the eigenfunction P_k(x) e^{-decay * g(|x|)}: Gaussian
  // coupling for the oscillator, exponential rate for the Coulomb problem.
  double decay = 0.0;
  std::string state_template;
};

// -Delta + alpha^2 |x|^2: E_k = alpha (n + 2k), eigenfunctions P_k e^{-alpha |x|^2 / 2}.
// Levels with an empty harmonic space (n = 1, k >= 2) are omitted.
std::vector<SpectrumEntry> oscillator_spectrum(int n, double alpha, int kmax);

// -Delta - alpha (n-1) / |x|: eigenfunctions P_k e^{-a_k |x|} with
// a_k = alpha (n-1) / (n-1+2k) and E_k = -a_k^2.
std::vector<SpectrumEntry> coulomb_spectrum(int n, double alpha, int kmax);
double coulomb_rate(int n, double alpha, int k);

}  // namespace gsf
