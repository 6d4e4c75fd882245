#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <random>

#include "gsf/error.hpp"
#include "gsf/harmonics.hpp"
#include "gsf/state.hpp"

using namespace gsf;

namespace {

// Nullity of the Laplacian as a dense matrix from degree-k to degree-(k-2)
// monomials, computed independently of the library's elimination.
long long brute_force_nullity(int n, int k) {
  const std::vector<MultiIndex> src = monomials(n, k);
  if (k < 2) return static_cast<long long>(src.size());
  const std::vector<MultiIndex> dst = monomials(n, k - 2);
  std::map<MultiIndex, int> row;
  for (std::size_t i = 0; i < dst.size(); ++i) row[dst[i]] = static_cast<int>(i);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dst.size()), static_cast<Eigen::Index>(src.size()));
  for (std::size_t j = 0; j < src.size(); ++j) {
    for (int i = 0; i < n; ++i) {
      if (src[j][i] < 2) continue;
      MultiIndex m = src[j];
      m[i] -= 2;
      a(row.at(m), static_cast<Eigen::Index>(j)) += src[j][i] * (src[j][i] - 1);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  return static_cast<long long>(src.size()) - lu.rank();
}

Vec random_point(std::mt19937_64& rng, int n, double rmin, double rmax) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(rmin, rmax);
  Vec x(n);
  double s = 0.0;
  for (double& v : x) {
    v = g(rng);
    s += v * v;
  }
  const double r = u(rng) / std::sqrt(s);
  for (double& v : x) v *= r;
  return x;
}

// Rank of the coefficient vectors of a basis.
long long coefficient_rank(const std::vector<HarmonicPolynomial>& basis, int n, int k) {
  if (basis.empty()) return 0;
  const std::vector<MultiIndex> mons = monomials(n, k);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mons.size()), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (std::size_t i = 0; i < mons.size(); ++i) {
      const auto& t = basis[j].poly.terms();
      const auto it = t.find(mons[i]);
      if (it != t.end()) c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = it->second;
    }
  return Eigen::FullPivLU<Eigen::MatrixXd>(c).rank();
}

}  // namespace

TEST(HarmonicBasis, Examples) {
  const auto lin = harmonic_basis(3, 1);
  ASSERT_EQ(lin.size(), 3u);
  for (const auto& h : lin) {
    EXPECT_EQ(h.poly.degree(), 1);
    EXPECT_EQ(h.poly.terms().size(), 1u);
  }
  EXPECT_EQ(harmonic_basis(3, 2).size(), 5u);
  EXPECT_EQ(harmonic_basis(2, 3).size(), 2u);
  EXPECT_EQ(harmonic_basis(1, 2).size(), 0u);
  EXPECT_EQ(harmonic_basis(4, 0).size(), 1u);
}

TEST(HarmonicBasis, DimensionFormula) {
  EXPECT_EQ(harmonic_dimension(3, 2), 5);
  EXPECT_EQ(harmonic_dimension(2, 3), 2);
  EXPECT_EQ(harmonic_dimension(3, 3), 7);
  EXPECT_EQ(harmonic_dimension(1, 0), 1);
  EXPECT_EQ(harmonic_dimension(1, 1), 1);
  EXPECT_EQ(harmonic_dimension(1, 5), 0);
}

TEST(HarmonicBasis, CountsMatchBruteForceNullity) {
  for (int n = 1; n <= 4; ++n)
    for (int k = 0; k <= 6; ++k) {
      const long long oracle = brute_force_nullity(n, k);
      const auto basis = harmonic_basis(n, k);
      EXPECT_EQ(static_cast<long long>(basis.size()), oracle) << "n=" << n << " k=" << k;
      EXPECT_EQ(harmonic_dimension(n, k), oracle) << "n=" << n << " k=" << k;
      EXPECT_EQ(coefficient_rank(basis, n, k), oracle) << "n=" << n << " k=" << k;
    }
}

TEST(HarmonicBasis, ElementsAreHarmonicAndHomogeneous) {
  for (int n = 1; n <= 5; ++n)
    for (int k = 0; k <= 6; ++k)
      for (const auto& h : harmonic_basis(n, k)) {
        EXPECT_EQ(h.n, n);
        EXPECT_EQ(h.k, k);
        EXPECT_TRUE(h.poly.is_homogeneous(k));
        EXPECT_NEAR(h.poly.max_abs_coefficient(), 1.0, 1e-15);
        EXPECT_LE(h.poly.laplacian().max_abs_coefficient(), 1e-12);
      }
}

TEST(HarmonicBasis, LargeCaseFallsBackAndStaysHarmonic) {
  const auto basis = harmonic_basis(6, 6);
  EXPECT_EQ(static_cast<long long>(basis.size()), harmonic_dimension(6, 6));
  for (const auto& h : basis) EXPECT_LE(h.poly.laplacian().max_abs_coefficient(), 1e-10);
}

TEST(Polynomial, EvaluationAndDerivatives) {
  Polynomial p(2);
  p.add_term({2, 0}, 1.0);
  p.add_term({0, 2}, -1.0);
  p.add_term({1, 1}, 3.0);
  const Vec x{1.5, -0.5};
  EXPECT_DOUBLE_EQ(p(x), 2.25 - 0.25 - 2.25);
  const Dual2 d = p.eval_dual(x);
  EXPECT_DOUBLE_EQ(d.grad[0], 2 * 1.5 + 3 * -0.5);
  EXPECT_DOUBLE_EQ(d.grad[1], -2 * -0.5 + 3 * 1.5);
  EXPECT_DOUBLE_EQ(d.laplacian(), 0.0);
  EXPECT_EQ(p.laplacian().degree(), -1);
  const Expr e = to_expr(p);
  EXPECT_NEAR(eval_u(e, x), p(x), 1e-15);
}

TEST(WFunction, Examples) {
  std::mt19937_64 rng(5);
  const auto quad = harmonic_basis(3, 2);
  const VectorField osc = RadialPowerField{1.5, 0.0, 3};
  for (const auto& h : quad) {
    const auto w = w_function(h, osc);
    for (int t = 0; t < 20; ++t) {
      const Vec x = random_point(rng, 3, 0.2, 3.0);
      EXPECT_NEAR(w(x), -2 * 1.5 * 2, 1e-14);
      // Euler identity: 2 grad P . (alpha x) = 2 alpha k P.
      const Dual2 d = h.poly.eval_dual(x);
      double dot = 0.0;
      for (int i = 0; i < 3; ++i) dot += d.grad[i] * 1.5 * x[i];
      EXPECT_NEAR(2 * dot + w(x) * h.poly(x), 0.0, 1e-12);
    }
  }
  const auto lin = harmonic_basis(3, 1);
  const auto w1 = w_function(lin[0], RadialPowerField{0.7, 1.0, 3});
  const Vec x{1.0, 2.0, 2.0};
  EXPECT_NEAR(w1(x), -2 * 0.7 / 3.0, 1e-15);
  const auto w0 = w_function(harmonic_basis(3, 0)[0], RadialPowerField{2.0, 1.0, 3});
  EXPECT_EQ(w0(x), 0.0);
}

TEST(WFunction, PointwiseBranchForGradientFields) {
  const auto lin = harmonic_basis(2, 1);
  const VectorField g = GradientField{parse("0.5*x1^2 + x2", 2)};
  const auto w = w_function(lin[0], g);
  const Vec x{0.5, 0.3};
  const Vec xv = eval_field(g, x);
  const Dual2 d = lin[0].poly.eval_dual(x);
  const double expected = -2 * (d.grad[0] * xv[0] + d.grad[1] * xv[1]) / lin[0].poly(x);
  EXPECT_NEAR(w(x), expected, 1e-14);
  EXPECT_THROW(w(Vec{0.0, 0.3}), ZeroDivision);
}

TEST(Spectrum, OscillatorExamples) {
  const auto s = oscillator_spectrum(3, 1.0, 3);
  ASSERT_EQ(s.size(), 4u);
  const double e[] = {3, 5, 7, 9};
  const long long g[] = {1, 3, 5, 7};
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(s[k].k, k);
    EXPECT_DOUBLE_EQ(s[k].energy, e[k]);
    EXPECT_EQ(s[k].degeneracy, g[k]);
    EXPECT_DOUBLE_EQ(s[k].decay, 1.0);
  }
  const auto one = oscillator_spectrum(1, 2.0, 4);
  ASSERT_EQ(one.size(), 2u);
  EXPECT_DOUBLE_EQ(one[0].energy, 2.0);
  EXPECT_DOUBLE_EQ(one[1].energy, 6.0);
  for (int n = 1; n <= 6; ++n) {
    const auto s0 = oscillator_spectrum(n, 0.8, 0);
    EXPECT_DOUBLE_EQ(s0[0].energy, 0.8 * n);
    EXPECT_EQ(s0[0].degeneracy, 1);
  }
}

TEST(Spectrum, CoulombExamples) {
  EXPECT_DOUBLE_EQ(coulomb_spectrum(3, 1.0, 0)[0].energy, -1.0);
  const auto s = coulomb_spectrum(3, 1.0, 3);
  EXPECT_DOUBLE_EQ(s[1].energy, -0.25);
  EXPECT_NEAR(s[2].energy, -1.0 / 9.0, 1e-16);
  EXPECT_DOUBLE_EQ(s[1].decay, 0.5);
  EXPECT_EQ(s[2].degeneracy, 5);
  EXPECT_DOUBLE_EQ(coulomb_rate(3, 1.0, 1), 0.5);
  // In two dimensions the ground state of -Delta - 1/|x| is exp(-|x|) with
  // energy -1; the residual below confirms it directly.
  EXPECT_DOUBLE_EQ(coulomb_spectrum(2, 1.0, 0)[0].energy, -1.0);
  const GroundState phi = coulomb_excited_state(harmonic_basis(2, 0)[0], 1.0);
  const PotentialFunction v = PotentialFunction::from_expression(parse("-1/r", 2));
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    const Vec x = random_point(rng, 2, 0.1, 20.0);
    EXPECT_LE(std::abs(schrodinger_residual(phi, v, -1.0, x)), 1e-10 * (1 + std::abs(phi.value(x))));
  }
  // The two-dimensional value the closed-form expression -(2/(n-1))^2 would
  // give is not an eigenvalue: the residual is order one.
  EXPECT_GT(std::abs(schrodinger_residual(phi, v, -4.0, Vec{0.5, 0.5})), 0.1);
}

TEST(ExcitedState, OscillatorLadderResiduals) {
  const double alpha = 1.0;
  const GroundState ground = normalize(solve_ground_state(RadialPowerField{alpha, 0.0, 3}));
  const PotentialFunction v = PotentialFunction::from_expression(parse("r^2", 3));
  std::mt19937_64 rng(17);
  for (int k = 0; k <= 3; ++k) {
    const double e = alpha * (3 + 2 * k);
    for (const auto& h : harmonic_basis(3, k)) {
      const GroundState phi = excited_state(h, ground);
      for (int t = 0; t < 500; ++t) {
        const Vec x = random_point(rng, 3, 1e-3, 6.0);
        EXPECT_LE(std::abs(schrodinger_residual(phi, v, e, x)), 1e-8 * (1 + std::abs(phi.value(x))));
      }
    }
  }
}

TEST(ExcitedState, CoulombLadderResiduals) {
  const PotentialFunction v = PotentialFunction::from_expression(parse("-2/r", 3));
  std::mt19937_64 rng(19);
  for (int k = 0; k <= 3; ++k) {
    const double a = 2.0 / (2 + 2 * k);
    for (const auto& h : harmonic_basis(3, k)) {
      const GroundState phi = coulomb_excited_state(h, 1.0);
      for (int t = 0; t < 500; ++t) {
        const Vec x = random_point(rng, 3, 0.1, 20.0);
        EXPECT_LE(std::abs(schrodinger_residual(phi, v, -a * a, x)), 1e-8 * (1 + std::abs(phi.value(x))));
      }
    }
  }
}

TEST(ExcitedState, ExamplesAndShiftedEuler) {
  const GroundState ground = normalize(solve_ground_state(RadialPowerField{1.0, 0.0, 3}));
  const GroundState same = excited_state(harmonic_basis(3, 0)[0], ground);
  const Vec x{0.3, -0.2, 0.9};
  EXPECT_NEAR(same.value(x), ground.value(x), 1e-15);
  const auto lin = harmonic_basis(3, 1);
  const GroundState p1 = excited_state(lin[0], ground);
  const PotentialFunction v = PotentialFunction::from_expression(parse("r^2", 3));
  EXPECT_LE(std::abs(schrodinger_residual(p1, v, 5.0, x)), 1e-12);
  // -Delta phi_P + (W + |X|^2 - div X) phi_P = 0.
  const VectorField field = RadialPowerField{1.0, 0.0, 3};
  for (int k = 1; k <= 3; ++k)
    for (const auto& h : harmonic_basis(3, k)) {
      const GroundState phi = excited_state(h, ground);
      const auto w = w_function(h, field);
      EXPECT_LE(std::abs(euler_residual(phi, field, x, w)), 1e-12);
    }
  const GroundState c1 = coulomb_excited_state(lin[0], 1.0);
  const double r = std::sqrt(0.09 + 0.04 + 0.81);
  EXPECT_NEAR(c1.value(x), c1.normalization() * x[0] * std::exp(-r / 2), 1e-14);
}
