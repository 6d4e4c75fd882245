#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gsf/error.hpp"
#include "gsf/quadrature.hpp"

using namespace gsf;

namespace {

constexpr double kPi = std::numbers::pi;

// Composite trapezoid on [0, b] with 2^levels panels; used as an independent
// reference for one-dimensional radial integrals.
double trapezoid(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < panels; ++i) s += f(a + i * h);
  return s * h;
}

double sphere_mc(const std::function<double(const Vec&)>& f, int n, long samples, std::uint64_t seed,
                 double* stderr_out) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Vec x(n);
  double s = 0.0, s2 = 0.0;
  for (long i = 0; i < samples; ++i) {
    double r2 = 0.0;
    for (double& v : x) {
      v = g(rng);
      r2 += v * v;
    }
    const double r = std::sqrt(r2);
    for (double& v : x) v /= r;
    const double y = f(x);
    s += y;
    s2 += y * y;
  }
  const double mean = s / samples;
  const double var = s2 / samples - mean * mean;
  const double area = sphere_area(n);
  *stderr_out = area * std::sqrt(var / samples);
  return area * mean;
}

}  // namespace

TEST(RadialIntegral, Examples) {
  const QuadratureEstimate a = radial_integral({[](double r) { return std::exp(-2 * r); }, 0.0, 3, {}});
  EXPECT_NEAR(a.value, kPi, 1e-10 * kPi);
  EXPECT_EQ(a.method, "radial");
  // Independent oracle: 4 pi int r^2 e^{-2r} on [0, 40] by trapezoid.
  const double ref = 4 * kPi * trapezoid([](double r) { return r * r * std::exp(-2 * r); }, 0.0, 40.0, 1 << 16);
  EXPECT_NEAR(a.value, ref, 1e-7);

  const QuadratureEstimate b = radial_integral({[](double r) { return std::exp(-r * r); }, 0.0, 1, {}});
  EXPECT_NEAR(b.value, std::sqrt(kPi), 1e-10);

  RadialIntegrand c{[](double r) { return r < 1 ? 1.0 / (r * r) : 0.0; }, 0.0, 3, {}};
  c.hints.support = 1.0;
  c.hints.origin_exponent = 0.0;
  EXPECT_NEAR(radial_integral(c).value, 4 * kPi, 1e-10);
}

TEST(RadialIntegral, MomentPowerAndSingularOrigin) {
  // omega_2 int r^(2+s) e^{-r} with s = -1.5: 4 pi Gamma(1.5).
  RadialIntegrand f{[](double r) { return std::exp(-r); }, -1.5, 3, {}};
  EXPECT_NEAR(radial_integral(f).value, 4 * kPi * std::tgamma(1.5), 1e-9);
  // Unknown origin exponent is estimated from samples.
  RadialIntegrand g{[](double r) { return std::pow(r, -2.7) * std::exp(-r); }, 0.0, 3, {}};
  EXPECT_NEAR(radial_integral(g).value, 4 * kPi * std::tgamma(0.3), 1e-7 * std::tgamma(0.3));
}

TEST(RadialIntegral, HardyGroundStateGradientDiverges) {
  for (int n = 3; n <= 5; ++n) {
    const double a = (n - 2) / 2.0;
    // |grad r^-a|^2 = a^2 r^(-2a-2), integrated against r^(n-1): r^-1.
    RadialIntegrand f{[a](double r) { return a * a * std::pow(r, -2 * a - 2); }, 0.0, n, {}};
    EXPECT_THROW(radial_integral(f), QuadratureDivergence) << n;
  }
  RadialIntegrand g{[](double r) { return 1.0 / (r * r * r); }, 0.0, 3, {}};
  EXPECT_THROW(radial_integral(g), QuadratureDivergence);
}

TEST(Sphere, AreasAndMoments) {
  EXPECT_NEAR(sphere_area(1), 2.0, 1e-15);
  EXPECT_NEAR(sphere_area(2), 2 * kPi, 1e-14);
  EXPECT_NEAR(sphere_area(3), 4 * kPi, 1e-14);
  EXPECT_NEAR(sphere_area(4), 2 * kPi * kPi, 1e-13);
  EXPECT_NEAR(sphere_poly_moment(Polynomial::constant(1.0, 3)), 4 * kPi, 1e-14);
  EXPECT_NEAR(sphere_poly_moment(Polynomial::monomial({1, 0, 0})), 4 * kPi / 3, 1e-14);
  EXPECT_NEAR(sphere_poly_moment(Polynomial::monomial({1, 1, 0})), 4 * kPi / 15, 1e-14);
}

TEST(Sphere, MomentsAgreeWithMonteCarlo) {
  double se = 0.0;
  const double m1 = sphere_mc([](const Vec& x) { return x[0] * x[0]; }, 3, 10'000'000, 1, &se);
  EXPECT_LE(std::abs(m1 - 4 * kPi / 3), 3 * se);
  const double m2 = sphere_mc([](const Vec& x) { return x[0] * x[0] * x[1] * x[1]; }, 3, 10'000'000, 2, &se);
  EXPECT_LE(std::abs(m2 - 4 * kPi / 15), 3 * se);
}

TEST(Sphere, RuleConvergesOnMonomials) {
  for (int n = 2; n <= 4; ++n) {
    const SphereRule rule = sphere_rule(n, 32);
    for (int k = 0; k <= 6; ++k)
      for (const MultiIndex& a : monomials(n, k)) {
        double s = 0.0;
        for (std::size_t i = 0; i < rule.points.size(); ++i) {
          double v = rule.weights[i];
          for (int j = 0; j < n; ++j) v *= std::pow(rule.points[i][j], a[j]);
          s += v;
        }
        EXPECT_NEAR(s, sphere_monomial_integral(a), 1e-12 * std::max(1.0, s)) << n << " " << k;
      }
  }
}

TEST(TensorGrid, Examples) {
  const QuadratureEstimate one = tensor_grid_integral([](Point) { return 1.0; }, 2, 1.0, 11);
  EXPECT_NEAR(one.value, 4.0, 1e-14);
  EXPECT_EQ(one.method, "tensor");
  const QuadratureEstimate g = tensor_grid_integral([](Point x) { return std::exp(-norm_sq(x)); }, 2, 6.0, 200);
  EXPECT_NEAR(g.value, kPi, 1e-8);
  const QuadratureEstimate oracle = radial_integral({[](double r) { return std::exp(-r * r); }, 0.0, 2, {}});
  EXPECT_NEAR(g.value, oracle.value, 1e-8);
  EXPECT_THROW(tensor_grid_integral([](Point x) { return 1.0 / norm(x); }, 2, 1.0, 11), NodeSingularity);
}

TEST(TensorGrid, AgreesWithRadialRule) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> a(0.5, 2.0), b(-0.3, 1.0), c(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + t % 2;
    const double aa = a(rng), bb = b(rng), cc = c(rng);
    auto prof = [=](double r) { return (1 + bb * r * r) * std::exp(-aa * r * r) + cc * std::exp(-2 * aa * r * r); };
    const QuadratureEstimate rad = radial_integral({prof, 0.0, n, {}});
    const QuadratureEstimate ten =
        tensor_grid_integral([&](Point x) { return prof(norm(x)); }, n, 9.0, n == 2 ? 301 : 121);
    EXPECT_LE(std::abs(rad.value - ten.value), std::max(1e-8, rad.error + ten.error)) << t;
  }
}

TEST(TensorGrid, ErrorEstimatesShrinkUnderRefinement) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  int monotone = 0, total = 0;
  for (int t = 0; t < 40; ++t) {
    const double p = u(rng), q = u(rng);
    auto f = [=](Point x) { return std::exp(p * x[0]) * std::cos(q * x[1]) + x[0] * x[1] * x[1]; };
    double prev = tensor_grid_integral(f, 2, 1.0, 10).error;
    for (int m = 20; m <= 160; m *= 2) {
      const double e = tensor_grid_integral(f, 2, 1.0, m).error;
      ++total;
      if (e < prev) ++monotone;
      prev = e;
    }
  }
  EXPECT_GE(monotone, 0.95 * total);
}

TEST(IntervalIntegral, SmoothAndKinked) {
  const QuadratureEstimate s = interval_integral([](double x) { return std::sin(x); }, 0.0, kPi);
  EXPECT_NEAR(s.value, 2.0, 1e-13);
  EXPECT_GE(s.error, 0.0);
  const QuadratureEstimate k = interval_integral([](double x) { return std::abs(x - 0.3); }, -1.0, 1.0);
  EXPECT_NEAR(k.value, 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7, 1e-10);
  const QuadratureEstimate z = interval_integral([](double) { return 0.0; }, 0.0, 1.0);
  EXPECT_EQ(z.value, 0.0);
  EXPECT_EQ(z.error, 0.0);
}

TEST(HalfLine, TailAndBreakpoints) {
  HalfLineHints h;
  h.scale = 10.0;
  const QuadratureEstimate a = half_line_integral([](double r) { return std::exp(-r / 10.0); }, h);
  EXPECT_NEAR(a.value, 10.0, 1e-9);
  HalfLineHints k;
  k.breakpoints = {2.0};
  k.support = 3.0;
  const QuadratureEstimate b = half_line_integral([](double r) { return r < 2 ? r : (r < 3 ? 4 - r : 0.0); }, k);
  EXPECT_NEAR(b.value, 2.0 + 1.5, 1e-11);
}

TEST(SpaceIntegral, NonRadialGaussian) {
  SpaceIntegrand f;
  f.n = 3;
  f.f = [](Point x) {
    const double d0 = x[0] - 0.3, d1 = x[1] + 0.2, d2 = x[2];
    return std::exp(-(d0 * d0 + d1 * d1 + d2 * d2));
  };
  const QuadratureEstimate q = space_integral(f);
  EXPECT_NEAR(q.value, std::pow(kPi, 1.5), 1e-8);
  SpaceIntegrand r;
  r.n = 3;
  r.radial = true;
  r.f = [](Point x) { return std::exp(-2 * norm(x)); };
  EXPECT_NEAR(space_integral(r).value, kPi, 1e-10);
}
