#include "gsf/quadrature.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <numbers>
#include <queue>

#include "gsf/error.hpp"

namespace gsf {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kMinNormal = std::numeric_limits<double>::min();

struct Segment {
  std::function<double(double)> fn;  // integrand in the segment variable, Jacobian included
  double t0;
  double t1;
  int initial_panels;
};

struct Panel {
  std::size_t segment;
  double a;
  double b;
  double value;
  double error;
  double resabs;
  int depth;
};

struct PanelOrder {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.error != y.error) return x.error < y.error;
    if (x.segment != y.segment) return x.segment > y.segment;
    return x.a > y.a;
  }
};

Panel gauss_kronrod(const Segment& seg, std::size_t id, double a, double b, int depth) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using Gauss = boost::math::quadrature::gauss<double, 7>;
  const auto& xk = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto eval = [&](double t) {
    const double v = seg.fn(t);
    if (!std::isfinite(v)) {
      throw QuadratureDivergence("non-finite integrand value at t = " + std::to_string(t));
    }
    return v;
  };

  std::array<double, 8> fplus{};
  std::array<double, 8> fminus{};
  const double fc = eval(center);
  double resk = fc * wk[0];
  double resg = fc * wg[0];
  double resabs = std::abs(resk);
  for (std::size_t j = 1; j < xk.size(); ++j) {
    const double dx = half * xk[j];
    fplus[j] = eval(center + dx);
    fminus[j] = eval(center - dx);
    resk += wk[j] * (fplus[j] + fminus[j]);
    resabs += wk[j] * (std::abs(fplus[j]) + std::abs(fminus[j]));
    if (j % 2 == 0) resg += wg[j / 2] * (fplus[j] + fminus[j]);
  }
  const double mean = 0.5 * resk;
  double resasc = wk[0] * std::abs(fc - mean);
  for (std::size_t j = 1; j < xk.size(); ++j) {
    resasc += wk[j] * (std::abs(fplus[j] - mean) + std::abs(fminus[j] - mean));
  }
  const double scale = std::abs(half);
  resasc *= scale;
  resabs *= scale;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > kMinNormal / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
  return Panel{id, a, b, resk * half, err, resabs, depth};
}

bool at_roundoff_floor(const Panel& p) { return p.error <= 50.0 * kEps * p.resabs * (1.0 + 1e-9); }

QuadratureEstimate adaptive(const std::vector<Segment>& segments, const QuadratureOptions& opts,
                            const std::string& method) {
  std::priority_queue<Panel, std::vector<Panel>, PanelOrder> queue;
  std::vector<Panel> done;
  long long evaluations = 0;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const Segment& seg = segments[s];
    const int k = std::max(1, seg.initial_panels);
    for (int i = 0; i < k; ++i) {
      const double a = seg.t0 + (seg.t1 - seg.t0) * i / k;
      const double b = i + 1 == k ? seg.t1 : seg.t0 + (seg.t1 - seg.t0) * (i + 1) / k;
      Panel p = gauss_kronrod(seg, s, a, b, 0);
      evaluations += 15;
      total += p.value;
      total_err += p.error;
      queue.push(p);
    }
  }

  int panels = static_cast<int>(queue.size());
  while (!queue.empty()) {
    if (std::abs(total) > opts.divergence_bound) {
      throw QuadratureDivergence("partial integrals exceed " + std::to_string(opts.divergence_bound));
    }
    if (total_err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) break;
    const Panel worst = queue.top();
    if (at_roundoff_floor(worst)) break;
    if (worst.depth >= opts.max_depth) {
      throw QuadratureDivergence("subdivision depth " + std::to_string(opts.max_depth) +
                                 " reached without meeting tolerance");
    }
    if (panels >= opts.max_panels) {
      throw QuadratureDivergence("panel budget of " + std::to_string(opts.max_panels) + " exhausted");
    }
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment& seg = segments[worst.segment];
    Panel left = gauss_kronrod(seg, worst.segment, worst.a, mid, worst.depth + 1);
    Panel right = gauss_kronrod(seg, worst.segment, mid, worst.b, worst.depth + 1);
    evaluations += 30;
    ++panels;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    // Refresh the running error now and then so cancellation cannot drift it.
    if (panels % 256 == 0) {
      auto copy = queue;
      total_err = 0.0;
      while (!copy.empty()) {
        total_err += copy.top().error;
        copy.pop();
      }
    }
  }

  while (!queue.empty()) {
    done.push_back(queue.top());
    queue.pop();
  }
  std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) {
    return x.segment != y.segment ? x.segment < y.segment : x.a < y.a;
  });
  QuadratureEstimate out;
  for (const Panel& p : done) {
    out.value += p.value;
    out.error += p.error;
  }
  if (std::abs(out.value) > opts.divergence_bound) {
    throw QuadratureDivergence("integral exceeds " + std::to_string(opts.divergence_bound));
  }
  out.method = method;
  out.nodes = evaluations;
  return out;
}

// beta for r = b t^beta on the origin panel.
double origin_power(const std::function<double(double)>& h, const HalfLineHints& hints, double b) {
  double a = 0.0;
  if (hints.origin_exponent) {
    a = *hints.origin_exponent;
  } else {
    const double r1 = 1e-8 * b;
    const double r2 = 1e-6 * b;
    const double h1 = std::abs(h(r1));
    const double h2 = std::abs(h(r2));
    if (!(h1 > 0.0 && h2 > 0.0 && std::isfinite(h1) && std::isfinite(h2))) return 2.0;
    a = std::log(h2 / h1) / std::log(r2 / r1) - 0.02;
  }
  if (a >= 0.0) return 2.0;
  if (a <= -1.0) return 1.0;
  return std::min(50.0, 1.0 / (a + 1.0));
}

std::vector<Segment> half_line_segments(const std::function<double(double)>& h, const HalfLineHints& hints) {
  if (!(hints.scale > 0.0) || !std::isfinite(hints.scale)) throw InvalidArgument("quadrature scale must be positive");
  if (!(hints.support > 0.0)) throw InvalidArgument("quadrature support must be positive");
  std::vector<double> cuts;
  for (double b : hints.breakpoints) {
    if (b > 0.0 && b < hints.support) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (cuts.empty()) cuts.push_back(std::min(hints.scale, hints.support));
  if (std::isfinite(hints.support) && cuts.back() < hints.support) cuts.push_back(hints.support);

  std::vector<Segment> segs;
  const double b0 = cuts.front();
  const double beta = origin_power(h, hints, b0);
  segs.push_back({[h, b0, beta](double t) {
                    if (t <= 0.0) return 0.0;
                    const double r = b0 * std::pow(t, beta);
                    return h(r) * b0 * beta * std::pow(t, beta - 1.0);
                  },
                  0.0, 1.0, 4});
  for (std::size_t i = 1; i < cuts.size(); ++i) segs.push_back({h, cuts[i - 1], cuts[i], 2});
  if (!std::isfinite(hints.support)) {
    const double start = cuts.back();
    const double scale = hints.scale;
    segs.push_back({[h, start, scale](double t) {
                      const double s = 1.0 - t;
                      if (s <= 0.0) return 0.0;
                      return h(start + scale * t / s) * scale / (s * s);
                    },
                    0.0, 1.0, 8});
  }
  return segs;
}

}  // namespace

QuadratureEstimate interval_integral(const std::function<double(double)>& f, double a, double b,
                                     const QuadratureOptions& opts) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidArgument("interval_integral needs finite limits");
  if (a == b) return QuadratureEstimate{0.0, 0.0, "interval", 0};
  return adaptive({Segment{f, a, b, 1}}, opts, "interval");
}

QuadratureEstimate half_line_integral(const std::function<double(double)>& h, const HalfLineHints& hints,
                                      const QuadratureOptions& opts) {
  return adaptive(half_line_segments(h, hints), opts, "radial");
}

double sphere_area(int n) {
  if (n < 1) throw InvalidArgument("dimension must be at least 1");
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

QuadratureEstimate radial_integral(const RadialIntegrand& f, const QuadratureOptions& opts) {
  if (f.n < 1) throw InvalidArgument("dimension must be at least 1");
  const double power = f.n - 1 + f.moment_power;
  const auto g = f.g;
  auto h = [g, power](double r) {
    const double v = g(r);
    return v == 0.0 ? 0.0 : v * std::pow(r, power);
  };
  QuadratureEstimate q = half_line_integral(h, f.hints, opts);
  const double w = sphere_area(f.n);
  q.value *= w;
  q.error *= w;
  return q;
}

SphereRule sphere_rule(int n, int order) {
  if (n < 1 || n > kMaxDim) throw InvalidArgument("dimension out of range");
  if (order < 1) throw InvalidArgument("angular order must be positive");
  SphereRule rule;
  if (n == 1) {
    rule.points = {{1.0}, {-1.0}};
    rule.weights = {1.0, 1.0};
    return rule;
  }
  // Gauss-Legendre mapped to [0, pi] for each polar angle.
  Vec theta;
  Vec theta_w;
  if (n >= 3) {
    const auto zeros = boost::math::legendre_p_zeros<double>(order);
    for (double z : zeros) {
      const double dp = boost::math::legendre_p_prime(order, z);
      const double w = 2.0 / ((1.0 - z * z) * dp * dp);
      for (double s : {-1.0, 1.0}) {
        if (z == 0.0 && s > 0.0) continue;
        theta.push_back(0.5 * std::numbers::pi * (1.0 + s * z));
        theta_w.push_back(0.5 * std::numbers::pi * w);
      }
    }
  }
  const int azimuth = 2 * order;
  const int polar = n - 2;
  std::vector<int> idx(static_cast<std::size_t>(polar), 0);
  while (true) {
    double sin_prod = 1.0;
    double weight = 1.0;
    Vec base(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < polar; ++j) {
      const double t = theta[idx[j]];
      base[j] = sin_prod * std::cos(t);
      weight *= theta_w[idx[j]] * std::pow(std::sin(t), n - 2 - j);
      sin_prod *= std::sin(t);
    }
    for (int a = 0; a < azimuth; ++a) {
      const double phi = 2.0 * std::numbers::pi * a / azimuth;
      Vec p = base;
      p[n - 2] = sin_prod * std::cos(phi);
      p[n - 1] = sin_prod * std::sin(phi);
      rule.points.push_back(std::move(p));
      rule.weights.push_back(weight * 2.0 * std::numbers::pi / azimuth);
    }
    int j = 0;
    while (j < polar && ++idx[j] == static_cast<int>(theta.size())) idx[j++] = 0;
    if (j == polar) break;
  }
  return rule;
}

QuadratureEstimate space_integral(const SpaceIntegrand& f, const QuadratureOptions& opts) {
  if (f.n < 1 || f.n > kMaxDim) throw InvalidArgument("dimension out of range");
  const int n = f.n;
  if (f.radial || n == 1) {
    if (n == 1 && !f.radial) {
      auto fn = f.f;
      auto h = [fn](double r) {
        std::array<double, 1> x{r};
        std::array<double, 1> y{-r};
        return fn(Point(x.data(), 1)) + fn(Point(y.data(), 1));
      };
      QuadratureEstimate q = half_line_integral(h, f.hints, opts);
      q.method = "spherical";
      return q;
    }
    auto fn = f.f;
    RadialIntegrand ri;
    ri.n = n;
    ri.hints = f.hints;
    ri.g = [fn, n](double r) {
      std::array<double, kMaxDim> x{};
      x[0] = r;
      return fn(Point(x.data(), static_cast<std::size_t>(n)));
    };
    return radial_integral(ri, opts);
  }

  auto sphere_sum = [&](const SphereRule& rule, double r) {
    double s = 0.0;
    std::array<double, kMaxDim> x{};
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
      for (int j = 0; j < n; ++j) x[j] = r * rule.points[i][j];
      s += rule.weights[i] * f.f(Point(x.data(), static_cast<std::size_t>(n)));
    }
    return s;
  };

  const int max_order = n == 2 ? 256 : n == 3 ? 48 : 12;
  int order = f.angular_order;
  double angular_err = 0.0;
  if (order == 0) {
    order = n == 2 ? 16 : 8;
    SphereRule coarse = sphere_rule(n, order);
    while (true) {
      const int finer = std::min(2 * order, max_order);
      SphereRule fine = sphere_rule(n, finer);
      double worst = 0.0;
      for (double c : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double r = c * f.hints.scale;
        if (r >= f.hints.support) continue;
        const double a = sphere_sum(coarse, r);
        const double b = sphere_sum(fine, r);
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-300));
      }
      order = finer;
      coarse = std::move(fine);
      angular_err = worst;
      if (worst <= 1e-12 || finer == max_order) break;
    }
  }
  const SphereRule rule = sphere_rule(n, order);
  const double power = n - 1;
  auto h = [&, power](double r) {
    const double s = sphere_sum(rule, r);
    return s == 0.0 ? 0.0 : s * std::pow(r, power);
  };
  QuadratureEstimate q = half_line_integral(h, f.hints, opts);
  q.error += angular_err * std::abs(q.value);
  q.nodes *= static_cast<long long>(rule.points.size());
  q.method = "spherical";
  return q;
}

double sphere_monomial_integral(const MultiIndex& a) {
  int total = 0;
  double log_num = 0.0;
  for (int e : a) {
    if (e < 0) throw InvalidArgument("negative exponent");
    if (e % 2 != 0) return 0.0;
    total += e;
    log_num += std::lgamma((e + 1) / 2.0);
  }
  const double n = static_cast<double>(a.size());
  return 2.0 * std::exp(log_num - std::lgamma((total + n) / 2.0));
}

double sphere_poly_moment(const Polynomial& p) {
  const Polynomial sq = p * p;
  double s = 0.0;
  for (const auto& [a, c] : sq.terms()) s += c * sphere_monomial_integral(a);
  return s;
}

namespace {

double trapezoid(const std::function<double(Point)>& f, int n, double half_width, int m, double* abs_sum) {
  const double h = 2.0 * half_width / (m - 1);
  std::array<int, 3> idx{};
  std::array<double, 3> x{};
  double sum = 0.0;
  double asum = 0.0;
  while (true) {
    double w = 1.0;
    for (int j = 0; j < n; ++j) {
      x[j] = -half_width + h * idx[j];
      if (idx[j] == m - 1) x[j] = half_width;
      w *= (idx[j] == 0 || idx[j] == m - 1) ? 0.5 * h : h;
    }
    const double v = f(Point(x.data(), static_cast<std::size_t>(n)));
    if (!std::isfinite(v)) throw NodeSingularity("integrand is not finite at a grid node");
    sum += w * v;
    asum += w * std::abs(v);
    int j = 0;
    while (j < n && ++idx[j] == m) idx[j++] = 0;
    if (j == n) break;
  }
  if (abs_sum) *abs_sum = asum;
  return sum;
}

}  // namespace

QuadratureEstimate tensor_grid_integral(const std::function<double(Point)>& f, int n, double half_width, int m) {
  if (n < 1 || n > 3) throw InvalidArgument("tensor_grid_integral supports 1 <= n <= 3");
  if (m < 3) throw InvalidArgument("tensor grid needs at least 3 nodes per axis");
  if (!(half_width > 0.0)) throw InvalidArgument("tensor grid half-width must be positive");
  double asum = 0.0;
  const double fine = trapezoid(f, n, half_width, m, &asum);
  const int mc = std::max(3, (m + 1) / 2);
  const double coarse = trapezoid(f, n, half_width, mc, nullptr);
  const double h = 2.0 * half_width / (m - 1);
  const double hc = 2.0 * half_width / (mc - 1);
  double err = std::abs(fine - coarse) * h * h / std::max(hc * hc - h * h, kEps);
  if (asum > 0.0) err = std::max(err, 4.0 * kEps * asum);
  long long nodes = 1;
  long long coarse_nodes = 1;
  for (int j = 0; j < n; ++j) {
    nodes *= m;
    coarse_nodes *= mc;
  }
  return QuadratureEstimate{fine, err, "tensor", nodes + coarse_nodes};
}

}  // namespace gsf
