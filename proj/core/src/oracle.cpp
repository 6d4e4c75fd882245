#include "gsf/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gsf/error.hpp"

namespace gsf {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double vec_norm(const Vec& a) { return std::sqrt(dot(a, a)); }

void axpy(double a, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale(Vec& x, double a) {
  for (double& v : x) v *= a;
}

// Number of eigenvalues below x (Sturm sequence of the LDL^T pivots).
std::size_t sturm_count(const Vec& d, const Vec& e, double x) {
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double off = i == 0 ? 0.0 : e[i - 1] * e[i - 1] / q;
    q = d[i] - x - off;
    if (q == 0.0) q = -kEps * (std::abs(d[i]) + std::abs(x) + 1.0);
    if (q < 0.0) ++count;
  }
  return count;
}

// Solves (T - sigma I) y = b by the Thomas algorithm; T - sigma I is positive
// definite when sigma lies below the spectrum.
Vec thomas(const Vec& d, const Vec& e, double sigma, const Vec& b) {
  const std::size_t n = d.size();
  Vec c(n, 0.0);
  Vec y(n, 0.0);
  double denom = d[0] - sigma;
  c[0] = n > 1 ? e[0] / denom : 0.0;
  y[0] = b[0] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = d[i] - sigma - e[i - 1] * c[i - 1];
    if (i + 1 < n) c[i] = e[i] / denom;
    y[i] = (b[i] - e[i - 1] * y[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) y[i] -= c[i] * y[i + 1];
  return y;
}

void fix_sign(Vec& v) {
  std::size_t big = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[big])) big = i;
  }
  if (!v.empty() && v[big] < 0.0) scale(v, -1.0);
}

Eigenpair tridiagonal_pair(const DiscreteOperator& op, double tol) {
  const Grid& g = op.grid();
  const double h2 = g.spacing() * g.spacing();
  Vec d(op.size());
  Vec e(op.size() > 0 ? op.size() - 1 : 0, -1.0 / h2);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = 2.0 / h2 + op.potential()[i];
  const double lambda = tridiagonal_smallest(d, e);
  const double shift = lambda - std::max(1e-10 * std::abs(lambda), 1e-12);
  Vec v(d.size(), 1.0);
  for (int it = 0; it < 4; ++it) {
    v = thomas(d, e, shift, v);
    scale(v, 1.0 / vec_norm(v));
  }
  fix_sign(v);
  Vec av(v.size());
  op.apply(v, av);
  Eigenpair out;
  out.value = dot(v, av);
  axpy(-out.value, v, av);
  out.residual = vec_norm(av);
  out.vector = std::move(v);
  out.matvecs = 1;
  if (out.residual > tol) {
    std::ostringstream os;
    os << "inverse iteration residual " << out.residual << " above tolerance " << tol;
    throw NoConvergence(os.str());
  }
  return out;
}

// Orthonormalizes the columns of s (and applies the same combination to
// their images as) by two passes of modified Gram-Schmidt, dropping columns
// that become negligible.
void orthonormalize(std::vector<Vec>& s, std::vector<Vec>& as) {
  std::vector<Vec> out;
  std::vector<Vec> aout;
  for (std::size_t j = 0; j < s.size(); ++j) {
    Vec v = s[j];
    Vec av = as[j];
    const double original = vec_norm(v);
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < out.size(); ++k) {
        const double c = dot(out[k], v);
        axpy(-c, out[k], v);
        axpy(-c, aout[k], av);
      }
    }
    const double nv = vec_norm(v);
    if (nv <= 1e-10 * original) continue;
    scale(v, 1.0 / nv);
    scale(av, 1.0 / nv);
    out.push_back(std::move(v));
    aout.push_back(std::move(av));
  }
  s = std::move(out);
  as = std::move(aout);
}

Eigenpair lobpcg(const DiscreteOperator& op, double tol, long long max_matvecs) {
  const Grid& g = op.grid();
  const std::size_t size = op.size();
  Vec x(size);
  // Box ground state as the starting vector.
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t rest = idx;
    double v = 1.0;
    for (int d = 0; d < g.n; ++d) {
      const int i = static_cast<int>(rest % static_cast<std::size_t>(g.m));
      rest /= static_cast<std::size_t>(g.m);
      v *= std::cos(std::numbers::pi * g.coordinate(i) / (2.0 * g.half_width));
    }
    x[idx] = v;
  }
  scale(x, 1.0 / vec_norm(x));
  Vec ax(size);
  op.apply(x, ax);
  long long matvecs = 1;
  Vec p;
  Vec ap;
  double lambda = dot(x, ax);
  double residual = 0.0;
  Vec r(size);
  while (true) {
    for (std::size_t i = 0; i < size; ++i) r[i] = ax[i] - lambda * x[i];
    residual = vec_norm(r);
    if (residual <= tol) break;
    if (matvecs >= max_matvecs) {
      std::ostringstream os;
      os << "no convergence after " << matvecs << " matrix-vector products (residual " << residual << ")";
      throw NoConvergence(os.str());
    }
    Vec ar(size);
    op.apply(r, ar);
    ++matvecs;
    std::vector<Vec> s{x, r};
    std::vector<Vec> as{ax, ar};
    if (!p.empty()) {
      s.push_back(p);
      as.push_back(ap);
    }
    orthonormalize(s, as);
    const auto k = static_cast<Eigen::Index>(s.size());
    Eigen::MatrixXd h(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double v = 0.5 * (dot(s[i], as[j]) + dot(s[j], as[i]));
        h(i, j) = v;
        h(j, i) = v;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::VectorXd c = es.eigenvectors().col(0);
    Vec xn(size, 0.0);
    Vec axn(size, 0.0);
    Vec pn(size, 0.0);
    Vec apn(size, 0.0);
    for (Eigen::Index i = 0; i < k; ++i) {
      axpy(c(i), s[i], xn);
      axpy(c(i), as[i], axn);
      if (i > 0) {
        axpy(c(i), s[i], pn);
        axpy(c(i), as[i], apn);
      }
    }
    const double nx = vec_norm(xn);
    scale(xn, 1.0 / nx);
    scale(axn, 1.0 / nx);
    x = std::move(xn);
    ax = std::move(axn);
    p = std::move(pn);
    ap = std::move(apn);
    // Refresh the image of x so that recurrence drift cannot stall the residual.
    if (matvecs % 25 == 0) {
      op.apply(x, ax);
      ++matvecs;
    }
    lambda = dot(x, ax);
  }
  fix_sign(x);
  Eigenpair out;
  out.value = lambda;
  out.vector = std::move(x);
  out.residual = residual;
  out.matvecs = matvecs;
  return out;
}

// Tridiagonal flux-form radial operator on m cells of width h.
double radial_energy(const RadialProblem& problem, int m, double h) {
  const int n = problem.n;
  Vec d(static_cast<std::size_t>(m));
  Vec e(static_cast<std::size_t>(m - 1));
  auto area = [n](double r) { return std::pow(r, n - 1); };
  for (int i = 0; i < m; ++i) {
    const double r = (i + 0.5) * h;
    const double w = area(r);
    const double v = problem.potential(r);
    if (!std::isfinite(v)) throw NodeSingularity("radial potential is not finite at r = " + std::to_string(r));
    d[i] = (area(r + 0.5 * h) + area(r - 0.5 * h)) / (h * h * w) + v;
    if (i + 1 < m) {
      const double w1 = area(r + h);
      e[i] = -area(r + 0.5 * h) / (h * h * std::sqrt(w * w1));
    }
  }
  return tridiagonal_smallest(d, e);
}

RadialStep radial_step(const RadialProblem& problem, double radius, double step) {
  const int mc = std::max(8, static_cast<int>(std::lround(radius / step - 0.5)));
  const int mf = 2 * mc;
  const double hc = radius / (mc + 0.5);
  const double hf = radius / (mf + 0.5);
  RadialStep s;
  s.radius = radius;
  s.step = hc;
  s.coarse = radial_energy(problem, mc, hc);
  s.fine = radial_energy(problem, mf, hf);
  s.extrapolated = (s.fine * hc * hc - s.coarse * hf * hf) / (hc * hc - hf * hf);
  return s;
}

double reference_radius(const std::function<double(double)>& state) {
  double peak = 0.0;
  double peak_r = 0.0;
  std::vector<std::pair<double, double>> samples;
  for (double r = 1e-3; r < 1e5; r *= 1.02) {
    const double v = std::abs(state(r));
    samples.emplace_back(r, v);
    if (v > peak) {
      peak = v;
      peak_r = r;
    }
  }
  if (!(peak > 0.0) || !std::isfinite(peak)) throw InvalidArgument("reference state has no finite peak");
  for (const auto& [r, v] : samples) {
    if (r > peak_r && v <= 1e-12 * peak) return r;
  }
  throw NoConvergence("reference state does not decay to 1e-12 of its peak");
}

}  // namespace

Grid::Grid(int n_, double half_width_, int m_) : n(n_), half_width(half_width_), m(m_) {
  if (n < 1 || n > kMaxDim) throw InvalidArgument("grid dimension out of range");
  if (m < 3) throw InvalidArgument("grid needs m >= 3");
  if (!(half_width > 0.0)) throw InvalidArgument("grid half-width must be positive");
}

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int d = 0; d < n; ++d) s *= static_cast<std::size_t>(m);
  return s;
}

DiscreteOperator::DiscreteOperator(Grid grid, Vec potential) : grid_(grid), potential_(std::move(potential)) {
  if (potential_.size() != grid_.size()) throw DimensionMismatch("potential does not match grid size");
  std::size_t s = 1;
  for (int d = 0; d < grid_.n; ++d) {
    stride_.push_back(s);
    s *= static_cast<std::size_t>(grid_.m);
  }
}

void DiscreteOperator::apply(const Vec& in, Vec& out) const {
  const std::size_t size = potential_.size();
  if (in.size() != size) throw DimensionMismatch("vector does not match operator size");
  out.resize(size);
  const double inv_h2 = 1.0 / (grid_.spacing() * grid_.spacing());
  const double diag = 2.0 * grid_.n * inv_h2;
  for (std::size_t i = 0; i < size; ++i) out[i] = (diag + potential_[i]) * in[i];
  const auto m = static_cast<std::size_t>(grid_.m);
  for (int d = 0; d < grid_.n; ++d) {
    const std::size_t s = stride_[d];
    for (std::size_t i = 0; i < size; ++i) {
      const std::size_t c = (i / s) % m;
      double nb = 0.0;
      if (c > 0) nb += in[i - s];
      if (c + 1 < m) nb += in[i + s];
      out[i] -= inv_h2 * nb;
    }
  }
}

double DiscreteOperator::entry(std::size_t i, std::size_t j) const {
  const double inv_h2 = 1.0 / (grid_.spacing() * grid_.spacing());
  if (i == j) return 2.0 * grid_.n * inv_h2 + potential_[i];
  const auto m = static_cast<std::size_t>(grid_.m);
  for (int d = 0; d < grid_.n; ++d) {
    const std::size_t s = stride_[d];
    const std::size_t lo = std::min(i, j);
    const std::size_t hi = std::max(i, j);
    if (hi - lo == s && (lo / s) % m + 1 < m && lo / (s * m) == hi / (s * m)) return -inv_h2;
  }
  return 0.0;
}

DiscreteOperator discretize(const PotentialFunction& v, const Grid& grid) {
  if (v.dim() != grid.n) throw DimensionMismatch("potential and grid dimensions differ");
  Vec values(grid.size());
  std::array<double, kMaxDim> x{};
  const auto m = static_cast<std::size_t>(grid.m);
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    std::size_t rest = idx;
    for (int d = 0; d < grid.n; ++d) {
      x[d] = grid.coordinate(static_cast<int>(rest % m));
      rest /= m;
    }
    const Point p(x.data(), static_cast<std::size_t>(grid.n));
    double val = 0.0;
    try {
      val = v(p);
    } catch (const Error& e) {
      throw NodeSingularity(std::string("potential not evaluable at a grid node: ") + e.what());
    }
    if (!std::isfinite(val)) throw NodeSingularity("potential is not finite at a grid node");
    values[idx] = val;
  }
  return DiscreteOperator(grid, std::move(values));
}

double tridiagonal_smallest(const Vec& diag, const Vec& offdiag) {
  if (diag.empty()) throw InvalidArgument("empty tridiagonal matrix");
  if (offdiag.size() + 1 != diag.size()) throw DimensionMismatch("off-diagonal length must be n - 1");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < diag.size(); ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(offdiag[i - 1]);
    if (i < offdiag.size()) radius += std::abs(offdiag[i]);
    lo = std::min(lo, diag[i] - radius);
    hi = std::max(hi, diag[i] + radius);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(diag, offdiag, mid) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

Eigenpair smallest_eigenpair(const DiscreteOperator& op, double tol, long long max_matvecs) {
  if (!(tol > 0.0)) throw InvalidArgument("eigen tolerance must be positive");
  if (op.grid().n == 1) return tridiagonal_pair(op, tol);
  return lobpcg(op, tol, max_matvecs);
}

RadialResult radial_solve_detailed(const RadialProblem& problem, double tol) {
  if (problem.n < 2) throw InvalidArgument("radial_solve needs n >= 2");
  if (!problem.potential) throw InvalidArgument("radial problem has no potential");
  if (!(problem.step > 0.0)) throw InvalidArgument("radial step must be positive");
  RadialResult out;
  if (problem.radius > 0.0 || problem.reference_state) {
    const double radius = problem.radius > 0.0 ? problem.radius : reference_radius(problem.reference_state);
    const RadialStep s = radial_step(problem, radius, problem.step);
    out.history.push_back(s);
    out.energy = s.extrapolated;
    out.error_estimate = std::abs(s.fine - s.extrapolated);
    return out;
  }
  double radius = 10.0;
  constexpr double kMaxRadius = 1e5;
  double previous = 0.0;
  for (int j = 0; radius <= kMaxRadius; ++j, radius *= 2.0) {
    const double step = std::max(problem.step, radius / 4000.0);
    const RadialStep s = radial_step(problem, radius, step);
    out.history.push_back(s);
    if (j > 0 && std::abs(s.extrapolated - previous) < tol) {
      out.energy = s.extrapolated;
      out.error_estimate = std::max(std::abs(s.extrapolated - previous), std::abs(s.fine - s.extrapolated));
      return out;
    }
    previous = s.extrapolated;
  }
  throw NoConvergence("box radius reached 1e5 without E0 settling to tolerance");
}

double radial_solve(const RadialProblem& problem, double tol) { return radial_solve_detailed(problem, tol).energy; }

QuadratureEstimate rayleigh(const ScalarState& phi, const PotentialFunction& v, const QuadratureOptions& opts) {
  const QuadratureEstimate kin = kinetic_energy(phi, opts);
  const QuadratureEstimate pot = potential_moment(phi, v, opts);
  const QuadratureEstimate mass = norm_sq(phi, opts);
  QuadratureEstimate out;
  out.value = (kin.value + pot.value) / mass.value;
  out.error = (kin.error + pot.error) / mass.value + std::abs(out.value) * mass.error / mass.value;
  out.method = kin.method;
  out.nodes = kin.nodes + pot.nodes + mass.nodes;
  return out;
}

double lambda_estimate(const VectorField& field, const OracleOptions& opts) {
  const PotentialFunction v = schrodinger_potential(field, 0.0);
  const int n = dimension(field);
  if (is_radial(field) && n >= 2) {
    RadialProblem problem;
    problem.n = n;
    problem.potential = [v](double r) { return v.radial_value(r); };
    try {
      const GroundState g = solve_ground_state(field);
      if (g.admissible()) {
        problem.reference_state = [g, n](double r) {
          std::array<double, kMaxDim> x{};
          x[0] = r;
          return g.value(Point(x.data(), static_cast<std::size_t>(n)));
        };
      }
    } catch (const Error&) {
      // No closed form; fall back to doubling the box.
    }
    return radial_solve(problem, opts.tol);
  }
  int m = opts.m;
  if (m % 2 == 1) ++m;
  if (n == 1) m = std::max(m, 2000);
  const Grid grid(n, opts.half_width, m);
  return smallest_eigenpair(discretize(v, grid), opts.tol).value;
}

GridState::GridState(Grid grid, Vec values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw DimensionMismatch("values do not match grid size");
}

double GridState::value_gradient(Point x, std::span<double> grad) const {
  const int n = grid_.n;
  if (static_cast<int>(x.size()) != n) throw DimensionMismatch("grid state evaluated at wrong dimension");
  const double h = grid_.spacing();
  std::array<int, kMaxDim> base{};
  std::array<double, kMaxDim> frac{};
  for (int d = 0; d < n; ++d) {
    const double t = (x[d] + grid_.half_width) / h - 1.0;
    if (!(t > -1.0 && t < grid_.m)) {
      for (int k = 0; k < n; ++k) grad[k] = 0.0;
      return 0.0;
    }
    base[d] = static_cast<int>(std::floor(t));
    frac[d] = t - base[d];
    grad[d] = 0.0;
  }
  auto node = [&](const std::array<int, kMaxDim>& idx) {
    std::size_t flat = 0;
    std::size_t s = 1;
    for (int d = 0; d < n; ++d) {
      if (idx[d] < 0 || idx[d] >= grid_.m) return 0.0;
      flat += static_cast<std::size_t>(idx[d]) * s;
      s *= static_cast<std::size_t>(grid_.m);
    }
    return values_[flat];
  };
  double value = 0.0;
  for (int corner = 0; corner < (1 << n); ++corner) {
    std::array<int, kMaxDim> idx{};
    double w = 1.0;
    std::array<double, kMaxDim> partial{};
    for (int d = 0; d < n; ++d) {
      const bool up = (corner >> d) & 1;
      idx[d] = base[d] + (up ? 1 : 0);
      w *= up ? frac[d] : 1.0 - frac[d];
    }
    const double v = node(idx);
    value += w * v;
    for (int d = 0; d < n; ++d) {
      double wd = 1.0;
      for (int k = 0; k < n; ++k) {
        const bool up = (corner >> k) & 1;
        if (k == d) {
          wd *= up ? 1.0 / h : -1.0 / h;
        } else {
          wd *= up ? frac[k] : 1.0 - frac[k];
        }
      }
      partial[d] = wd;
      grad[d] += partial[d] * v;
    }
  }
  return value;
}

double GridState::value(Point x) const {
  std::array<double, kMaxDim> g{};
  return value_gradient(x, std::span<double>(g.data(), x.size()));
}

HalfLineHints GridState::hints() const {
  HalfLineHints h;
  h.scale = grid_.half_width / 4.0;
  h.support = grid_.half_width * std::sqrt(static_cast<double>(grid_.n));
  return h;
}

std::string GridState::describe() const {
  std::ostringstream os;
  os << "grid state (n=" << grid_.n << ", L=" << grid_.half_width << ", m=" << grid_.m << ")";
  return os.str();
}

std::size_t GridState::sign_changes() const {
  std::size_t big = 0;
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (std::abs(values_[i]) > std::abs(values_[big])) big = i;
  }
  const double sign = values_[big] >= 0.0 ? 1.0 : -1.0;
  // Entries below the eigensolver's accuracy carry no sign information.
  const double floor = 1e-9 * std::abs(values_[big]);
  return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(),
                                                [&](double v) { return sign * v < -floor; }));
}

double grid_jx_energy(const GridState& phi, const VectorField& field) {
  const Grid& g = phi.grid();
  if (dimension(field) != g.n) throw DimensionMismatch("grid state and field dimensions differ");
  const double h = g.spacing();
  const auto m = static_cast<std::size_t>(g.m);
  const Vec& v = phi.values();
  std::array<double, kMaxDim> x{};
  std::array<double, kMaxDim> xf{};
  double sum = 0.0;
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    std::size_t rest = idx;
    std::array<std::size_t, kMaxDim> c{};
    for (int d = 0; d < g.n; ++d) {
      c[d] = rest % m;
      rest /= m;
      x[d] = g.coordinate(static_cast<int>(c[d]));
    }
    eval_field_into(field, Point(x.data(), static_cast<std::size_t>(g.n)),
                    std::span<double>(xf.data(), static_cast<std::size_t>(g.n)));
    std::size_t s = 1;
    double local = 0.0;
    for (int d = 0; d < g.n; ++d) {
      const double up = c[d] + 1 < m ? v[idx + s] : 0.0;
      const double down = c[d] > 0 ? v[idx - s] : 0.0;
      const double t = (up - down) / (2.0 * h) + v[idx] * xf[d];
      local += t * t;
      s *= m;
    }
    sum += local;
  }
  return sum * std::pow(h, g.n);
}

}  // namespace gsf
