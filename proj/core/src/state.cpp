#include "gsf/state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gsf/error.hpp"

namespace gsf {

namespace {

Point as_point(const std::array<double, kMaxDim>& buf, int n) {
  return Point(buf.data(), static_cast<std::size_t>(n));
}

// Numeric admissibility for potentials outside the radial power family.
std::pair<bool, std::string> numeric_admissibility(const GroundState& trial) {
  try {
    const QuadratureEstimate mass = norm_sq(trial);
    if (!(mass.value > 0.0)) return {false, "state has zero L2 norm"};
    kinetic_energy(trial);
    return {true, "norm and Dirichlet energy converge numerically"};
  } catch (const QuadratureDivergence& e) {
    return {false, std::string("quadrature diverges: ") + e.what()};
  } catch (const DomainError& e) {
    return {false, std::string("state is not evaluable: ") + e.what()};
  }
}

std::pair<bool, std::string> radial_admissibility(const RadialPowerField& f) {
  const Admissibility a = admissibility(VectorField{f});
  if (f.p == 2.0) {
    return {false, "p = 2: phi ~ |x|^-alpha and neither grad phi nor phi X is square integrable"};
  }
  if (!a.admissible()) return {false, "|X|^2 or div X is not locally integrable"};
  if (!(f.alpha > 0.0)) return {false, "alpha <= 0: the state does not decay"};
  if (f.p > 2.0) return {false, "p > 2: the state does not decay at infinity"};
  return {true, "alpha > 0, p < 2 and p < 1 + n/2"};
}

Polynomial scale_polynomial(const Polynomial& p, double lambda) {
  Polynomial out(p.dim());
  for (const auto& [a, c] : p.terms()) {
    int k = 0;
    for (int e : a) k += e;
    out.add_term(a, c * std::pow(lambda, k));
  }
  return out;
}

}  // namespace

Vec ScalarState::log_gradient(Point x) const {
  Vec g(x.size());
  const double v = value_gradient(x, g);
  if (!(v > 0.0)) throw NonPositiveState("state is not positive at the query point");
  for (double& gi : g) gi = -gi / v;
  return g;
}

GroundState::GroundState(Expr u, std::optional<HarmonicPolynomial> poly, double normalization, bool admissible,
                         std::string reason)
    : u_(std::move(u)),
      poly_(std::move(poly)),
      c_(normalization),
      admissible_(admissible),
      reason_(std::move(reason)) {
  if (u_.empty()) throw InvalidArgument("ground state needs a potential");
  if (poly_ && poly_->n != u_.dim()) throw DimensionMismatch("polynomial factor dimension differs from potential");
  if (!(c_ > 0.0) || !std::isfinite(c_)) throw InvalidArgument("normalization must be positive and finite");
}

Dual2 GroundState::eval_dual(Point x) const {
  const Dual2 du = gsf::eval_dual(u_, x);
  const int n = du.n;
  const double e = std::exp(-du.value);
  Dual2 out;
  out.n = n;
  if (!poly_) {
    out.value = c_ * e;
    for (int i = 0; i < n; ++i) {
      out.grad[i] = -du.grad[i] * out.value;
      out.hess_diag[i] = (du.grad[i] * du.grad[i] - du.hess_diag[i]) * out.value;
    }
    return out;
  }
  const Dual2 dp = poly_->poly.eval_dual(x);
  out.value = c_ * dp.value * e;
  for (int i = 0; i < n; ++i) {
    const double ei = -du.grad[i] * e;
    const double eii = (du.grad[i] * du.grad[i] - du.hess_diag[i]) * e;
    out.grad[i] = c_ * (dp.grad[i] * e + dp.value * ei);
    out.hess_diag[i] = c_ * (dp.hess_diag[i] * e + 2.0 * dp.grad[i] * ei + dp.value * eii);
  }
  return out;
}

double GroundState::value(Point x) const {
  const double e = std::exp(-eval_u(u_, x));
  return poly_ ? c_ * poly_->poly(x) * e : c_ * e;
}

double GroundState::value_gradient(Point x, std::span<double> grad) const {
  const Dual2 d = eval_dual(x);
  for (int i = 0; i < d.n; ++i) grad[i] = d.grad[i];
  return d.value;
}

HalfLineHints GroundState::hints() const {
  HalfLineHints h;
  if (scale_) {
    h.scale = *scale_;
    return h;
  }
  double s = std::numeric_limits<double>::infinity();
  for (const RadialPowerField& t : terms_) {
    if (t.alpha > 0.0 && t.p < 2.0) s = std::min(s, std::pow((2.0 - t.p) / (2.0 * t.alpha), 1.0 / (2.0 - t.p)));
  }
  if (!std::isfinite(s)) s = 1.0;
  if (poly_) s *= 1.0 + 0.5 * poly_->k;
  h.scale = s;
  return h;
}

std::string GroundState::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << c_ << " * ";
  if (poly_) os << "(" << render(to_expr(poly_->poly)) << ") * ";
  os << "exp(-(" << render(u_) << "))";
  return os.str();
}

GroundState GroundState::with_normalization(double c) const {
  GroundState out = *this;
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("normalization must be positive and finite");
  out.c_ = c;
  return out;
}

GaussianTrial::GaussianTrial(Vec center, double width) : center_(std::move(center)), width_(width) {
  const int n = static_cast<int>(center_.size());
  if (n < 1 || n > kMaxDim) throw InvalidArgument("Gaussian trial dimension out of range");
  if (!(width > 0.0)) throw InvalidArgument("Gaussian width must be positive");
  amplitude_ = std::pow(std::numbers::pi * width * width, -n / 4.0);
}

double GaussianTrial::value(Point x) const {
  if (x.size() != center_.size()) throw DimensionMismatch("Gaussian trial evaluated at wrong dimension");
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - center_[i]) * (x[i] - center_[i]);
  return amplitude_ * std::exp(-d2 / (2.0 * width_ * width_));
}

double GaussianTrial::value_gradient(Point x, std::span<double> grad) const {
  const double v = value(x);
  for (std::size_t i = 0; i < x.size(); ++i) grad[i] = -v * (x[i] - center_[i]) / (width_ * width_);
  return v;
}

bool GaussianTrial::radial() const {
  return std::all_of(center_.begin(), center_.end(), [](double c) { return c == 0.0; });
}

HalfLineHints GaussianTrial::hints() const {
  HalfLineHints h;
  h.scale = norm(center_) + width_;
  return h;
}

std::string GaussianTrial::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "gaussian(center=(";
  for (std::size_t i = 0; i < center_.size(); ++i) os << (i ? ", " : "") << center_[i];
  os << "), width=" << width_ << ")";
  return os.str();
}

Vec GaussianTrial::log_gradient(Point x) const {
  if (x.size() != center_.size()) throw DimensionMismatch("Gaussian trial evaluated at wrong dimension");
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = (x[i] - center_[i]) / (width_ * width_);
  return g;
}

RadialTrial::RadialTrial(int n, std::function<double(double)> g, std::function<double(double)> dg,
                         HalfLineHints hints, std::string description)
    : n_(n), g_(std::move(g)), dg_(std::move(dg)), hints_(std::move(hints)), description_(std::move(description)) {
  if (n < 1 || n > kMaxDim) throw InvalidArgument("radial trial dimension out of range");
}

double RadialTrial::value(Point x) const {
  if (static_cast<int>(x.size()) != n_) throw DimensionMismatch("radial trial evaluated at wrong dimension");
  return g_(norm(x));
}

double RadialTrial::value_gradient(Point x, std::span<double> grad) const {
  const double r = norm(x);
  const double v = value(x);
  const double d = r > 0.0 ? dg_(r) / r : 0.0;
  for (int i = 0; i < n_; ++i) grad[i] = d * x[i];
  return v;
}

BumpState::BumpState(int n) : n_(n) {
  if (n < 1 || n > kMaxDim) throw InvalidArgument("bump dimension out of range");
}

double BumpState::value(Point x) const {
  if (static_cast<int>(x.size()) != n_) throw DimensionMismatch("bump evaluated at wrong dimension");
  const double r2 = norm_sq(x);
  return r2 < 1.0 ? std::exp(1.0 / (r2 - 1.0)) : 0.0;
}

double BumpState::value_gradient(Point x, std::span<double> grad) const {
  const double v = value(x);
  const double r2 = norm_sq(x);
  const double f = r2 < 1.0 ? -2.0 * v / ((r2 - 1.0) * (r2 - 1.0)) : 0.0;
  for (int i = 0; i < n_; ++i) grad[i] = f * x[i];
  return v;
}

HalfLineHints BumpState::hints() const {
  HalfLineHints h;
  h.scale = 0.5;
  h.support = 1.0;
  return h;
}

Vec BumpState::log_gradient(Point x) const {
  if (static_cast<int>(x.size()) != n_) throw DimensionMismatch("bump evaluated at wrong dimension");
  const double r2 = norm_sq(x);
  if (!(r2 < 1.0)) throw NonPositiveState("bump vanishes outside the open unit ball");
  const double f = 2.0 / ((1.0 - r2) * (1.0 - r2));
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = f * x[i];
  return g;
}

GroundState solve_ground_state(const VectorField& field) {
  if (const auto* f = std::get_if<RadialPowerField>(&field)) {
    if (f->n < 1 || f->n > kMaxDim) throw InvalidArgument("dimension out of range");
    auto [ok, reason] = radial_admissibility(*f);
    GroundState state(potential_expression(*f), std::nullopt, 1.0, ok, reason);
    state.set_radial_terms({*f});
    return ok ? normalize(state) : state;
  }
  if (const auto* g = std::get_if<GradientField>(&field)) {
    if (auto rp = recognize_radial_power(*g)) return solve_ground_state(VectorField{*rp});
    GroundState trial(g->u, std::nullopt, 1.0, true, "");
    auto [ok, reason] = numeric_admissibility(trial);
    GroundState state(g->u, std::nullopt, 1.0, ok, reason);
    return ok ? normalize(state) : state;
  }
  const auto& cf = std::get<ComponentField>(field);
  const int n = cf.dim();
  std::array<double, kMaxDim> x{};
  for (double s : {0.37, 0.81, 1.3}) {
    for (int i = 0; i < n; ++i) x[i] = s * (1.0 + 0.29 * i) * (i % 2 ? -1.0 : 1.0);
    if (curl_magnitude(field, as_point(x, n)) > 1e-12) {
      throw NotGradient("field has non-vanishing curl; no ground state exists");
    }
  }
  throw NotGradient("component fields carry no potential; give the field as the gradient of u");
}

QuadratureEstimate integrate_state(const ScalarState& state, const std::function<double(Point)>& f, bool radial,
                                   const QuadratureOptions& opts) {
  SpaceIntegrand in;
  in.f = f;
  in.n = state.dim();
  in.radial = radial;
  in.hints = state.hints();
  return space_integral(in, opts);
}

QuadratureEstimate norm_sq(const ScalarState& state, const QuadratureOptions& opts) {
  return integrate_state(
      state,
      [&state](Point x) {
        const double v = state.value(x);
        return v * v;
      },
      state.radial(), opts);
}

GroundState normalize(const GroundState& state, const QuadratureOptions& opts) {
  if (!state.admissible()) throw NotNormalizable("state is not admissible: " + state.reason());
  const GroundState unit = state.with_normalization(1.0);
  double mass = 0.0;
  try {
    if (unit.polynomial() && unit.potential().is_radial()) {
      // P homogeneous of degree k: int P^2 e^{-2u} = sphere moment * int r^{n-1+2k} e^{-2u(r)} dr.
      const auto& hp = *unit.polynomial();
      const int n = unit.dim();
      const Expr u = unit.potential();
      RadialIntegrand ri;
      ri.n = n;
      ri.moment_power = 2.0 * hp.k;
      ri.hints = unit.hints();
      ri.g = [u, n](double r) {
        std::array<double, kMaxDim> x{};
        x[0] = r;
        return std::exp(-2.0 * eval_u(u, as_point(x, n)));
      };
      const QuadratureEstimate radial = radial_integral(ri, opts);
      mass = sphere_poly_moment(hp.poly) * radial.value / sphere_area(n);
    } else {
      mass = norm_sq(unit, opts).value;
    }
  } catch (const QuadratureDivergence& e) {
    throw NotNormalizable(std::string("L2 norm diverges: ") + e.what());
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) throw NotNormalizable("L2 norm is zero or not finite");
  return unit.with_normalization(1.0 / std::sqrt(mass));
}

QuadratureEstimate jx_energy(const ScalarState& phi, const VectorField& field, const QuadratureOptions& opts) {
  if (phi.dim() != dimension(field)) throw DimensionMismatch("state and field dimensions differ");
  const int n = phi.dim();
  auto f = [&phi, &field, n](Point x) {
    std::array<double, kMaxDim> g{};
    std::array<double, kMaxDim> v{};
    const double val = phi.value_gradient(x, std::span<double>(g.data(), static_cast<std::size_t>(n)));
    eval_field_into(field, x, std::span<double>(v.data(), static_cast<std::size_t>(n)));
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = g[i] + val * v[i];
      s += t * t;
    }
    return s;
  };
  return integrate_state(phi, f, phi.radial() && is_radial(field), opts);
}

QuadratureEstimate kinetic_energy(const ScalarState& phi, const QuadratureOptions& opts) {
  const int n = phi.dim();
  auto f = [&phi, n](Point x) {
    std::array<double, kMaxDim> g{};
    phi.value_gradient(x, std::span<double>(g.data(), static_cast<std::size_t>(n)));
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += g[i] * g[i];
    return s;
  };
  return integrate_state(phi, f, phi.radial(), opts);
}

QuadratureEstimate field_moment(const ScalarState& phi, const VectorField& field, const QuadratureOptions& opts) {
  if (phi.dim() != dimension(field)) throw DimensionMismatch("state and field dimensions differ");
  auto f = [&phi, &field](Point x) {
    const double v = phi.value(x);
    return v == 0.0 ? 0.0 : field_norm_sq(field, x) * v * v;
  };
  return integrate_state(phi, f, phi.radial() && is_radial(field), opts);
}

QuadratureEstimate divergence_moment(const ScalarState& phi, const VectorField& field,
                                     const QuadratureOptions& opts) {
  if (phi.dim() != dimension(field)) throw DimensionMismatch("state and field dimensions differ");
  auto f = [&phi, &field](Point x) {
    const double v = phi.value(x);
    return v == 0.0 ? 0.0 : field_div(field, x) * v * v;
  };
  return integrate_state(phi, f, phi.radial() && is_radial(field), opts);
}

QuadratureEstimate potential_moment(const ScalarState& phi, const PotentialFunction& v,
                                    const QuadratureOptions& opts) {
  if (phi.dim() != v.dim()) throw DimensionMismatch("state and potential dimensions differ");
  auto f = [&phi, &v](Point x) {
    const double s = phi.value(x);
    return s == 0.0 ? 0.0 : v(x) * s * s;
  };
  return integrate_state(phi, f, phi.radial() && v.radial(), opts);
}

VectorField field_from_state(const GroundState& state) {
  if (!state.polynomial()) {
    if (state.radial_terms().size() == 1) return state.radial_terms().front();
    return GradientField{state.potential()};
  }
  const Expr log_p = Expr::call(Function::kLog, to_expr(state.polynomial()->poly));
  return GradientField{state.potential() - log_p};
}

GroundState product_state(const GroundState& a, const GroundState& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("product of states in different dimensions");
  if (!a.admissible() || !b.admissible()) {
    throw PreconditionFailed("product_state needs two admissible ground states");
  }
  std::optional<HarmonicPolynomial> poly;
  if (a.polynomial() && b.polynomial()) {
    poly = HarmonicPolynomial{a.dim(), a.polynomial()->k + b.polynomial()->k,
                              a.polynomial()->poly * b.polynomial()->poly, false};
  } else if (a.polynomial()) {
    poly = a.polynomial();
  } else if (b.polynomial()) {
    poly = b.polynomial();
  }
  std::vector<RadialPowerField> terms;
  const bool all_radial = !a.radial_terms().empty() && !b.radial_terms().empty();
  if (all_radial) {
    terms = a.radial_terms();
    for (const RadialPowerField& t : b.radial_terms()) {
      auto it = std::find_if(terms.begin(), terms.end(), [&](const RadialPowerField& s) { return s.p == t.p; });
      if (it != terms.end()) {
        it->alpha += t.alpha;
      } else {
        terms.push_back(t);
      }
    }
  }
  Expr u = a.potential() + b.potential();
  if (all_radial) {
    // Rebuild from the merged terms so equal exponents collapse.
    u = Expr();
    for (const RadialPowerField& t : terms) u = u.empty() ? potential_expression(t) : u + potential_expression(t);
  }
  GroundState out(u, poly, 1.0, true, "product of admissible ground states");
  out.set_radial_terms(terms);
  return normalize(out);
}

GroundState scale_state(const GroundState& state, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidScale("scale must be positive");
  const int n = state.dim();
  std::optional<HarmonicPolynomial> poly = state.polynomial();
  if (poly) poly->poly = scale_polynomial(poly->poly, lambda);
  GroundState out(scale_arguments(state.potential(), lambda), poly,
                  state.normalization() * std::pow(lambda, n / 2.0), state.admissible(), state.reason());
  std::vector<RadialPowerField> terms = state.radial_terms();
  for (RadialPowerField& t : terms) {
    if (t.p != 2.0) t.alpha *= std::pow(lambda, 2.0 - t.p);
  }
  out.set_radial_terms(terms);
  out.set_scale(state.hints().scale / lambda);
  return out;
}

GroundState excited_state(const HarmonicPolynomial& poly, const GroundState& ground) {
  if (poly.n != ground.dim()) throw DimensionMismatch("polynomial and state dimensions differ");
  if (!ground.admissible()) throw PreconditionFailed("excited_state needs an admissible ground state");
  if (poly.k == 0) return ground;
  if (ground.polynomial()) throw PreconditionFailed("ground state already carries a polynomial factor");
  GroundState out(ground.potential(), poly, 1.0, true, "harmonic polynomial times admissible ground state");
  out.set_radial_terms(ground.radial_terms());
  return normalize(out);
}

GroundState coulomb_excited_state(const HarmonicPolynomial& poly, double alpha) {
  if (poly.n < 2) throw InvalidArgument("Coulomb states need n >= 2");
  if (!(alpha > 0.0)) throw InvalidArgument("Coulomb coupling must be positive");
  const RadialPowerField rate{coulomb_rate(poly.n, alpha, poly.k), 1.0, poly.n};
  std::optional<HarmonicPolynomial> p;
  if (poly.k > 0) p = poly;
  GroundState out(potential_expression(rate), p, 1.0, true, "Coulomb eigenfunction");
  out.set_radial_terms({rate});
  return normalize(out);
}

double first_order_residual(const GroundState& state, const VectorField& field, Point x) {
  const Dual2 d = state.eval_dual(x);
  const Vec v = eval_field(field, x);
  double s = 0.0;
  for (int i = 0; i < d.n; ++i) {
    const double t = d.grad[i] + d.value * v[i];
    s += t * t;
  }
  return std::sqrt(s);
}

double euler_residual(const GroundState& state, const VectorField& field, Point x,
                      const std::function<double(Point)>& shift) {
  const Dual2 d = state.eval_dual(x);
  double v = field_norm_sq(field, x) - field_div(field, x);
  if (shift) v += shift(x);
  return -d.laplacian() + v * d.value;
}

double schrodinger_residual(const GroundState& state, const PotentialFunction& v, double energy, Point x) {
  const Dual2 d = state.eval_dual(x);
  return -d.laplacian() + (v(x) - energy) * d.value;
}

}  // namespace gsf
