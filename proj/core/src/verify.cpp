#include "gsf/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "gsf/error.hpp"
#include "gsf/harmonics.hpp"
#include "gsf/records.hpp"

namespace gsf {

using nlohmann::json;

namespace {

Point as_point(const std::array<double, kMaxDim>& buf, int n) {
  return Point(buf.data(), static_cast<std::size_t>(n));
}

Point axis_point(std::array<double, kMaxDim>& buf, int n, double r) {
  buf.fill(0.0);
  buf[0] = r;
  return as_point(buf, n);
}

json state_inputs(const ScalarState& phi) { return json{{"state", phi.describe()}, {"n", phi.dim()}}; }

json state_field_inputs(const ScalarState& phi, const VectorField& field) {
  json j = state_inputs(phi);
  j["field"] = field_to_json(field);
  return j;
}

QuadratureEstimate moment(const ScalarState& phi, const std::function<double(double)>& weight,
                          const QuadratureOptions& opts) {
  return integrate_state(
      phi,
      [&phi, &weight](Point x) {
        const double v = phi.value(x);
        return v == 0.0 ? 0.0 : weight(norm(x)) * v * v;
      },
      phi.radial(), opts);
}

PotentialFunction oscillator_potential(int n, double alpha) {
  std::ostringstream os;
  os.precision(17);
  os << alpha * alpha << "*r^2";
  return PotentialFunction(
      n, [alpha](Point x) { return alpha * alpha * norm_sq(x); }, 0.0, os.str(), true);
}

PotentialFunction coulomb_potential(int n, double charge) {
  std::ostringstream os;
  os.precision(17);
  os << -charge << "/r";
  return PotentialFunction(
      n,
      [charge](Point x) {
        const double r = norm(x);
        if (r == 0.0) throw SingularPoint("Coulomb potential at the origin");
        return -charge / r;
      },
      0.0, os.str(), true);
}

PotentialFunction zero_potential(int n) {
  return PotentialFunction(n, [](Point) { return 0.0; }, 0.0, "0", true);
}

Vec random_direction(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec d(n);
  double s = 0.0;
  do {
    s = 0.0;
    for (double& di : d) {
      di = g(rng);
      s += di * di;
    }
  } while (s < 1e-24);
  s = std::sqrt(s);
  for (double& di : d) di /= s;
  return d;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Golden-section refinement of a 1-D extremum bracketed by [a, b].
double refine_extremum(const std::function<double(double)>& f, double a, double b, bool minimize) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto h = [&](double t) { return minimize ? f(t) : -f(t); };
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = h(c);
  double fd = h(d);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = h(d);
    }
  }
  const double best = std::min({h(a), h(b), fc, fd});
  return minimize ? best : -best;
}

}  // namespace

std::string criterion_name(Criterion c) {
  switch (c) {
    case Criterion::kEqual:
      return "equal";
    case Criterion::kAtLeast:
      return "at_least";
    case Criterion::kAtMost:
      return "at_most";
  }
  return "equal";
}

VerificationReport make_report(std::string id, json inputs, double lhs, double rhs, double tolerance,
                               Criterion criterion, std::string notes) {
  VerificationReport r;
  r.check_id = std::move(id);
  r.inputs = std::move(inputs);
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = tolerance;
  r.criterion = criterion;
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  // One-sided criteria measure only the violation, so the pass rule is the
  // same for every criterion.
  double diff = 0.0;
  switch (criterion) {
    case Criterion::kEqual:
      diff = std::abs(lhs - rhs);
      break;
    case Criterion::kAtLeast:
      diff = rhs - lhs;
      break;
    case Criterion::kAtMost:
      diff = lhs - rhs;
      break;
  }
  if (!std::isnan(diff)) diff = std::max(0.0, diff);
  r.abs_error = diff;
  r.rel_error = scale > 0.0 ? diff / scale : diff;
  r.pass = recompute_pass(r);
  std::string crit = "criterion: " + criterion_name(criterion);
  r.notes = notes.empty() ? crit : crit + "; " + notes;
  return r;
}

bool recompute_pass(const VerificationReport& r) {
  const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
  double diff = 0.0;
  switch (r.criterion) {
    case Criterion::kEqual:
      diff = std::abs(r.lhs - r.rhs);
      break;
    case Criterion::kAtLeast:
      diff = r.rhs - r.lhs;
      break;
    case Criterion::kAtMost:
      diff = r.lhs - r.rhs;
      break;
  }
  if (std::isnan(diff) || !std::isfinite(r.lhs) || !std::isfinite(r.rhs)) return false;
  diff = std::max(0.0, diff);
  const double rel = scale > 0.0 ? diff / scale : diff;
  return diff <= r.tolerance || rel <= r.tolerance;
}

VerificationReport check_identity_peq1(const ScalarState& phi, const VectorField& field, const CheckOptions& opts) {
  const double jx = jx_energy(phi, field, opts.quad).value;
  const double kin = kinetic_energy(phi, opts.quad).value;
  const double fm = field_moment(phi, field, opts.quad).value;
  const double dm = divergence_moment(phi, field, opts.quad).value;
  VerificationReport r = make_report("peq1", state_field_inputs(phi, field), jx, kin + fm - dm, opts.tol,
                                     Criterion::kEqual, "lhs = J_X(phi), rhs = |grad phi|^2 + |X phi|^2 - int div X phi^2");
  r.extras = {{"kinetic", kin}, {"field_moment", fm}, {"divergence_moment", dm}};
  return r;
}

VerificationReport check_inequality_peq2(const ScalarState& phi, const VectorField& field,
                                         const CheckOptions& opts) {
  const double kin = kinetic_energy(phi, opts.quad).value;
  const double fm = field_moment(phi, field, opts.quad).value;
  const double dm = divergence_moment(phi, field, opts.quad).value;
  const double lhs = kin * fm;
  const double rhs = 0.25 * dm * dm;
  VerificationReport r = make_report("peq2", state_field_inputs(phi, field), lhs, rhs, opts.strict_tol,
                                     Criterion::kAtLeast, "lhs = |grad phi|^2 |X phi|^2, rhs = (int div X phi^2)^2 / 4");
  r.extras = {{"ratio", lhs > 0.0 ? rhs / lhs : 0.0}, {"jx", jx_energy(phi, field, opts.quad).value}};
  return r;
}

VerificationReport check_heisenberg(const ScalarState& phi, bool expect_equality, const CheckOptions& opts) {
  const int n = phi.dim();
  const double kin = kinetic_energy(phi, opts.quad).value;
  const double second = moment(phi, [](double r) { return r * r; }, opts.quad).value;
  const double mass = norm_sq(phi, opts.quad).value;
  const double lhs = kin * second;
  const double rhs = n * n / 4.0 * mass * mass;
  VerificationReport r =
      expect_equality
          ? make_report("heisenberg", state_inputs(phi), lhs, rhs, opts.tol, Criterion::kEqual,
                        "equality expected at a centred Gaussian")
          : make_report("heisenberg", state_inputs(phi), lhs, rhs, opts.strict_tol, Criterion::kAtLeast);
  r.extras = {{"ratio", rhs > 0.0 ? lhs / rhs : 0.0}};
  return r;
}

VerificationReport check_equality_peq4(const VectorField& field, const CheckOptions& opts) {
  const GroundState ground = solve_ground_state(field);
  if (!ground.admissible()) throw NoGroundState("field has no admissible ground state: " + ground.reason());
  const double kin = kinetic_energy(ground, opts.quad).value;
  const double fm = field_moment(ground, field, opts.quad).value;
  const double half_div = 0.5 * divergence_moment(ground, field, opts.quad).value;
  const double hi = std::max({kin, fm, half_div});
  const double lo = std::min({kin, fm, half_div});
  json inputs{{"field", field_to_json(field)}};
  VerificationReport r = make_report("peq4", inputs, hi, lo, opts.tol, Criterion::kEqual,
                                     "lhs = largest, rhs = smallest of the three quantities");
  r.extras = {{"kinetic", kin}, {"field_moment", fm}, {"half_divergence_moment", half_div}};
  return r;
}

VerificationReport check_exeq2(const ScalarState& phi, double alpha, double p, int n, bool expect_equality,
                               const CheckOptions& opts) {
  if (phi.dim() != n) throw DimensionMismatch("state dimension differs from n");
  if (!(p < 1.0 + n / 2.0)) throw PreconditionFailed("weighted inequality needs p < 1 + n/2");
  const double kin = kinetic_energy(phi, opts.quad).value;
  const double weighted = moment(phi, [p](double r) { return std::pow(r, 2.0 - 2.0 * p); }, opts.quad).value;
  const double inverse = moment(phi, [p](double r) { return std::pow(r, -p); }, opts.quad).value;
  const double lhs = kin * weighted;
  const double rhs = (n - p) * (n - p) / 4.0 * inverse * inverse;
  json inputs = state_inputs(phi);
  inputs["alpha"] = alpha;
  inputs["p"] = p;
  VerificationReport r = expect_equality
                             ? make_report("exeq2", inputs, lhs, rhs, opts.tol, Criterion::kEqual,
                                           "equality expected at the ground state of the exponent")
                             : make_report("exeq2", inputs, lhs, rhs, opts.strict_tol, Criterion::kAtLeast);
  r.extras = {{"ratio", rhs > 0.0 ? lhs / rhs : 0.0}};
  return r;
}

VerificationReport check_hardy(const ScalarState& phi, int n, const CheckOptions& opts) {
  if (n < 3) throw PreconditionFailed("Hardy inequality needs n >= 3");
  if (phi.dim() != n) throw DimensionMismatch("state dimension differs from n");
  const double kin = kinetic_energy(phi, opts.quad).value;
  const double inv = moment(phi, [](double r) { return 1.0 / (r * r); }, opts.quad).value;
  const double c = (n - 2.0) * (n - 2.0) / 4.0;
  VerificationReport r = make_report("hardy", state_inputs(phi), kin, c * inv, opts.strict_tol, Criterion::kAtLeast,
                                     "lhs = |grad phi|^2, rhs = C int phi^2 / |x|^2");
  r.extras = {{"ratio", inv > 0.0 ? kin / inv : 0.0}, {"constant", c}};
  return r;
}

RadialTrial hardy_family_state(int n, double eps) {
  if (n < 3) throw PreconditionFailed("Hardy family needs n >= 3");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0, 1)");
  const double q = (n - 2.0) / 4.0;
  const double r1 = 1.0 / eps;
  const double r2 = 1.0 / (eps * eps);
  const double log_eps = std::log(eps);
  auto cutoff = [=](double r) {
    if (r <= r1) return 1.0;
    if (r >= r2) return 0.0;
    return std::log(r * eps * eps) / log_eps;
  };
  auto dcutoff = [=](double r) { return (r <= r1 || r >= r2) ? 0.0 : 1.0 / (r * log_eps); };
  auto g = [=](double r) { return std::pow(r * r + eps * eps, -q) * cutoff(r); };
  auto dg = [=](double r) {
    const double base = std::pow(r * r + eps * eps, -q);
    const double dbase = -2.0 * q * r * base / (r * r + eps * eps);
    return dbase * cutoff(r) + base * dcutoff(r);
  };
  HalfLineHints h;
  h.scale = 1.0;
  h.support = r2;
  for (double b = eps; b < r2 * 0.999; b *= 10.0) h.breakpoints.push_back(b);
  h.breakpoints.push_back(r1);
  std::sort(h.breakpoints.begin(), h.breakpoints.end());
  h.breakpoints.erase(std::unique(h.breakpoints.begin(), h.breakpoints.end(),
                                  [](double a, double b) { return std::abs(a - b) <= 1e-12 * b; }),
                      h.breakpoints.end());
  std::ostringstream os;
  os.precision(17);
  os << "hardy-family(n=" << n << ", eps=" << eps << ")";
  return RadialTrial(n, g, dg, h, os.str());
}

VerificationReport check_hardy_family(int n, double eps, const CheckOptions& opts) {
  const RadialTrial phi = hardy_family_state(n, eps);
  const double kin = kinetic_energy(phi, opts.quad).value;
  const double inv = moment(phi, [](double r) { return 1.0 / (r * r); }, opts.quad).value;
  const double c = (n - 2.0) * (n - 2.0) / 4.0;
  const double ratio = kin / inv;
  json inputs{{"n", n}, {"eps", eps}, {"state", phi.describe()}};
  VerificationReport r = make_report("hardy-eps", inputs, ratio, 1.1 * c, 0.0, Criterion::kAtMost,
                                     "lhs = Rayleigh ratio, rhs = 1.1 times the Hardy constant");
  r.extras = {{"constant", c}, {"ratio_over_constant", ratio / c}, {"kinetic", kin}, {"inverse_square_moment", inv}};
  return r;
}

VerificationReport check_hardy_divergence(int n, const CheckOptions& opts) {
  if (n < 3) throw PreconditionFailed("Hardy minimizer needs n >= 3");
  const RadialPowerField field{(n - 2.0) / 2.0, 2.0, n};
  const GroundState formal = solve_ground_state(VectorField{field});
  double diverged = 0.0;
  std::string note;
  try {
    const double k = kinetic_energy(formal, opts.quad).value;
    note = "Dirichlet integral returned " + fmt(k);
  } catch (const QuadratureDivergence& e) {
    diverged = 1.0;
    note = std::string("Dirichlet integral diverges: ") + e.what();
  }
  json inputs{{"n", n}, {"state", formal.describe()}};
  return make_report("hardy-divergence", inputs, diverged, 1.0, 0.0, Criterion::kEqual, note);
}

PointwiseRange pointwise_range(const PotentialFunction& v, const VectorField& field, const SamplerOptions& s) {
  const int n = v.dim();
  if (dimension(field) != n) throw DimensionMismatch("potential and field dimensions differ");
  if (!(s.radius > 0.0) || s.samples < 16) throw InvalidArgument("sampler needs a positive radius and >= 16 samples");
  auto w = [&](Point x) { return v(x) - field_norm_sq(field, x) + field_div(field, x); };
  PointwiseRange out;
  if (v.radial() && is_radial(field)) {
    std::array<double, kMaxDim> buf{};
    auto wr = [&](double r) { return w(axis_point(buf, n, r)); };
    const double rmin = 1e-4;
    const int m = s.samples;
    Vec rs(m), ws(m);
    for (int j = 0; j < m; ++j) {
      rs[j] = rmin * std::pow(s.radius / rmin, static_cast<double>(j) / (m - 1));
      ws[j] = wr(rs[j]);
    }
    const auto lo = std::min_element(ws.begin(), ws.end()) - ws.begin();
    const auto hi = std::max_element(ws.begin(), ws.end()) - ws.begin();
    auto bracket = [&](long j) {
      return std::pair{rs[std::max(0L, j - 1)], rs[std::min<long>(m - 1, j + 1)]};
    };
    auto [a0, b0] = bracket(lo);
    auto [a1, b1] = bracket(hi);
    out.inf = std::min(ws[lo], refine_extremum(wr, a0, b0, true));
    out.sup = std::max(ws[hi], refine_extremum(wr, a1, b1, false));
    // Still rising at the sampling boundary means the supremum is not attained.
    const double edge = ws[m - 1] - ws[m - 2];
    out.sup_bounded = !(hi >= m - 2 && edge > 1e-12 * std::max(1.0, std::abs(ws[m - 1])));
    return out;
  }
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec best_lo, best_hi;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double hi_radius = 0.0;
  for (int j = 0; j < s.samples; ++j) {
    Vec x = random_direction(rng, n);
    const double r = s.radius * std::pow(unit(rng), 1.0 / n);
    for (double& xi : x) xi *= r;
    double val = 0.0;
    try {
      val = w(x);
    } catch (const Error&) {
      continue;
    }
    if (val < lo) {
      lo = val;
      best_lo = x;
    }
    if (val > hi) {
      hi = val;
      best_hi = x;
      hi_radius = r;
    }
  }
  if (best_lo.empty()) throw DomainError("pointwise sampling found no evaluable point");
  auto polish = [&](Vec x, double f0, bool minimize) {
    double step = 0.05 * s.radius;
    std::normal_distribution<double> g(0.0, 1.0);
    for (int it = 0; it < 2000 && step > 1e-10; ++it) {
      Vec y = x;
      for (double& yi : y) yi += step * g(rng);
      double fy = 0.0;
      try {
        fy = w(y);
      } catch (const Error&) {
        step *= 0.7;
        continue;
      }
      if (minimize ? fy < f0 : fy > f0) {
        x = y;
        f0 = fy;
      } else {
        step *= 0.97;
      }
    }
    return f0;
  };
  out.inf = polish(best_lo, lo, true);
  out.sup = polish(best_hi, hi, false);
  out.sup_bounded = hi_radius < 0.9 * s.radius;
  return out;
}

double oracle_energy(const PotentialFunction& v, const VectorField* hint_field, const CheckOptions& opts,
                     double* error_estimate) {
  const int n = v.dim();
  if (v.radial() && n >= 2) {
    RadialProblem problem;
    problem.n = n;
    problem.potential = [&v](double r) { return v.radial_value(r); };
    if (hint_field && is_radial(*hint_field)) {
      const GroundState g = solve_ground_state(*hint_field);
      if (g.admissible()) {
        problem.reference_state = [g, n](double r) {
          std::array<double, kMaxDim> buf{};
          return g.value(axis_point(buf, n, r));
        };
      }
    }
    const RadialResult res = radial_solve_detailed(problem, opts.oracle.tol);
    if (error_estimate) *error_estimate = res.error_estimate;
    return res.energy;
  }
  if (n > 3) throw InvalidArgument("grid oracle supports n <= 3 for non-radial potentials");
  int m = opts.oracle.m;
  if (n == 1) m = std::max(m, 2000);
  if (m % 2) ++m;
  int coarse_m = m / 2;
  if (coarse_m % 2) ++coarse_m;
  const Eigenpair fine = smallest_eigenpair(discretize(v, Grid(n, opts.oracle.half_width, m)), opts.oracle.tol);
  if (error_estimate) {
    const Eigenpair coarse =
        smallest_eigenpair(discretize(v, Grid(n, opts.oracle.half_width, coarse_m)), opts.oracle.tol);
    *error_estimate = std::abs(fine.value - coarse.value);
  }
  return fine.value;
}

VerificationReport hersch_bound(const PotentialFunction& v, const VectorField& field, const SamplerOptions& s,
                                const CheckOptions& opts) {
  const PointwiseRange range = pointwise_range(v, field, s);
  double err = 0.0;
  const double e0 = oracle_energy(v, &field, opts, &err);
  const double tol = std::max(1e-8, err);
  json inputs{{"potential", v.description()}, {"field", field_to_json(field)}, {"n", v.dim()}};
  VerificationReport r = make_report("hersch", inputs, e0, range.inf, tol, Criterion::kAtLeast,
                                     "lhs = oracle E0, rhs = sampled inf of V - |X|^2 + div X");
  r.extras = {{"oracle_error", err}, {"tight", std::abs(e0 - range.inf) <= tol}, {"gap", e0 - range.inf}};
  return r;
}

std::vector<VerificationReport> check_prop4_bounds(const PotentialFunction& v, const VectorField& field,
                                                   const std::vector<const ScalarState*>& trials,
                                                   const SamplerOptions& s, const CheckOptions& opts) {
  const PointwiseRange range = pointwise_range(v, field, s);
  const double lambda = lambda_estimate(field, opts.oracle);
  double err = 0.0;
  const double e0 = oracle_energy(v, &field, opts, &err);
  const double tol = std::max(1e-8, err);
  json inputs{{"potential", v.description()}, {"field", field_to_json(field)}, {"n", v.dim()}};
  std::vector<VerificationReport> out;

  VerificationReport lower = make_report("prop4-lower", inputs, e0, lambda + range.inf, tol, Criterion::kAtLeast,
                                         "lhs = oracle E0, rhs = Lambda(X) + inf B");
  lower.extras = {{"lambda", lambda}, {"inf", range.inf}, {"oracle_error", err}};
  out.push_back(std::move(lower));

  const std::string upper_note = range.sup_bounded ? "lhs = oracle E0, rhs = Lambda(X) + sup B"
                                                   : "sup B unbounded; the upper bound is infinite";
  const double upper_rhs = range.sup_bounded ? lambda + range.sup : std::numeric_limits<double>::max();
  VerificationReport upper = make_report("prop4-upper", inputs, e0, upper_rhs, tol, Criterion::kAtMost, upper_note);
  upper.extras = {{"lambda", lambda}, {"sup", range.sup}, {"sup_bounded", range.sup_bounded}, {"oracle_error", err}};
  out.push_back(std::move(upper));

  if (!trials.empty()) {
    auto w = [&](Point x) { return v(x) - field_norm_sq(field, x) + field_div(field, x); };
    int inside = 0;
    json values = json::array();
    for (const ScalarState* phi : trials) {
      const double mass = norm_sq(*phi, opts.quad).value;
      const double b = integrate_state(
                           *phi,
                           [&](Point x) {
                             const double s2 = phi->value(x);
                             return s2 == 0.0 ? 0.0 : w(x) * s2 * s2;
                           },
                           phi->radial() && v.radial() && is_radial(field), opts.quad)
                           .value /
                       mass;
      const double slack = opts.tol * std::max(1.0, std::abs(b));
      if (b >= range.inf - slack && (!range.sup_bounded || b <= range.sup + slack)) ++inside;
      values.push_back(b);
    }
    VerificationReport t = make_report("prop4-trials", inputs, inside, static_cast<double>(trials.size()), 0.0,
                                       Criterion::kEqual, "lhs = trials with inf B <= B(phi) <= sup B");
    t.extras = {{"trial_values", values}, {"inf", range.inf}, {"sup", range.sup}};
    out.push_back(std::move(t));
  }
  return out;
}

VerificationReport check_scaling(const GroundState& phi, const VectorField& field, double lambda,
                                 const CheckOptions& opts) {
  const GroundState scaled = scale_state(phi, lambda);
  const VectorField scaled_field = scale_field(field, lambda);
  const double lhs = jx_energy(scaled, field, opts.quad).value;
  const double rhs = lambda * lambda * jx_energy(phi, scaled_field, opts.quad).value;
  json inputs = state_field_inputs(phi, field);
  inputs["lambda"] = lambda;
  return make_report("scaling", inputs, lhs, rhs, opts.precise_tol, Criterion::kEqual,
                     "lhs = J_X(phi_lambda), rhs = lambda^2 J_{X_lambda}(phi)");
}

VerificationReport check_virial(const ScalarState& phi, const PotentialFunction& v, double k,
                                const CheckOptions& opts) {
  const int n = v.dim();
  if (phi.dim() != n) throw DimensionMismatch("state and potential dimensions differ");
  bool nonzero = false;
  for (double s : {0.3, 0.7, 1.9}) {
    std::array<double, kMaxDim> x{};
    std::array<double, kMaxDim> y{};
    for (int i = 0; i < n; ++i) {
      x[i] = s * (1.0 + 0.37 * i) * (i % 2 ? -1.0 : 1.0);
      y[i] = 2.0 * x[i];
    }
    const double a = v(as_point(x, n));
    const double b = v(as_point(y, n));
    if (a != 0.0) nonzero = true;
    const double expect = std::pow(2.0, k) * a;
    if (std::abs(b - expect) > 1e-12 * std::max(1.0, std::abs(expect))) {
      throw PreconditionFailed("potential is not homogeneous of degree " + fmt(k));
    }
  }
  if (!nonzero) throw PreconditionFailed("potential vanishes identically; no decaying eigenstate exists");
  const double kin = kinetic_energy(phi, opts.quad).value;
  const double pot = potential_moment(phi, v, opts.quad).value;
  json inputs = state_inputs(phi);
  inputs["potential"] = v.description();
  inputs["k"] = k;
  VerificationReport r = make_report("virial", inputs, 2.0 * kin, k * pot, opts.precise_tol, Criterion::kEqual,
                                     "lhs = 2 |grad phi|^2, rhs = k int V phi^2");
  r.extras = {{"kinetic", kin}, {"potential_moment", pot}};
  return r;
}

std::vector<VerificationReport> check_bump_counterexample(int n) {
  const BumpState bump(n);
  std::vector<VerificationReport> out;
  json inputs{{"state", bump.describe()}, {"n", n}};
  std::array<double, kMaxDim> buf{};

  json values = json::array();
  int increasing = 0;
  double prev = 0.0;
  for (int j = 3; j <= 20; ++j) {
    const double r = 1.0 - std::ldexp(1.0, -j);
    const double mag = norm(bump.log_gradient(axis_point(buf, n, r)));
    values.push_back(mag);
    if (j > 3 && mag > prev) ++increasing;
    prev = mag;
  }
  VerificationReport growth = make_report("bump-growth", inputs, increasing, 17.0, 0.0, Criterion::kEqual,
                                          "lhs = strict increases of |X| at |x| = 1 - 2^-j, j = 3..20");
  growth.extras = {{"field_norms", values}};
  out.push_back(std::move(growth));

  double outside = 0.0;
  for (double r : {1.0, 1.0 + 1e-12, 1.01, 1.5, 3.0, 10.0}) outside = std::max(outside, std::abs(bump.value(axis_point(buf, n, r))));
  VerificationReport support = make_report("bump-support", inputs, outside, 0.0, 0.0, Criterion::kEqual,
                                           "lhs = largest |phi| sampled outside the unit ball");
  support.extras = {{"value_at_origin", bump.value(axis_point(buf, n, 0.0))}};
  out.push_back(std::move(support));

  // Derivatives of every order vanish at the sphere; the gradient is already
  // below any fixed threshold at a modest distance from it.
  std::array<double, kMaxDim> g{};
  double slope = 0.0;
  for (int j = 10; j <= 30; ++j) {
    const double r = 1.0 - std::ldexp(1.0, -j);
    bump.value_gradient(axis_point(buf, n, r), std::span<double>(g.data(), static_cast<std::size_t>(n)));
    slope = std::max(slope, std::abs(g[0]));
  }
  out.push_back(make_report("bump-smooth", inputs, slope, 0.0, 1e-12, Criterion::kAtMost,
                            "lhs = largest |grad phi| at |x| = 1 - 2^-j, j = 10..30"));

  double interior = 0.0;
  for (int j = 0; j <= 1000; ++j) {
    const double r = 0.5 * j / 1000.0;
    interior = std::max(interior, norm(bump.log_gradient(axis_point(buf, n, r))));
  }
  out.push_back(make_report("bump-interior", inputs, interior, 16.0 / 9.0, 1e-12, Criterion::kEqual,
                            "lhs = sampled sup |X| on |x| <= 1/2, rhs = closed form at |x| = 1/2"));
  return out;
}

VerificationReport check_oracle_eigenvalue(std::string id, const PotentialFunction& v, double expected, double tol,
                                           const VectorField* hint_field, const CheckOptions& opts) {
  double err = 0.0;
  const double e0 = oracle_energy(v, hint_field, opts, &err);
  json inputs{{"potential", v.description()}, {"n", v.dim()}};
  VerificationReport r = make_report(std::move(id), inputs, e0, expected, tol, Criterion::kEqual,
                                     "lhs = oracle E0, rhs = closed form");
  r.extras = {{"oracle_error", err}};
  return r;
}

VerificationReport check_grid_oracle(int n, double alpha, double half_width, int m, double rel_tol) {
  const PotentialFunction v = oscillator_potential(n, alpha);
  const Grid grid(n, half_width, m);
  const Eigenpair pair = smallest_eigenpair(discretize(v, grid), 1e-8, 100000);
  json inputs{{"potential", v.description()}, {"n", n}, {"L", half_width}, {"m", m}};
  VerificationReport r = make_report("oracle-grid", inputs, pair.value, alpha * n, rel_tol, Criterion::kEqual,
                                     "lhs = grid E0, rhs = alpha n");
  r.extras = {{"residual", pair.residual}, {"matvecs", pair.matvecs}};
  return r;
}

namespace {

struct LadderSummary {
  double worst = 0.0;
  long long states = 0;
  long long points = 0;
  json energies = json::array();
};

void ladder_points(const GroundState& state, const PotentialFunction& v, double energy, int points, double rmin,
                   double rmax, std::mt19937_64& rng, LadderSummary& sum) {
  const int n = state.dim();
  std::uniform_real_distribution<double> radius(rmin, rmax);
  for (int i = 0; i < points; ++i) {
    Vec x = random_direction(rng, n);
    const double r = radius(rng);
    for (double& xi : x) xi *= r;
    const double res = schrodinger_residual(state, v, energy, x);
    const double scaled = std::abs(res) / (1.0 + std::abs(state.value(x)));
    sum.worst = std::max(sum.worst, std::isnan(scaled) ? std::numeric_limits<double>::infinity() : scaled);
    ++sum.points;
  }
  ++sum.states;
}

}  // namespace

VerificationReport check_oscillator_ladder(int n, double alpha, int kmax, int points, std::uint64_t seed,
                                           const CheckOptions& opts) {
  std::mt19937_64 rng(seed);
  const PotentialFunction v = oscillator_potential(n, alpha);
  const GroundState ground = solve_ground_state(VectorField{RadialPowerField{alpha, 0.0, n}});
  LadderSummary sum;
  const double reach = 5.0 / std::sqrt(alpha);
  for (int k = 0; k <= kmax; ++k) {
    const double e = alpha * (n + 2.0 * k);
    for (const HarmonicPolynomial& p : harmonic_basis(n, k)) {
      ladder_points(excited_state(p, ground), v, e, points, 1e-3 * reach, reach, rng, sum);
    }
    sum.energies.push_back(e);
  }
  json inputs{{"n", n}, {"alpha", alpha}, {"kmax", kmax}, {"points", points}, {"seed", seed}};
  VerificationReport r = make_report("spectrum-oscillator", inputs, sum.worst, 0.0, opts.precise_tol,
                                     Criterion::kAtMost, "lhs = max |residual| / (1 + |phi|)");
  r.extras = {{"energies", sum.energies}, {"states", sum.states}, {"points", sum.points}};
  return r;
}

VerificationReport check_coulomb_ladder(int n, double alpha, int kmax, int points, std::uint64_t seed,
                                        const CheckOptions& opts) {
  std::mt19937_64 rng(seed);
  const PotentialFunction v = coulomb_potential(n, alpha * (n - 1));
  LadderSummary sum;
  for (int k = 0; k <= kmax; ++k) {
    const double a = coulomb_rate(n, alpha, k);
    const double e = -a * a;
    for (const HarmonicPolynomial& p : harmonic_basis(n, k)) {
      ladder_points(coulomb_excited_state(p, alpha), v, e, points, 0.05 / a, 30.0 / a, rng, sum);
    }
    sum.energies.push_back(e);
  }
  json inputs{{"n", n}, {"alpha", alpha}, {"kmax", kmax}, {"points", points}, {"seed", seed}};
  VerificationReport r = make_report("spectrum-coulomb", inputs, sum.worst, 0.0, opts.precise_tol, Criterion::kAtMost,
                                     "lhs = max |residual| / (1 + |phi|)");
  r.extras = {{"energies", sum.energies}, {"states", sum.states}, {"points", sum.points}};
  return r;
}

std::vector<TrialPair> random_trial_pairs(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre(-0.5, 0.5);
  std::uniform_real_distribution<double> width(0.6, 1.4);
  std::uniform_real_distribution<double> alpha(0.5, 2.0);
  std::uniform_real_distribution<double> power(0.0, 1.5);
  std::vector<TrialPair> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const int n = i % 2 == 0 ? 3 : 2;
    Vec c(n);
    for (double& ci : c) ci = centre(rng);
    const double w = width(rng);
    const double a = alpha(rng);
    const double p = power(rng);
    out.push_back(TrialPair{GaussianTrial(c, w), RadialPowerField{a, p, n}});
  }
  return out;
}

std::vector<std::string> available_checks() {
  return {"bump",  "exeq2", "groundstate", "hardy",   "heisenberg", "hersch",  "lambda",
          "oracle", "peq1", "peq2",        "peq4",    "prop4",      "scaling", "spectrum", "virial"};
}

namespace {

std::string two_digits(int i) {
  std::string s = std::to_string(i);
  return s.size() < 2 ? "0" + s : s;
}

VerificationReport renamed(VerificationReport r, const std::string& id) {
  r.check_id = id;
  return r;
}

using Sink = std::vector<VerificationReport>;

void suite_peq1(const SuiteOptions& o, Sink& out) {
  const auto pairs = random_trial_pairs(o.trials, o.seed);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out.push_back(renamed(check_identity_peq1(pairs[i].trial, VectorField{pairs[i].field}, o.check),
                          "peq1/" + two_digits(static_cast<int>(i))));
  }
}

void suite_peq2(const SuiteOptions& o, Sink& out) {
  const VectorField osc{RadialPowerField{1.0, 0.0, 3}};
  const GroundState g = solve_ground_state(osc);
  VerificationReport eq = check_inequality_peq2(g, osc, o.check);
  // At the field's own ground state the bound is attained.
  VerificationReport tight = make_report("peq2/ground-equality", eq.inputs, eq.lhs, eq.rhs, o.check.tol,
                                         Criterion::kEqual, "equality at the ground state of X");
  tight.extras = eq.extras;
  out.push_back(std::move(tight));
  out.push_back(renamed(std::move(eq), "peq2/ground"));
  const auto pairs = random_trial_pairs(3, o.seed + 1);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const int n = pairs[i].trial.dim();
    out.push_back(renamed(check_inequality_peq2(pairs[i].trial, VectorField{RadialPowerField{1.0, 0.0, n}}, o.check),
                          "peq2/trial-" + two_digits(static_cast<int>(i))));
  }
}

void suite_heisenberg(const SuiteOptions& o, Sink& out) {
  for (int n : {1, 2, 3}) {
    out.push_back(renamed(check_heisenberg(GaussianTrial(Vec(n, 0.0), 1.0), true, o.check),
                          "heisenberg/gaussian-n" + std::to_string(n)));
  }
  out.push_back(renamed(check_heisenberg(GaussianTrial(Vec{0.3, -0.2, 0.1}, 0.8), false, o.check),
                        "heisenberg/shifted"));
  out.push_back(renamed(check_heisenberg(solve_ground_state(VectorField{RadialPowerField{1.0, 1.0, 3}}), false, o.check),
                        "heisenberg/exponential"));
}

void suite_peq4(const SuiteOptions& o, Sink& out) {
  for (double p : {0.0, 0.5, 1.0}) {
    out.push_back(renamed(check_equality_peq4(VectorField{RadialPowerField{1.0, p, 3}}, o.check),
                          "peq4/p" + fmt(p)));
  }
  // Oscillator value from an independent tensor-grid quadrature.
  const GroundState g = solve_ground_state(VectorField{RadialPowerField{1.0, 0.0, 3}});
  const QuadratureEstimate grid = tensor_grid_integral(
      [&g](Point x) {
        std::array<double, kMaxDim> d{};
        g.value_gradient(x, std::span<double>(d.data(), 3));
        return d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
      },
      3, 8.0, 120);
  VerificationReport ind = make_report("peq4/oscillator-grid", json{{"state", g.describe()}, {"L", 8.0}, {"m", 120}},
                                       grid.value, 1.5, o.check.tol, Criterion::kEqual,
                                       "lhs = tensor-grid |grad phi0|^2, rhs = 3/2");
  ind.extras = {{"grid_error", grid.error}};
  out.push_back(std::move(ind));
  double raised = 0.0;
  std::string note;
  try {
    check_equality_peq4(VectorField{RadialPowerField{1.0, 2.0, 3}}, o.check);
  } catch (const NoGroundState& e) {
    raised = 1.0;
    note = e.what();
  }
  out.push_back(make_report("peq4/hardy-no-ground-state", json{{"field", field_to_json(RadialPowerField{1.0, 2.0, 3})}},
                            raised, 1.0, 0.0, Criterion::kEqual, note));
}

void suite_exeq2(const SuiteOptions& o, Sink& out) {
  for (double p : {0.0, 0.5, 1.0}) {
    const GroundState g = solve_ground_state(VectorField{RadialPowerField{1.0, p, 3}});
    out.push_back(renamed(check_exeq2(g, 1.0, p, 3, true, o.check), "exeq2/ground-p" + fmt(p)));
  }
  for (double p : {0.5, 1.0}) {
    const Vec c{0.2, -0.1, 0.15};
    out.push_back(renamed(check_exeq2(GaussianTrial(c, 0.9), 1.0, p, 3, false, o.check), "exeq2/trial-p" + fmt(p)));
  }
}

void suite_hardy(const SuiteOptions& o, Sink& out) {
  std::vector<int> dims = o.n ? std::vector<int>{*o.n} : std::vector<int>{3, 4};
  for (int n : dims) {
    const std::string tag = "-n" + std::to_string(n);
    out.push_back(renamed(check_hardy(GaussianTrial(Vec(n, 0.0), 1.0), n, o.check), "hardy/gaussian" + tag));
    Vec c(n, 0.0);
    c[0] = 0.4;
    out.push_back(renamed(check_hardy(GaussianTrial(c, 0.7), n, o.check), "hardy/shifted" + tag));
    out.push_back(renamed(check_hardy(solve_ground_state(VectorField{RadialPowerField{1.0, 1.0, n}}), n, o.check),
                          "hardy/exponential" + tag));
    out.push_back(renamed(check_hardy_family(n, o.eps, o.check), "hardy-eps" + tag));
    out.push_back(renamed(check_hardy_divergence(n, o.check), "hardy-divergence" + tag));
  }
}

void suite_hersch(const SuiteOptions& o, Sink& out) {
  const VectorField osc{RadialPowerField{1.0, 0.0, 3}};
  const VectorField coul{RadialPowerField{1.0, 1.0, 3}};
  out.push_back(renamed(hersch_bound(oscillator_potential(3, 1.0), osc, {}, o.check), "hersch/oscillator"));
  out.push_back(renamed(hersch_bound(coulomb_potential(3, 2.0), coul, {}, o.check), "hersch/hydrogen"));
  out.push_back(renamed(hersch_bound(oscillator_potential(3, 1.0), VectorField{RadialPowerField{0.0, 0.0, 3}}, {}, o.check),
                        "hersch/oscillator-zero-field"));
}

void suite_prop4(const SuiteOptions& o, Sink& out) {
  std::mt19937_64 rng(o.seed + 3);
  std::uniform_real_distribution<double> centre(-0.5, 0.5);
  std::uniform_real_distribution<double> width(0.6, 1.4);
  std::vector<GaussianTrial> gauss;
  for (int i = 0; i < 3; ++i) {
    Vec c(3);
    for (double& ci : c) ci = centre(rng);
    gauss.emplace_back(c, width(rng));
  }
  std::vector<const ScalarState*> trials;
  for (const auto& g : gauss) trials.push_back(&g);
  auto add = [&](const std::string& tag, const PotentialFunction& v, const VectorField& f) {
    for (VerificationReport& r : check_prop4_bounds(v, f, trials, {}, o.check)) {
      out.push_back(renamed(r, r.check_id + "/" + tag));
    }
  };
  add("oscillator", oscillator_potential(3, 1.0), VectorField{RadialPowerField{1.0, 0.0, 3}});
  add("oscillator-zero-field", oscillator_potential(3, 1.0), VectorField{RadialPowerField{0.0, 0.0, 3}});
  add("hydrogen", coulomb_potential(3, 2.0), VectorField{RadialPowerField{1.0, 1.0, 3}});
}

void suite_scaling(const SuiteOptions& o, Sink& out) {
  const GroundState g = solve_ground_state(VectorField{RadialPowerField{1.0, 0.0, 3}});
  const std::map<double, double> strength{{0.0, 2.0}, {1.0, 1.0}, {2.0, 0.5}};
  for (const auto& [p, a] : strength) {
    for (double lambda : {0.5, 2.0, 5.0}) {
      out.push_back(renamed(check_scaling(g, VectorField{RadialPowerField{a, p, 3}}, lambda, o.check),
                            "scaling/p" + fmt(p) + "-lambda" + fmt(lambda)));
    }
  }
}

void suite_virial(const SuiteOptions& o, Sink& out) {
  out.push_back(renamed(check_virial(solve_ground_state(VectorField{RadialPowerField{1.0, 0.0, 3}}),
                                     oscillator_potential(3, 1.0), 2.0, o.check),
                        "virial/oscillator"));
  out.push_back(renamed(check_virial(solve_ground_state(VectorField{RadialPowerField{1.0, 1.0, 3}}),
                                     coulomb_potential(3, 2.0), -1.0, o.check),
                        "virial/hydrogen"));
}

void suite_bump(const SuiteOptions&, Sink& out) {
  for (VerificationReport& r : check_bump_counterexample(3)) out.push_back(std::move(r));
}

void suite_oracle(const SuiteOptions& o, Sink& out) {
  for (int n : {2, 3}) {
    for (double a : {0.5, 1.0, 2.0}) {
      const VectorField f{RadialPowerField{a, 0.0, n}};
      out.push_back(check_oracle_eigenvalue("oracle-oscillator/n" + std::to_string(n) + "-alpha" + fmt(a),
                                            oscillator_potential(n, a), a * n, 1e-6, &f, o.check));
    }
  }
  for (double z : {1.0, 2.0}) {
    out.push_back(check_oracle_eigenvalue("oracle-coulomb/Z" + fmt(z), coulomb_potential(3, z), -z * z / 4.0, 1e-4,
                                          nullptr, o.check));
  }
  out.push_back(renamed(check_grid_oracle(2, 1.0, 8.0, 200, 0.01), "oracle-grid/n2"));
  CheckOptions box = o.check;
  box.oracle.half_width = 1.0;
  out.push_back(check_oracle_eigenvalue("oracle-box/n1", zero_potential(1), std::numbers::pi * std::numbers::pi / 4.0,
                                        1e-4, nullptr, box));
}

void suite_spectrum(const SuiteOptions& o, Sink& out) {
  out.push_back(check_oscillator_ladder(3, 1.0, 3, 500, o.seed, o.check));
  out.push_back(check_coulomb_ladder(3, 1.0, 3, 500, o.seed, o.check));
}

void suite_lambda(const SuiteOptions& o, Sink& out) {
  const std::vector<std::pair<std::string, RadialPowerField>> fields{
      {"oscillator", {1.0, 0.0, 3}}, {"coulomb", {1.0, 1.0, 3}}, {"p0.5", {1.0, 0.5, 3}}};
  for (const auto& [tag, f] : fields) {
    const double l = lambda_estimate(VectorField{f}, o.check.oracle);
    out.push_back(make_report("lambda/" + tag, json{{"field", field_to_json(f)}}, l, 0.0, 1e-6, Criterion::kEqual,
                              "lhs = Lambda(X) from the oracle; a ground state forces zero"));
  }
}

void suite_groundstate(const SuiteOptions& o, Sink& out) {
  std::mt19937_64 rng(o.seed + 4);
  std::uniform_real_distribution<double> radius(0.05, 6.0);
  for (double p : {0.0, 0.5, 1.0, 1.5}) {
    const VectorField f{RadialPowerField{1.0, p, 3}};
    const GroundState g = solve_ground_state(f);
    double first = 0.0;
    double euler = 0.0;
    for (int i = 0; i < 1000; ++i) {
      Vec x = random_direction(rng, 3);
      const double r = radius(rng);
      for (double& xi : x) xi *= r;
      const double scale = 1.0 + std::abs(g.value(x));
      first = std::max(first, first_order_residual(g, f, x) / scale);
      euler = std::max(euler, std::abs(euler_residual(g, f, x)) / scale);
    }
    json inputs{{"field", field_to_json(f)}, {"state", g.describe()}};
    out.push_back(make_report("groundstate/first-order-p" + fmt(p), inputs, first, 0.0, o.check.precise_tol,
                              Criterion::kAtMost, "lhs = max |grad phi + phi X| / (1 + |phi|)"));
    out.push_back(make_report("groundstate/euler-p" + fmt(p), inputs, euler, 0.0, o.check.precise_tol,
                              Criterion::kAtMost, "lhs = max |-Delta phi + (|X|^2 - div X) phi| / (1 + |phi|)"));
    out.push_back(make_report("groundstate/norm-p" + fmt(p), inputs, norm_sq(g, o.check.quad).value, 1.0,
                              o.check.tol, Criterion::kEqual, "lhs = |phi|^2"));
  }
}

}  // namespace

std::vector<VerificationReport> run_suite(const SuiteOptions& opts) {
  using Runner = void (*)(const SuiteOptions&, Sink&);
  const std::map<std::string, Runner> runners{
      {"bump", suite_bump},       {"exeq2", suite_exeq2},   {"groundstate", suite_groundstate},
      {"hardy", suite_hardy},     {"heisenberg", suite_heisenberg}, {"hersch", suite_hersch},
      {"lambda", suite_lambda},   {"oracle", suite_oracle}, {"peq1", suite_peq1},
      {"peq2", suite_peq2},       {"peq4", suite_peq4},     {"prop4", suite_prop4},
      {"scaling", suite_scaling}, {"spectrum", suite_spectrum}, {"virial", suite_virial}};
  std::set<std::string> selected;
  const bool all = opts.checks.empty() ||
                   std::find(opts.checks.begin(), opts.checks.end(), "all") != opts.checks.end();
  if (all) {
    for (const auto& [name, fn] : runners) selected.insert(name);
  } else {
    for (const std::string& c : opts.checks) {
      if (!runners.count(c)) throw InvalidArgument("unknown check: " + c);
      selected.insert(c);
    }
  }
  if (opts.trials < 1) throw InvalidArgument("trials must be positive");
  Sink out;
  for (const std::string& name : selected) {
    try {
      runners.at(name)(opts, out);
    } catch (const Error& e) {
      VerificationReport r = make_report(name + "/error", json::object(), 0.0, 1.0, 0.0, Criterion::kEqual,
                                         std::string("check raised: ") + e.what());
      r.extras = {{"error", error_name(e.code())}};
      out.push_back(std::move(r));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const VerificationReport& a, const VerificationReport& b) { return a.check_id < b.check_id; });
  return out;
}

}  // namespace gsf
