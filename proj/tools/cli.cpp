#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "gsf/error.hpp"
#include "gsf/expr.hpp"
#include "gsf/field.hpp"
#include "gsf/harmonics.hpp"
#include "gsf/oracle.hpp"
#include "gsf/records.hpp"
#include "gsf/state.hpp"
#include "gsf/verify.hpp"

namespace gsf::cli {

using nlohmann::json;

namespace {

struct GlobalArgs {
  std::string format = "json";
  std::string output;
  std::uint64_t seed = 42;
  double tol = 1e-6;
};

struct FieldArgs {
  std::string kind = "radial";
  double alpha = 1.0;
  double p = 0.0;
  int n = 3;
  std::string u;
  std::string components;
};

struct PotentialArgs {
  std::string expr;
  std::string preset;
  double alpha = 1.0;
  double charge = 1.0;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void add_field_options(CLI::App* sub, FieldArgs& f, bool with_n = true) {
  sub->add_option("--field", f.kind, "field kind")->check(CLI::IsMember({"radial", "gradient", "components"}));
  sub->add_option("--alpha", f.alpha, "strength of the radial power field");
  sub->add_option("--p", f.p, "exponent of the radial power field");
  if (with_n) sub->add_option("--n", f.n, "dimension")->check(CLI::Range(1, kMaxDim));
  sub->add_option("--u", f.u, "scalar potential u with X = grad u (--field gradient)");
  sub->add_option("--components", f.components, "semicolon-separated components (--field components)");
}

void add_potential_options(CLI::App* sub, PotentialArgs& v) {
  sub->add_option("--V", v.expr, "potential expression in x1..xn and r");
  sub->add_option("--preset", v.preset, "oscillator (alpha^2 r^2) or coulomb (-Z/r)")
      ->check(CLI::IsMember({"oscillator", "coulomb"}));
  sub->add_option("--coupling", v.alpha, "alpha of the oscillator preset");
  sub->add_option("--Z", v.charge, "charge of the Coulomb preset");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

VectorField build_field(const FieldArgs& f) {
  if (f.kind == "radial") return RadialPowerField{f.alpha, f.p, f.n};
  if (f.kind == "gradient") {
    if (f.u.empty()) throw InvalidArgument("--field gradient needs --u");
    return GradientField{parse(f.u, f.n)};
  }
  if (f.components.empty()) throw InvalidArgument("--field components needs --components");
  ComponentField c;
  for (const std::string& s : split(f.components, ';')) c.components.push_back(parse(s, f.n));
  if (c.dim() != f.n) throw DimensionMismatch("number of components differs from --n");
  return c;
}

PotentialFunction build_potential(const PotentialArgs& v, int n) {
  if (!v.expr.empty() && !v.preset.empty()) throw InvalidArgument("give either --V or --preset, not both");
  std::string text = v.expr;
  if (v.preset == "oscillator") text = num(v.alpha * v.alpha) + "*r^2";
  if (v.preset == "coulomb") text = "-" + num(v.charge) + "/r";
  if (text.empty()) throw InvalidArgument("a potential is required (--V or --preset)");
  return PotentialFunction::from_expression(parse(text, n), text);
}

std::optional<RadialPowerField> as_radial(const VectorField& field) {
  if (const auto* r = std::get_if<RadialPowerField>(&field)) return *r;
  if (const auto* g = std::get_if<GradientField>(&field)) return recognize_radial_power(*g);
  return std::nullopt;
}

// Records are buffered so that CSV output can share one header.
class Emitter {
 public:
  explicit Emitter(const GlobalArgs& g) : g_(g) {}

  void record(json j) { records_.push_back(std::move(j)); }
  void report(const VerificationReport& r) {
    reports_.push_back(r);
    json j = report_to_json(r);
    records_.push_back(std::move(j));
  }

  void flush(std::ostream& fallback) const {
    std::ofstream file;
    std::ostream* out = &fallback;
    if (!g_.output.empty()) {
      file.open(g_.output);
      if (!file) throw InvalidArgument("cannot open output file " + g_.output);
      out = &file;
    }
    if (g_.format == "csv") {
      write_csv(*out);
    } else {
      for (const json& j : records_) *out << j.dump() << '\n';
    }
  }

 private:
  void write_csv(std::ostream& out) const {
    if (!reports_.empty() && reports_.size() == records_.size()) {
      out << report_csv_header() << '\n';
      for (const VerificationReport& r : reports_) out << report_to_csv(r) << '\n';
      return;
    }
    std::set<std::string> keys;
    for (const json& j : records_) {
      for (auto it = j.begin(); it != j.end(); ++it) keys.insert(it.key());
    }
    bool first = true;
    for (const std::string& k : keys) {
      out << (first ? "" : ",") << k;
      first = false;
    }
    out << '\n';
    for (const json& j : records_) {
      first = true;
      for (const std::string& k : keys) {
        out << (first ? "" : ",");
        first = false;
        if (!j.contains(k) || j[k].is_null()) continue;
        const json& v = j[k];
        std::string cell = v.is_string() ? v.get<std::string>() : v.dump();
        if (cell.find_first_of(",\"\n") != std::string::npos) {
          std::string q = "\"";
          for (char c : cell) {
            if (c == '"') q += '"';
            q += c;
          }
          cell = q + "\"";
        }
        out << cell;
      }
      out << '\n';
    }
  }

  const GlobalArgs& g_;
  std::vector<json> records_;
  std::vector<VerificationReport> reports_;
};

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::kQuadratureDivergence:
    case ErrorCode::kNoConvergence:
    case ErrorCode::kNodeSingularity:
    case ErrorCode::kNotNormalizable:
    case ErrorCode::kSingularPoint:
    case ErrorCode::kDomainError:
    case ErrorCode::kZeroDivision:
    case ErrorCode::kNonPositiveState:
      return kNumericalFailure;
    default:
      return kInvalidInput;
  }
}

int cmd_solve(const GlobalArgs&, const FieldArgs& fa, Emitter& em) {
  const VectorField field = build_field(fa);
  const Admissibility adm = admissibility(field);
  if (!adm.admissible()) throw NotAdmissible("|X|^2 or div X is not locally integrable");
  const GroundState g = solve_ground_state(field);
  json rec{{"command", "solve"}, {"field", field_to_json(field)}, {"state", state_to_json(g)}};
  const auto rp = as_radial(field);
  if (!g.admissible()) {
    rec["E0"] = nullptr;
    rec["potential"] = nullptr;
  } else if (rp && rp->p == 0.0) {
    rec["E0"] = rp->alpha * rp->n;
    rec["potential"] = num(rp->alpha * rp->alpha) + "*r^2";
    rec["family"] = "oscillator";
  } else if (rp && rp->p == 1.0 && rp->n >= 2) {
    rec["E0"] = -rp->alpha * rp->alpha;
    rec["potential"] = "-" + num(rp->alpha * (rp->n - 1)) + "/r";
    rec["family"] = "coulomb";
  } else {
    rec["E0"] = 0.0;
    rec["potential"] = "|X|^2 - div X";
    rec["family"] = rp ? "radial-power" : "gradient";
  }
  em.record(std::move(rec));
  return kOk;
}

int cmd_spectrum(const GlobalArgs& g, const FieldArgs& fa, int kmax, int points, Emitter& em) {
  if (kmax < 0) throw InvalidArgument("--kmax must be non-negative");
  const VectorField field = build_field(fa);
  const auto rp = as_radial(field);
  if (!rp || !(rp->alpha > 0.0) || (rp->p != 0.0 && rp->p != 1.0)) {
    throw UnsupportedFamily("spectra are available for the oscillator (p = 0) and Coulomb (p = 1) fields");
  }
  const int n = rp->n;
  const bool osc = rp->p == 0.0;
  const std::vector<SpectrumEntry> entries =
      osc ? oscillator_spectrum(n, rp->alpha, kmax) : coulomb_spectrum(n, rp->alpha, kmax);
  const std::string vtext = osc ? num(rp->alpha * rp->alpha) + "*r^2" : "-" + num(rp->alpha * (n - 1)) + "/r";
  const PotentialFunction v = PotentialFunction::from_expression(parse(vtext, n), vtext);
  const GroundState ground = solve_ground_state(VectorField{RadialPowerField{rp->alpha, 0.0, n}});
  for (const SpectrumEntry& e : entries) {
    const HarmonicPolynomial p = harmonic_basis(n, e.k).front();
    const GroundState state = osc ? excited_state(p, ground) : coulomb_excited_state(p, rp->alpha);
    std::mt19937_64 rng(g.seed + static_cast<std::uint64_t>(e.k));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double reach = osc ? 5.0 / std::sqrt(rp->alpha) : 30.0 / e.decay;
    std::uniform_real_distribution<double> radius(1e-2 * reach, reach);
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
      Vec x(n);
      double s = 0.0;
      for (double& xi : x) {
        xi = gauss(rng);
        s += xi * xi;
      }
      const double r = radius(rng) / std::sqrt(s);
      for (double& xi : x) xi *= r;
      const double res = std::abs(schrodinger_residual(state, v, e.energy, x)) / (1.0 + std::abs(state.value(x)));
      worst = std::max(worst, res);
    }
    json rec = spectrum_entry_to_json(e);
    rec["command"] = "spectrum";
    rec["family"] = osc ? "oscillator" : "coulomb";
    rec["residual"] = worst;
    rec["n"] = n;
    em.record(std::move(rec));
  }
  return kOk;
}

int cmd_verify(const GlobalArgs& g, const std::vector<std::string>& checks, const std::string& suite, int trials,
               std::optional<int> n, double eps, Emitter& em) {
  SuiteOptions o;
  o.seed = g.seed;
  o.trials = trials;
  o.n = n;
  o.eps = eps;
  o.check.tol = g.tol;
  for (const std::string& c : checks) {
    for (const std::string& part : split(c, ',')) {
      if (!part.empty()) o.checks.push_back(part);
    }
  }
  if (!suite.empty()) o.checks.push_back(suite);
  const std::vector<VerificationReport> reports = run_suite(o);
  bool failed = false;
  bool errored = false;
  for (const VerificationReport& r : reports) {
    em.report(r);
    failed |= !r.pass;
    errored |= r.extras.contains("error");
  }
  if (errored) return kNumericalFailure;
  return failed ? kCheckFailure : kOk;
}

int cmd_oracle(const GlobalArgs&, const PotentialArgs& pa, int n, const std::string& method, double half_width, int m,
               double radius, double step, double tol, Emitter& em) {
  const PotentialFunction v = build_potential(pa, n);
  const bool radial = method == "radial" || (method == "auto" && v.radial() && n >= 2);
  json fin{{"command", "oracle"}, {"potential", v.description()}, {"n", n}};
  if (radial) {
    if (!v.radial() || n < 2) throw InvalidArgument("the radial solver needs a radial potential and n >= 2");
    RadialProblem problem;
    problem.n = n;
    problem.potential = [&v](double r) { return v.radial_value(r); };
    problem.radius = radius;
    problem.step = step;
    const RadialResult res = radial_solve_detailed(problem, tol);
    for (const RadialStep& s : res.history) {
      em.record({{"command", "oracle"},
                 {"row", "refinement"},
                 {"radius", s.radius},
                 {"step", s.step},
                 {"coarse", s.coarse},
                 {"fine", s.fine},
                 {"extrapolated", s.extrapolated}});
    }
    fin["method"] = "radial";
    fin["E0"] = res.energy;
    fin["errorEstimate"] = res.error_estimate;
  } else {
    if (n > 3) throw InvalidArgument("the grid solver supports n <= 3");
    if (m < 4) throw InvalidArgument("--m must be at least 4");
    std::vector<int> sizes{m / 4, m / 2, m};
    sizes.erase(std::remove_if(sizes.begin(), sizes.end(), [](int s) { return s < 2; }), sizes.end());
    double prev = std::nan("");
    double last = 0.0;
    double err = std::nan("");
    for (int s : sizes) {
      const Grid grid(n, half_width, s);
      const Eigenpair e = smallest_eigenpair(discretize(v, grid), tol, 100000);
      em.record({{"command", "oracle"},
                 {"row", "refinement"},
                 {"m", s},
                 {"L", half_width},
                 {"step", grid.spacing()},
                 {"E", e.value},
                 {"residual", e.residual},
                 {"matvecs", e.matvecs}});
      if (!std::isnan(prev)) err = std::abs(e.value - prev);
      prev = e.value;
      last = e.value;
    }
    fin["method"] = "grid";
    fin["E0"] = last;
    fin["errorEstimate"] = number(err);
  }
  em.record(std::move(fin));
  return kOk;
}

int cmd_bound(const GlobalArgs& g, const PotentialArgs& pa, const FieldArgs& fa, double radius, int samples,
              int trials, Emitter& em) {
  const VectorField field = build_field(fa);
  const PotentialFunction v = build_potential(pa, fa.n);
  SamplerOptions s;
  s.radius = radius;
  s.samples = samples;
  s.seed = g.seed;
  CheckOptions opts;
  opts.tol = g.tol;
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> centre(-0.5, 0.5);
  std::uniform_real_distribution<double> width(0.6, 1.4);
  std::vector<GaussianTrial> gauss;
  for (int i = 0; i < trials; ++i) {
    Vec c(fa.n);
    for (double& ci : c) ci = centre(rng);
    gauss.emplace_back(c, width(rng));
  }
  std::vector<const ScalarState*> ptrs;
  for (const GaussianTrial& t : gauss) ptrs.push_back(&t);
  std::vector<VerificationReport> reports{hersch_bound(v, field, s, opts)};
  for (VerificationReport& r : check_prop4_bounds(v, field, ptrs, s, opts)) reports.push_back(std::move(r));
  std::sort(reports.begin(), reports.end(),
            [](const VerificationReport& a, const VerificationReport& b) { return a.check_id < b.check_id; });
  bool failed = false;
  for (const VerificationReport& r : reports) {
    em.report(r);
    failed |= !r.pass;
  }
  return failed ? kCheckFailure : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ground states of first-order factorizations: solver, oracle and verification suite", "gsf"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "read options from a TOML or INI file");
  GlobalArgs g;
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output", g.output, "write records to this file instead of stdout");
  app.add_option("--seed", g.seed, "seed for randomized trial states");
  app.add_option("--tol", g.tol, "default relative tolerance of the checks")->envname("GSF_TOL");

  FieldArgs solve_f;
  CLI::App* solve = app.add_subcommand("solve", "ground state of a vector field");
  add_field_options(solve, solve_f);

  FieldArgs spec_f;
  int kmax = 3;
  int points = 200;
  CLI::App* spectrum = app.add_subcommand("spectrum", "oscillator or Coulomb ladder");
  add_field_options(spectrum, spec_f);
  spectrum->add_option("--kmax", kmax, "highest angular degree");
  spectrum->add_option("--points", points, "residual sample points per level")->check(CLI::Range(1, 1000000));

  std::vector<std::string> checks;
  std::string suite;
  int trials = 25;
  std::optional<int> hardy_n;
  double eps = 1e-3;
  CLI::App* verify = app.add_subcommand("verify", "run verification checks");
  verify->add_option("--check", checks, "checks to run (repeatable or comma-separated)");
  verify->add_option("--suite", suite, "named suite; 'all' runs every check");
  verify->add_option("--trials", trials, "random trial pairs for the identity check")->check(CLI::Range(1, 100000));
  verify->add_option("--n", hardy_n, "dimension for the Hardy checks")->check(CLI::Range(3, kMaxDim));
  verify->add_option("--eps", eps, "regularization of the Hardy minimizing family");
  verify->add_flag_callback(
      "--list", [&out]() {
        for (const std::string& c : available_checks()) out << c << '\n';
        throw CLI::Success();
      },
      "list available checks");

  PotentialArgs oracle_v;
  int oracle_n = 3;
  std::string method = "auto";
  double half_width = 8.0;
  int m = 64;
  double radius = 0.0;
  double step = 0.01;
  double oracle_tol = 1e-8;
  CLI::App* oracle = app.add_subcommand("oracle", "numerical ground-state energy of -Delta + V");
  add_potential_options(oracle, oracle_v);
  oracle->add_option("--n", oracle_n, "dimension")->check(CLI::Range(1, kMaxDim));
  oracle->add_option("--method", method, "solver")->check(CLI::IsMember({"auto", "radial", "grid"}));
  oracle->add_option("--L", half_width, "half width of the grid box");
  oracle->add_option("--m", m, "interior nodes per axis of the finest grid");
  oracle->add_option("--R", radius, "radius of the radial box; 0 chooses it");
  oracle->add_option("--step", step, "initial radial step");
  oracle->add_option("--oracle-tol", oracle_tol, "solver tolerance");

  PotentialArgs bound_v;
  FieldArgs bound_f;
  double sample_radius = 20.0;
  int samples = 4000;
  int bound_trials = 3;
  CLI::App* bound = app.add_subcommand("bound", "pointwise lower bound and two-sided bounds for a candidate field");
  add_potential_options(bound, bound_v);
  add_field_options(bound, bound_f);
  bound->add_option("--radius", sample_radius, "sampling radius");
  bound->add_option("--samples", samples, "sample count")->check(CLI::Range(16, 10000000));
  bound->add_option("--trials", bound_trials, "Gaussian trial states")->check(CLI::Range(0, 1000));

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kInvalidInput;
  }

  Emitter em(g);
  try {
    int code = kOk;
    if (*solve) {
      code = cmd_solve(g, solve_f, em);
    } else if (*spectrum) {
      code = cmd_spectrum(g, spec_f, kmax, points, em);
    } else if (*verify) {
      code = cmd_verify(g, checks, suite, trials, hardy_n, eps, em);
    } else if (*oracle) {
      code = cmd_oracle(g, oracle_v, oracle_n, method, half_width, m, radius, step, oracle_tol, em);
    } else if (*bound) {
      code = cmd_bound(g, bound_v, bound_f, sample_radius, samples, bound_trials, em);
    }
    em.flush(out);
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace gsf::cli
