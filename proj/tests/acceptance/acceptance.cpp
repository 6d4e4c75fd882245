// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "gsf/error.hpp"
#include "gsf/verify.hpp"

using namespace gsf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PotentialFunction potential(const std::string& text, int n) { return PotentialFunction::from_expression(parse(text, n)); }

std::vector<VerificationReport> suite(const std::vector<std::string>& checks, int trials = 25) {
  SuiteOptions o;
  o.checks = checks;
  o.seed = 42;
  o.trials = trials;
  return run_suite(o);
}

// Output and exit status of a shell command.
std::pair<std::string, int> capture(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("cannot start " + cmd);
  std::array<char, 1 << 14> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {out, WIFEXITED(status) ? WEXITSTATUS(status) : -1};
}

Outcome oscillator_eigenvalue() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  CheckOptions opts;
  for (int n : {2, 3})
    for (double a : {0.5, 1.0, 2.0}) {
      const VectorField hint = RadialPowerField{a, 0.0, n};
      const double e = oracle_energy(potential(std::to_string(a * a) + "*r^2", n), &hint, opts);
      worst = std::max(worst, std::abs(e - a * n));
    }
  const Eigenpair grid = smallest_eigenpair(discretize(potential("r^2", 2), Grid(2, 8.0, 200)), 1e-8, 100000);
  const double grid_rel = std::abs(grid.value - 2.0) / 2.0;
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-6 && grid_rel <= 0.01 && elapsed <= 60.0,
          "max radial |dE| " + sci(worst) + ", 2D grid rel " + sci(grid_rel) + ", " + sci(elapsed) + " s"};
}

Outcome coulomb_eigenvalue() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  CheckOptions opts;
  for (double z : {1.0, 2.0}) {
    const VectorField hint = RadialPowerField{z / 2.0, 1.0, 3};
    const double e = oracle_energy(potential("-" + std::to_string(z) + "/r", 3), &hint, opts);
    worst = std::max(worst, std::abs(e + z * z / 4.0));
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-4 && elapsed <= 60.0, "max |dE| " + sci(worst) + ", " + sci(elapsed) + " s"};
}

Outcome spectrum_ladders() {
  const VerificationReport osc = check_oscillator_ladder(3, 1.0, 3, 500, 42);
  const VerificationReport cou = check_coulomb_ladder(3, 1.0, 3, 500, 42);
  bool energies = true;
  const auto os = oscillator_spectrum(3, 1.0, 3);
  const auto cs = coulomb_spectrum(3, 1.0, 3);
  for (int k = 0; k <= 3; ++k) {
    energies = energies && os[k].energy == 3.0 + 2 * k;
    const double expected = -std::pow(2.0 / (2 + 2 * k), 2);
    energies = energies && std::abs(cs[k].energy - expected) <= 1e-15;
  }
  return {energies && osc.lhs <= 1e-8 && cou.lhs <= 1e-8,
          "oscillator residual " + sci(osc.lhs) + ", Coulomb residual " + sci(cou.lhs)};
}

Outcome identity_trials() {
  const auto rs = suite({"peq1"});
  double worst = 0.0;
  for (const auto& r : rs) worst = std::max(worst, r.rel_error);
  return {rs.size() == 25 && worst <= 1e-6, std::to_string(rs.size()) + " pairs, max rel " + sci(worst)};
}

Outcome equality_chain() {
  double worst = 0.0;
  for (double p : {0.0, 0.5, 1.0}) worst = std::max(worst, check_equality_peq4(RadialPowerField{1.0, p, 3}).rel_error);
  // Independent trapezoid oracle on [-8, 8]^3 for the oscillator value 3/2.
  const GroundState g = solve_ground_state(RadialPowerField{1.0, 0.0, 3});
  const auto grad_sq = [&](Point x) {
    std::array<double, 3> grad{};
    g.value_gradient(x, grad);
    return grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2];
  };
  const auto field_sq = [&](Point x) {
    const double v = g.value(x);
    return norm_sq(x) * v * v;
  };
  const double kin = tensor_grid_integral(grad_sq, 3, 8.0, 120).value;
  const double fm = tensor_grid_integral(field_sq, 3, 8.0, 120).value;
  const double oracle_err = std::max(std::abs(kin - 1.5), std::abs(fm - 1.5)) / 1.5;
  return {worst <= 1e-6 && oracle_err <= 1e-6,
          "max pairwise rel " + sci(worst) + ", grid oracle rel " + sci(oracle_err)};
}

Outcome heisenberg_hardy() {
  double heis = 0.0;
  for (int n = 1; n <= 3; ++n) heis = std::max(heis, check_heisenberg(GaussianTrial(Vec(n, 0.0), 0.8), true).rel_error);
  bool trials_ok = true;
  double min_ratio = 1e300;
  for (const auto& r : suite({"hardy"})) {
    if (r.check_id.rfind("hardy/", 0) != 0) continue;
    trials_ok = trials_ok && r.pass && r.lhs >= r.rhs;
    min_ratio = std::min(min_ratio, r.lhs / r.rhs);
  }
  bool family_ok = true;
  bool divergence_ok = true;
  std::string ratios;
  for (int n : {3, 4}) {
    const double c = (n - 2.0) * (n - 2.0) / 4.0;
    const VerificationReport f = check_hardy_family(n, 1e-3);
    family_ok = family_ok && f.lhs >= c * (1 - 1e-9) && f.lhs <= 1.1 * c;
    ratios += " n=" + std::to_string(n) + ":" + sci(f.lhs / c);
    divergence_ok = divergence_ok && check_hardy_divergence(n).pass;
  }
  return {heis <= 1e-6 && trials_ok && family_ok && divergence_ok,
          "Heisenberg rel " + sci(heis) + ", min Hardy trial ratio " + sci(min_ratio) + ", family/C" + ratios +
              (divergence_ok ? ", divergence detected" : ", divergence NOT detected")};
}

Outcome hersch_tightness() {
  SamplerOptions s;
  const VerificationReport osc = hersch_bound(potential("r^2", 3), RadialPowerField{1.0, 0.0, 3}, s);
  const VerificationReport hyd = hersch_bound(potential("-2/r", 3), RadialPowerField{1.0, 1.0, 3}, s);
  const double gap_o = std::abs(osc.lhs - osc.rhs);
  const double gap_h = std::abs(hyd.lhs - hyd.rhs);
  return {gap_o <= osc.tolerance && gap_h <= hyd.tolerance,
          "oscillator |E0 - inf| " + sci(gap_o) + " (tol " + sci(osc.tolerance) + "), hydrogen " + sci(gap_h) +
              " (tol " + sci(hyd.tolerance) + ")"};
}

Outcome scaling_law() {
  const auto rs = suite({"scaling"});
  double worst = 0.0;
  for (const auto& r : rs) worst = std::max(worst, r.rel_error);
  return {rs.size() == 9 && worst <= 1e-8, std::to_string(rs.size()) + " cases, max rel " + sci(worst)};
}

Outcome virial() {
  const VerificationReport osc =
      check_virial(solve_ground_state(RadialPowerField{1.0, 0.0, 3}), potential("r^2", 3), 2.0);
  const VerificationReport hyd =
      check_virial(solve_ground_state(RadialPowerField{1.0, 1.0, 3}), potential("-2/r", 3), -1.0);
  return {osc.rel_error <= 1e-8 && hyd.rel_error <= 1e-8,
          "oscillator rel " + sci(osc.rel_error) + ", hydrogen rel " + sci(hyd.rel_error)};
}

Outcome bump_growth() {
  const BumpState bump(3);
  double prev = 0.0;
  int increases = 0;
  for (int j = 3; j <= 20; ++j) {
    const double r = 1.0 - std::ldexp(1.0, -j);
    const Vec x = bump.log_gradient(Vec{r, 0.0, 0.0});
    const double mag = std::sqrt(norm_sq(x));
    if (j > 3 && mag > prev) ++increases;
    prev = mag;
  }
  return {increases == 17, std::to_string(increases) + "/17 strict increases, |X| at j=20 " + sci(prev)};
}

Outcome determinism() {
  const std::string cmd = std::string("\"") + GSF_BINARY + "\" verify --suite all --seed 42";
  const auto [a, ca] = capture(cmd);
  const auto [b, cb] = capture(cmd);
  const bool same = !a.empty() && a == b;
  return {same && ca == 0 && cb == 0, std::to_string(a.size()) + " bytes, identical: " + (same ? "yes" : "no") +
                                          ", exit codes " + std::to_string(ca) + "/" + std::to_string(cb)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oscillator eigenvalue", oscillator_eigenvalue},
      {"Coulomb eigenvalue", coulomb_eigenvalue},
      {"spectrum ladders", spectrum_ladders},
      {"polarization identity on random pairs", identity_trials},
      {"ground-state equality chain", equality_chain},
      {"Heisenberg and Hardy", heisenberg_hardy},
      {"pointwise lower bound tightness", hersch_tightness},
      {"scaling law", scaling_law},
      {"virial identity", virial},
      {"bump counterexample", bump_growth},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " (" << o.detail
              << ")" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
