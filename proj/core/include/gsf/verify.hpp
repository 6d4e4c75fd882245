#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gsf/field.hpp"
#include "gsf/oracle.hpp"
#include "gsf/quadrature.hpp"
#include "gsf/state.hpp"

namespace gsf {

enum class Criterion {
  kEqual,    // |lhs - rhs| <= tol, absolutely or relatively
  kAtLeast,  // lhs >= rhs up to tol
  kAtMost,   // lhs <= rhs up to tol
};

std::string criterion_name(Criterion c);

struct VerificationReport {
  std::string check_id;
  nlohmann::json inputs = nlohmann::json::object();
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  Criterion criterion = Criterion::kEqual;
  bool pass = false;
  std::string notes;
  nlohmann::json extras = nlohmann::json::object();
};

VerificationReport make_report(std::string id, nlohmann::json inputs, double lhs, double rhs, double tolerance,
                               Criterion criterion, std::string notes = {});
// The pass flag as a function of (lhs, rhs, tolerance, criterion) only.
bool recompute_pass(const VerificationReport& r);

struct CheckOptions {
  double tol = 1e-6;              // default relative tolerance
  double strict_tol = 1e-9;       // one-sided inequalities
  double precise_tol = 1e-8;      // scaling, virial, residuals
  QuadratureOptions quad;
  OracleOptions oracle;
};

// ||grad phi + X phi||^2 = ||grad phi||^2 + ||X phi||^2 - int div X |phi|^2.
VerificationReport check_identity_peq1(const ScalarState& phi, const VectorField& field,
                                       const CheckOptions& opts = {});
// ||grad phi||^2 ||X phi||^2 >= (int div X |phi|^2)^2 / 4.
VerificationReport check_inequality_peq2(const ScalarState& phi, const VectorField& field,
                                         const CheckOptions& opts = {});
// int |grad phi|^2 int |x|^2 |phi|^2 >= n^2/4 (int |phi|^2)^2; equality for
// centred Gaussians.
VerificationReport check_heisenberg(const ScalarState& phi, bool expect_equality, const CheckOptions& opts = {});
// ||grad phi0||^2 = ||X phi0||^2 = (1/2) int div X |phi0|^2 at the ground
// state of X. Raises NoGroundState when X has no admissible ground state.
VerificationReport check_equality_peq4(const VectorField& field, const CheckOptions& opts = {});
// int |grad phi|^2 int |x|^(2-2p) |phi|^2 >= (n-p)^2/4 (int |phi|^2 / |x|^p)^2,
// with equality at the radial power ground state.
VerificationReport check_exeq2(const ScalarState& phi, double alpha, double p, int n, bool expect_equality,
                               const CheckOptions& opts = {});
// int |grad phi|^2 >= (n-2)^2/4 int |phi|^2 / |x|^2.
VerificationReport check_hardy(const ScalarState& phi, int n, const CheckOptions& opts = {});

// (|x|^2 + eps^2)^(-(n-2)/4), flat out to 1/eps and ramped to zero in log r
// between 1/eps and 1/eps^2.
RadialTrial hardy_family_state(int n, double eps);
// Rayleigh ratio of the family member against the Hardy constant; passes
// when the ratio is at most 1.1 times the constant.
VerificationReport check_hardy_family(int n, double eps, const CheckOptions& opts = {});
// The formal minimizer |x|^(-(n-2)/2) must make the Dirichlet integral diverge.
VerificationReport check_hardy_divergence(int n, const CheckOptions& opts = {});

struct SamplerOptions {
  double radius = 20.0;
  int samples = 4000;
  std::uint64_t seed = 42;
};

// inf and sup of V - |X|^2 + div X by dense sampling with local refinement.
struct PointwiseRange {
  double inf = 0.0;
  double sup = 0.0;
  bool sup_bounded = true;
};
PointwiseRange pointwise_range(const PotentialFunction& v, const VectorField& field, const SamplerOptions& s);

// Oracle E0(V) for radial V (radial solver) or n <= 3 grids.
double oracle_energy(const PotentialFunction& v, const VectorField* hint_field, const CheckOptions& opts,
                     double* error_estimate = nullptr);

// E0(V) >= inf (V - |X|^2 + div X).
VerificationReport hersch_bound(const PotentialFunction& v, const VectorField& field, const SamplerOptions& s = {},
                                const CheckOptions& opts = {});
// Lambda(X) + inf B <= E0(V) <= Lambda(X) + sup B, with inf and sup of B
// realized by the pointwise range; every trial state must land inside it.
std::vector<VerificationReport> check_prop4_bounds(const PotentialFunction& v, const VectorField& field,
                                                   const std::vector<const ScalarState*>& trials,
                                                   const SamplerOptions& s = {}, const CheckOptions& opts = {});
// J_X(phi_lambda) = lambda^2 J_{X_lambda}(phi).
VerificationReport check_scaling(const GroundState& phi, const VectorField& field, double lambda,
                                 const CheckOptions& opts = {});
// 2 ||grad phi||^2 = k int V |phi|^2 for V homogeneous of degree k.
VerificationReport check_virial(const ScalarState& phi, const PotentialFunction& v, double k,
                                const CheckOptions& opts = {});
// |X| for the bump grows without bound toward the sphere, X is bounded inside,
// and phi vanishes outside while being nonzero inside.
std::vector<VerificationReport> check_bump_counterexample(int n = 3);

// Radial or grid oracle against a closed-form E0.
VerificationReport check_oracle_eigenvalue(std::string id, const PotentialFunction& v, double expected,
                                           double tol, const VectorField* hint_field, const CheckOptions& opts);
VerificationReport check_grid_oracle(int n, double alpha, double half_width, int m, double rel_tol);

// Largest pointwise residual of -Delta phi + V phi - E phi over the ladder.
VerificationReport check_oscillator_ladder(int n, double alpha, int kmax, int points, std::uint64_t seed,
                                           const CheckOptions& opts = {});
VerificationReport check_coulomb_ladder(int n, double alpha, int kmax, int points, std::uint64_t seed,
                                        const CheckOptions& opts = {});

struct SuiteOptions {
  std::vector<std::string> checks;  // empty or {"all"} runs everything
  std::uint64_t seed = 42;
  int trials = 25;
  std::optional<int> n;  // dimension for the Hardy checks; 3 and 4 by default
  double eps = 1e-3;
  CheckOptions check;
};

std::vector<std::string> available_checks();
// Deterministic for a given seed; reports are ordered by check id.
std::vector<VerificationReport> run_suite(const SuiteOptions& opts);

// Seeded Gaussian trials and admissible radial power fields.
struct TrialPair {
  GaussianTrial trial;
  RadialPowerField field;
};
std::vector<TrialPair> random_trial_pairs(int count, std::uint64_t seed);

}  // namespace gsf
