#pragma once

// Analytic synchronization conditions: necessary bounds, Kuramoto critical
// couplings (explicit, implicit, necessary, continuum), algebraic-connectivity
// tests for sparse graphs, and the equilibrium fixed-point solver.
//
// Checkers that take an OscillatorNetwork shift omega to zero mean internally
// (the rotating frame) and record the shift in the report.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "syncnet/models.hpp"
#include "syncnet/torus.hpp"

namespace syncnet {

enum class Verdict { satisfied, violated, inconclusive };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct ConditionReport {
  std::string name;
  double threshold = 0.0;
  double actual = 0.0;
  Verdict verdict = Verdict::inconclusive;
  /// actual and threshold agree to 1e-12 relative.
  bool boundary = false;
  /// gamma_min, gamma_max, r_lower, sync_rate, ...; empty unless satisfied.
  std::map<std::string, double> derived;
  /// Mean of omega removed before evaluating.
  double omega_shift = 0.0;
};

nlohmann::json to_json(const ConditionReport& r);
ConditionReport report_from_json(const nlohmann::json& j);

/// Absolute bound, necessary for a synchronized solution in the closed set
/// Delta_G(gamma): deg_i sin(gamma) >= |omega_i| for every node.
/// Reported as actual = max_i |omega_i| / deg_i against threshold = sin(gamma).
ConditionReport necessary_absolute(const OscillatorNetwork& net, double gamma);

/// Incremental bound: (deg_i + deg_j) sin(gamma) >= |omega_i - omega_j| for all i != j.
/// Reported as actual = max |omega_i - omega_j| / (deg_i + deg_j) against sin(gamma).
ConditionReport necessary_incremental(const OscillatorNetwork& net, double gamma);

/// omega_max - omega_min: Kuramoto networks synchronize from any semicircle for K above it.
double kuramoto_explicit_Kc(std::span<const double> omega);

struct GammaBounds {
  double gamma_min = 0.0;
  double gamma_max = 0.0;
};

/// sin(gamma_min) = sin(gamma_max) = K_c / K with gamma_min <= pi/2 <= gamma_max.
/// ConditionViolated when K <= K_c.
GammaBounds kuramoto_gamma_bounds(double coupling, std::span<const double> omega);

/// Asymptotic order parameter lower bound sqrt((1 + sqrt(1 - (K_c/K)^2)) / 2).
double kuramoto_order_bound(double coupling, std::span<const double> omega);

/// n / (2(n - 1)) * (omega_max - omega_min), below which no Kuramoto network locks.
double kuramoto_necessary_bound(std::span<const double> omega);

/// Report form of the explicit Kuramoto test K > omega_max - omega_min.
ConditionReport kuramoto_check(double coupling, std::span<const double> omega);

struct ImplicitCoupling {
  double coupling = 0.0;  ///< exact critical K for the complete graph
  double u_star = 0.0;
  double residual = 0.0;  ///< consistency equation evaluated at u_star
  /// Every root found in the bracket; more than one flags the result as ambiguous
  /// and `coupling` is the smallest K among them.
  std::vector<double> roots;
  bool ambiguous = false;
};

/// Exact critical coupling of the finite Kuramoto model from the implicit
/// consistency equation in u on (|Omega|_inf, 2|Omega|_inf], Omega = omega - mean.
/// InvalidArgument when all omega are equal; SolverError without a sign change.
ImplicitCoupling implicit_critical_coupling(std::span<const double> omega);

/// h(u) = 2 sum sqrt(1 - (Omega_i/u)^2) - sum 1/sqrt(1 - (Omega_i/u)^2), Omega already centered.
double implicit_coupling_residual(std::span<const double> centered_omega, double u);

/// Continuum limit 2 / (pi g(0)) for a unimodal frequency density g.
double continuum_Kc(double g0);

/// lambda_2(L) > |B_c^T omega|_2 (B_c: complete-graph incidence). When satisfied,
/// derived gamma_min, gamma_max and, for a supplied gamma < pi/2, sync_rate = lambda_2 cos(gamma).
ConditionReport pairwise_spectral_check(const OscillatorNetwork& net, std::optional<double> gamma = std::nullopt);

/// lambda_2(L) > |B^T omega|_2 with the incidence matrix of the graph itself.
/// When satisfied, derived gamma_min = asin(|B^T omega|_2 / lambda_2).
ConditionReport edge_spectral_check(const OscillatorNetwork& net);

enum class Stability { stable, unstable };
std::string to_string(Stability s);

struct Equilibrium {
  PhaseState theta;           ///< canonical representative
  double residual = 0.0;      ///< |omega - coupling(theta)|_2 with centered omega
  std::size_t iterations = 0;
  Stability stability = Stability::unstable;
  bool within_half_pi = false; ///< every edge difference below pi/2
};

/// Damped fixed-point iteration theta <- (1 - alpha) theta + alpha L(B^T theta)^+ omega
/// with L(x) = B diag(a sinc(x)) B^T, from theta = 0, until the residual is below
/// 1e-10 (at most max_iterations). NoEquilibriumFound otherwise.
Equilibrium solve_equilibrium(const OscillatorNetwork& net, double alpha = 0.5,
                              std::size_t max_iterations = 10000);

/// Stable when every edge difference is below pi/2; otherwise stable iff every
/// Jacobian eigenvalue except the structural zero is below -1e-9.
/// InvalidArgument when theta is not close to an equilibrium.
Stability classify_equilibrium(const OscillatorNetwork& net, const PhaseState& theta);

/// mean(omega).
double sync_frequency(std::span<const double> omega);

/// |B^T theta|_2 over graph edges, each difference taken as the signed geodesic one in (-pi, pi].
double edge_difference_norm(const WeightedGraph& graph, const PhaseState& theta);

}  // namespace syncnet
