#include "syncnet/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "syncnet/errors.hpp"
#include "syncnet/graph.hpp"

namespace syncnet {

using std::numbers::pi;

namespace {

constexpr double kBoundaryRel = 1e-12;
constexpr double kStabilityTol = 1e-9;
constexpr double kResidualTol = 1e-10;

bool nearly_equal(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    return a == b;
  }
  return std::abs(a - b) <= kBoundaryRel * std::max({std::abs(a), std::abs(b), 1e-300});
}

void require_omega(std::span<const double> omega, std::size_t min_n, const char* who) {
  if (omega.size() < min_n) {
    throw InvalidArgument(std::string(who) + ": need at least " + std::to_string(min_n) + " frequencies");
  }
  for (double w : omega) {
    if (!std::isfinite(w)) {
      throw InvalidArgument(std::string(who) + ": non-finite frequency");
    }
  }
}

double width(std::span<const double> omega) {
  const auto [lo, hi] = std::minmax_element(omega.begin(), omega.end());
  return *hi - *lo;
}

std::vector<double> centered(std::span<const double> omega, double& shift) {
  shift = sync_frequency(omega);
  std::vector<double> out(omega.begin(), omega.end());
  for (double& w : out) {
    w -= shift;
  }
  return out;
}

void require_gamma(double gamma, const char* who) {
  if (!(gamma >= 0.0 && gamma <= pi / 2.0)) {
    throw InvalidArgument(std::string(who) + ": gamma must lie in [0, pi/2]");
  }
}

void require_connected(const WeightedGraph& g, const char* who) {
  if (!g.is_connected()) {
    throw InvalidArgument(std::string(who) + ": graph is not connected");
  }
}

// Non-strict test actual <= threshold; equality to roundoff counts as satisfied.
void decide_non_strict(ConditionReport& r) {
  r.boundary = nearly_equal(r.actual, r.threshold);
  r.verdict = (r.actual <= r.threshold || r.boundary) ? Verdict::satisfied : Verdict::violated;
}

// Strict test actual > threshold; equality to roundoff is violated, flagged as boundary.
void decide_strict(ConditionReport& r) {
  r.boundary = nearly_equal(r.actual, r.threshold);
  r.verdict = (r.actual > r.threshold && !r.boundary) ? Verdict::satisfied : Verdict::violated;
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

// gamma in [pi/2, pi] with (pi/2) sinc(gamma) = ratio, ratio in [0, 1).
double solve_gamma_max(double ratio) {
  if (ratio <= 0.0) {
    return pi;
  }
  double lo = pi / 2.0;  // (pi/2) sinc = 1 > ratio
  double hi = pi;        // (pi/2) sinc = 0 <= ratio
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) {
      break;
    }
    (0.5 * pi * sinc(mid) > ratio ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double implicit_sum(std::span<const double> omega, double u) {
  double s = 0.0;
  for (double w : omega) {
    const double x = w / u;
    s += std::sqrt(std::max(0.0, 1.0 - x * x));
  }
  return s;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::satisfied:
      return "satisfied";
    case Verdict::violated:
      return "violated";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "satisfied") return Verdict::satisfied;
  if (s == "violated") return Verdict::violated;
  if (s == "inconclusive") return Verdict::inconclusive;
  throw InvalidArgument("unknown verdict '" + s + "'");
}

std::string to_string(Stability s) { return s == Stability::stable ? "stable" : "unstable"; }

nlohmann::json to_json(const ConditionReport& r) {
  auto num = [](double x) -> nlohmann::json {
    if (std::isinf(x)) {
      return x > 0 ? "inf" : "-inf";
    }
    return x;
  };
  nlohmann::json derived = nlohmann::json::object();
  for (const auto& [k, v] : r.derived) {
    derived[k] = num(v);
  }
  return {{"name", r.name},
          {"threshold", num(r.threshold)},
          {"actual", num(r.actual)},
          {"verdict", to_string(r.verdict)},
          {"boundary", r.boundary},
          {"derived", derived},
          {"omega_shift", r.omega_shift}};
}

ConditionReport report_from_json(const nlohmann::json& j) {
  auto num = [](const nlohmann::json& x) {
    if (x.is_string()) {
      const auto s = x.get<std::string>();
      if (s == "inf") return std::numeric_limits<double>::infinity();
      if (s == "-inf") return -std::numeric_limits<double>::infinity();
      throw InvalidArgument("condition report json: bad number '" + s + "'");
    }
    if (!x.is_number()) {
      throw InvalidArgument("condition report json: expected a number");
    }
    return x.get<double>();
  };
  try {
    ConditionReport r;
    r.name = j.at("name").get<std::string>();
    r.threshold = num(j.at("threshold"));
    r.actual = num(j.at("actual"));
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    r.boundary = j.at("boundary").get<bool>();
    for (const auto& [k, v] : j.at("derived").items()) {
      r.derived[k] = num(v);
    }
    r.omega_shift = num(j.at("omega_shift"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("condition report json: ") + e.what());
  }
}

ConditionReport necessary_absolute(const OscillatorNetwork& net, double gamma) {
  require_gamma(gamma, "necessary_absolute");
  ConditionReport r;
  r.name = "necessary_absolute";
  const std::vector<double> w = centered(net.omega(), r.omega_shift);
  const std::vector<double> deg = degrees(net.graph());
  r.threshold = std::sin(gamma);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double need = std::abs(w[i]) == 0.0 ? 0.0 : std::abs(w[i]) / deg[i];
    r.actual = std::max(r.actual, need);
  }
  decide_non_strict(r);
  if (r.verdict == Verdict::satisfied) {
    r.derived["gamma_lower"] = std::asin(std::min(1.0, r.actual));
  }
  return r;
}

ConditionReport necessary_incremental(const OscillatorNetwork& net, double gamma) {
  require_gamma(gamma, "necessary_incremental");
  ConditionReport r;
  r.name = "necessary_incremental";
  const std::vector<double> w = centered(net.omega(), r.omega_shift);
  const std::vector<double> deg = degrees(net.graph());
  r.threshold = std::sin(gamma);
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      const double gap = std::abs(w[i] - w[j]);
      const double need = gap == 0.0 ? 0.0 : gap / (deg[i] + deg[j]);
      r.actual = std::max(r.actual, need);
    }
  }
  decide_non_strict(r);
  if (r.verdict == Verdict::satisfied) {
    r.derived["gamma_lower"] = std::asin(std::min(1.0, r.actual));
  }
  return r;
}

double kuramoto_explicit_Kc(std::span<const double> omega) {
  require_omega(omega, 2, "kuramoto_explicit_Kc");
  return width(omega);
}

GammaBounds kuramoto_gamma_bounds(double coupling, std::span<const double> omega) {
  const double kc = kuramoto_explicit_Kc(omega);
  if (!(coupling > kc) || !(coupling > 0.0)) {
    throw ConditionViolated("kuramoto_gamma_bounds: K must exceed omega_max - omega_min");
  }
  GammaBounds b;
  b.gamma_min = std::asin(kc / coupling);
  b.gamma_max = pi - b.gamma_min;
  return b;
}

double kuramoto_order_bound(double coupling, std::span<const double> omega) {
  const double kc = kuramoto_explicit_Kc(omega);
  if (!(coupling > kc) || !(coupling > 0.0)) {
    throw ConditionViolated("kuramoto_order_bound: K must exceed omega_max - omega_min");
  }
  const double q = kc / coupling;
  return std::sqrt((1.0 + std::sqrt(1.0 - q * q)) / 2.0);
}

double kuramoto_necessary_bound(std::span<const double> omega) {
  require_omega(omega, 2, "kuramoto_necessary_bound");
  const double n = static_cast<double>(omega.size());
  return n / (2.0 * (n - 1.0)) * width(omega);
}

ConditionReport kuramoto_check(double coupling, std::span<const double> omega) {
  if (!std::isfinite(coupling)) {
    throw InvalidArgument("kuramoto_check: non-finite gain");
  }
  ConditionReport r;
  r.name = "kuramoto_explicit";
  r.threshold = kuramoto_explicit_Kc(omega);
  r.actual = coupling;
  r.omega_shift = sync_frequency(omega);
  decide_strict(r);
  if (r.verdict == Verdict::satisfied) {
    const GammaBounds b = kuramoto_gamma_bounds(coupling, omega);
    r.derived["gamma_min"] = b.gamma_min;
    r.derived["gamma_max"] = b.gamma_max;
    r.derived["r_lower"] = kuramoto_order_bound(coupling, omega);
  }
  return r;
}

double implicit_coupling_residual(std::span<const double> centered_omega, double u) {
  double pos = 0.0;
  double neg = 0.0;
  for (double w : centered_omega) {
    const double x = w / u;
    const double c = std::sqrt(std::max(0.0, 1.0 - x * x));
    pos += c;
    neg += 1.0 / c;
  }
  return 2.0 * pos - neg;
}

ImplicitCoupling implicit_critical_coupling(std::span<const double> omega) {
  require_omega(omega, 2, "implicit_critical_coupling");
  double shift = 0.0;
  const std::vector<double> w = centered(omega, shift);
  double m = 0.0;
  for (double x : w) {
    m = std::max(m, std::abs(x));
  }
  const double scale = std::max(std::abs(shift), m);
  if (m <= 1e-14 * scale || m == 0.0) {
    throw InvalidArgument("implicit_critical_coupling: all frequencies are equal");
  }

  // h is -inf at u = m and positive at u = 2m. Scan t = u/m - 1 on a log grid
  // down to 1e-14 so that roots squeezed against the singular end are seen.
  constexpr int kGrid = 400;
  constexpr double kTMin = 1e-14;
  auto u_of = [&](int k) { return m * (1.0 + kTMin * std::pow(1.0 / kTMin, static_cast<double>(k) / kGrid)); };
  auto h = [&](double u) { return implicit_coupling_residual(w, u); };

  ImplicitCoupling out;
  double u_prev = u_of(0);
  double h_prev = h(u_prev);
  for (int k = 1; k <= kGrid; ++k) {
    const double u_next = k == kGrid ? 2.0 * m : u_of(k);
    const double h_next = h(u_next);
    if ((h_prev < 0.0) != (h_next < 0.0)) {
      double lo = u_prev;
      double hi = u_next;
      const bool rising = h_prev < 0.0;
      for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
          break;
        }
        ((h(mid) < 0.0) == rising ? lo : hi) = mid;
      }
      out.roots.push_back(std::abs(h(lo)) <= std::abs(h(hi)) ? lo : hi);
    }
    u_prev = u_next;
    h_prev = h_next;
  }
  if (out.roots.empty()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "implicit_critical_coupling: no sign change on (" << m << ", " << 2.0 * m << "]; h(left) = " << h(u_of(0))
        << ", h(right) = " << h(2.0 * m);
    throw SolverError(msg.str());
  }
  out.ambiguous = out.roots.size() > 1;
  const double n = static_cast<double>(w.size());
  out.coupling = std::numeric_limits<double>::infinity();
  for (double u : out.roots) {
    const double k = n * u / implicit_sum(w, u);
    if (k < out.coupling) {
      out.coupling = k;
      out.u_star = u;
    }
  }
  out.residual = h(out.u_star);
  return out;
}

double continuum_Kc(double g0) {
  if (!(g0 > 0.0) || !std::isfinite(g0)) {
    throw InvalidArgument("continuum_Kc: g(0) must be positive and finite");
  }
  return 2.0 / (pi * g0);
}

ConditionReport pairwise_spectral_check(const OscillatorNetwork& net, std::optional<double> gamma) {
  require_connected(net.graph(), "pairwise_spectral_check");
  ConditionReport r;
  r.name = "pairwise_spectral";
  const std::vector<double> w = centered(net.omega(), r.omega_shift);
  // |B_c^T w|^2 = sum_{i<j} (w_i - w_j)^2 = n sum_i w_i^2 for zero-mean w.
  double ss = 0.0;
  for (double x : w) {
    ss += x * x;
  }
  r.threshold = std::sqrt(static_cast<double>(w.size()) * ss);
  r.actual = algebraic_connectivity(net.graph());
  decide_strict(r);
  if (r.verdict == Verdict::satisfied) {
    const double ratio = r.threshold / r.actual;
    r.derived["gamma_min"] = std::asin(ratio);
    r.derived["gamma_max"] = solve_gamma_max(ratio);
    if (gamma) {
      if (!(*gamma >= 0.0 && *gamma < pi / 2.0)) {
        throw InvalidArgument("pairwise_spectral_check: rate angle must lie in [0, pi/2)");
      }
      r.derived["sync_rate"] = r.actual * std::cos(*gamma);
    }
  }
  return r;
}

ConditionReport edge_spectral_check(const OscillatorNetwork& net) {
  require_connected(net.graph(), "edge_spectral_check");
  ConditionReport r;
  r.name = "edge_spectral";
  const std::vector<double> w = centered(net.omega(), r.omega_shift);
  double ss = 0.0;
  for (const Edge& e : net.graph().edges()) {
    const double d = w[e.j] - w[e.i];
    ss += d * d;
  }
  r.threshold = std::sqrt(ss);
  r.actual = algebraic_connectivity(net.graph());
  decide_strict(r);
  if (r.verdict == Verdict::satisfied) {
    r.derived["gamma_min"] = std::asin(r.threshold / r.actual);
  }
  return r;
}

double edge_difference_norm(const WeightedGraph& graph, const PhaseState& theta) {
  if (graph.node_count() != theta.size()) {
    throw InvalidArgument("edge_difference_norm: graph and state sizes differ");
  }
  double ss = 0.0;
  for (const Edge& e : graph.edges()) {
    const double d = angular_difference(theta[e.i], theta[e.j]);
    ss += d * d;
  }
  return std::sqrt(ss);
}

namespace {

bool within_half_pi(const WeightedGraph& g, const PhaseState& theta) {
  for (const Edge& e : g.edges()) {
    if (!(geodesic_distance(theta[e.i], theta[e.j]) < pi / 2.0)) {
      return false;
    }
  }
  return true;
}

}  // namespace

Stability classify_equilibrium(const OscillatorNetwork& net, const PhaseState& theta) {
  if (theta.size() != net.size()) {
    throw InvalidArgument("classify_equilibrium: state size does not match the network");
  }
  const std::vector<double> rhs = coupled_rhs(net, theta);
  const double mean = sync_frequency(rhs);
  double worst = 0.0;
  double scale = 1.0;
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    worst = std::max(worst, std::abs(rhs[i] - mean));
    scale = std::max(scale, std::abs(net.omega()[i]));
  }
  if (worst > 1e-6 * scale) {
    throw InvalidArgument("classify_equilibrium: state is not close to an equilibrium");
  }
  if (within_half_pi(net.graph(), theta)) {
    return Stability::stable;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobian(net, theta), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw SolverError("classify_equilibrium: eigendecomposition failed");
  }
  const Eigen::VectorXd& ev = solver.eigenvalues();
  const Eigen::Index n = ev.size();
  if (n < 2) {
    return Stability::stable;
  }
  // Ascending order: the structural zero must be the top eigenvalue and
  // everything below it strictly negative.
  const bool stable = std::abs(ev(n - 1)) <= kStabilityTol && ev(n - 2) < -kStabilityTol;
  return stable ? Stability::stable : Stability::unstable;
}

Equilibrium solve_equilibrium(const OscillatorNetwork& net, double alpha, std::size_t max_iterations) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("solve_equilibrium: damping must lie in (0, 1]");
  }
  require_connected(net.graph(), "solve_equilibrium");
  double shift = 0.0;
  const std::vector<double> w = centered(net.omega(), shift);
  const OscillatorNetwork frame(net.graph(), w);
  const std::size_t n = w.size();
  const auto& edges = net.graph().edges();
  const Eigen::Map<const Eigen::VectorXd> omega(w.data(), static_cast<Eigen::Index>(n));
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  auto residual_of = [&](const Eigen::VectorXd& th) {
    const std::vector<double> flow = coupling_flow(net.graph(), std::span<const double>(th.data(), n));
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ss += (w[i] - flow[i]) * (w[i] - flow[i]);
    }
    return std::sqrt(ss);
  };

  double residual = residual_of(theta);
  std::size_t it = 0;
  while (residual >= kResidualTol && it < max_iterations) {
    // L(B^T theta) with sinc weights; adding the projector onto 1 makes it
    // invertible on the whole space while leaving the zero-mean solution unchanged.
    Eigen::MatrixXd l = ones;
    for (const Edge& e : edges) {
      const double c = e.weight * sinc(theta(e.j) - theta(e.i));
      l(e.i, e.i) += c;
      l(e.j, e.j) += c;
      l(e.i, e.j) -= c;
      l(e.j, e.i) -= c;
    }
    const Eigen::VectorXd target = l.partialPivLu().solve(omega);
    if (!target.allFinite()) {
      throw NoEquilibriumFound("solve_equilibrium: singular fixed-point operator at iteration " +
                               std::to_string(it));
    }
    theta = (1.0 - alpha) * theta + alpha * target;
    residual = residual_of(theta);
    ++it;
  }
  if (!(residual < kResidualTol)) {
    throw NoEquilibriumFound("solve_equilibrium: residual " + std::to_string(residual) + " after " +
                             std::to_string(it) + " iterations");
  }
  Equilibrium eq;
  const PhaseState state(std::span<const double>(theta.data(), n));
  eq.theta = canonical_representative(state);
  eq.residual = residual;
  eq.iterations = it;
  eq.within_half_pi = within_half_pi(net.graph(), state);
  eq.stability = classify_equilibrium(frame, state);
  return eq;
}

double sync_frequency(std::span<const double> omega) {
  if (omega.empty()) {
    throw InvalidArgument("sync_frequency: empty frequency vector");
  }
  return std::accumulate(omega.begin(), omega.end(), 0.0) / static_cast<double>(omega.size());
}

}  // namespace syncnet
