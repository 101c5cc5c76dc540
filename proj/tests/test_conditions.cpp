#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "support.hpp"
#include "syncnet/conditions.hpp"
#include "syncnet/errors.hpp"
#include "syncnet/graph.hpp"
#include "syncnet/integrate.hpp"
#include "syncnet/models.hpp"
#include "syncnet/torus.hpp"

using namespace syncnet;
using doctest::Approx;
using testing_support::random_connected_graph;
using testing_support::zero_mean;
constexpr double pi = std::numbers::pi;

namespace {

const WeightedGraph& unit_edge() {
  static const WeightedGraph g(2, {{0, 1, 1.0}});
  return g;
}

// sqrt(sum over edges (w_j - w_i)^2) straight from the incidence matrix.
double incidence_norm(const Eigen::MatrixXd& B, const std::vector<double>& w) {
  const Eigen::Map<const Eigen::VectorXd> x(w.data(), static_cast<Eigen::Index>(w.size()));
  return (B.transpose() * x).norm();
}

// Returns after a perturbed run from theta: true when the canonical
// representatives end within 1e-4 of each other.
bool returns_after_perturbation(const OscillatorNetwork& net, const PhaseState& theta, Rng& rng) {
  std::vector<double> start(theta.values().begin(), theta.values().end());
  for (double& x : start) x += rng.uniform(-1e-3, 1e-3);
  const Trajectory t = integrate(oscillator_model(net.centered()), PhaseState(start), IntegratorConfig{1e-2, 200.0, 1000});
  return max_geodesic_distance(canonical_representative(t.states.back()), canonical_representative(theta)) < 1e-4;
}

}  // namespace

TEST_CASE("verdict names") {
  for (Verdict v : {Verdict::satisfied, Verdict::violated, Verdict::inconclusive}) {
    CHECK(verdict_from_string(to_string(v)) == v);
  }
  CHECK_THROWS_AS(verdict_from_string("maybe"), InvalidArgument);
}

TEST_CASE("necessary bounds") {
  const WeightedGraph star = star_graph(3, 1.0);
  // Node 1 has degree 1 and, after centering, |omega| = 2.
  const OscillatorNetwork leaf(star, {0.0, 2.0, -2.0});
  CHECK(necessary_absolute(leaf, pi / 2).verdict == Verdict::violated);

  const OscillatorNetwork still(ring_graph(5, 1.0), std::vector<double>(5, 0.0));
  for (double gamma : {0.0, 0.3, pi / 2}) {
    CHECK(necessary_absolute(still, gamma).verdict == Verdict::satisfied);
    CHECK(necessary_incremental(still, gamma).verdict == Verdict::satisfied);
  }
  const OscillatorNetwork same(ring_graph(5, 1.0), std::vector<double>(5, 0.7));
  CHECK(necessary_incremental(same, 0.2).verdict == Verdict::satisfied);
  CHECK(necessary_absolute(same, 0.2).omega_shift == Approx(0.7));

  const OscillatorNetwork pair(unit_edge(), {-1.0, 1.0});
  const ConditionReport abs = necessary_absolute(pair, pi / 2);
  CHECK(abs.verdict == Verdict::satisfied);
  CHECK(abs.boundary);
  const ConditionReport inc = necessary_incremental(pair, pi / 2);
  CHECK(inc.verdict == Verdict::satisfied);
  CHECK(inc.boundary);
  CHECK(inc.derived.at("gamma_lower") == Approx(pi / 2));
  CHECK(necessary_incremental(OscillatorNetwork(unit_edge(), {-3.0, 3.0}), pi / 2).verdict == Verdict::violated);

  CHECK_THROWS_AS(necessary_absolute(pair, 2.0), InvalidArgument);
  CHECK_THROWS_AS(necessary_absolute(pair, -0.1), InvalidArgument);

  SUBCASE("report values match the product form") {
    Rng rng(41);
    for (int k = 0; k < 200; ++k) {
      const auto n = 2 + static_cast<std::size_t>(rng.uniform() * 10);
      const OscillatorNetwork net(random_connected_graph(rng, n, 0.3), zero_mean(rng.uniform_vector(n, -2, 2)));
      const double gamma = rng.uniform(0, pi / 2);
      const std::vector<double> deg = degrees(net.graph());
      bool abs_ok = true;
      bool inc_ok = true;
      for (std::size_t i = 0; i < n; ++i) {
        abs_ok = abs_ok && deg[i] * std::sin(gamma) >= std::abs(net.omega()[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
          inc_ok = inc_ok && (deg[i] + deg[j]) * std::sin(gamma) >= std::abs(net.omega()[i] - net.omega()[j]);
        }
      }
      CHECK((necessary_absolute(net, gamma).verdict == Verdict::satisfied) == abs_ok);
      CHECK((necessary_incremental(net, gamma).verdict == Verdict::satisfied) == inc_ok);
    }
  }
}

TEST_CASE("Kuramoto explicit bounds") {
  const std::vector<double> pair{-1.0, 1.0};
  CHECK(kuramoto_explicit_Kc(pair) == 2.0);
  CHECK(kuramoto_explicit_Kc(std::vector<double>(4, 0.3)) == 0.0);
  Rng rng(42);
  CHECK(kuramoto_explicit_Kc(rng.uniform_vector(5000, -1, 1)) == Approx(2.0).epsilon(1e-2));

  const GammaBounds g2 = kuramoto_gamma_bounds(4.0, pair);
  CHECK(g2.gamma_min == Approx(pi / 6));
  CHECK(g2.gamma_max == Approx(5 * pi / 6));
  const GammaBounds big = kuramoto_gamma_bounds(1e9, pair);
  CHECK(big.gamma_min < 1e-8);
  CHECK(big.gamma_max > pi - 1e-8);
  const GammaBounds edge = kuramoto_gamma_bounds(2.0 * (1 + 1e-9), pair);
  CHECK(edge.gamma_min == Approx(pi / 2).epsilon(1e-3));
  CHECK(edge.gamma_max == Approx(pi / 2).epsilon(1e-3));
  CHECK_THROWS_AS(kuramoto_gamma_bounds(2.0, pair), ConditionViolated);
  CHECK_THROWS_AS(kuramoto_gamma_bounds(1.0, pair), ConditionViolated);

  CHECK(kuramoto_order_bound(4.0, pair) == Approx(std::cos(pi / 12)));
  CHECK(kuramoto_order_bound(1e12, pair) == Approx(1.0));
  for (int k = 0; k < 100; ++k) {
    const double K = 2.0 * (1.0 + rng.uniform(1e-6, 20.0));
    CHECK(kuramoto_order_bound(K, pair) == Approx(std::cos(kuramoto_gamma_bounds(K, pair).gamma_min / 2)));
  }

  CHECK(kuramoto_necessary_bound(pair) == Approx(2.0));
  CHECK(kuramoto_necessary_bound(std::vector<double>(3, 1.0)) == 0.0);
  std::vector<double> wide(10000, 0.0);
  wide.front() = -1.0;
  wide.back() = 1.0;
  CHECK(kuramoto_necessary_bound(wide) == Approx(1.0).epsilon(1e-3));

  const ConditionReport at = kuramoto_check(2.0, pair);
  CHECK(at.name == "kuramoto_explicit");
  CHECK(at.verdict == Verdict::violated);
  CHECK(at.boundary);
  const ConditionReport above = kuramoto_check(4.0, pair);
  CHECK(above.verdict == Verdict::satisfied);
  CHECK(above.derived.at("gamma_min") == Approx(pi / 6));
  CHECK(above.derived.at("r_lower") == Approx(std::cos(pi / 12)));
  CHECK(kuramoto_check(1.0, pair).derived.empty());
}

TEST_CASE("implicit critical coupling") {
  const std::vector<double> pair{-1.0, 1.0};
  const ImplicitCoupling two = implicit_critical_coupling(pair);
  CHECK(two.u_star == Approx(std::sqrt(2.0)));
  CHECK(two.coupling == Approx(2.0));
  CHECK(std::abs(two.residual) < 1e-8);
  CHECK_FALSE(two.ambiguous);

  for (std::size_t n : {4u, 10u, 50u}) {
    std::vector<double> bipolar(n);
    for (std::size_t i = 0; i < n; ++i) bipolar[i] = (i % 2 == 0) ? 1.0 : -1.0;
    CHECK(implicit_critical_coupling(bipolar).coupling == Approx(2.0).epsilon(1e-6));
  }

  Rng rng(43);
  CHECK(implicit_critical_coupling(rng.uniform_vector(20000, -1, 1)).coupling == Approx(4 / pi).epsilon(0.03));
  CHECK_THROWS_AS(implicit_critical_coupling(std::vector<double>(3, 0.5)), InvalidArgument);

  SUBCASE("ordering, residual and scale covariance") {
    for (int k = 0; k < 5000; ++k) {
      const auto n = 2 + static_cast<std::size_t>(rng.uniform() * 49);
      const std::vector<double> omega = rng.uniform_vector(n, -1, 1);
      const ImplicitCoupling ic = implicit_critical_coupling(omega);
      const double slack = 1e-9 * std::max(1.0, kuramoto_explicit_Kc(omega));
      CHECK(kuramoto_necessary_bound(omega) <= ic.coupling + slack);
      CHECK(ic.coupling <= kuramoto_explicit_Kc(omega) + slack);
      CHECK(std::abs(ic.residual) < 1e-8);
      if (k % 50 == 0) {
        const double c = rng.uniform(0.1, 10.0);
        std::vector<double> scaled = omega;
        for (double& w : scaled) w *= c;
        CHECK(implicit_critical_coupling(scaled).coupling == Approx(c * ic.coupling).epsilon(1e-9));
      }
    }
  }

  SUBCASE("the root is a stationary point of K(u) = n u / S(u)") {
    const std::vector<double> omega = zero_mean(rng.uniform_vector(12, -1, 1));
    const ImplicitCoupling ic = implicit_critical_coupling(omega);
    const auto K = [&](double u) {
      double s = 0.0;
      for (double w : omega) s += std::sqrt(1.0 - (w / u) * (w / u));
      return static_cast<double>(omega.size()) * u / s;
    };
    CHECK(K(ic.u_star) == Approx(ic.coupling).epsilon(1e-12));
    const double h = 1e-4 * ic.u_star;
    CHECK(std::abs(K(ic.u_star + h) - K(ic.u_star - h)) / (2 * h) < 1e-4);
  }
}

TEST_CASE("continuum critical coupling") {
  CHECK(continuum_Kc(0.5) == Approx(4 / pi));
  CHECK(continuum_Kc(2 / pi) == Approx(1.0));
  CHECK(continuum_Kc(1e12) < 1e-11);
  CHECK_THROWS_AS(continuum_Kc(0.0), InvalidArgument);
  CHECK_THROWS_AS(continuum_Kc(-1.0), InvalidArgument);
}

TEST_CASE("spectral conditions") {
  const OscillatorNetwork idle(ring_graph(6, 1.0), std::vector<double>(6, 0.0));
  const ConditionReport p0 = pairwise_spectral_check(idle);
  CHECK(p0.verdict == Verdict::satisfied);
  CHECK(p0.derived.at("gamma_min") == Approx(0.0).scale(1.0));
  CHECK(p0.derived.at("gamma_max") == Approx(pi));
  const ConditionReport e0 = edge_spectral_check(idle);
  CHECK(e0.verdict == Verdict::satisfied);
  CHECK(e0.derived.at("gamma_min") == Approx(0.0).scale(1.0));

  for (double a : {0.5, 0.999, 1.001, 3.0}) {
    const OscillatorNetwork pair(WeightedGraph(2, {{0, 1, a}}), {-1.0, 1.0});
    const Verdict want = a > 1.0 ? Verdict::satisfied : Verdict::violated;
    CHECK(pairwise_spectral_check(pair).verdict == want);
    CHECK(edge_spectral_check(pair).verdict == want);
    CHECK(pairwise_spectral_check(pair).threshold == Approx(2.0));
    CHECK(edge_spectral_check(pair).threshold == Approx(2.0));
  }
  const OscillatorNetwork tie(unit_edge(), {-1.0, 1.0});
  const ConditionReport tp = pairwise_spectral_check(tie);
  CHECK(tp.verdict == Verdict::violated);
  CHECK(tp.boundary);
  CHECK(edge_spectral_check(tie).boundary);

  SUBCASE("gamma_max solves (pi/2) sinc(gamma) = ratio and the rate uses cos(gamma)") {
    const OscillatorNetwork net(complete_graph(4, 1.0), {-0.3, 0.1, 0.4, -0.2});
    const ConditionReport r = pairwise_spectral_check(net, 0.4);
    REQUIRE(r.verdict == Verdict::satisfied);
    const double ratio = r.threshold / r.actual;
    const double gmax = r.derived.at("gamma_max");
    CHECK(pi / 2 * std::sin(gmax) / gmax == Approx(ratio).epsilon(1e-10));
    CHECK(gmax > pi / 2);
    CHECK(r.derived.at("gamma_min") == Approx(std::asin(ratio)));
    CHECK(r.derived.at("sync_rate") == Approx(r.actual * std::cos(0.4)));
  }

  SUBCASE("thresholds against incidence-matrix oracles") {
    Rng rng(44);
    for (int k = 0; k < 200; ++k) {
      const auto n = 2 + static_cast<std::size_t>(rng.uniform() * 14);
      const OscillatorNetwork net(random_connected_graph(rng, n, 0.3), rng.uniform_vector(n, -1, 1));
      const std::vector<double> w = zero_mean(net.omega());
      const ConditionReport p = pairwise_spectral_check(net);
      const ConditionReport e = edge_spectral_check(net);
      CHECK(p.threshold == Approx(incidence_norm(complete_incidence(n), w)).epsilon(1e-10));
      CHECK(e.threshold == Approx(incidence_norm(incidence(net.graph()), w)).epsilon(1e-10));
      CHECK(e.threshold <= p.threshold + 1e-12);
      CHECK(p.actual == Approx(algebraic_connectivity(net.graph())));
    }
  }

  CHECK_THROWS_AS(pairwise_spectral_check(OscillatorNetwork(WeightedGraph(3, {{0, 1, 1.0}}), {0, 0, 0})),
                  InvalidArgument);
  CHECK_THROWS_AS(edge_spectral_check(OscillatorNetwork(WeightedGraph(3, {{0, 1, 1.0}}), {0, 0, 0})),
                  InvalidArgument);
}

TEST_CASE("condition report JSON") {
  ConditionReport r = kuramoto_check(4.0, std::vector<double>{-1.0, 1.0});
  ConditionReport back = report_from_json(to_json(r));
  CHECK(back.name == r.name);
  CHECK(back.threshold == r.threshold);
  CHECK(back.actual == r.actual);
  CHECK(back.verdict == r.verdict);
  CHECK(back.boundary == r.boundary);
  CHECK(back.derived == r.derived);
  CHECK(back.omega_shift == r.omega_shift);

  r.actual = std::numeric_limits<double>::infinity();
  r.derived["gamma_max"] = -std::numeric_limits<double>::infinity();
  back = report_from_json(to_json(r));
  CHECK(std::isinf(back.actual));
  CHECK(back.actual > 0);
  CHECK(back.derived.at("gamma_max") < 0);
  CHECK(std::isinf(back.derived.at("gamma_max")));
  CHECK_THROWS_AS(report_from_json(nlohmann::json::parse(R"({"name": 3})")), InvalidArgument);
}

TEST_CASE("equilibrium solver") {
  const OscillatorNetwork pair(WeightedGraph(2, {{0, 1, 1.25}}), {-1.0, 1.0});
  const Equilibrium eq = solve_equilibrium(pair);
  const double delta = angular_difference(eq.theta[0], eq.theta[1]);
  CHECK(delta == Approx(std::asin(0.8)).epsilon(1e-9));
  CHECK(eq.stability == Stability::stable);
  CHECK(eq.within_half_pi);
  CHECK(eq.residual < 1e-9);

  const OscillatorNetwork idle(ring_graph(5, 1.0), std::vector<double>(5, 0.0));
  const Equilibrium zero = solve_equilibrium(idle);
  for (double x : zero.theta.values()) CHECK(geodesic_distance(Angle(x), Angle(0)) < 1e-12);
  CHECK(zero.stability == Stability::stable);

  CHECK_THROWS_AS(solve_equilibrium(pair, 0.0), InvalidArgument);
  CHECK_THROWS_AS(solve_equilibrium(pair, 1.5), InvalidArgument);
  CHECK_THROWS_AS(solve_equilibrium(OscillatorNetwork(WeightedGraph(2, {{0, 1, 0.5}}), {-1.0, 1.0})), NumericalError);

  SUBCASE("guarantee under the edge spectral condition, and necessary-bound consistency") {
    Rng rng(45);
    int satisfied = 0;
    for (int k = 0; k < 200; ++k) {
      const auto n = 2 + static_cast<std::size_t>(rng.uniform() * 11);
      const WeightedGraph g = random_connected_graph(rng, n, 0.3);
      std::vector<double> w = zero_mean(rng.uniform_vector(n, -1, 1));
      const double lambda2 = algebraic_connectivity(g);
      const double scale = lambda2 / (rng.uniform(1.02, 3.0) * incidence_norm(incidence(g), w));
      for (double& x : w) x *= scale;
      const OscillatorNetwork net(g, w);
      const ConditionReport rep = edge_spectral_check(net);
      REQUIRE(rep.verdict == Verdict::satisfied);
      ++satisfied;
      const Equilibrium e = solve_equilibrium(net);
      CHECK(e.residual < 1e-10);
      CHECK(edge_difference_norm(g, e.theta) <= rep.derived.at("gamma_min") + 1e-6);
      CHECK(e.stability == Stability::stable);
      CHECK(e.within_half_pi);
      const double gamma = std::min(pi / 2, max_edge_distance(e.theta, g) + 1e-9);
      CHECK(necessary_absolute(net, gamma).verdict == Verdict::satisfied);
      CHECK(necessary_incremental(net, gamma).verdict == Verdict::satisfied);
    }
    CHECK(satisfied == 200);
  }
}

TEST_CASE("equilibrium classification") {
  const OscillatorNetwork pair(WeightedGraph(2, {{0, 1, 1.25}}), {-1.0, 1.0});
  CHECK(classify_equilibrium(pair, PhaseState{0.0, std::asin(0.8)}) == Stability::stable);
  CHECK(classify_equilibrium(pair, PhaseState{0.0, pi - std::asin(0.8)}) == Stability::unstable);
  CHECK_THROWS_AS(classify_equilibrium(pair, PhaseState{0.0, 0.3}), InvalidArgument);
  CHECK_THROWS_AS(classify_equilibrium(pair, PhaseState{0.0, 0.3, 0.1}), InvalidArgument);

  Rng rng(46);
  for (int k = 0; k < 20; ++k) {
    const auto n = 2 + static_cast<std::size_t>(rng.uniform() * 8);
    const OscillatorNetwork idle(random_connected_graph(rng, n, 0.4), std::vector<double>(n, 0.0));
    CHECK(classify_equilibrium(idle, PhaseState(std::vector<double>(n, rng.uniform(0, kTwoPi)))) == Stability::stable);
  }

  SUBCASE("agrees with perturbed simulation") {
    struct Case {
      OscillatorNetwork net;
      PhaseState theta;
    };
    std::vector<Case> cases;
    cases.push_back({pair, PhaseState{0.0, std::asin(0.8)}});
    cases.push_back({pair, PhaseState{0.0, pi - std::asin(0.8)}});
    // Twisted states on a ring of five: winding one has edge differences 2pi/5,
    // winding two has 4pi/5.
    const OscillatorNetwork ring5(ring_graph(5, 1.0), std::vector<double>(5, 0.0));
    for (int q : {1, 2}) {
      std::vector<double> twisted(5);
      for (std::size_t i = 0; i < 5; ++i) twisted[i] = q * kTwoPi * static_cast<double>(i) / 5.0;
      cases.push_back({ring5, PhaseState(twisted)});
    }
    // Stable locked states found by the solver on small random networks.
    for (int k = 0; k < 4; ++k) {
      const auto n = 3 + static_cast<std::size_t>(rng.uniform() * 4);
      const WeightedGraph g = random_connected_graph(rng, n, 0.5);
      std::vector<double> w = zero_mean(rng.uniform_vector(n, -1, 1));
      const double scale = algebraic_connectivity(g) / (1.5 * incidence_norm(incidence(g), w));
      for (double& x : w) x *= scale;
      const OscillatorNetwork net(g, w);
      cases.push_back({net, solve_equilibrium(net).theta});
    }
    int stable = 0;
    int unstable = 0;
    for (const Case& c : cases) {
      const Stability s = classify_equilibrium(c.net, c.theta);
      (s == Stability::stable ? stable : unstable) += 1;
      CHECK((s == Stability::stable) == returns_after_perturbation(c.net, c.theta, rng));
    }
    CHECK(stable >= 3);
    CHECK(unstable >= 2);
  }
}

TEST_CASE("small helpers") {
  CHECK(sync_frequency(std::vector<double>{1, 2, 3}) == Approx(2.0));
  CHECK(sync_frequency(std::vector<double>{-1, 0.5, 0.5}) == Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(sync_frequency(std::vector<double>{}), InvalidArgument);

  const WeightedGraph path = path_graph(3, 1.0);
  CHECK(edge_difference_norm(path, PhaseState{0.0, 0.3, 0.7}) == Approx(std::hypot(0.3, 0.4)));
  CHECK(edge_difference_norm(path, PhaseState{6.2, 0.1, 0.1}) == Approx(0.1 + kTwoPi - 6.2));
}
