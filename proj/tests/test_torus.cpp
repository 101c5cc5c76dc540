#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "support.hpp"
#include "syncnet/errors.hpp"
#include "syncnet/graph.hpp"
#include "syncnet/torus.hpp"

using namespace syncnet;
using doctest::Approx;
constexpr double pi = std::numbers::pi;

namespace {

// Shortest containing arc by trying every angle as the arc's start: the arc
// from theta_k counter-clockwise must reach every other angle.
double brute_force_arc(const PhaseState& theta) {
  double best = kTwoPi;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    double reach = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      reach = std::max(reach, wrap_angle(theta[i].value() - theta[k].value()));
    }
    best = std::min(best, reach);
  }
  return best;
}

PhaseState random_state(Rng& rng, std::size_t n, double spread) {
  const double start = rng.uniform(0.0, kTwoPi);
  std::vector<double> v(n);
  for (double& x : v) x = start + rng.uniform(0.0, spread);
  return PhaseState(v);
}

}  // namespace

TEST_CASE("wrap_angle maps onto [0, 2pi)") {
  CHECK(wrap_angle(kTwoPi + 0.5) == Approx(0.5));
  CHECK(wrap_angle(-0.5) == Approx(kTwoPi - 0.5));
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(kTwoPi) == 0.0);
  CHECK(wrap_angle(-1e-300) < kTwoPi);
  CHECK_THROWS_AS(wrap_angle(std::nan("")), InvalidArgument);
  CHECK_THROWS_AS(wrap_angle(INFINITY), InvalidArgument);
  Rng rng(1);
  for (int k = 0; k < 1000; ++k) {
    const double w = wrap_angle(rng.uniform(-1e3, 1e3));
    CHECK(w >= 0.0);
    CHECK(w < kTwoPi);
  }
}

TEST_CASE("geodesic distance and signed difference") {
  CHECK(geodesic_distance(Angle(0), Angle(pi)) == Approx(pi));
  CHECK(geodesic_distance(Angle(0.1), Angle(kTwoPi - 0.1)) == Approx(0.2));
  CHECK(geodesic_distance(Angle(1.0), Angle(1.0)) == 0.0);
  CHECK(angular_difference(Angle(6.0), Angle(0.5)) == Approx(0.5 + kTwoPi - 6.0));
  CHECK(angular_difference(Angle(0.5), Angle(0.2)) == Approx(-0.3));
  CHECK(angular_difference(Angle(0), Angle(pi)) == Approx(pi));

  Rng rng(2);
  for (int k = 0; k < 1000; ++k) {
    const Angle a(rng.uniform(0, kTwoPi));
    const Angle b(rng.uniform(0, kTwoPi));
    const double d = geodesic_distance(a, b);
    CHECK(d == geodesic_distance(b, a));
    CHECK(d >= 0.0);
    CHECK(d <= pi);
    CHECK(std::abs(angular_difference(a, b)) == Approx(d));
  }
}

TEST_CASE("shortest containing arc") {
  CHECK(shortest_arc_length(PhaseState{0, pi / 2, pi}) == Approx(pi));
  CHECK(shortest_arc_length(PhaseState{0, 2 * pi / 3, 4 * pi / 3}) == Approx(4 * pi / 3));
  CHECK(shortest_arc_length(PhaseState{1.3, 1.3, 1.3}) == 0.0);
  CHECK(shortest_arc_length(PhaseState{0.2}) == 0.0);
  CHECK(shortest_arc_length(PhaseState{6.2, 0.1}) == Approx(0.1 + kTwoPi - 6.2));

  SUBCASE("matches the brute-force scan over arc starts") {
    Rng rng(3);
    for (int k = 0; k < 500; ++k) {
      const auto n = 1 + static_cast<std::size_t>(rng.uniform() * 12);
      const PhaseState theta = random_state(rng, n, rng.uniform(0.0, kTwoPi));
      CHECK(shortest_arc_length(theta) == Approx(brute_force_arc(theta)).epsilon(1e-12));
    }
  }

  SUBCASE("arc set membership") {
    CHECK(in_arc_set(PhaseState{0, 0.3}, 0.3));
    CHECK_FALSE(in_arc_set(PhaseState{0, pi}, pi - 0.01));
    CHECK(in_arc_set(PhaseState{0}, 0.0));
  }

  SUBCASE("containing arc covers every angle") {
    Rng rng(4);
    for (int k = 0; k < 200; ++k) {
      const PhaseState theta = random_state(rng, 7, 2.0);
      const ContainingArc arc = containing_arc(theta);
      for (std::size_t i = 0; i < theta.size(); ++i) {
        CHECK(wrap_angle(theta[i].value() - arc.start) <= arc.length + 1e-12);
      }
    }
  }
}

TEST_CASE("max edge distance") {
  const PhaseState theta{0, pi / 4, pi / 2};
  CHECK(max_edge_distance(theta, path_graph(3, 1.0)) == Approx(pi / 4));
  CHECK(max_edge_distance(theta, complete_graph(3, 1.0)) == Approx(pi / 2));
  CHECK(max_edge_distance(PhaseState{2, 2, 2}, ring_graph(3, 1.0)) == 0.0);
}

TEST_CASE("order parameter") {
  const OrderParameter sync = order_parameter(PhaseState{0, 0, 0});
  CHECK(sync.r == Approx(1.0));
  CHECK(sync.psi_defined);
  CHECK(sync.psi.value() == Approx(0.0));

  const OrderParameter splay4 = order_parameter(PhaseState{0, pi / 2, pi, 3 * pi / 2});
  CHECK(splay4.r < 1e-12);
  CHECK_FALSE(splay4.psi_defined);

  const OrderParameter two = order_parameter(PhaseState{0, pi / 2});
  CHECK(two.r == Approx(std::sqrt(2.0) / 2));
  CHECK(two.psi.value() == Approx(pi / 4));

  SUBCASE("agrees with the complex mean and is rotation invariant") {
    Rng rng(5);
    for (int k = 0; k < 300; ++k) {
      const PhaseState theta = random_state(rng, 9, kTwoPi);
      std::complex<double> z = 0.0;
      for (double x : theta.values()) z += std::polar(1.0, x);
      z /= 9.0;
      const OrderParameter op = order_parameter(theta);
      CHECK(op.r == Approx(std::abs(z)).epsilon(1e-12));
      CHECK(order_parameter(theta.rotated(rng.uniform(-10, 10))).r == Approx(op.r).epsilon(1e-12));
    }
  }
}

TEST_CASE("arc and order parameter bounds") {
  CHECK(arc_order_bounds(PhaseState{0, pi}).r_lower == Approx(0.0));
  CHECK(arc_order_bounds(PhaseState{1, 1, 1}).r_lower == Approx(1.0));
  const ArcOrderBounds b = arc_order_bounds(PhaseState{0, pi / 2});
  CHECK(b.gamma_lower_valid);
  CHECK(b.gamma_lower == Approx(pi / 2));
  CHECK_FALSE(arc_order_bounds(PhaseState{0, 2 * pi / 3, 4 * pi / 3}).r_lower_valid);

  Rng rng(6);
  for (int k = 0; k < 1000; ++k) {
    const auto n = 2 + static_cast<std::size_t>(rng.uniform() * 10);
    const PhaseState theta = random_state(rng, n, rng.uniform(0.0, pi));
    const double gamma = shortest_arc_length(theta);
    const double r = order_parameter(theta).r;
    const ArcOrderBounds bounds = arc_order_bounds(theta);
    REQUIRE(bounds.r_lower_valid);
    REQUIRE(bounds.gamma_lower_valid);
    CHECK(std::cos(gamma / 2) <= r + 1e-12);
    CHECK(r <= 1.0 + 1e-12);
    CHECK(gamma >= 2 * std::acos(std::min(1.0, r)) - 1e-9);
  }
}

TEST_CASE("splay states and balance") {
  const PhaseState s4 = splay_state(4, 0.0);
  const std::vector<double> expected{pi / 2, pi, 3 * pi / 2, 0.0};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(geodesic_distance(s4[i], Angle(expected[i])) < 1e-12);
  }
  const PhaseState s2 = splay_state(2, 0.0);
  CHECK(geodesic_distance(s2[0], s2[1]) == Approx(pi));
  CHECK(order_parameter(splay_state(3, 0.1)).r < 1e-12);

  CHECK(is_balanced(splay_state(5, 0), 1e-9));
  CHECK_FALSE(is_balanced(PhaseState{0, 0}, 1e-9));
  CHECK(is_balanced(PhaseState{0, 0, pi, pi}, 1e-9));
  for (std::size_t n = 2; n <= 30; ++n) {
    CHECK(is_balanced(splay_state(n, 0.37 * static_cast<double>(n)), 1e-9));
  }

  SUBCASE("distance to the splay set") {
    CHECK(splay_distance(splay_state(6, 1.1)) < 1e-12);
    const std::vector<double> scrambled{4 * pi / 3 + 0.2, 0.2, 2 * pi / 3 + 0.2};
    CHECK(splay_distance(PhaseState(scrambled)) < 1e-12);
    const PhaseState base = splay_state(5, 0);
    std::vector<double> nudged(base.values().begin(), base.values().end());
    nudged[2] += 0.01;
    const double d = splay_distance(PhaseState(nudged));
    CHECK(d > 0.0);
    CHECK(d <= 0.01 + 1e-12);
  }
}

TEST_CASE("canonical representative of a rotation class") {
  const PhaseState c = canonical_representative(PhaseState{0.5, 0.5});
  CHECK(geodesic_distance(c[0], Angle(0)) < 1e-12);
  CHECK(geodesic_distance(c[1], Angle(0)) < 1e-12);

  const PhaseState d = canonical_representative(PhaseState{0.2, 0.4});
  CHECK(geodesic_distance(d[0], Angle(-0.1)) < 1e-12);
  CHECK(geodesic_distance(d[1], Angle(0.1)) < 1e-12);

  Rng rng(7);
  for (int k = 0; k < 300; ++k) {
    const PhaseState theta = random_state(rng, 6, rng.uniform(0.0, kTwoPi));
    const PhaseState a = canonical_representative(theta);
    const PhaseState b = canonical_representative(theta.rotated(rng.uniform(-20, 20)));
    CHECK(max_geodesic_distance(a, b) < 1e-9);
  }
}

TEST_CASE("unwrapping inside the containing arc") {
  const std::vector<double> x = unwrap_in_arc(PhaseState{6.1, 0.1, 0.3});
  double mean = 0.0;
  for (double v : x) mean += v;
  CHECK(mean == Approx(0.0).epsilon(1e-12));
  CHECK(x[1] - x[0] == Approx(0.1 + kTwoPi - 6.1));
  CHECK(x[2] - x[1] == Approx(0.2));
}
