#include "syncnet/torus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "syncnet/errors.hpp"
#include "syncnet/graph.hpp"

namespace syncnet {

using std::numbers::pi;

double wrap_angle(double x) {
  if (!std::isfinite(x)) {
    throw InvalidArgument("wrap_angle: non-finite angle");
  }
  double y = std::fmod(x, kTwoPi);
  if (y < 0.0) {
    y += kTwoPi;
  }
  // fmod of a tiny negative number plus 2pi can round up to exactly 2pi.
  if (y >= kTwoPi) {
    y = 0.0;
  }
  return y;
}

double geodesic_distance(Angle a, Angle b) noexcept {
  const double d = std::abs(a.value() - b.value());
  return std::min(d, kTwoPi - d);
}

double angular_difference(Angle a, Angle b) noexcept {
  double d = b.value() - a.value();
  if (d > pi) {
    d -= kTwoPi;
  } else if (d <= -pi) {
    d += kTwoPi;
  }
  return d;
}

PhaseState::PhaseState(std::span<const double> radians) {
  angles_.reserve(radians.size());
  for (double x : radians) {
    angles_.push_back(wrap_angle(x));
  }
}

PhaseState::PhaseState(std::initializer_list<double> radians)
    : PhaseState(std::span<const double>(radians.begin(), radians.size())) {}

PhaseState PhaseState::rotated(double s) const {
  std::vector<double> out(angles_);
  for (double& x : out) {
    x += s;
  }
  return PhaseState(out);
}

ContainingArc containing_arc(const PhaseState& theta) {
  const auto values = theta.values();
  if (values.empty()) {
    throw InvalidArgument("containing_arc: empty state");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  // The wrap-around gap runs from the largest angle back to the smallest one.
  double best_gap = sorted.front() + kTwoPi - sorted.back();
  ContainingArc arc{sorted.front(), sorted.back() - sorted.front()};
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double gap = sorted[k + 1] - sorted[k];
    if (gap > best_gap) {
      best_gap = gap;
      arc.start = sorted[k + 1];
      arc.length = sorted[k] + kTwoPi - sorted[k + 1];
    }
  }
  return arc;
}

double shortest_arc_length(const PhaseState& theta) { return containing_arc(theta).length; }

bool in_arc_set(const PhaseState& theta, double gamma) {
  if (!(gamma >= 0.0 && gamma < kTwoPi)) {
    throw InvalidArgument("in_arc_set: gamma must lie in [0, 2pi)");
  }
  return shortest_arc_length(theta) <= gamma;
}

double max_edge_distance(const PhaseState& theta, const WeightedGraph& graph) {
  if (graph.node_count() != theta.size()) {
    throw InvalidArgument("max_edge_distance: graph node count does not match state size");
  }
  double worst = 0.0;
  for (const Edge& e : graph.edges()) {
    worst = std::max(worst, geodesic_distance(theta[e.i], theta[e.j]));
  }
  return worst;
}

OrderParameter order_parameter(std::span<const double> radians) {
  if (radians.empty()) {
    throw InvalidArgument("order_parameter: empty state");
  }
  double c = 0.0;
  double s = 0.0;
  for (double x : radians) {
    c += std::cos(x);
    s += std::sin(x);
  }
  const double n = static_cast<double>(radians.size());
  c /= n;
  s /= n;
  OrderParameter op;
  op.r = std::min(1.0, std::hypot(c, s));
  op.psi_defined = op.r > kPsiTolerance;
  if (op.psi_defined) {
    op.psi = Angle(std::atan2(s, c));
  }
  return op;
}

OrderParameter order_parameter(const PhaseState& theta) { return order_parameter(theta.values()); }

ArcOrderBounds arc_order_bounds(const PhaseState& theta) {
  if (theta.size() < 2) {
    throw InvalidArgument("arc_order_bounds: need at least two oscillators");
  }
  const double gamma = shortest_arc_length(theta);
  const double r = order_parameter(theta).r;
  ArcOrderBounds b;
  b.r_lower = std::cos(gamma / 2.0);
  b.r_lower_valid = gamma <= pi;
  b.gamma_lower = 2.0 * std::acos(std::clamp(r, -1.0, 1.0));
  b.gamma_lower_valid = gamma <= pi;
  return b;
}

PhaseState splay_state(std::size_t n, double phi) {
  if (n < 2) {
    throw InvalidArgument("splay_state: need n >= 2");
  }
  std::vector<double> out(n);
  for (std::size_t i = 1; i <= n; ++i) {
    out[i - 1] = static_cast<double>(i) * kTwoPi / static_cast<double>(n) + phi;
  }
  return PhaseState(out);
}

bool is_balanced(const PhaseState& theta, double tol) {
  if (!(tol > 0.0)) {
    throw InvalidArgument("is_balanced: tolerance must be positive");
  }
  return order_parameter(theta).r <= tol;
}

double splay_distance(const PhaseState& theta) {
  const std::size_t n = theta.size();
  if (n == 0) {
    throw InvalidArgument("splay_distance: empty state");
  }
  std::vector<double> sorted(theta.values().begin(), theta.values().end());
  std::sort(sorted.begin(), sorted.end());
  const double spacing = kTwoPi / static_cast<double>(n);
  // Best rotation of the grid: circular mean of the offsets.
  double c = 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double off = sorted[k] - spacing * static_cast<double>(k);
    c += std::cos(off);
    s += std::sin(off);
  }
  const Angle shift(std::atan2(s, c));
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Angle grid(shift.value() + spacing * static_cast<double>(k));
    worst = std::max(worst, geodesic_distance(Angle(sorted[k]), grid));
  }
  return worst;
}

std::vector<double> unwrap_in_arc(const PhaseState& theta) {
  const ContainingArc arc = containing_arc(theta);
  std::vector<double> out(theta.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    out[i] = wrap_angle(theta.values()[i] - arc.start);
    // Values past the middle of the empty gap belong just before the arc start.
    if (out[i] > 0.5 * (arc.length + kTwoPi)) {
      out[i] -= kTwoPi;
    }
    mean += out[i];
  }
  mean /= static_cast<double>(out.size());
  for (double& x : out) {
    x -= mean;
  }
  return out;
}

PhaseState canonical_representative(const PhaseState& theta) {
  if (theta.size() == 0) {
    throw InvalidArgument("canonical_representative: empty state");
  }
  if (shortest_arc_length(theta) < pi) {
    return PhaseState(unwrap_in_arc(theta));
  }
  return theta.rotated(-theta.values()[0]);
}

double max_geodesic_distance(const PhaseState& a, const PhaseState& b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("max_geodesic_distance: size mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, geodesic_distance(a[i], b[i]));
  }
  return worst;
}

}  // namespace syncnet
