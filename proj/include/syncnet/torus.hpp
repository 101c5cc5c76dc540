#pragma once

// Geometry on the circle S^1 and the n-torus: wrapping, geodesic distances,
// containing arcs, the Kuramoto order parameter and balanced configurations.

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace syncnet {

class WeightedGraph;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Below this order-parameter magnitude the mean phase psi is reported as undefined.
inline constexpr double kPsiTolerance = 1e-9;

/// Maps any finite real to [0, 2pi). Throws InvalidArgument on NaN/inf.
double wrap_angle(double x);

/// A point on the unit circle, stored as radians in [0, 2pi).
class Angle {
 public:
  constexpr Angle() noexcept = default;
  explicit Angle(double radians) : value_(wrap_angle(radians)) {}

  constexpr double value() const noexcept { return value_; }

  Angle operator+(double delta) const { return Angle(value_ + delta); }
  Angle operator-(double delta) const { return Angle(value_ - delta); }
  constexpr bool operator==(const Angle&) const noexcept = default;

 private:
  double value_ = 0.0;
};

/// Shorter of the two arc lengths between a and b, in [0, pi].
double geodesic_distance(Angle a, Angle b) noexcept;

/// Signed difference b - a in (-pi, pi]; positive iff the counter-clockwise
/// path from a to b is the shorter one. Antipodal points give +pi.
double angular_difference(Angle a, Angle b) noexcept;

/// A point of the n-torus. Every entry is kept wrapped to [0, 2pi).
class PhaseState {
 public:
  PhaseState() = default;
  /// Wraps each entry; throws InvalidArgument on non-finite values.
  explicit PhaseState(std::span<const double> radians);
  PhaseState(std::initializer_list<double> radians);

  std::size_t size() const noexcept { return angles_.size(); }
  Angle operator[](std::size_t i) const { return Angle(angles_[i]); }
  /// Wrapped values, each in [0, 2pi).
  std::span<const double> values() const noexcept { return angles_; }

  /// Adds s to every angle (the rotation rot_s).
  PhaseState rotated(double s) const;

 private:
  std::vector<double> angles_;
};

/// Shortest arc containing all angles: its counter-clockwise start and its length.
struct ContainingArc {
  double start = 0.0;
  double length = 0.0;
};

/// Sort + largest circular gap. For n = 1 the arc is the point itself.
ContainingArc containing_arc(const PhaseState& theta);

/// gamma(theta): length of the shortest arc containing every angle, in [0, 2pi).
double shortest_arc_length(const PhaseState& theta);

/// Membership in the closed set of arrays contained in an arc of length gamma.
bool in_arc_set(const PhaseState& theta, double gamma);

/// Largest geodesic distance across the edges of `graph`.
double max_edge_distance(const PhaseState& theta, const WeightedGraph& graph);

struct OrderParameter {
  double r = 0.0;
  Angle psi;
  bool psi_defined = false;
};

/// Centroid r e^{i psi} of the phases on the unit circle.
OrderParameter order_parameter(const PhaseState& theta);
OrderParameter order_parameter(std::span<const double> radians);

/// Lower bounds relating the order parameter and the shortest arc. Each bound
/// carries a flag telling whether its regime assumption holds.
struct ArcOrderBounds {
  double r_lower = 0.0;      ///< cos(gamma/2); valid when gamma <= pi
  bool r_lower_valid = false;
  double gamma_lower = 0.0;  ///< 2 arccos(r); valid when theta lies in a closed half circle
  bool gamma_lower_valid = false;
};

ArcOrderBounds arc_order_bounds(const PhaseState& theta);

/// theta_i = i 2pi/n + phi for i = 1..n (stored at index i-1).
PhaseState splay_state(std::size_t n, double phi);

bool is_balanced(const PhaseState& theta, double tol);

/// Distance to the nearest splay state (any rotation, any labelling): the largest
/// geodesic offset of the sorted phases from an equally spaced grid at its best rotation.
double splay_distance(const PhaseState& theta);

/// Representative of the rotation class [theta]. When gamma(theta) < pi the
/// angles are unwrapped inside their containing arc and rotated to zero mean;
/// otherwise the state is rotated so that theta_1 = 0.
PhaseState canonical_representative(const PhaseState& theta);

/// Real-valued chart of theta on its containing arc, shifted so the values have
/// zero mean. Only meaningful when gamma(theta) < pi.
std::vector<double> unwrap_in_arc(const PhaseState& theta);

/// Largest componentwise geodesic distance between two states of equal size.
double max_geodesic_distance(const PhaseState& a, const PhaseState& b);

}  // namespace syncnet
