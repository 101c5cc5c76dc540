#pragma once

// Right-hand sides, energies and Jacobians of the phase-oscillator models:
// the canonical first-order network, the Kuramoto (complete graph) special case,
// the second-order spring network, the power-grid model with loads, generators
// and inverters, planar vehicle swarms, and diffusive clock networks.
//
// Every function is pure. Phase arguments are plain reals: wrapped PhaseState
// values and unwrapped (accumulated) angles give identical results because the
// coupling is 2pi-periodic.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "syncnet/graph.hpp"
#include "syncnet/torus.hpp"

namespace syncnet {

/// Coupling graph plus natural frequencies omega (rad/s).
class OscillatorNetwork {
 public:
  OscillatorNetwork(WeightedGraph graph, std::vector<double> omega);

  const WeightedGraph& graph() const noexcept { return graph_; }
  const std::vector<double>& omega() const noexcept { return omega_; }
  std::size_t size() const noexcept { return omega_.size(); }

  /// |sum omega| < 1e-9.
  bool is_zero_mean() const;
  /// Same graph, omega shifted by its mean (the rotating frame at the sync frequency).
  OscillatorNetwork centered() const;

 private:
  WeightedGraph graph_;
  std::vector<double> omega_;
};

/// d theta_i/dt = omega_i - sum_j a_ij sin(theta_i - theta_j).
std::vector<double> coupled_rhs(const OscillatorNetwork& net, std::span<const double> theta);
inline std::vector<double> coupled_rhs(const OscillatorNetwork& net, const PhaseState& theta) {
  return coupled_rhs(net, theta.values());
}

/// sum_i sum_j a_ij sin(theta_i - theta_j): the coupling term alone, per node.
std::vector<double> coupling_flow(const WeightedGraph& graph, std::span<const double> theta);

/// U(theta) = sum over edges of a_ij (1 - cos(theta_i - theta_j)).
double potential_energy(const OscillatorNetwork& net, std::span<const double> theta);
inline double potential_energy(const OscillatorNetwork& net, const PhaseState& theta) {
  return potential_energy(net, theta.values());
}

/// grad U, so that coupled_rhs = omega - grad U.
std::vector<double> potential_gradient(const OscillatorNetwork& net, std::span<const double> theta);
inline std::vector<double> potential_gradient(const OscillatorNetwork& net, const PhaseState& theta) {
  return potential_gradient(net, theta.values());
}

/// J(theta) = -B diag(a_ij cos(theta_i - theta_j)) B^T.
Eigen::MatrixXd jacobian(const OscillatorNetwork& net, std::span<const double> theta);
inline Eigen::MatrixXd jacobian(const OscillatorNetwork& net, const PhaseState& theta) {
  return jacobian(net, theta.values());
}

/// Time-reversed identical-frequency flow: d theta_i/dt = + sum_j a_ij sin(theta_i - theta_j).
/// Natural frequencies are ignored.
std::vector<double> balance_rhs(const OscillatorNetwork& net, std::span<const double> theta);
inline std::vector<double> balance_rhs(const OscillatorNetwork& net, const PhaseState& theta) {
  return balance_rhs(net, theta.values());
}

/// Kuramoto model, pairwise form: omega_i - (K/n) sum_j sin(theta_i - theta_j).
std::vector<double> kuramoto_rhs(double coupling, std::span<const double> omega, std::span<const double> theta);
/// Same vector field via the order parameter: omega_i - K r sin(theta_i - psi). O(n).
std::vector<double> kuramoto_rhs_mean_field(double coupling, std::span<const double> omega,
                                            std::span<const double> theta);

/// Scaled two-oscillator difference dynamics f_kappa(delta) = 1 - kappa sin(delta).
double two_oscillator_f(double kappa, double delta) noexcept;

/// Spring network M_i theta_i'' + D_i theta_i' = omega_i - sum_j a_ij sin(theta_i - theta_j).
class SecondOrderNetwork {
 public:
  SecondOrderNetwork(WeightedGraph graph, std::vector<double> omega, std::vector<double> inertia,
                     std::vector<double> damping);

  const WeightedGraph& graph() const noexcept { return graph_; }
  const std::vector<double>& omega() const noexcept { return omega_; }
  const std::vector<double>& inertia() const noexcept { return inertia_; }
  const std::vector<double>& damping() const noexcept { return damping_; }
  std::size_t size() const noexcept { return omega_.size(); }

 private:
  WeightedGraph graph_;
  std::vector<double> omega_;
  std::vector<double> inertia_;
  std::vector<double> damping_;
};

struct SecondOrderDerivative {
  std::vector<double> dtheta;
  std::vector<double> dthetadot;
};

/// First-order form of the spring network. Requires M_i > 0 on every node;
/// networks with massless nodes go through power_rhs instead.
SecondOrderDerivative second_order_rhs(const SecondOrderNetwork& net, std::span<const double> theta,
                                       std::span<const double> thetadot);

/// Kinetic plus potential energy: sum M_i thetadot_i^2 / 2 + U(theta).
double mechanical_energy(const SecondOrderNetwork& net, std::span<const double> theta,
                         std::span<const double> thetadot);

enum class BusKind { load, generator, inverter };

/// Structure-preserving power network. `power` holds the signed nodal injection:
/// -P_l for loads, P_m for generators, P_d for inverters.
class PowerNetwork {
 public:
  PowerNetwork(WeightedGraph graph, std::vector<BusKind> kinds, std::vector<double> power,
               std::vector<double> damping, std::vector<double> inertia);

  const WeightedGraph& graph() const noexcept { return graph_; }
  const std::vector<BusKind>& kinds() const noexcept { return kinds_; }
  const std::vector<double>& power() const noexcept { return power_; }
  const std::vector<double>& damping() const noexcept { return damping_; }
  /// Inertia per node; zero on loads and inverters.
  const std::vector<double>& inertia() const noexcept { return inertia_; }
  std::size_t size() const noexcept { return kinds_.size(); }

  /// Node indices of the generators, in increasing order. The generator
  /// frequency vector passed to power_rhs follows this order.
  const std::vector<std::size_t>& generators() const noexcept { return generators_; }
  bool is_first_order() const noexcept { return generators_.empty(); }

  /// Frequency every node settles to when the grid synchronizes: sum P / sum D.
  double sync_frequency() const;

 private:
  WeightedGraph graph_;
  std::vector<BusKind> kinds_;
  std::vector<double> power_;
  std::vector<double> damping_;
  std::vector<double> inertia_;
  std::vector<std::size_t> generators_;
};

struct PowerDerivative {
  std::vector<double> dtheta;           ///< all n nodes
  std::vector<double> dgenerator_freq;  ///< one entry per generator
};

/// Loads:      D theta' = -P_l - sum a sin(dtheta)
/// Generators: M theta'' + D theta' = P_m - sum a sin(dtheta)
/// Inverters:  D theta' = P_d - sum a sin(dtheta)
PowerDerivative power_rhs(const PowerNetwork& net, std::span<const double> theta,
                          std::span<const double> generator_freq);

/// Per-edge weight as a function of time; receives the static edge.
using EdgeWeightFn = std::function<double(double t, const Edge& edge)>;
using FrequencyFn = std::function<double(double t)>;

/// Unit-speed planar particles steered by relative headings:
/// r_i' = e^{i theta_i},  theta_i' = omega0(t) - K sum_j a_ij(t) sin(theta_i - theta_j).
struct VehicleSwarm {
  WeightedGraph graph;
  double gain = 1.0;
  FrequencyFn omega0 = [](double) { return 0.0; };
  /// Optional time-varying weights; the static graph weights are used when empty.
  EdgeWeightFn edge_weight;
};

struct VehicleDerivative {
  std::vector<std::complex<double>> velocity;
  std::vector<double> heading_rate;
};

VehicleDerivative vehicle_rhs(const VehicleSwarm& swarm, double t, std::span<const double> headings);

using CouplingFn = std::function<double(double)>;

/// Diffusive clock synchronization: theta_i' = 2pi/T_i + K sum_j a_ij f(theta_i - theta_j).
/// The sign is kept as written: with f = sin, K < 0 reproduces the canonical
/// model with weights -K a_ij and omega_i = 2pi/T_i.
class ClockNetwork {
 public:
  /// Rejects non-convex rows (|sum_j a_ij - 1| > 1e-9), isolated nodes,
  /// non-positive periods, and coupling functions that fail an odd/2pi-periodic
  /// spot check on a grid.
  ClockNetwork(WeightedGraph graph, std::vector<double> periods, double gain, CouplingFn f);

  const WeightedGraph& graph() const noexcept { return graph_; }
  const std::vector<double>& periods() const noexcept { return periods_; }
  double gain() const noexcept { return gain_; }
  const CouplingFn& coupling() const noexcept { return f_; }
  std::size_t size() const noexcept { return periods_.size(); }

 private:
  WeightedGraph graph_;
  std::vector<double> periods_;
  double gain_;
  CouplingFn f_;
};

std::vector<double> clock_rhs(const ClockNetwork& net, std::span<const double> theta);

/// The canonical network matching a sinusoidal clock network with K < 0.
OscillatorNetwork clock_as_oscillator_network(const ClockNetwork& net);

}  // namespace syncnet
