#pragma once

// Fixed-step RK4 integration of the phase models, monitor traces, frequency
// synchronization detection and the empirical critical-coupling search.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "syncnet/graph.hpp"
#include "syncnet/model_io.hpp"
#include "syncnet/models.hpp"
#include "syncnet/torus.hpp"

namespace syncnet {

struct IntegratorConfig {
  double step = 1e-2;     ///< h
  double horizon = 10.0;  ///< T
  std::size_t stride = 1; ///< record every stride-th step (the final step is always recorded)

  /// Throws InvalidArgument unless h > 0, T >= h and stride >= 1.
  void validate() const;
};

/// Right-hand side over phases plus auxiliary real states (velocities,
/// generator frequencies, positions). Phases are wrapped after every step;
/// auxiliary states are not.
using PhaseRhs = std::function<void(double t, std::span<const double> phases, std::span<const double> aux,
                                    std::span<double> dphases, std::span<double> daux)>;

struct PhaseModel {
  std::size_t phases = 0;
  std::size_t aux = 0;
  PhaseRhs rhs;
  /// Coupling graph for the max-edge-distance monitor, when there is one.
  std::optional<WeightedGraph> graph;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  /// Unwrapped phases, accumulated from the same increments as `states`.
  std::vector<std::vector<double>> raw;
  /// Instantaneous frequencies d theta/dt at each sample.
  std::vector<std::vector<double>> rates;
  std::vector<std::vector<double>> aux;
  std::vector<double> arc;          ///< V: shortest containing arc length
  std::vector<double> disagreement; ///< W = |B_c^T theta|^2 / 2 in the semicircle chart; NaN outside it
  std::vector<double> order;        ///< r
  std::vector<double> max_edge;     ///< empty unless the model has a graph

  std::size_t size() const noexcept { return times.size(); }
};

struct SyncVerdict {
  bool frequency_synced = false;
  double sync_frequency = 0.0;
  /// First recorded time after which the frequency spread stays below tol; NaN when never.
  double settle_time = 0.0;
  double final_arc = 0.0;
  double final_order = 0.0;
};

/// Classical RK4. NumericalBlowup (with the time stamp) on any non-finite value.
Trajectory integrate(const PhaseModel& model, std::span<const double> theta0, std::span<const double> aux0,
                     const IntegratorConfig& cfg);
inline Trajectory integrate(const PhaseModel& model, const PhaseState& theta0, const IntegratorConfig& cfg) {
  return integrate(model, theta0.values(), {}, cfg);
}

/// Per-node mean of the recorded rates over samples with t >= t_end - window.
std::vector<double> estimate_frequencies(const Trajectory& traj, double window);

/// Synced iff every sample in the trailing window has max_i rate - min_i rate < tol.
SyncVerdict detect_frequency_sync(const Trajectory& traj, double tol = 1e-4, double window = 10.0);

std::vector<double> monitor_arc(const Trajectory& traj);
/// W per sample; NaN where the state is not inside an open semicircle.
std::vector<double> monitor_disagreement(const Trajectory& traj);
std::vector<double> monitor_order(const Trajectory& traj);

/// W(theta) = sum_{i<j} (theta_i - theta_j)^2 / 2 in the semicircle chart; nullopt outside it.
std::optional<double> disagreement(const PhaseState& theta);

// Model adapters.
PhaseModel oscillator_model(const OscillatorNetwork& net);
PhaseModel balance_model(const OscillatorNetwork& net);
PhaseModel kuramoto_model(double coupling, std::vector<double> omega);
/// Scaled two-oscillator difference dynamics d delta/dt = 1 - kappa sin(delta), one phase.
PhaseModel two_oscillator_model(double kappa);
/// Aux = velocities.
PhaseModel second_order_model(const SecondOrderNetwork& net);
/// Aux = generator frequencies in PowerNetwork::generators() order.
PhaseModel power_model(const PowerNetwork& net);
/// Aux = positions, interleaved (x_0, y_0, x_1, y_1, ...).
PhaseModel vehicle_model(const VehicleSwarm& swarm);
PhaseModel clock_model(const ClockNetwork& net);
PhaseModel phase_model(const ModelDescription& model);

struct SyncSearchConfig {
  IntegratorConfig integrator{1e-2, 400.0, 10};
  double tol = 1e-4;
  double window = 10.0;
  double k_tolerance = 1e-3;
};

/// Smallest Kuramoto gain K (complete graph, weights K/n) at which the run from
/// theta0 frequency-synchronizes, by bisection. BracketError unless the run
/// fails at K_lo and succeeds at K_hi.
double empirical_critical_coupling(std::span<const double> omega, const PhaseState& theta0,
                                   std::pair<double, double> bracket, const SyncSearchConfig& cfg = {});

/// Header `t,theta_0,...,theta_{n-1},V,W,r`; 17 significant digits; W = nan outside the chart.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// Columns read back from a trajectory CSV.
struct TrajectoryTable {
  std::vector<double> times;
  std::vector<std::vector<double>> theta;
  std::vector<double> arc;
  std::vector<double> disagreement;
  std::vector<double> order;
};
TrajectoryTable read_trajectory_csv(std::istream& in);

}  // namespace syncnet
