#pragma once

// Experiment harness: Monte-Carlo comparison of Kuramoto critical-coupling
// bounds, the two-oscillator bifurcation sweep, and the vehicle, power-grid
// and phase-balancing demos. Every stochastic run derives its random stream
// from (seed, n, trial), so output is independent of thread count.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "syncnet/graph.hpp"
#include "syncnet/integrate.hpp"
#include "syncnet/models.hpp"
#include "syncnet/rng.hpp"

namespace syncnet {

struct FrequencyDistribution {
  enum class Kind { uniform, bipolar, explicit_list };
  Kind kind = Kind::uniform;
  double a = -1.0;  ///< uniform lower end
  double b = 1.0;   ///< uniform upper end
  double c = 1.0;   ///< bipolar magnitude: each omega_i is +c or -c with equal odds
  std::vector<double> values;

  void validate() const;
  /// n i.i.d. draws; an explicit list ignores n and is returned as is.
  std::vector<double> sample(Rng& rng, std::size_t n) const;
};

/// "uniform:a:b", "bipolar:c" or "list:w0,w1,...".
FrequencyDistribution parse_distribution(const std::string& text);

/// "a:b:log[:count]" (log-spaced integers, duplicates dropped, default 20 points),
/// "a:b:lin[:count]", or a comma-separated list.
std::vector<std::size_t> parse_n_grid(const std::string& text);
/// "a:b:lin:count" or a comma-separated list of reals.
std::vector<double> parse_real_grid(const std::string& text);

struct ExperimentConfig {
  std::string kind = "fig7";
  std::vector<std::size_t> n_grid;
  std::size_t trials = 1000;
  FrequencyDistribution distribution;
  std::uint64_t seed = 0;
  IntegratorConfig integrator;
  std::string out_dir = ".";
  std::size_t threads = 1;
  bool svg = false;

  void validate() const;
};

struct Fig7Row {
  std::size_t n = 0;
  double mean_necessary = 0.0;
  double mean_exact = 0.0;
  double mean_sufficient = 0.0;
  std::size_t trials = 0;  ///< successful trials
  std::size_t failures = 0;
};

/// For each n and trial: sample omega, evaluate the necessary bound, the exact
/// implicit critical coupling and the explicit sufficient bound, and average.
/// Failed trials are excluded and counted; more than 1% failures at any n
/// aborts with SolverError, as does any trial violating
/// necessary <= exact <= sufficient (relative slack 1e-9).
std::vector<Fig7Row> run_fig7(const ExperimentConfig& cfg);
void write_fig7_csv(std::ostream& out, const std::vector<Fig7Row>& rows);
std::vector<Fig7Row> read_fig7_csv(std::istream& in);

struct BifurcationRow {
  double kappa = 0.0;
  double delta0 = 0.0;
  double delta_final = 0.0;   ///< wrapped to [0, 2pi)
  double stable_eq = 0.0;     ///< asin(1/kappa); NaN when kappa < 1
  double saddle_eq = 0.0;     ///< pi - asin(1/kappa); NaN when kappa < 1
  double revolutions = 0.0;   ///< net turns of delta over the run
  std::string outcome;        ///< "stable_branch", "revolving" or "undecided"
};

/// Integrates d delta/dt = 1 - kappa sin(delta) (scaled time) for every pair.
std::vector<BifurcationRow> run_bifurcation2(const std::vector<double>& kappas, const std::vector<double>& delta0s,
                                             const IntegratorConfig& cfg);
void write_bifurcation_csv(std::ostream& out, const std::vector<BifurcationRow>& rows);

struct VehicleRun {
  Trajectory trajectory;
  double final_order = 0.0;
};

/// Complete unit graph, omega0 = 1, random headings and positions from the
/// stream of (cfg.seed, n, trial).
VehicleRun run_vehicles(double gain, std::size_t n, const ExperimentConfig& cfg, std::size_t trial = 0);
/// Columns t, x_i, y_i, theta_i for every vehicle, then r.
void write_vehicle_csv(std::ostream& out, const Trajectory& traj);

struct PowerGridRun {
  Trajectory trajectory;
  SyncVerdict verdict;
  double expected_frequency = 0.0;  ///< sum P / sum D
  bool first_order = false;
};

/// Integrates the grid from theta0 (zeros when empty) with generators at rest.
/// A first-order grid that synchronizes away from sum P / sum D (beyond 1e-6)
/// raises SolverError.
PowerGridRun run_powergrid(const PowerNetwork& grid, const IntegratorConfig& cfg, double tol = 1e-4,
                           double window = 10.0, std::vector<double> theta0 = {});

struct BalanceOptions {
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  IntegratorConfig integrator;
  /// Empty: uniform random initial phases. Otherwise a splay state perturbed by
  /// uniform noise of this amplitude per node.
  std::optional<double> splay_perturbation;
};

struct BalanceRow {
  std::size_t trial = 0;
  double final_order = 0.0;
  double splay_distance = 0.0;
};

struct BalanceRun {
  std::vector<BalanceRow> rows;
  Trajectory first;  ///< trajectory of trial 0
  bool circulant = false;
};

/// Balance flow on the graph (natural frequencies play no role). Non-circulant graphs still
/// run, with `circulant` false so callers can warn.
BalanceRun run_balance(const WeightedGraph& graph, const BalanceOptions& opt);
void write_balance_csv(std::ostream& out, const std::vector<BalanceRow>& rows);

}  // namespace syncnet
