#include "syncnet/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "syncnet/conditions.hpp"
#include "syncnet/errors.hpp"

namespace syncnet {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    out.push_back(item);
  }
  if (!s.empty() && s.back() == sep) {
    out.emplace_back();
  }
  return out;
}

double to_double(const std::string& s, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw InvalidArgument(context + ": bad number '" + s + "'");
  }
  return v;
}

std::size_t to_size(const std::string& s, const std::string& context) {
  const double v = to_double(s, context);
  if (v < 0.0 || v != std::floor(v)) {
    throw InvalidArgument(context + ": '" + s + "' is not a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

std::string fmt17(double x) {
  if (std::isnan(x)) {
    return "nan";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct TrialResult {
  bool ok = false;
  double necessary = 0.0;
  double exact = 0.0;
  double sufficient = 0.0;
};

TrialResult fig7_trial(const ExperimentConfig& cfg, std::size_t n, std::size_t trial) {
  Rng rng(trial_seed(cfg.seed, n, trial));
  const std::vector<double> omega = cfg.distribution.sample(rng, n);
  TrialResult r;
  r.sufficient = kuramoto_explicit_Kc(omega);
  r.necessary = kuramoto_necessary_bound(omega);
  if (r.sufficient == 0.0) {
    // Identical oscillators lock for every K > 0; all three bounds are zero.
    r.ok = true;
    return r;
  }
  try {
    r.exact = implicit_critical_coupling(omega).coupling;
    r.ok = true;
  } catch (const NumericalError&) {
    r.ok = false;
  }
  return r;
}

// Runs fn(k) for k in [0, count) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < count; k += threads) fn(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void FrequencyDistribution::validate() const {
  switch (kind) {
    case Kind::uniform:
      if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
        throw InvalidArgument("frequency distribution: need a < b");
      }
      break;
    case Kind::bipolar:
      if (!(c > 0.0) || !std::isfinite(c)) {
        throw InvalidArgument("frequency distribution: bipolar magnitude must be positive");
      }
      break;
    case Kind::explicit_list:
      if (values.size() < 2) {
        throw InvalidArgument("frequency distribution: explicit list needs at least two values");
      }
      break;
  }
}

std::vector<double> FrequencyDistribution::sample(Rng& rng, std::size_t n) const {
  switch (kind) {
    case Kind::uniform:
      return rng.uniform_vector(n, a, b);
    case Kind::bipolar: {
      std::vector<double> out(n);
      for (double& x : out) {
        x = (rng.next() >> 63) ? c : -c;
      }
      return out;
    }
    case Kind::explicit_list:
      return values;
  }
  return {};
}

FrequencyDistribution parse_distribution(const std::string& text) {
  const auto parts = split(text, ':');
  FrequencyDistribution d;
  if (parts.size() == 3 && parts[0] == "uniform") {
    d.kind = FrequencyDistribution::Kind::uniform;
    d.a = to_double(parts[1], "distribution");
    d.b = to_double(parts[2], "distribution");
  } else if (parts.size() == 2 && parts[0] == "bipolar") {
    d.kind = FrequencyDistribution::Kind::bipolar;
    d.c = to_double(parts[1], "distribution");
  } else if (parts.size() == 2 && parts[0] == "list") {
    d.kind = FrequencyDistribution::Kind::explicit_list;
    for (const auto& v : split(parts[1], ',')) {
      d.values.push_back(to_double(v, "distribution"));
    }
  } else {
    throw InvalidArgument("distribution: expected 'uniform:a:b', 'bipolar:c' or 'list:w0,w1,...', got '" + text +
                          "'");
  }
  d.validate();
  return d;
}

std::vector<std::size_t> parse_n_grid(const std::string& text) {
  const auto parts = split(text, ':');
  std::vector<std::size_t> out;
  if (parts.size() == 1) {
    for (const auto& v : split(text, ',')) {
      out.push_back(to_size(v, "n grid"));
    }
  } else if (parts.size() == 3 || parts.size() == 4) {
    const std::size_t lo = to_size(parts[0], "n grid");
    const std::size_t hi = to_size(parts[1], "n grid");
    const std::size_t count = parts.size() == 4 ? to_size(parts[3], "n grid") : 20;
    if (lo < 2 || hi < lo || count < 1) {
      throw InvalidArgument("n grid: need 2 <= a <= b and a positive count");
    }
    for (std::size_t k = 0; k < count; ++k) {
      const double f = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
      double v = 0.0;
      if (parts[2] == "log") {
        v = std::exp(std::log(static_cast<double>(lo)) + f * (std::log(static_cast<double>(hi)) -
                                                              std::log(static_cast<double>(lo))));
      } else if (parts[2] == "lin") {
        v = static_cast<double>(lo) + f * static_cast<double>(hi - lo);
      } else {
        throw InvalidArgument("n grid: spacing must be 'log' or 'lin'");
      }
      const auto n = static_cast<std::size_t>(std::llround(v));
      if (out.empty() || out.back() != n) {
        out.push_back(n);
      }
    }
  } else {
    throw InvalidArgument("n grid: expected 'a:b:log[:count]', 'a:b:lin[:count]' or a list");
  }
  for (std::size_t n : out) {
    if (n < 2) {
      throw InvalidArgument("n grid: every n must be at least 2");
    }
  }
  return out;
}

std::vector<double> parse_real_grid(const std::string& text) {
  const auto parts = split(text, ':');
  std::vector<double> out;
  if (parts.size() == 1) {
    for (const auto& v : split(text, ',')) {
      out.push_back(to_double(v, "grid"));
    }
    return out;
  }
  if (parts.size() != 4 || parts[2] != "lin") {
    throw InvalidArgument("grid: expected 'a:b:lin:count' or a comma-separated list");
  }
  const double lo = to_double(parts[0], "grid");
  const double hi = to_double(parts[1], "grid");
  const std::size_t count = to_size(parts[3], "grid");
  if (count < 1) {
    throw InvalidArgument("grid: count must be positive");
  }
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1));
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (trials < 1) {
    throw InvalidArgument("experiment: trials must be at least 1");
  }
  if (threads < 1) {
    throw InvalidArgument("experiment: threads must be at least 1");
  }
  distribution.validate();
  integrator.validate();
}

std::vector<Fig7Row> run_fig7(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> grid = cfg.n_grid;
  if (cfg.distribution.kind == FrequencyDistribution::Kind::explicit_list) {
    grid = {cfg.distribution.values.size()};
  }
  if (grid.empty()) {
    throw InvalidArgument("fig7: empty n grid");
  }
  std::vector<Fig7Row> rows;
  for (std::size_t n : grid) {
    if (n < 2) {
      throw InvalidArgument("fig7: every n must be at least 2");
    }
    std::vector<TrialResult> results(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) { results[t] = fig7_trial(cfg, n, t); });

    Fig7Row row;
    row.n = n;
    for (std::size_t t = 0; t < results.size(); ++t) {
      const TrialResult& r = results[t];
      if (!r.ok) {
        ++row.failures;
        continue;
      }
      const double slack = 1e-9 * std::max(1.0, r.sufficient);
      if (!(r.necessary <= r.exact + slack && r.exact <= r.sufficient + slack)) {
        throw SolverError("fig7: bound ordering violated at n=" + std::to_string(n) + ", trial " +
                          std::to_string(t) + ": " + fmt17(r.necessary) + ", " + fmt17(r.exact) + ", " +
                          fmt17(r.sufficient));
      }
      row.mean_necessary += r.necessary;
      row.mean_exact += r.exact;
      row.mean_sufficient += r.sufficient;
      ++row.trials;
    }
    if (row.failures * 100 > cfg.trials) {
      throw SolverError("fig7: " + std::to_string(row.failures) + " of " + std::to_string(cfg.trials) +
                        " trials failed at n=" + std::to_string(n));
    }
    if (row.trials > 0) {
      const auto k = static_cast<double>(row.trials);
      row.mean_necessary /= k;
      row.mean_exact /= k;
      row.mean_sufficient /= k;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_fig7_csv(std::ostream& out, const std::vector<Fig7Row>& rows) {
  out << "n,mean_necessary,mean_exact,mean_sufficient,trials,failures\n";
  for (const auto& r : rows) {
    out << r.n << ',' << fmt17(r.mean_necessary) << ',' << fmt17(r.mean_exact) << ',' << fmt17(r.mean_sufficient)
        << ',' << r.trials << ',' << r.failures << '\n';
  }
}

std::vector<Fig7Row> read_fig7_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "n,mean_necessary,mean_exact,mean_sufficient,trials,failures") {
    throw InvalidArgument("fig7 csv: unexpected header");
  }
  std::vector<Fig7Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 6) {
      throw InvalidArgument("fig7 csv: expected 6 columns");
    }
    Fig7Row r;
    r.n = to_size(cells[0], "fig7 csv");
    r.mean_necessary = to_double(cells[1], "fig7 csv");
    r.mean_exact = to_double(cells[2], "fig7 csv");
    r.mean_sufficient = to_double(cells[3], "fig7 csv");
    r.trials = to_size(cells[4], "fig7 csv");
    r.failures = to_size(cells[5], "fig7 csv");
    rows.push_back(r);
  }
  return rows;
}

std::vector<BifurcationRow> run_bifurcation2(const std::vector<double>& kappas, const std::vector<double>& delta0s,
                                             const IntegratorConfig& cfg) {
  cfg.validate();
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  std::vector<BifurcationRow> rows;
  for (double kappa : kappas) {
    if (!std::isfinite(kappa) || kappa < 0.0) {
      throw InvalidArgument("bifurcation2: kappa must be finite and non-negative");
    }
    const PhaseModel model = two_oscillator_model(kappa);
    for (double d0 : delta0s) {
      const std::vector<double> init{d0};
      const Trajectory traj = integrate(model, init, {}, cfg);
      BifurcationRow row;
      row.kappa = kappa;
      row.delta0 = d0;
      row.delta_final = traj.states.back()[0].value();
      row.revolutions = (traj.raw.back()[0] - traj.raw.front()[0]) / kTwoPi;
      row.stable_eq = kappa >= 1.0 ? std::asin(1.0 / kappa) : kNaN;
      row.saddle_eq = kappa >= 1.0 ? std::numbers::pi - row.stable_eq : kNaN;
      const double rate = std::abs(traj.rates.back()[0]);
      if (kappa >= 1.0 && rate < 1e-6 &&
          geodesic_distance(Angle(row.delta_final), Angle(row.stable_eq)) < 1e-3) {
        row.outcome = "stable_branch";
      } else if (kappa < 1.0 && std::abs(row.revolutions) >= 1.0) {
        row.outcome = "revolving";
      } else {
        row.outcome = "undecided";
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_bifurcation_csv(std::ostream& out, const std::vector<BifurcationRow>& rows) {
  out << "kappa,delta0,delta_final,stable_eq,saddle_eq,revolutions,outcome\n";
  for (const auto& r : rows) {
    out << fmt17(r.kappa) << ',' << fmt17(r.delta0) << ',' << fmt17(r.delta_final) << ',' << fmt17(r.stable_eq)
        << ',' << fmt17(r.saddle_eq) << ',' << fmt17(r.revolutions) << ',' << r.outcome << '\n';
  }
}

VehicleRun run_vehicles(double gain, std::size_t n, const ExperimentConfig& cfg, std::size_t trial) {
  cfg.integrator.validate();
  if (n < 2) {
    throw InvalidArgument("vehicles: need at least two vehicles");
  }
  if (!std::isfinite(gain)) {
    throw InvalidArgument("vehicles: gain must be finite");
  }
  VehicleSwarm swarm;
  swarm.graph = complete_graph(n, 1.0);
  swarm.gain = gain;
  swarm.omega0 = [](double) { return 1.0; };
  Rng rng(trial_seed(cfg.seed, n, trial));
  const std::vector<double> headings = rng.uniform_vector(n, 0.0, kTwoPi);
  const std::vector<double> positions = rng.uniform_vector(2 * n, -5.0, 5.0);
  VehicleRun run;
  run.trajectory = integrate(vehicle_model(swarm), headings, positions, cfg.integrator);
  run.final_order = run.trajectory.order.back();
  return run;
}

void write_vehicle_csv(std::ostream& out, const Trajectory& traj) {
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  out << 't';
  for (std::size_t i = 0; i < n; ++i) {
    out << ",x_" << i << ",y_" << i << ",theta_" << i;
  }
  out << ",r\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << fmt17(traj.times[k]);
    for (std::size_t i = 0; i < n; ++i) {
      out << ',' << fmt17(traj.aux[k][2 * i]) << ',' << fmt17(traj.aux[k][2 * i + 1]) << ','
          << fmt17(traj.states[k][i].value());
    }
    out << ',' << fmt17(traj.order[k]) << '\n';
  }
}

PowerGridRun run_powergrid(const PowerNetwork& grid, const IntegratorConfig& cfg, double tol, double window,
                           std::vector<double> theta0) {
  if (theta0.empty()) {
    theta0.assign(grid.size(), 0.0);
  }
  PowerGridRun run;
  run.first_order = grid.is_first_order();
  run.expected_frequency = grid.sync_frequency();
  run.trajectory = integrate(power_model(grid), theta0, std::vector<double>(grid.generators().size(), 0.0), cfg);
  run.verdict = detect_frequency_sync(run.trajectory, tol, window);
  if (run.first_order && run.verdict.frequency_synced &&
      std::abs(run.verdict.sync_frequency - run.expected_frequency) > 1e-6) {
    throw SolverError("powergrid: synchronized at " + fmt17(run.verdict.sync_frequency) +
                      " instead of sum P / sum D = " + fmt17(run.expected_frequency));
  }
  return run;
}

BalanceRun run_balance(const WeightedGraph& graph, const BalanceOptions& opt) {
  opt.integrator.validate();
  if (opt.trials < 1) {
    throw InvalidArgument("balance: trials must be at least 1");
  }
  if (!graph.is_connected()) {
    throw InvalidArgument("balance: graph must be connected");
  }
  const std::size_t n = graph.node_count();
  const OscillatorNetwork net(graph, std::vector<double>(n, 0.0));
  const PhaseModel model = balance_model(net);
  BalanceRun run;
  run.circulant = is_circulant(graph);
  run.rows.resize(opt.trials);
  for (std::size_t t = 0; t < opt.trials; ++t) {
    Rng rng(trial_seed(opt.seed, n, t));
    std::vector<double> init;
    if (opt.splay_perturbation) {
      const PhaseState splay = splay_state(n, 0.0);
      init.assign(splay.values().begin(), splay.values().end());
      for (double& x : init) {
        x += rng.uniform(-*opt.splay_perturbation, *opt.splay_perturbation);
      }
    } else {
      init = rng.uniform_vector(n, 0.0, kTwoPi);
    }
    Trajectory traj = integrate(model, init, {}, opt.integrator);
    run.rows[t] = {t, traj.order.back(), splay_distance(traj.states.back())};
    if (t == 0) {
      run.first = std::move(traj);
    }
  }
  return run;
}

void write_balance_csv(std::ostream& out, const std::vector<BalanceRow>& rows) {
  out << "trial,final_r,splay_distance\n";
  for (const auto& r : rows) {
    out << r.trial << ',' << fmt17(r.final_order) << ',' << fmt17(r.splay_distance) << '\n';
  }
}

}  // namespace syncnet
