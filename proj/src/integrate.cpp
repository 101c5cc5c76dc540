#include "syncnet/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "syncnet/errors.hpp"

namespace syncnet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::string fmt17(double x) {
  if (std::isnan(x)) {
    return "nan";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_number(const std::string& cell) {
  if (cell == "nan") {
    return kNaN;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size()) {
    throw InvalidArgument("trajectory csv: bad number '" + cell + "'");
  }
  return v;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw InvalidArgument("integrator: step must be positive");
  }
  if (!(horizon >= step) || !std::isfinite(horizon)) {
    throw InvalidArgument("integrator: horizon must be at least one step");
  }
  if (stride < 1) {
    throw InvalidArgument("integrator: stride must be at least 1");
  }
}

std::optional<double> disagreement(const PhaseState& theta) {
  if (theta.size() == 0 || shortest_arc_length(theta) >= std::numbers::pi) {
    return std::nullopt;
  }
  // sum_{i<j} (x_i - x_j)^2 = n sum_i (x_i - mean)^2, and the chart is zero-mean.
  const std::vector<double> x = unwrap_in_arc(theta);
  double s = 0.0;
  for (double v : x) {
    s += v * v;
  }
  return 0.5 * static_cast<double>(x.size()) * s;
}

Trajectory integrate(const PhaseModel& model, std::span<const double> theta0, std::span<const double> aux0,
                     const IntegratorConfig& cfg) {
  cfg.validate();
  if (!model.rhs) {
    throw InvalidArgument("integrate: model has no right-hand side");
  }
  if (theta0.size() != model.phases) {
    throw InvalidArgument("integrate: initial phases have the wrong size");
  }
  std::vector<double> aux(model.aux, 0.0);
  if (!aux0.empty()) {
    if (aux0.size() != model.aux) {
      throw InvalidArgument("integrate: initial auxiliary state has the wrong size");
    }
    aux.assign(aux0.begin(), aux0.end());
  }
  if (!all_finite(theta0) || !all_finite(aux)) {
    throw InvalidArgument("integrate: non-finite initial state");
  }
  if (model.graph && model.graph->node_count() != model.phases) {
    throw InvalidArgument("integrate: model graph does not match the number of phases");
  }

  const std::size_t n = model.phases;
  const std::size_t m = model.aux;
  const double h = cfg.step;
  // Round so that a horizon that is a multiple of h up to roundoff is hit exactly.
  const auto steps = static_cast<std::size_t>(std::llround(std::max(1.0, std::floor(cfg.horizon / h + 1e-9))));

  std::vector<double> wrapped(n);
  for (std::size_t i = 0; i < n; ++i) {
    wrapped[i] = wrap_angle(theta0[i]);
  }
  std::vector<double> raw(theta0.begin(), theta0.end());

  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  std::vector<double> a1(m), a2(m), a3(m), a4(m), atmp(m);
  std::vector<double> rate(n), arate(m);

  Trajectory traj;
  const std::size_t expected = steps / cfg.stride + 2;
  traj.times.reserve(expected);

  auto record = [&](double t) {
    model.rhs(t, wrapped, aux, rate, arate);
    if (!all_finite(rate)) {
      throw NumericalBlowup("integrate: non-finite rate", t);
    }
    PhaseState state(wrapped);
    traj.times.push_back(t);
    traj.raw.push_back(raw);
    traj.rates.push_back(rate);
    traj.aux.push_back(aux);
    traj.arc.push_back(shortest_arc_length(state));
    traj.disagreement.push_back(disagreement(state).value_or(kNaN));
    traj.order.push_back(order_parameter(state).r);
    if (model.graph) {
      traj.max_edge.push_back(max_edge_distance(state, *model.graph));
    }
    traj.states.push_back(std::move(state));
  };

  record(0.0);
  for (std::size_t step = 1; step <= steps; ++step) {
    const double t = static_cast<double>(step - 1) * h;
    model.rhs(t, wrapped, aux, k1, a1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = wrapped[i] + 0.5 * h * k1[i];
    for (std::size_t i = 0; i < m; ++i) atmp[i] = aux[i] + 0.5 * h * a1[i];
    model.rhs(t + 0.5 * h, tmp, atmp, k2, a2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = wrapped[i] + 0.5 * h * k2[i];
    for (std::size_t i = 0; i < m; ++i) atmp[i] = aux[i] + 0.5 * h * a2[i];
    model.rhs(t + 0.5 * h, tmp, atmp, k3, a3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = wrapped[i] + h * k3[i];
    for (std::size_t i = 0; i < m; ++i) atmp[i] = aux[i] + h * a3[i];
    model.rhs(t + h, tmp, atmp, k4, a4);

    const double t_next = static_cast<double>(step) * h;
    for (std::size_t i = 0; i < n; ++i) {
      const double inc = h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(inc)) {
        throw NumericalBlowup("integrate: non-finite phase increment", t_next);
      }
      raw[i] += inc;
      wrapped[i] = wrap_angle(wrapped[i] + inc);
    }
    for (std::size_t i = 0; i < m; ++i) {
      aux[i] += h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
      if (!std::isfinite(aux[i])) {
        throw NumericalBlowup("integrate: non-finite auxiliary state", t_next);
      }
    }
    if (step % cfg.stride == 0 || step == steps) {
      record(t_next);
    }
  }
  return traj;
}

std::vector<double> estimate_frequencies(const Trajectory& traj, double window) {
  if (traj.size() == 0) {
    throw InvalidArgument("estimate_frequencies: empty trajectory");
  }
  if (!(window >= 0.0)) {
    throw InvalidArgument("estimate_frequencies: window must be non-negative");
  }
  const double t_end = traj.times.back();
  if (window > t_end - traj.times.front() + 1e-12) {
    throw InvalidArgument("estimate_frequencies: window longer than the trajectory");
  }
  const std::size_t n = traj.rates.front().size();
  std::vector<double> mean(n, 0.0);
  std::size_t count = 0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.times[k] >= t_end - window - 1e-12) {
      for (std::size_t i = 0; i < n; ++i) {
        mean[i] += traj.rates[k][i];
      }
      ++count;
    }
  }
  if (count == 0) {
    throw InvalidArgument("estimate_frequencies: no samples in window");
  }
  for (double& x : mean) {
    x /= static_cast<double>(count);
  }
  return mean;
}

SyncVerdict detect_frequency_sync(const Trajectory& traj, double tol, double window) {
  if (!(tol > 0.0)) {
    throw InvalidArgument("detect_frequency_sync: tolerance must be positive");
  }
  if (traj.size() == 0) {
    throw InvalidArgument("detect_frequency_sync: empty trajectory");
  }
  const double t_end = traj.times.back();
  window = std::min(window, t_end - traj.times.front());

  SyncVerdict v;
  v.frequency_synced = true;
  v.settle_time = kNaN;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto [lo, hi] = std::minmax_element(traj.rates[k].begin(), traj.rates[k].end());
    const bool ok = *hi - *lo < tol;
    if (ok && std::isnan(v.settle_time)) {
      v.settle_time = traj.times[k];
    } else if (!ok) {
      v.settle_time = kNaN;
    }
    if (!ok && traj.times[k] >= t_end - window - 1e-12) {
      v.frequency_synced = false;
    }
  }
  const std::vector<double> f = estimate_frequencies(traj, window);
  v.sync_frequency = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
  v.final_arc = traj.arc.back();
  v.final_order = traj.order.back();
  return v;
}

std::vector<double> monitor_arc(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& s : traj.states) {
    out.push_back(shortest_arc_length(s));
  }
  return out;
}

std::vector<double> monitor_disagreement(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& s : traj.states) {
    out.push_back(disagreement(s).value_or(kNaN));
  }
  return out;
}

std::vector<double> monitor_order(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& s : traj.states) {
    out.push_back(order_parameter(s).r);
  }
  return out;
}

PhaseModel oscillator_model(const OscillatorNetwork& net) {
  PhaseModel m;
  m.phases = net.size();
  m.graph = net.graph();
  m.rhs = [net](double, std::span<const double> th, std::span<const double>, std::span<double> d, std::span<double>) {
    const std::vector<double> r = coupled_rhs(net, th);
    std::copy(r.begin(), r.end(), d.begin());
  };
  return m;
}

PhaseModel balance_model(const OscillatorNetwork& net) {
  PhaseModel m;
  m.phases = net.size();
  m.graph = net.graph();
  m.rhs = [net](double, std::span<const double> th, std::span<const double>, std::span<double> d, std::span<double>) {
    const std::vector<double> r = balance_rhs(net, th);
    std::copy(r.begin(), r.end(), d.begin());
  };
  return m;
}

PhaseModel kuramoto_model(double coupling, std::vector<double> omega) {
  if (!(coupling > 0.0)) {
    throw InvalidArgument("kuramoto_model: coupling gain must be positive");
  }
  if (omega.size() < 2) {
    throw InvalidArgument("kuramoto_model: need at least two oscillators");
  }
  PhaseModel m;
  m.phases = omega.size();
  m.graph = complete_graph(omega.size(), coupling / static_cast<double>(omega.size()));
  m.rhs = [coupling, omega = std::move(omega)](double, std::span<const double> th, std::span<const double>,
                                               std::span<double> d, std::span<double>) {
    const std::vector<double> r = kuramoto_rhs(coupling, omega, th);
    std::copy(r.begin(), r.end(), d.begin());
  };
  return m;
}

PhaseModel two_oscillator_model(double kappa) {
  PhaseModel m;
  m.phases = 1;
  m.rhs = [kappa](double, std::span<const double> th, std::span<const double>, std::span<double> d,
                  std::span<double>) { d[0] = two_oscillator_f(kappa, th[0]); };
  return m;
}

PhaseModel second_order_model(const SecondOrderNetwork& net) {
  for (double mass : net.inertia()) {
    if (!(mass > 0.0)) {
      throw InvalidArgument("second_order_model: every node needs positive inertia");
    }
  }
  PhaseModel m;
  m.phases = net.size();
  m.aux = net.size();
  m.graph = net.graph();
  m.rhs = [net](double, std::span<const double> th, std::span<const double> v, std::span<double> d,
                std::span<double> dv) {
    const SecondOrderDerivative r = second_order_rhs(net, th, v);
    std::copy(r.dtheta.begin(), r.dtheta.end(), d.begin());
    std::copy(r.dthetadot.begin(), r.dthetadot.end(), dv.begin());
  };
  return m;
}

PhaseModel power_model(const PowerNetwork& net) {
  PhaseModel m;
  m.phases = net.size();
  m.aux = net.generators().size();
  m.graph = net.graph();
  m.rhs = [net](double, std::span<const double> th, std::span<const double> w, std::span<double> d,
                std::span<double> dw) {
    const PowerDerivative r = power_rhs(net, th, w);
    std::copy(r.dtheta.begin(), r.dtheta.end(), d.begin());
    std::copy(r.dgenerator_freq.begin(), r.dgenerator_freq.end(), dw.begin());
  };
  return m;
}

PhaseModel vehicle_model(const VehicleSwarm& swarm) {
  PhaseModel m;
  m.phases = swarm.graph.node_count();
  m.aux = 2 * m.phases;
  m.graph = swarm.graph;
  m.rhs = [swarm](double t, std::span<const double> th, std::span<const double>, std::span<double> d,
                  std::span<double> dpos) {
    const VehicleDerivative r = vehicle_rhs(swarm, t, th);
    std::copy(r.heading_rate.begin(), r.heading_rate.end(), d.begin());
    for (std::size_t i = 0; i < r.velocity.size(); ++i) {
      dpos[2 * i] = r.velocity[i].real();
      dpos[2 * i + 1] = r.velocity[i].imag();
    }
  };
  return m;
}

PhaseModel clock_model(const ClockNetwork& net) {
  PhaseModel m;
  m.phases = net.size();
  m.graph = net.graph();
  m.rhs = [net](double, std::span<const double> th, std::span<const double>, std::span<double> d, std::span<double>) {
    const std::vector<double> r = clock_rhs(net, th);
    std::copy(r.begin(), r.end(), d.begin());
  };
  return m;
}

PhaseModel phase_model(const ModelDescription& model) {
  struct Visitor {
    PhaseModel operator()(const OscillatorNetwork& n) const { return oscillator_model(n); }
    PhaseModel operator()(const KuramotoModel& k) const { return kuramoto_model(k.coupling, k.omega); }
    PhaseModel operator()(const SecondOrderNetwork& n) const { return second_order_model(n); }
    PhaseModel operator()(const PowerNetwork& n) const { return power_model(n); }
    PhaseModel operator()(const VehicleSwarm& s) const { return vehicle_model(s); }
    PhaseModel operator()(const ClockNetwork& n) const { return clock_model(n); }
  };
  return std::visit(Visitor{}, model);
}

double empirical_critical_coupling(std::span<const double> omega, const PhaseState& theta0,
                                   std::pair<double, double> bracket, const SyncSearchConfig& cfg) {
  if (omega.size() != theta0.size()) {
    throw InvalidArgument("empirical_critical_coupling: omega and theta0 sizes differ");
  }
  auto [lo, hi] = bracket;
  if (!(lo > 0.0) || !(hi > lo)) {
    throw InvalidArgument("empirical_critical_coupling: need 0 < K_lo < K_hi");
  }
  if (!(cfg.k_tolerance > 0.0)) {
    throw InvalidArgument("empirical_critical_coupling: tolerance must be positive");
  }
  const std::vector<double> w(omega.begin(), omega.end());
  auto syncs = [&](double k) {
    const Trajectory traj = integrate(kuramoto_model(k, w), theta0, cfg.integrator);
    return detect_frequency_sync(traj, cfg.tol, cfg.window).frequency_synced;
  };
  if (syncs(lo)) {
    throw BracketError("empirical_critical_coupling: already synchronizes at K_lo = " + fmt17(lo) +
                       "; lower the bracket");
  }
  if (!syncs(hi)) {
    throw BracketError("empirical_critical_coupling: does not synchronize at K_hi = " + fmt17(hi) +
                       "; raise the bracket or the horizon");
  }
  while (hi - lo > cfg.k_tolerance) {
    const double mid = 0.5 * (lo + hi);
    (syncs(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  out << "t";
  for (std::size_t i = 0; i < n; ++i) {
    out << ",theta_" << i;
  }
  out << ",V,W,r\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << fmt17(traj.times[k]);
    for (double x : traj.states[k].values()) {
      out << ',' << fmt17(x);
    }
    out << ',' << fmt17(traj.arc[k]) << ',' << fmt17(traj.disagreement[k]) << ',' << fmt17(traj.order[k]) << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) {
    throw InvalidArgument("cannot write '" + path + "'");
  }
  write_trajectory_csv(out, traj);
}

TrajectoryTable read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidArgument("trajectory csv: missing header");
  }
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      header.push_back(cell);
    }
  }
  if (header.size() < 4 || header.front() != "t" || header[header.size() - 3] != "V" ||
      header[header.size() - 2] != "W" || header.back() != "r") {
    throw InvalidArgument("trajectory csv: unexpected header");
  }
  const std::size_t n = header.size() - 4;
  for (std::size_t i = 0; i < n; ++i) {
    if (header[1 + i] != "theta_" + std::to_string(i)) {
      throw InvalidArgument("trajectory csv: unexpected header");
    }
  }
  TrajectoryTable table;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      row.push_back(parse_number(cell));
    }
    if (row.size() != header.size()) {
      throw InvalidArgument("trajectory csv: row has the wrong number of columns");
    }
    table.times.push_back(row[0]);
    table.theta.emplace_back(row.begin() + 1, row.begin() + 1 + static_cast<std::ptrdiff_t>(n));
    table.arc.push_back(row[n + 1]);
    table.disagreement.push_back(row[n + 2]);
    table.order.push_back(row[n + 3]);
  }
  return table;
}

}  // namespace syncnet
