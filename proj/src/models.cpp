#include "syncnet/models.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "syncnet/errors.hpp"

namespace syncnet {

namespace {

void require_size(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    throw InvalidArgument(std::string(what) + ": expected " + std::to_string(expected) + " entries, got " +
                          std::to_string(actual));
  }
}

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw InvalidArgument(std::string(what) + ": non-finite entry");
    }
  }
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

OscillatorNetwork::OscillatorNetwork(WeightedGraph graph, std::vector<double> omega)
    : graph_(std::move(graph)), omega_(std::move(omega)) {
  require_size(graph_.node_count(), omega_.size(), "OscillatorNetwork omega");
  require_finite(omega_, "OscillatorNetwork omega");
}

bool OscillatorNetwork::is_zero_mean() const {
  return std::abs(std::accumulate(omega_.begin(), omega_.end(), 0.0)) < 1e-9;
}

OscillatorNetwork OscillatorNetwork::centered() const {
  std::vector<double> shifted(omega_);
  const double m = mean(omega_);
  for (double& w : shifted) {
    w -= m;
  }
  return OscillatorNetwork(graph_, std::move(shifted));
}

std::vector<double> coupling_flow(const WeightedGraph& graph, std::span<const double> theta) {
  require_size(graph.node_count(), theta.size(), "coupling_flow theta");
  std::vector<double> flow(theta.size(), 0.0);
  for (const Edge& e : graph.edges()) {
    const double s = e.weight * std::sin(theta[e.i] - theta[e.j]);
    flow[e.i] += s;
    flow[e.j] -= s;
  }
  return flow;
}

std::vector<double> coupled_rhs(const OscillatorNetwork& net, std::span<const double> theta) {
  std::vector<double> rhs = coupling_flow(net.graph(), theta);
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    rhs[i] = net.omega()[i] - rhs[i];
  }
  return rhs;
}

double potential_energy(const OscillatorNetwork& net, std::span<const double> theta) {
  require_size(net.size(), theta.size(), "potential_energy theta");
  double u = 0.0;
  for (const Edge& e : net.graph().edges()) {
    u += e.weight * (1.0 - std::cos(theta[e.i] - theta[e.j]));
  }
  return u;
}

std::vector<double> potential_gradient(const OscillatorNetwork& net, std::span<const double> theta) {
  return coupling_flow(net.graph(), theta);
}

Eigen::MatrixXd jacobian(const OscillatorNetwork& net, std::span<const double> theta) {
  require_size(net.size(), theta.size(), "jacobian theta");
  const auto n = static_cast<Eigen::Index>(net.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : net.graph().edges()) {
    const double c = e.weight * std::cos(theta[e.i] - theta[e.j]);
    const auto a = static_cast<Eigen::Index>(e.i);
    const auto b = static_cast<Eigen::Index>(e.j);
    j(a, a) -= c;
    j(b, b) -= c;
    j(a, b) += c;
    j(b, a) += c;
  }
  return j;
}

std::vector<double> balance_rhs(const OscillatorNetwork& net, std::span<const double> theta) {
  return coupling_flow(net.graph(), theta);
}

std::vector<double> kuramoto_rhs(double coupling, std::span<const double> omega, std::span<const double> theta) {
  require_size(omega.size(), theta.size(), "kuramoto_rhs theta");
  if (!(coupling > 0.0)) {
    throw InvalidArgument("kuramoto_rhs: coupling gain must be positive");
  }
  const std::size_t n = theta.size();
  const double scale = coupling / static_cast<double>(n);
  std::vector<double> rhs(omega.begin(), omega.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = scale * std::sin(theta[i] - theta[j]);
      rhs[i] -= s;
      rhs[j] += s;
    }
  }
  return rhs;
}

std::vector<double> kuramoto_rhs_mean_field(double coupling, std::span<const double> omega,
                                            std::span<const double> theta) {
  require_size(omega.size(), theta.size(), "kuramoto_rhs_mean_field theta");
  if (!(coupling > 0.0)) {
    throw InvalidArgument("kuramoto_rhs_mean_field: coupling gain must be positive");
  }
  // K r sin(theta_i - psi) = K (C sin theta_i - S cos theta_i) with C + iS the centroid;
  // this avoids psi, which is undefined at r = 0.
  double c = 0.0;
  double s = 0.0;
  for (double x : theta) {
    c += std::cos(x);
    s += std::sin(x);
  }
  const double n = static_cast<double>(theta.size());
  c /= n;
  s /= n;
  std::vector<double> rhs(omega.begin(), omega.end());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    rhs[i] -= coupling * (c * std::sin(theta[i]) - s * std::cos(theta[i]));
  }
  return rhs;
}

double two_oscillator_f(double kappa, double delta) noexcept { return 1.0 - kappa * std::sin(delta); }

SecondOrderNetwork::SecondOrderNetwork(WeightedGraph graph, std::vector<double> omega, std::vector<double> inertia,
                                       std::vector<double> damping)
    : graph_(std::move(graph)), omega_(std::move(omega)), inertia_(std::move(inertia)), damping_(std::move(damping)) {
  const std::size_t n = graph_.node_count();
  require_size(n, omega_.size(), "SecondOrderNetwork omega");
  require_size(n, inertia_.size(), "SecondOrderNetwork inertia");
  require_size(n, damping_.size(), "SecondOrderNetwork damping");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(inertia_[i] >= 0.0) || !(damping_[i] > 0.0)) {
      throw InvalidArgument("SecondOrderNetwork: need M >= 0 and D > 0 on every node");
    }
  }
}

SecondOrderDerivative second_order_rhs(const SecondOrderNetwork& net, std::span<const double> theta,
                                       std::span<const double> thetadot) {
  require_size(net.size(), thetadot.size(), "second_order_rhs thetadot");
  for (double m : net.inertia()) {
    if (!(m > 0.0)) {
      throw InvalidArgument("second_order_rhs: zero inertia; use power_rhs for mixed-order networks");
    }
  }
  const std::vector<double> flow = coupling_flow(net.graph(), theta);
  SecondOrderDerivative d;
  d.dtheta.assign(thetadot.begin(), thetadot.end());
  d.dthetadot.resize(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    d.dthetadot[i] = (net.omega()[i] - flow[i] - net.damping()[i] * thetadot[i]) / net.inertia()[i];
  }
  return d;
}

double mechanical_energy(const SecondOrderNetwork& net, std::span<const double> theta,
                         std::span<const double> thetadot) {
  require_size(net.size(), thetadot.size(), "mechanical_energy thetadot");
  require_size(net.size(), theta.size(), "mechanical_energy theta");
  double e = 0.0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    e += 0.5 * net.inertia()[i] * thetadot[i] * thetadot[i];
  }
  for (const Edge& edge : net.graph().edges()) {
    e += edge.weight * (1.0 - std::cos(theta[edge.i] - theta[edge.j]));
  }
  return e;
}

PowerNetwork::PowerNetwork(WeightedGraph graph, std::vector<BusKind> kinds, std::vector<double> power,
                           std::vector<double> damping, std::vector<double> inertia)
    : graph_(std::move(graph)),
      kinds_(std::move(kinds)),
      power_(std::move(power)),
      damping_(std::move(damping)),
      inertia_(std::move(inertia)) {
  const std::size_t n = graph_.node_count();
  require_size(n, kinds_.size(), "PowerNetwork partition");
  require_size(n, power_.size(), "PowerNetwork power");
  require_size(n, damping_.size(), "PowerNetwork damping");
  require_size(n, inertia_.size(), "PowerNetwork inertia");
  require_finite(power_, "PowerNetwork power");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(damping_[i] > 0.0)) {
      throw InvalidArgument("PowerNetwork: damping must be positive on node " + std::to_string(i));
    }
    if (kinds_[i] == BusKind::generator) {
      if (!(inertia_[i] > 0.0)) {
        throw InvalidArgument("PowerNetwork: generator " + std::to_string(i) + " needs positive inertia");
      }
      generators_.push_back(i);
    } else if (inertia_[i] != 0.0) {
      throw InvalidArgument("PowerNetwork: load/inverter node " + std::to_string(i) + " cannot carry inertia");
    }
  }
}

double PowerNetwork::sync_frequency() const {
  return std::accumulate(power_.begin(), power_.end(), 0.0) /
         std::accumulate(damping_.begin(), damping_.end(), 0.0);
}

PowerDerivative power_rhs(const PowerNetwork& net, std::span<const double> theta,
                          std::span<const double> generator_freq) {
  require_size(net.generators().size(), generator_freq.size(), "power_rhs generator frequencies");
  const std::vector<double> flow = coupling_flow(net.graph(), theta);
  PowerDerivative d;
  d.dtheta.resize(net.size());
  d.dgenerator_freq.resize(net.generators().size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (net.kinds()[i] != BusKind::generator) {
      d.dtheta[i] = (net.power()[i] - flow[i]) / net.damping()[i];
    }
  }
  for (std::size_t g = 0; g < net.generators().size(); ++g) {
    const std::size_t i = net.generators()[g];
    d.dtheta[i] = generator_freq[g];
    d.dgenerator_freq[g] = (net.power()[i] - flow[i] - net.damping()[i] * generator_freq[g]) / net.inertia()[i];
  }
  return d;
}

VehicleDerivative vehicle_rhs(const VehicleSwarm& swarm, double t, std::span<const double> headings) {
  require_size(swarm.graph.node_count(), headings.size(), "vehicle_rhs headings");
  const std::size_t n = headings.size();
  VehicleDerivative d;
  d.velocity.resize(n);
  d.heading_rate.assign(n, swarm.omega0(t));
  for (std::size_t i = 0; i < n; ++i) {
    d.velocity[i] = std::polar(1.0, headings[i]);
  }
  for (const Edge& e : swarm.graph.edges()) {
    const double a = swarm.edge_weight ? swarm.edge_weight(t, e) : e.weight;
    const double s = swarm.gain * a * std::sin(headings[e.i] - headings[e.j]);
    d.heading_rate[e.i] -= s;
    d.heading_rate[e.j] += s;
  }
  return d;
}

ClockNetwork::ClockNetwork(WeightedGraph graph, std::vector<double> periods, double gain, CouplingFn f)
    : graph_(std::move(graph)), periods_(std::move(periods)), gain_(gain), f_(std::move(f)) {
  require_size(graph_.node_count(), periods_.size(), "ClockNetwork periods");
  if (!f_) {
    throw InvalidArgument("ClockNetwork: coupling function missing");
  }
  for (double p : periods_) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw InvalidArgument("ClockNetwork: periods must be positive");
    }
  }
  const std::vector<double> deg = degrees(graph_);
  for (std::size_t i = 0; i < deg.size(); ++i) {
    if (deg[i] == 0.0) {
      throw InvalidArgument("ClockNetwork: node " + std::to_string(i) + " has no neighbours");
    }
    if (std::abs(deg[i] - 1.0) > 1e-9) {
      throw InvalidArgument("ClockNetwork: weights of node " + std::to_string(i) + " are not convex");
    }
  }
  constexpr int kGrid = 64;
  if (std::abs(f_(0.0)) > 1e-9) {
    throw InvalidArgument("ClockNetwork: coupling function must vanish at 0");
  }
  for (int k = 1; k < kGrid; ++k) {
    // Offset grid avoids landing on discontinuities of sawtooth-like functions.
    const double x = (k + 0.37) * kTwoPi / kGrid - std::numbers::pi;
    const double fx = f_(x);
    if (std::abs(fx + f_(-x)) > 1e-9 * (1.0 + std::abs(fx))) {
      throw InvalidArgument("ClockNetwork: coupling function is not odd");
    }
    if (std::abs(fx - f_(x + kTwoPi)) > 1e-9 * (1.0 + std::abs(fx))) {
      throw InvalidArgument("ClockNetwork: coupling function is not 2pi-periodic");
    }
  }
}

std::vector<double> clock_rhs(const ClockNetwork& net, std::span<const double> theta) {
  require_size(net.size(), theta.size(), "clock_rhs theta");
  std::vector<double> rhs(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    rhs[i] = kTwoPi / net.periods()[i];
  }
  for (const Edge& e : net.graph().edges()) {
    rhs[e.i] += net.gain() * e.weight * net.coupling()(theta[e.i] - theta[e.j]);
    rhs[e.j] += net.gain() * e.weight * net.coupling()(theta[e.j] - theta[e.i]);
  }
  return rhs;
}

OscillatorNetwork clock_as_oscillator_network(const ClockNetwork& net) {
  if (!(net.gain() < 0.0)) {
    throw InvalidArgument("clock_as_oscillator_network: needs K < 0 so that the coupling is attractive");
  }
  std::vector<Edge> edges;
  for (const Edge& e : net.graph().edges()) {
    edges.push_back({e.i, e.j, -net.gain() * e.weight});
  }
  std::vector<double> omega(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    omega[i] = kTwoPi / net.periods()[i];
  }
  return OscillatorNetwork(WeightedGraph(net.graph().node_count(), std::move(edges)), std::move(omega));
}

}  // namespace syncnet
