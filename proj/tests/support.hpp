#pragma once

// Shared helpers for the test binaries: random graphs and states, finite
// differences, and the closed-form two-oscillator solution.

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "syncnet/graph.hpp"
#include "syncnet/models.hpp"
#include "syncnet/rng.hpp"

namespace testing_support {

using syncnet::Edge;
using syncnet::Rng;
using syncnet::WeightedGraph;

// Random spanning tree plus each remaining pair with probability p; weights in [wlo, whi).
inline WeightedGraph random_connected_graph(Rng& rng, std::size_t n, double p, double wlo = 0.5, double whi = 2.0) {
  std::vector<Edge> edges;
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  for (std::size_t i = 1; i < n; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
    edges.push_back({j, i, rng.uniform(wlo, whi)});
    used[j][i] = used[i][j] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!used[i][j] && rng.uniform() < p) {
        edges.push_back({i, j, rng.uniform(wlo, whi)});
      }
    }
  }
  return WeightedGraph(n, std::move(edges));
}

// Each pair independently with probability p; may be disconnected.
inline WeightedGraph random_graph(Rng& rng, std::size_t n, double p) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() < p) {
        edges.push_back({i, j, rng.uniform(0.5, 2.0)});
      }
    }
  }
  return WeightedGraph(n, std::move(edges));
}

inline std::vector<double> zero_mean(std::vector<double> w) {
  double m = 0.0;
  for (double x : w) m += x;
  m /= static_cast<double>(w.size());
  for (double& x : w) x -= m;
  return w;
}

// Central-difference Jacobian of f at x.
template <class F>
Eigen::MatrixXd fd_jacobian(F f, std::vector<double> x, double h) {
  const std::size_t n = x.size();
  Eigen::MatrixXd j(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const double x0 = x[c];
    x[c] = x0 + h;
    const std::vector<double> fp = f(x);
    x[c] = x0 - h;
    const std::vector<double> fm = f(x);
    x[c] = x0;
    for (std::size_t r = 0; r < n; ++r) {
      j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
    }
  }
  return j;
}

template <class F>
std::vector<double> fd_gradient(F f, std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double x0 = x[c];
    x[c] = x0 + h;
    const double fp = f(x);
    x[c] = x0 - h;
    const double fm = f(x);
    x[c] = x0;
    g[c] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Exact solution of d delta/dt = 1 - kappa sin(delta), 0 <= kappa < 1, with
// u = tan(delta/2). Valid while the tangent argument stays below pi/2, i.e.
// before delta first reaches pi.
inline double two_oscillator_exact(double kappa, double delta0, double t) {
  const double s = std::sqrt(1.0 - kappa * kappa);
  const double u0 = std::tan(delta0 / 2.0);
  const double u = kappa + s * std::tan(s * t / 2.0 + std::atan((u0 - kappa) / s));
  return 2.0 * std::atan(u);
}

}  // namespace testing_support
