#include "syncnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include <json.hpp>

#include "syncnet/errors.hpp"

namespace syncnet {

namespace {

constexpr double kRankTolerance = 1e-9;

}  // namespace

WeightedGraph::WeightedGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  for (Edge& e : edges_) {
    if (e.i >= n_ || e.j >= n_) {
      throw InvalidArgument("graph: edge endpoint out of range");
    }
    if (e.i == e.j) {
      throw InvalidArgument("graph: self-loop at node " + std::to_string(e.i));
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw InvalidArgument("graph: edge weights must be finite and strictly positive");
    }
    if (e.i > e.j) {
      std::swap(e.i, e.j);
    }
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k].i == edges_[k - 1].i && edges_[k].j == edges_[k - 1].j) {
      throw InvalidArgument("graph: duplicate edge {" + std::to_string(edges_[k].i) + ", " +
                            std::to_string(edges_[k].j) + "}");
    }
  }
}

Eigen::MatrixXd WeightedGraph::adjacency() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
  for (const Edge& e : edges_) {
    a(e.i, e.j) = e.weight;
    a(e.j, e.i) = e.weight;
  }
  return a;
}

Eigen::VectorXd WeightedGraph::edge_weights() const {
  Eigen::VectorXd w(edges_.size());
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    w(k) = edges_[k].weight;
  }
  return w;
}

bool WeightedGraph::is_connected() const {
  if (n_ == 0) {
    return false;
  }
  // Union-find over the edge list.
  std::vector<std::size_t> parent(n_);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::size_t components = n_;
  for (const Edge& e : edges_) {
    const std::size_t a = find(e.i);
    const std::size_t b = find(e.j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

WeightedGraph build_graph(std::size_t n, std::vector<Edge> edges) { return WeightedGraph(n, std::move(edges)); }

WeightedGraph complete_graph(std::size_t n, double uniform_weight) {
  if (n < 2) {
    throw InvalidArgument("complete_graph: need n >= 2");
  }
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      edges.push_back({i, j, uniform_weight});
    }
  }
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph ring_graph(std::size_t n, double uniform_weight) {
  if (n < 3) {
    throw InvalidArgument("ring_graph: need n >= 3");
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    edges.push_back({i, (i + 1) % n, uniform_weight});
  }
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph path_graph(std::size_t n, double uniform_weight) {
  if (n < 2) {
    throw InvalidArgument("path_graph: need n >= 2");
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    edges.push_back({i, i + 1, uniform_weight});
  }
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph star_graph(std::size_t n, double uniform_weight) {
  if (n < 2) {
    throw InvalidArgument("star_graph: need n >= 2");
  }
  std::vector<Edge> edges;
  for (std::size_t j = 1; j < n; ++j) {
    edges.push_back({0, j, uniform_weight});
  }
  return WeightedGraph(n, std::move(edges));
}

double degree(const WeightedGraph& g, std::size_t i) {
  if (i >= g.node_count()) {
    throw InvalidArgument("degree: node index out of range");
  }
  double d = 0.0;
  for (const Edge& e : g.edges()) {
    if (e.i == i || e.j == i) {
      d += e.weight;
    }
  }
  return d;
}

std::vector<double> degrees(const WeightedGraph& g) {
  std::vector<double> d(g.node_count(), 0.0);
  for (const Edge& e : g.edges()) {
    d[e.i] += e.weight;
    d[e.j] += e.weight;
  }
  return d;
}

Eigen::MatrixXd laplacian(const WeightedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    const auto i = static_cast<Eigen::Index>(e.i);
    const auto j = static_cast<Eigen::Index>(e.j);
    l(i, i) += e.weight;
    l(j, j) += e.weight;
    l(i, j) -= e.weight;
    l(j, i) -= e.weight;
  }
  return l;
}

SpectralSummary spectral_summary(const WeightedGraph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian(g));
  if (solver.info() != Eigen::Success) {
    throw SolverError("spectral_summary: eigendecomposition failed");
  }
  SpectralSummary s;
  s.eigenvalues = solver.eigenvalues();
  s.eigenvectors = solver.eigenvectors();
  s.lambda2 = s.eigenvalues.size() >= 2 ? s.eigenvalues(1) : 0.0;
  return s;
}

double algebraic_connectivity(const Eigen::MatrixXd& l) {
  if (l.rows() < 2) {
    return 0.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw SolverError("algebraic_connectivity: eigendecomposition failed");
  }
  return solver.eigenvalues()(1);
}

double algebraic_connectivity(const WeightedGraph& g) { return algebraic_connectivity(laplacian(g)); }

Eigen::MatrixXd laplacian_pseudoinverse(const Eigen::MatrixXd& l) {
  if (l.rows() != l.cols() || l.rows() < 2) {
    throw InvalidArgument("laplacian_pseudoinverse: need a square matrix of size >= 2");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l);
  if (solver.info() != Eigen::Success) {
    throw SolverError("laplacian_pseudoinverse: eigendecomposition failed");
  }
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  if (lambda(1) < kRankTolerance) {
    throw RankDeficient("laplacian_pseudoinverse: Laplacian has more than one zero eigenvalue "
                        "(graph disconnected)");
  }
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(lambda.size());
  for (Eigen::Index k = 1; k < lambda.size(); ++k) {
    inv(k) = 1.0 / lambda(k);
  }
  const Eigen::MatrixXd& v = solver.eigenvectors();
  return v * inv.asDiagonal() * v.transpose();
}

Eigen::MatrixXd incidence(const WeightedGraph& g) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(g.node_count(), g.edge_count());
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    const Edge& e = g.edges()[k];
    b(e.i, k) = -1.0;
    b(e.j, k) = 1.0;
  }
  return b;
}

Eigen::MatrixXd complete_incidence(std::size_t n) {
  if (n < 2) {
    throw InvalidArgument("complete_incidence: need n >= 2");
  }
  return incidence(complete_graph(n, 1.0));
}

bool is_circulant(const WeightedGraph& g, double tol) {
  const Eigen::MatrixXd a = g.adjacency();
  const auto n = a.rows();
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(a(i, j) - a(0, (j - i + n) % n)) > tol) {
        return false;
      }
    }
  }
  return true;
}

WeightedGraph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("edges")) {
    throw InvalidArgument("graph json: expected object with fields 'n' and 'edges'");
  }
  for (const auto& [key, _] : j.items()) {
    if (key != "n" && key != "edges") {
      throw InvalidArgument("graph json: unknown field '" + key + "'");
    }
  }
  if (!j["n"].is_number_unsigned()) {
    throw InvalidArgument("graph json: 'n' must be a non-negative integer");
  }
  if (!j["edges"].is_array()) {
    throw InvalidArgument("graph json: 'edges' must be an array");
  }
  const auto n = j["n"].get<std::size_t>();
  std::vector<Edge> edges;
  for (const auto& item : j["edges"]) {
    if (!item.is_array() || item.size() != 3 || !item[0].is_number_unsigned() ||
        !item[1].is_number_unsigned() || !item[2].is_number()) {
      throw InvalidArgument("graph json: each edge must be [i, j, weight] with integer endpoints");
    }
    edges.push_back({item[0].get<std::size_t>(), item[1].get<std::size_t>(), item[2].get<double>()});
  }
  return WeightedGraph(n, std::move(edges));
}

nlohmann::json graph_to_json(const WeightedGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : g.edges()) {
    edges.push_back({e.i, e.j, e.weight});
  }
  return {{"n", g.node_count()}, {"edges", edges}};
}

WeightedGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgument("cannot open graph file '" + path + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("graph file '" + path + "': " + e.what());
  }
  return graph_from_json(j);
}

}  // namespace syncnet
