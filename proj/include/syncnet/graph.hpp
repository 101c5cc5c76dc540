#pragma once

// Undirected weighted coupling graphs, their Laplacian and incidence matrices,
// and the spectral quantities used by the synchronization conditions.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace syncnet {

/// Undirected edge {i, j} with i < j and weight > 0.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 0.0;
};

/// Undirected graph without self-loops or duplicate edges; all weights strictly
/// positive. Edges are stored sorted by (i, j), which fixes the column order of
/// the incidence matrix.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// Validating constructor; endpoints may be given in either order.
  WeightedGraph(std::size_t n, std::vector<Edge> edges);

  std::size_t node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  Eigen::MatrixXd adjacency() const;
  Eigen::VectorXd edge_weights() const;
  bool is_connected() const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

WeightedGraph build_graph(std::size_t n, std::vector<Edge> edges);
WeightedGraph complete_graph(std::size_t n, double uniform_weight);
/// Cycle 0-1-...-(n-1)-0.
WeightedGraph ring_graph(std::size_t n, double uniform_weight);
WeightedGraph path_graph(std::size_t n, double uniform_weight);
/// Hub 0 joined to every other node.
WeightedGraph star_graph(std::size_t n, double uniform_weight);

double degree(const WeightedGraph& g, std::size_t i);
std::vector<double> degrees(const WeightedGraph& g);

/// L = diag(deg) - A.
Eigen::MatrixXd laplacian(const WeightedGraph& g);

struct SpectralSummary {
  Eigen::VectorXd eigenvalues;   ///< ascending
  Eigen::MatrixXd eigenvectors;  ///< orthonormal columns matching `eigenvalues`
  double lambda2 = 0.0;
};

/// Dense symmetric eigendecomposition of the Laplacian.
SpectralSummary spectral_summary(const WeightedGraph& g);

/// Second-smallest Laplacian eigenvalue; 0 (to roundoff) iff disconnected.
double algebraic_connectivity(const WeightedGraph& g);
double algebraic_connectivity(const Eigen::MatrixXd& laplacian);

/// Moore-Penrose pseudoinverse of a connected-graph Laplacian. Throws
/// RankDeficient when the second eigenvalue is below 1e-9.
Eigen::MatrixXd laplacian_pseudoinverse(const Eigen::MatrixXd& laplacian);

/// n x |E| oriented incidence matrix: the lower endpoint of each edge is the
/// source (-1) and the higher endpoint the sink (+1), so (B^T x)_l = x_j - x_i.
Eigen::MatrixXd incidence(const WeightedGraph& g);

/// Incidence matrix of the unweighted complete graph on n nodes, columns in (i, j) order.
Eigen::MatrixXd complete_incidence(std::size_t n);

/// True iff the adjacency matrix, in the given node order, is circulant.
bool is_circulant(const WeightedGraph& g, double tol = 1e-12);

/// Graph file: {"n": N, "edges": [[i, j, weight], ...]}.
WeightedGraph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const WeightedGraph& g);
WeightedGraph load_graph(const std::string& path);

}  // namespace syncnet
