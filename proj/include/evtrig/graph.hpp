#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace evtrig {

/// A directed edge in arrow orientation: information flows from `from` to `to`.
struct Edge {
    std::size_t from;
    std::size_t to;
    double weight;
};

/// Directed weighted sensor graph.
///
/// Row i, column j of the adjacency holds a_{i,j}, the weight node i applies
/// to data received from its parent j. An arrow j -> i of weight w is thus
/// stored at (i, j). Nodes are 0-based in this API. Immutable once built.
class SensorGraph {
public:
    SensorGraph() = default;
    explicit SensorGraph(Eigen::MatrixXd adjacency);

    /// Builds the graph from arrow-oriented edges; duplicate arrows accumulate.
    static SensorGraph from_edges(std::size_t n, const std::vector<Edge>& edges);

    std::size_t size() const noexcept { return static_cast<std::size_t>(adjacency_.rows()); }
    const Eigen::MatrixXd& adjacency() const noexcept { return adjacency_; }
    double weight(std::size_t child, std::size_t parent) const { return adjacency_(child, parent); }

    /// { j : a_{i,j} > 0 }, ascending.
    std::vector<std::size_t> parents(std::size_t i) const;
    /// { j : a_{j,i} > 0 }, ascending.
    std::vector<std::size_t> children(std::size_t i) const;

    /// Number of directed edges (nonzero off-diagonal weights).
    std::size_t edge_count() const;
    /// |N_i^c| for every node.
    std::vector<std::size_t> child_counts() const;

    /// Row sums of A (weighted in-degree, the diagonal of D).
    Eigen::VectorXd in_weights() const;
    /// Column sums of A (weighted out-degree).
    Eigen::VectorXd out_weights() const;

    std::vector<Edge> edges() const;

private:
    void check_index(std::size_t i) const;

    Eigen::MatrixXd adjacency_;
};

struct LaplacianPair {
    Eigen::MatrixXd laplacian;        // L = D - A
    Eigen::MatrixXd mirror_laplacian; // (L + L^T) / 2
};

inline constexpr double kBalanceTolerance = 1e-12;

LaplacianPair laplacian(const SensorGraph& g);

bool is_balanced(const SensorGraph& g, double tolerance = kBalanceTolerance);

/// True iff some root reaches every node following arrows parent -> child.
bool has_spanning_tree(const SensorGraph& g);

/// Connectivity of the undirected mirror graph (breadth-first search).
bool mirror_connected(const SensorGraph& g);

/// Second-smallest eigenvalue of the mirror Laplacian. Requires a balanced graph.
double lambda2_mirror(const SensorGraph& g);

/// Uniform points in the unit square, bidirectional unit-weight edges for pairs
/// within `radius`. Retries with derived sub-seeds until the graph is connected.
SensorGraph random_geometric(std::size_t n, double radius, std::uint64_t seed,
                             int max_attempts = 100);

}  // namespace evtrig
