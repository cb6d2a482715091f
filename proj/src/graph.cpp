#include "evtrig/graph.hpp"

#include "evtrig/errors.hpp"
#include "evtrig/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <deque>
#include <random>
#include <string>

namespace evtrig {

SensorGraph::SensorGraph(Eigen::MatrixXd adjacency) : adjacency_(std::move(adjacency)) {
    if (adjacency_.rows() != adjacency_.cols()) {
        throw ArgumentError("adjacency matrix must be square");
    }
    if (adjacency_.rows() == 0) {
        throw ArgumentError("graph needs at least one node");
    }
    for (Eigen::Index i = 0; i < adjacency_.rows(); ++i) {
        if (adjacency_(i, i) != 0.0) {
            throw ArgumentError("self loop at node " + std::to_string(i));
        }
        for (Eigen::Index j = 0; j < adjacency_.cols(); ++j) {
            const double w = adjacency_(i, j);
            if (!std::isfinite(w) || w < 0.0) {
                throw ArgumentError("edge weights must be finite and nonnegative");
            }
        }
    }
}

SensorGraph SensorGraph::from_edges(std::size_t n, const std::vector<Edge>& edges) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (const auto& e : edges) {
        if (e.from >= n || e.to >= n) {
            throw ArgumentError("edge endpoint out of range");
        }
        if (e.from == e.to) {
            throw ArgumentError("self loop at node " + std::to_string(e.from));
        }
        a(static_cast<Eigen::Index>(e.to), static_cast<Eigen::Index>(e.from)) += e.weight;
    }
    return SensorGraph(std::move(a));
}

void SensorGraph::check_index(std::size_t i) const {
    if (i >= size()) {
        throw ArgumentError("node index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(size()) + ")");
    }
}

std::vector<std::size_t> SensorGraph::parents(std::size_t i) const {
    check_index(i);
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < size(); ++j) {
        if (adjacency_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0) {
            out.push_back(j);
        }
    }
    return out;
}

std::vector<std::size_t> SensorGraph::children(std::size_t i) const {
    check_index(i);
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < size(); ++j) {
        if (adjacency_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) > 0.0) {
            out.push_back(j);
        }
    }
    return out;
}

std::size_t SensorGraph::edge_count() const {
    return static_cast<std::size_t>((adjacency_.array() > 0.0).count());
}

std::vector<std::size_t> SensorGraph::child_counts() const {
    std::vector<std::size_t> out(size(), 0);
    for (std::size_t i = 0; i < size(); ++i) {
        out[i] = static_cast<std::size_t>(
            (adjacency_.col(static_cast<Eigen::Index>(i)).array() > 0.0).count());
    }
    return out;
}

Eigen::VectorXd SensorGraph::in_weights() const { return adjacency_.rowwise().sum(); }

Eigen::VectorXd SensorGraph::out_weights() const { return adjacency_.colwise().sum().transpose(); }

std::vector<Edge> SensorGraph::edges() const {
    std::vector<Edge> out;
    for (std::size_t child = 0; child < size(); ++child) {
        for (std::size_t parent = 0; parent < size(); ++parent) {
            const double w = weight(child, parent);
            if (w > 0.0) out.push_back({parent, child, w});
        }
    }
    return out;
}

LaplacianPair laplacian(const SensorGraph& g) {
    const Eigen::MatrixXd& a = g.adjacency();
    LaplacianPair out;
    out.laplacian = -a;
    out.laplacian.diagonal() += a.rowwise().sum();
    out.mirror_laplacian = 0.5 * (out.laplacian + out.laplacian.transpose());
    return out;
}

bool is_balanced(const SensorGraph& g, double tolerance) {
    const Eigen::VectorXd diff = g.in_weights() - g.out_weights();
    return diff.cwiseAbs().maxCoeff() <= tolerance;
}

namespace {

// Nodes reached from `root` following parent -> child arrows.
std::size_t reach_count(const SensorGraph& g, std::size_t root) {
    const std::size_t n = g.size();
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> queue{root};
    seen[root] = true;
    std::size_t count = 1;
    while (!queue.empty()) {
        const std::size_t j = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < n; ++i) {
            if (!seen[i] && g.weight(i, j) > 0.0) {
                seen[i] = true;
                ++count;
                queue.push_back(i);
            }
        }
    }
    return count;
}

bool symmetric_connected(const Eigen::MatrixXd& a) {
    const auto n = a.rows();
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::deque<Eigen::Index> queue{0};
    seen[0] = true;
    Eigen::Index count = 1;
    while (!queue.empty()) {
        const auto j = queue.front();
        queue.pop_front();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!seen[static_cast<std::size_t>(i)] && (a(i, j) > 0.0 || a(j, i) > 0.0)) {
                seen[static_cast<std::size_t>(i)] = true;
                ++count;
                queue.push_back(i);
            }
        }
    }
    return count == n;
}

}  // namespace

bool has_spanning_tree(const SensorGraph& g) {
    for (std::size_t root = 0; root < g.size(); ++root) {
        if (reach_count(g, root) == g.size()) return true;
    }
    return false;
}

bool mirror_connected(const SensorGraph& g) { return symmetric_connected(g.adjacency()); }

double lambda2_mirror(const SensorGraph& g) {
    if (!is_balanced(g)) {
        throw PreconditionError(
            "lambda2_mirror requires a balanced graph; use laplacian() for (L + L^T)/2 otherwise");
    }
    if (g.size() < 2) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian(g).mirror_laplacian,
                                                          Eigen::EigenvaluesOnly);
    // eigenvalues() is ascending
    const double value = solver.eigenvalues()(1);
    return std::abs(value) < 1e-12 ? 0.0 : value;
}

SensorGraph random_geometric(std::size_t n, double radius, std::uint64_t seed, int max_attempts) {
    if (n == 0) throw ArgumentError("random_geometric: n must be >= 1");
    if (!(radius > 0.0)) throw ArgumentError("random_geometric: radius must be positive");

    const double r2 = radius * radius;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::mt19937_64 engine(mix64(seed + static_cast<std::uint64_t>(attempt)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = unit(engine);
            ys[i] = unit(engine);
        }
        const auto size = static_cast<Eigen::Index>(n);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dx = xs[i] - xs[j];
                const double dy = ys[i] - ys[j];
                if (dx * dx + dy * dy <= r2) {
                    a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
                    a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1.0;
                }
            }
        }
        if (symmetric_connected(a)) return SensorGraph(std::move(a));
    }
    throw GenerationError("random_geometric: no connected graph after " +
                          std::to_string(max_attempts) + " attempts (n=" + std::to_string(n) +
                          ", radius=" + std::to_string(radius) + ")");
}

}  // namespace evtrig
