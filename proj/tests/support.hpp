#pragma once

// Shared fixtures and independent oracles for the test binaries.

#include "evtrig/graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace test_support {

// The seven-sensor example network, arrows as (from, to, weight), 1-based.
inline evtrig::SensorGraph figure_graph() {
    const int edges[][3] = {{1, 2, 2}, {1, 4, 1}, {2, 4, 1}, {2, 5, 1}, {3, 1, 1}, {4, 6, 3},
                            {4, 7, 1}, {5, 4, 2}, {6, 1, 2}, {6, 3, 1}, {7, 5, 1}};
    std::vector<evtrig::Edge> list;
    for (const auto& e : edges) {
        list.push_back({static_cast<std::size_t>(e[0] - 1), static_cast<std::size_t>(e[1] - 1),
                        static_cast<double>(e[2])});
    }
    return evtrig::SensorGraph::from_edges(7, list);
}

// Cyclic Jacobi rotations; ascending eigenvalues of a symmetric matrix.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
    const Eigen::Index n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> out;
    for (Eigen::Index k = 0; k < n; ++k) out.push_back(a(k, k));
    std::sort(out.begin(), out.end());
    return out;
}

// Breadth-first search on the undirected support of `a`.
inline bool bfs_connected(const Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::queue<Eigen::Index> q;
    q.push(0);
    seen[0] = true;
    std::size_t count = 1;
    while (!q.empty()) {
        const Eigen::Index v = q.front();
        q.pop();
        for (Eigen::Index w = 0; w < n; ++w) {
            if ((a(v, w) != 0.0 || a(w, v) != 0.0) && !seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = true;
                ++count;
                q.push(w);
            }
        }
    }
    return count == static_cast<std::size_t>(n);
}

}  // namespace test_support
