#include "evtrig/errors.hpp"
#include "evtrig/graph.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace evtrig;
using Catch::Approx;

TEST_CASE("figure graph stores arrows parent to child", "[graph]") {
    const SensorGraph g = test_support::figure_graph();
    CHECK(g.size() == 7);
    CHECK(g.edge_count() == 11);
    CHECK(g.weight(1, 0) == 2.0);  // 1 -> 2 with weight 2
    CHECK(g.weight(0, 1) == 0.0);
    CHECK(g.weight(5, 3) == 3.0);  // 4 -> 6 with weight 3
    CHECK(g.parents(3) == std::vector<std::size_t>{0, 1, 4});
    CHECK(g.children(3) == std::vector<std::size_t>{5, 6});
    CHECK(g.child_counts() == std::vector<std::size_t>{2, 2, 1, 2, 1, 2, 1});
}

TEST_CASE("figure graph in and out weights", "[graph]") {
    const SensorGraph g = test_support::figure_graph();
    const Eigen::VectorXd in = g.in_weights();
    const Eigen::VectorXd out = g.out_weights();
    const double expected[] = {3, 2, 1, 4, 2, 3, 1};
    for (int i = 0; i < 7; ++i) {
        CHECK(in(i) == expected[i]);
        CHECK(out(i) == expected[i]);
    }
    CHECK(is_balanced(g));
    CHECK(has_spanning_tree(g));
}

TEST_CASE("graph construction rejects malformed input", "[graph]") {
    CHECK_THROWS_AS(SensorGraph(Eigen::MatrixXd::Zero(2, 3)), ArgumentError);
    CHECK_THROWS_AS(SensorGraph(Eigen::MatrixXd::Zero(0, 0)), ArgumentError);
    Eigen::MatrixXd neg = Eigen::MatrixXd::Zero(2, 2);
    neg(0, 1) = -1.0;
    CHECK_THROWS_AS(SensorGraph(neg), ArgumentError);
    Eigen::MatrixXd loop = Eigen::MatrixXd::Zero(2, 2);
    loop(0, 0) = 1.0;
    CHECK_THROWS_AS(SensorGraph(loop), ArgumentError);
    CHECK_THROWS_AS(SensorGraph::from_edges(2, {{0, 2, 1.0}}), ArgumentError);
    CHECK_THROWS_AS(SensorGraph::from_edges(2, {{1, 1, 1.0}}), ArgumentError);
    CHECK_THROWS_AS(test_support::figure_graph().parents(7), ArgumentError);
}

TEST_CASE("laplacian of the smallest undirected graph", "[graph]") {
    const SensorGraph g = SensorGraph::from_edges(2, {{0, 1, 1.0}, {1, 0, 1.0}});
    const LaplacianPair l = laplacian(g);
    Eigen::Matrix2d expected;
    expected << 1, -1, -1, 1;
    CHECK(l.laplacian == Eigen::MatrixXd(expected));
    CHECK((l.mirror_laplacian - l.laplacian).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(lambda2_mirror(g) == Approx(2.0).margin(1e-12));
}

TEST_CASE("laplacian rows sum to zero, and columns too when balanced", "[graph]") {
    const SensorGraph g = test_support::figure_graph();
    const LaplacianPair l = laplacian(g);
    CHECK(l.laplacian.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(l.laplacian.colwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((l.mirror_laplacian - l.mirror_laplacian.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("balance predicate", "[graph]") {
    CHECK_FALSE(is_balanced(SensorGraph::from_edges(2, {{0, 1, 1.0}})));
    CHECK(is_balanced(SensorGraph::from_edges(3, {{0, 1, 0.5}, {1, 0, 0.5}, {1, 2, 2.0}, {2, 1, 2.0}})));
    CHECK(is_balanced(SensorGraph::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}})));
}

TEST_CASE("spanning tree predicate", "[graph]") {
    CHECK_FALSE(has_spanning_tree(SensorGraph(Eigen::MatrixXd::Zero(2, 2))));
    CHECK(has_spanning_tree(SensorGraph::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}})));
    CHECK(has_spanning_tree(SensorGraph::from_edges(3, {{0, 1, 1.0}, {0, 2, 1.0}})));
    // two sources feeding one sink: no single root
    CHECK_FALSE(has_spanning_tree(SensorGraph::from_edges(3, {{0, 2, 1.0}, {1, 2, 1.0}})));
    CHECK(has_spanning_tree(SensorGraph(Eigen::MatrixXd::Zero(1, 1))));
}

TEST_CASE("lambda2 of the mirror laplacian", "[graph]") {
    SECTION("figure graph matches an independent Jacobi eigensolver") {
        const SensorGraph g = test_support::figure_graph();
        const auto eig = test_support::jacobi_eigenvalues(laplacian(g).mirror_laplacian);
        CHECK(eig[0] == Approx(0.0).margin(1e-10));
        CHECK(eig[1] > 0.0);
        CHECK(lambda2_mirror(g) == Approx(eig[1]).epsilon(1e-10));
    }
    SECTION("two disconnected pairs") {
        const SensorGraph g = SensorGraph::from_edges(4, {{0, 1, 1.0}, {1, 0, 1.0}, {2, 3, 1.0}, {3, 2, 1.0}});
        CHECK(lambda2_mirror(g) == 0.0);
        CHECK_FALSE(mirror_connected(g));
    }
    SECTION("unbalanced input is rejected") {
        CHECK_THROWS_AS(lambda2_mirror(SensorGraph::from_edges(2, {{0, 1, 1.0}})), PreconditionError);
    }
}

TEST_CASE("lambda2 is positive exactly when the mirror graph is connected", "[graph]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(u(rng) * 5.0);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (u(rng) < 0.35) {
                    const double w = 0.5 + u(rng);
                    a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
                    a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = w;
                }
            }
        }
        const SensorGraph g(a);
        const bool connected = test_support::bfs_connected(a);
        CHECK(mirror_connected(g) == connected);
        CHECK((lambda2_mirror(g) > 1e-9) == connected);
    }
}

TEST_CASE("random geometric graphs", "[graph]") {
    SECTION("single node") {
        const SensorGraph g = random_geometric(1, 0.3, 3);
        CHECK(g.size() == 1);
        CHECK(g.edge_count() == 0);
    }
    SECTION("radius beyond the square's diameter gives a complete graph") {
        const SensorGraph g = random_geometric(2, 2.0, 3);
        CHECK(g.weight(0, 1) == 1.0);
        CHECK(g.weight(1, 0) == 1.0);
    }
    SECTION("fifty nodes at radius 0.3") {
        const SensorGraph g = random_geometric(50, 0.3, 7);
        CHECK(test_support::bfs_connected(g.adjacency()));
        CHECK(is_balanced(g));
        CHECK(g.adjacency() == g.adjacency().transpose());
        CHECK(random_geometric(50, 0.3, 7).adjacency() == g.adjacency());
        CHECK(random_geometric(50, 0.3, 8).adjacency() != g.adjacency());
    }
    SECTION("hopeless radius fails after bounded retries") {
        CHECK_THROWS_AS(random_geometric(50, 0.01, 7, 5), GenerationError);
        CHECK_THROWS_AS(random_geometric(0, 0.3, 7), ArgumentError);
        CHECK_THROWS_AS(random_geometric(5, 0.0, 7), ArgumentError);
    }
}
