#pragma once

#include "evtrig/rng.hpp"
#include "evtrig/schedule.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace evtrig {

/// Perturbed linear stochastic-approximation recursion
///
///   e(t+1) = e(t) + alpha(t) (Q(t) + Delta(t)) e(t) + alpha(t) (eps1(t) + eps2(t)),
///
/// simulated exactly as written, with alpha evaluated at t itself (no shift).
/// Every source receives the time and the run's random stream; eps2 also sees
/// the current error since it only needs to be adapted to the past.
struct LinearRecursion {
    using MatrixSource = std::function<Eigen::MatrixXd(std::int64_t t, RngStream& rng)>;
    using NoiseSource = std::function<Eigen::VectorXd(std::int64_t t, RngStream& rng)>;
    using StateNoiseSource =
        std::function<Eigen::VectorXd(std::int64_t t, const Eigen::VectorXd& e, RngStream& rng)>;

    MatrixSource q;
    MatrixSource delta;      // optional; zero when empty
    NoiseSource eps1;        // optional martingale-difference term
    StateNoiseSource eps2;   // optional vanishing term
    Schedule alpha = Schedule::power(1.0, 1.0, 0.7);
    double divergence_bound = 1e12;
};

/// ||e(t)|| for t = 0..horizon.
std::vector<double> linear_recursion_sim(const LinearRecursion& rec, const Eigen::VectorXd& e0,
                                         std::int64_t horizon, RngStream& rng);

/// Ensemble mean of ||e(t)||^2 over `runs` independent streams derived from `seed`.
std::vector<double> linear_recursion_ensemble(const LinearRecursion& rec, const Eigen::VectorXd& e0,
                                              std::int64_t horizon, std::size_t runs,
                                              std::uint64_t seed);

}  // namespace evtrig
