#include "evtrig/recursion.hpp"

#include "evtrig/errors.hpp"
#include "evtrig/estimator.hpp"

namespace evtrig {

std::vector<double> linear_recursion_sim(const LinearRecursion& rec, const Eigen::VectorXd& e0,
                                         std::int64_t horizon, RngStream& rng) {
    if (!rec.q) throw ArgumentError("linear recursion needs a Q source");
    if (horizon < 0) throw ArgumentError("linear recursion horizon must be >= 0");
    const Eigen::Index q = e0.size();

    std::vector<double> norms;
    norms.reserve(static_cast<std::size_t>(horizon) + 1);
    Eigen::VectorXd e = e0;
    norms.push_back(e.norm());
    for (std::int64_t t = 0; t < horizon; ++t) {
        const double a = rec.alpha(static_cast<double>(t));
        Eigen::MatrixXd drift = rec.q(t, rng);
        if (rec.delta) drift += rec.delta(t, rng);
        if (drift.rows() != q || drift.cols() != q) {
            throw ModelError("linear recursion: Q + Delta must be q x q");
        }
        Eigen::VectorXd forcing = Eigen::VectorXd::Zero(q);
        if (rec.eps1) forcing += rec.eps1(t, rng);
        if (rec.eps2) forcing += rec.eps2(t, e, rng);
        e += a * (drift * e + forcing);
        guard_divergence(e, rec.divergence_bound, t, 0);
        norms.push_back(e.norm());
    }
    return norms;
}

std::vector<double> linear_recursion_ensemble(const LinearRecursion& rec, const Eigen::VectorXd& e0,
                                              std::int64_t horizon, std::size_t runs,
                                              std::uint64_t seed) {
    if (runs == 0) throw ArgumentError("ensemble needs at least one run");
    std::vector<double> mean(static_cast<std::size_t>(horizon) + 1, 0.0);
    for (std::size_t r = 0; r < runs; ++r) {
        RngStream rng(stream_seed(run_seed(seed, r), 0, StreamPurpose::oracle));
        const auto norms = linear_recursion_sim(rec, e0, horizon, rng);
        for (std::size_t t = 0; t < mean.size(); ++t) mean[t] += norms[t] * norms[t];
    }
    for (auto& v : mean) v /= static_cast<double>(runs);
    return mean;
}

}  // namespace evtrig
