#pragma once

#include <cstdint>
#include <random>

namespace evtrig {

/// SplitMix64 finalizer; the stable mixing function behind every derived seed.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for Monte Carlo run `run` under `master`. Depends only on the pair, so
/// adding runs never perturbs earlier ones.
std::uint64_t run_seed(std::uint64_t master, std::uint64_t run) noexcept;

/// Purpose tags for per-sensor sub-streams.
enum class StreamPurpose : std::uint64_t { noise = 1, regressor = 2, oracle = 3 };

std::uint64_t stream_seed(std::uint64_t run_seed, std::uint64_t sensor,
                          StreamPurpose purpose) noexcept;

/// An independent random stream owned by a single consumer.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0) : engine_(seed) {}

    double gaussian() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace evtrig
