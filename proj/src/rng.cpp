#include "evtrig/rng.hpp"

namespace evtrig {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t run_seed(std::uint64_t master, std::uint64_t run) noexcept {
    return mix64(mix64(master) ^ mix64(run + 0x632BE59BD9B4E019ULL));
}

std::uint64_t stream_seed(std::uint64_t run_seed, std::uint64_t sensor,
                          StreamPurpose purpose) noexcept {
    const auto tag = static_cast<std::uint64_t>(purpose);
    return mix64(run_seed ^ mix64((sensor << 4) ^ tag));
}

}  // namespace evtrig
