#pragma once

// splitmix64 generator with counter-derived substreams, plus a small block
// scheduler. Results never depend on how blocks are spread over threads.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace bordercurve::rng {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Independent generator for (seed, stream, block).
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t block) {
    return SplitMix64(mix64(mix64(seed) ^ mix64(stream * 0x632be59bd9b4e019ULL + 1)) + mix64(block));
}

/// Worker count: BORDER_CURVE_THREADS if set, else the hardware count.
inline unsigned thread_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BORDER_CURVE_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) n = static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return n;
}

/// Runs fn(block) for every block in [0, blocks).
template <class F>
void for_each_block(std::size_t blocks, F&& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), blocks));
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t b = next++; b < blocks; b = next++) fn(b);
        });
    for (auto& th : pool) th.join();
}

}  // namespace bordercurve::rng
