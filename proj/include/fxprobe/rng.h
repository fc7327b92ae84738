#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fxprobe {

/// Derives an independent 64-bit stream key from (seed, purpose, index).
/// Every random draw in the library goes through a key built here, so each
/// module (and each clip within it) is deterministic on its own.
std::uint64_t derive_key(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0);

/// Small deterministic generator over std::mt19937_64. Uniform and normal
/// draws are computed here rather than through std distributions, whose
/// algorithms differ between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t key) : engine_(key) {}
    Rng(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0)
        : engine_(derive_key(seed, purpose, index)) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    double normal();

    template <class It>
    void shuffle(It first, It last) {
        const auto n = last - first;
        for (auto i = n - 1; i > 0; --i) {
            const auto j = static_cast<decltype(i)>(uniform_int(0, i));
            std::iter_swap(first + i, first + j);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// FNV-1a over bytes; used for config-section hashes and stream keys.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace fxprobe
