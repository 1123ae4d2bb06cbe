#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace curev {

/// Seeded generator whose output is identical on every platform.
///
/// std::shuffle and std::uniform_int_distribution are implementation-defined,
/// so splits and samples built on them would differ between standard
/// libraries. Only the mt19937_64 engine itself is pinned by the standard.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, bound). `bound` must be positive.
    std::uint64_t below(std::uint64_t bound) {
        // Rejection sampling over the largest multiple of bound.
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
        std::uint64_t draw = engine_();
        while (draw >= limit) draw = engine_();
        return draw % bound;
    }

    /// Fisher-Yates, walking from the back.
    template <class T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace curev
