#pragma once

#include <cstdint>

namespace hullconc {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based generator: the i-th output is a pure function of (key, i),
/// so identical seeds give identical streams regardless of threading, and
/// independent streams are obtained by deriving fresh keys.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(seed) {}

    std::uint64_t next_u64() { return at(counter_++); }

    /// Uniform on [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0,1); safe input for inverse-CDF transforms.
    double next_open01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Stateless access to the stream.
    std::uint64_t at(std::uint64_t i) const {
        return detail::mix64(key_ + (i + 1) * 0x9e3779b97f4a7c15ULL);
    }

    std::uint64_t key() const { return key_; }

    /// Derives a decorrelated child seed; hash of (master, index) through two
    /// rounds with distinct offsets.
    static std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
        std::uint64_t h = detail::mix64(master ^ 0x2545f4914f6cdd1dULL);
        h = detail::mix64(h + (index + 1) * 0x9e3779b97f4a7c15ULL);
        return h;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace hullconc
