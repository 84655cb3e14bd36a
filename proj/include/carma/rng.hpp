#pragma once

// Counter-based Philox4x32-10 generator. A stream is identified by
// (seed, stream id); paths in a Monte Carlo run get their own stream so the
// result does not depend on scheduling order.

#include <array>
#include <cstdint>
#include <limits>

namespace carma {

class Philox {
public:
    using result_type = std::uint64_t;

    Philox(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on the open interval (0, 1).
    double uniform();

    /// Raw block function; exposed for tests and seed derivation.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key);

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> buffer_{};
    int pos_ = 4;
};

/// Child seed for index i of a master seed; a pure function of its inputs.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Stream ids used across the library.
enum StreamId : std::uint64_t {
    kIncrementStream = 0,
    kPathAuxStream = 1,
};

}  // namespace carma
