#pragma once

// Counter-based random streams. Output k of stream (seed, id) is a pure
// function of (seed, id, k), so sample i of a Monte Carlo run draws the same
// numbers no matter which thread computes it or in what order.

#include <cstdint>
#include <limits>

namespace entdyn {

class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1].
    double uniform_open_low();
    /// Standard normal by Box-Muller; the second deviate of each pair is kept for the next call.
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }
    /// Exponential with the given rate (mean 1/rate).
    double exponential(double rate);

    std::uint64_t master_seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_; }
    std::uint64_t counter() const noexcept { return counter_; }

    /// An independent child stream, e.g. one per purpose inside a sample.
    RngStream substream(std::uint64_t tag) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// The splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace entdyn
