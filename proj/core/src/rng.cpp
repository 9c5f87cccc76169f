#include "entdyn/rng.hpp"

#include <cmath>
#include <numbers>

#include "entdyn/error.hpp"

namespace entdyn {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : seed_(master_seed), stream_(stream_id), key_(mix64(mix64(master_seed) ^ (stream_id * 0xd1b54a32d192ed03ULL))) {}

RngStream::result_type RngStream::operator()() {
    // Two rounds keyed on the stream; the counter is the only state.
    return mix64(mix64(key_ ^ counter_++) + key_);
}

double RngStream::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double RngStream::uniform_open_low() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_open_low();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

double RngStream::exponential(double rate) {
    if (!(rate > 0)) throw ArgumentError("exponential rate must be positive");
    return -std::log(uniform_open_low()) / rate;
}

RngStream RngStream::substream(std::uint64_t tag) const {
    RngStream child(seed_, stream_);
    child.key_ = mix64(key_ ^ mix64(tag + 0x632be59bd9b4e019ULL));
    return child;
}

}  // namespace entdyn
