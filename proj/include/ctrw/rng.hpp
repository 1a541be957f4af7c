#pragma once

// Counter-based splittable RNG. State is (seed, stream_id, counter); output k
// is a pure hash of the triple, so replay from any counter is bit-exact and
// streams can be handed to threads without coordination. Mixing function is
// SplitMix64 (Steele/Lea/Flood; Vigna's fixed-increment variant).

#include <cstdint>
#include <cmath>

namespace ctrw {

inline uint64_t splitmix64_mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(uint64_t seed, uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id), counter_(0), split_count_(0) {
        key_ = derive_key(seed, stream_id);
    }

    uint64_t seed() const { return seed_; }
    uint64_t stream_id() const { return stream_id_; }
    uint64_t counter() const { return counter_; }

    // Replay support: reposition the counter.
    void seek(uint64_t counter) { counter_ = counter; }

    uint64_t next_u64() {
        uint64_t x = key_ + (counter_++) * 0x9e3779b97f4a7c15ULL;
        return splitmix64_mix(x);
    }

    // Uniform on the open interval (0,1); never returns 0 or 1, so logs and
    // inverse-CDF endpoints are safe.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform on [0,1) with full 53-bit resolution.
    double uniform_co() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double exponential(double rate = 1.0) { return -std::log(uniform01()) / rate; }

    double normal() {
        // Box-Muller; the spare is dropped to keep the stream stateless.
        double u1 = uniform01(), u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    uint64_t poisson(double mean) {
        // Knuth product method below a cutoff; larger means are split by
        // infinite divisibility so the draw stays exact.
        if (mean <= 0.0) return 0;
        if (mean > 30.0) {
            double half = 0.5 * mean;
            return poisson(half) + poisson(mean - half);
        }
        double limit = std::exp(-mean), prod = uniform01();
        uint64_t n = 0;
        while (prod > limit) {
            prod *= uniform01();
            ++n;
        }
        return n;
    }

    // Child stream with a distinct id; deterministic in the parent's split
    // sequence, statistically independent of the parent output stream.
    RngStream split() {
        uint64_t child_id = splitmix64_mix(stream_id_ ^ splitmix64_mix(0x5851f42d4c957f2dULL + (++split_count_)));
        return RngStream(seed_, child_id);
    }

    // Deterministic n-th child irrespective of how many splits happened; used
    // to assign replica streams before scheduling.
    RngStream child(uint64_t index) const {
        uint64_t child_id = splitmix64_mix(stream_id_ ^ splitmix64_mix(0x9e6c63d0876a9a47ULL + index));
        return RngStream(seed_, child_id);
    }

    // UniformRandomBitGenerator interface.
    using result_type = uint64_t;
    static constexpr uint64_t min() { return 0; }
    static constexpr uint64_t max() { return ~0ULL; }
    uint64_t operator()() { return next_u64(); }

private:
    static uint64_t derive_key(uint64_t seed, uint64_t stream_id) {
        uint64_t k = splitmix64_mix(seed + 0x9e3779b97f4a7c15ULL);
        k ^= splitmix64_mix(stream_id + 0xd1b54a32d192ed03ULL);
        return splitmix64_mix(k);
    }

    uint64_t seed_, stream_id_, counter_, split_count_, key_;
};

} // namespace ctrw
