#pragma once

#include <cstdint>
#include <initializer_list>

namespace dsglm::rng {

// splitmix64 output mix (Steele, Lea & Flood).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Counter-based stream: state walks a Weyl sequence, outputs are the mixed
// counter. Sub-streams are derived by hashing a key path into the initial
// counter, so (master_seed, path...) fully determines the sequence and
// streams can be handed to workers in any order.
class Stream {
  public:
    Stream() : state_(0) {}
    explicit Stream(std::uint64_t key) : state_(key) {}

    static Stream of(std::uint64_t master_seed,
                     std::initializer_list<std::uint64_t> path) {
        std::uint64_t k = mix64(master_seed + 0x9E3779B97F4A7C15ull);
        for (std::uint64_t p : path) {
            k = mix64(k ^ (p + 0x9E3779B97F4A7C15ull + (k << 6) + (k >> 2)));
        }
        return Stream(k);
    }

    Stream derive(std::uint64_t tag) const {
        return Stream(mix64(state_ ^ (tag + 0x9E3779B97F4A7C15ull)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix64(state_);
    }

    // Uniform on [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_double() <= p; }

    // Uniform integer in [0, n). Modulo bias is < n / 2^64, irrelevant here.
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t state_;
};

// Fisher-Yates shuffle of [first, last) driven by the stream.
template <typename It>
void shuffle(It first, It last, Stream& s) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
        const std::uint64_t j = s.below(i);
        std::swap(first[i - 1], first[j]);
    }
}

}  // namespace dsglm::rng
