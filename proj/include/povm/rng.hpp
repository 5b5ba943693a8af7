#pragma once

#include <cstdint>
#include <limits>

namespace povm {

/// Counter-based generator: the k-th output of a stream is a pure function
/// of (seed, stream, k), built from the SplitMix64 finalizer. Streams are
/// derived by index, so parallel consumers get disjoint reproducible
/// sequences.
class CounterRng {
  public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL))) {}

    result_type operator()() { return mix(key_ + kGamma * ++counter_); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Independent child stream.
    [[nodiscard]] CounterRng split(std::uint64_t stream) const {
        CounterRng child(0, 0);
        child.key_ = mix(key_ ^ mix(stream + 0xD1B54A32D192ED03ULL));
        return child;
    }

    [[nodiscard]] std::uint64_t counter() const { return counter_; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace povm
