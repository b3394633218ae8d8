#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace crn {

/// Philox4x64-10 counter-based generator keyed by (seed, stream_id).
///
/// The 256-bit counter starts at zero and is incremented before each block is
/// generated; each block yields four 64-bit words in order. This matches
/// numpy.random.Philox(key=seed + (stream_id << 64)).random_raw().
class RngStream {
  public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// (x >> 11) * 2^-53, in [0, 1).
    double uniform();
    /// -log(1 - u), a unit exponential.
    double exponential();

    std::uint64_t seed() const { return key_[0]; }
    std::uint64_t stream_id() const { return key_[1]; }

    /// One Philox4x64-10 block for an explicit counter and key.
    static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> counter,
                                              std::array<std::uint64_t, 2> key);

  private:
    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> counter_{};
    std::array<std::uint64_t, 4> buffer_{};
    int pos_ = 4;
};

}  // namespace crn
