#pragma once

#include <array>
#include <cstdint>

namespace spclab {

/// Counter-based Philox 4x32-10 generator (Salmon et al., SC'11).
///
/// A generator is identified by a 64-bit key (the master seed) and a 64-bit
/// stream id. Streams with distinct ids produce non-overlapping output by
/// construction, so replications can be assigned streams independently and
/// evaluated in any order or on any worker. The object is a plain value:
/// copying it forks the exact sequence position.
class Philox4x32 {
public:
    Philox4x32() = default;
    Philox4x32(std::uint64_t key, std::uint64_t stream_id) noexcept
        : key_{static_cast<std::uint32_t>(key),
               static_cast<std::uint32_t>(key >> 32)},
          stream_{static_cast<std::uint32_t>(stream_id),
                  static_cast<std::uint32_t>(stream_id >> 32)} {}

    std::uint32_t next_u32() noexcept {
        if (index_ == 4) {
            block_ = encrypt_counter();
            ++counter_;
            index_ = 0;
        }
        return block_[static_cast<std::size_t>(index_++)];
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    /// Uniform draw on the open interval (0,1); 53 significant bits,
    /// never exactly 0 or 1.
    double next_uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal draw via the inverse CDF. Consumes exactly one
    /// uniform, which keeps stream accounting independent of the value drawn.
    double next_normal() noexcept;

private:
    std::array<std::uint32_t, 4> encrypt_counter() const noexcept;

    std::array<std::uint32_t, 2> key_{};
    std::array<std::uint32_t, 2> stream_{};
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int index_ = 4;
};

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile, Wichura's AS 241 (PPND16); relative error
/// below 1e-15 over (0,1). Throws std::domain_error outside (0,1).
double normal_quantile(double p);

}  // namespace spclab
