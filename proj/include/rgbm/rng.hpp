#pragma once

#include <array>
#include <cstdint>

#include "rgbm/math.hpp"

namespace rgbm {

/// Philox4x32-10 counter-based generator (Salmon et al. 2011). Each 128-bit
/// counter block maps to four 32-bit words under a 64-bit key, so streams
/// keyed by (seed, path, step) can be sampled in any order.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                              std::array<std::uint32_t, 4> ctr) {
        std::uint32_t k0 = static_cast<std::uint32_t>(key);
        std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return ctr;
    }
};

/// Uniform double in (0,1) from 64 random bits (53-bit mantissa, offset so
/// the endpoints are never produced).
inline double bits_to_unit_double(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Deterministic standard-normal stream keyed by (seed, path, step). One
/// Philox block yields two normals, so consecutive steps share a block.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t path) : seed_(seed), path_(path) {}

    double operator()(std::uint64_t step) const {
        const std::uint64_t blk = step >> 1;
        const auto words = Philox4x32::block(
            seed_, {static_cast<std::uint32_t>(path_), static_cast<std::uint32_t>(path_ >> 32),
                    static_cast<std::uint32_t>(blk), static_cast<std::uint32_t>(blk >> 32)});
        const int half = static_cast<int>(step & 1u) * 2;
        const std::uint64_t bits =
            (static_cast<std::uint64_t>(words[half]) << 32) | words[half + 1];
        return inv_norm_cdf(bits_to_unit_double(bits));
    }

    /// Fills out[0..n) with the normals for steps [first_step, first_step+n).
    /// first_step must be even so blocks are not split across calls.
    void fill(std::uint64_t first_step, std::size_t n, double* out) const {
        std::uint64_t blk = first_step >> 1;
        std::size_t i = 0;
        while (i < n) {
            const auto words = Philox4x32::block(
                seed_,
                {static_cast<std::uint32_t>(path_), static_cast<std::uint32_t>(path_ >> 32),
                 static_cast<std::uint32_t>(blk), static_cast<std::uint32_t>(blk >> 32)});
            const std::uint64_t b0 = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
            out[i++] = inv_norm_cdf(bits_to_unit_double(b0));
            if (i < n) {
                const std::uint64_t b1 = (static_cast<std::uint64_t>(words[2]) << 32) | words[3];
                out[i++] = inv_norm_cdf(bits_to_unit_double(b1));
            }
            ++blk;
        }
    }

private:
    std::uint64_t seed_;
    std::uint64_t path_;
};

}  // namespace rgbm
