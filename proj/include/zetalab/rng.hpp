#pragma once

#include <array>
#include <cstdint>

namespace zetalab {

/// Philox4x64-10 counter-based generator (Salmon et al., Random123).
/// Output depends only on (key, counter), so draws are reproducible
/// regardless of evaluation order or thread count.
class Philox4x64 {
public:
    using Counter = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    static Counter block(Counter ctr, Key key)
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const auto [hi0, lo0] = mulhilo(kMul0, ctr[0]);
            const auto [hi1, lo1] = mulhilo(kMul1, ctr[2]);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    static double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

private:
    static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

    static std::array<std::uint64_t, 2> mulhilo(std::uint64_t a, std::uint64_t b)
    {
        const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
        return {static_cast<std::uint64_t>(p >> 64), static_cast<std::uint64_t>(p)};
    }
};

/// Sequential view of one Philox stream: stream `stream` under key `seed`,
/// blocks indexed by an internal position. Independent streams never overlap.
class UniformStream {
public:
    UniformStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0)
        : key_{seed, 0}, stream_(stream), substream_(substream)
    {
    }

    double next()
    {
        if (pos_ == 4) {
            buf_ = Philox4x64::block({block_++, stream_, substream_, 0}, key_);
            pos_ = 0;
        }
        return Philox4x64::to_unit(buf_[pos_++]);
    }

private:
    Philox4x64::Key key_;
    std::uint64_t stream_;
    std::uint64_t substream_;
    std::uint64_t block_ = 0;
    Philox4x64::Counter buf_{};
    int pos_ = 4;
};

} // namespace zetalab
