#pragma once

// Prime sieving and the prime sums every other module is built on.
// Ranges are half-open on the left throughout: (lo, hi].

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <unistd.h>

#include "errors.hpp"
#include "numerics.hpp"

namespace zetalab {

class PrimeTable {
public:
    PrimeTable() = default;

    /// Builds prefix sums over an ascending prime list. The caller vouches
    /// for primality; use sieve() for a checked table.
    PrimeTable(std::uint64_t limit, std::vector<std::uint32_t> primes) : limit_(limit), primes_(std::move(primes))
    {
        cum_recip_.reserve(primes_.size());
        cum_recip_sqrt_.reserve(primes_.size());
        CompensatedSum a, b;
        for (auto p : primes_) {
            const double pd = static_cast<double>(p);
            a += 1.0 / pd;
            b += 1.0 / std::sqrt(pd);
            cum_recip_.push_back(a.value());
            cum_recip_sqrt_.push_back(b.value());
        }
    }

    std::uint64_t limit() const { return limit_; }
    std::span<const std::uint32_t> primes() const { return primes_; }
    std::span<const double> cum_recip() const { return cum_recip_; }
    std::span<const double> cum_recip_sqrt() const { return cum_recip_sqrt_; }
    std::size_t size() const { return primes_.size(); }

    /// Number of primes p <= x.
    std::size_t count_upto(double x) const
    {
        if (x < 2.0) return 0;
        const double fx = std::floor(x);
        if (fx >= static_cast<double>(limit_)) return primes_.size();
        const auto cap = static_cast<std::uint32_t>(fx);
        return static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), cap) - primes_.begin());
    }

    /// Primes in (lo, hi] as an index range [first, last).
    std::pair<std::size_t, std::size_t> index_range(double lo, double hi) const
    {
        const std::size_t a = count_upto(lo);
        const std::size_t b = count_upto(hi);
        return {a, std::max(a, b)};
    }

    void require_reach(double x, const char* who) const
    {
        if (x > static_cast<double>(limit_))
            detail::raise<InsufficientTableError>(std::string(who) + ": needs primes up to " + std::to_string(x) +
                                                  " but the table stops at " + std::to_string(limit_));
    }

    /// Σ 1/p over the first `count` primes.
    double prefix_recip(std::size_t count) const { return count == 0 ? 0.0 : cum_recip_[count - 1]; }
    double prefix_recip_sqrt(std::size_t count) const { return count == 0 ? 0.0 : cum_recip_sqrt_[count - 1]; }

private:
    std::uint64_t limit_ = 0;
    std::vector<std::uint32_t> primes_;
    std::vector<double> cum_recip_;
    std::vector<double> cum_recip_sqrt_;
};

inline constexpr std::uint64_t kMaxSieveLimit = 1'000'000'000;
inline constexpr std::uint64_t kSegmentedThreshold = 100'000'000;

namespace detail {

/// Odd-only sieve over [0, limit].
inline std::vector<std::uint32_t> plain_sieve(std::uint64_t limit)
{
    std::vector<std::uint32_t> out;
    if (limit < 2) return out;
    out.push_back(2);
    const std::uint64_t half = (limit - 1) / 2; // index i <-> 2i+1, i in [1, half]
    std::vector<std::uint8_t> composite(half + 1, 0);
    for (std::uint64_t i = 1; i <= half; ++i) {
        if (composite[i]) continue;
        const std::uint64_t p = 2 * i + 1;
        out.push_back(static_cast<std::uint32_t>(p));
        for (std::uint64_t j = (p * p - 1) / 2; j <= half; j += p) composite[j] = 1;
    }
    return out;
}

/// Segmented odd-only sieve; memory is O(sqrt(limit) + segment).
inline std::vector<std::uint32_t> segmented_sieve(std::uint64_t limit, std::uint64_t segment = 1u << 19)
{
    std::vector<std::uint32_t> out;
    if (limit < 2) return out;
    const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit))) + 1;
    const auto base = plain_sieve(root);
    out.push_back(2);
    std::vector<std::uint8_t> mark(segment);
    // Segment covers odd numbers lo, lo+2, ..., lo + 2(segment-1).
    for (std::uint64_t lo = 3; lo <= limit; lo += 2 * segment) {
        const std::uint64_t hi = std::min(limit, lo + 2 * (segment - 1));
        const std::uint64_t len = (hi - lo) / 2 + 1;
        std::fill(mark.begin(), mark.begin() + static_cast<std::ptrdiff_t>(len), 0);
        for (std::size_t b = 1; b < base.size(); ++b) {
            const std::uint64_t p = base[b];
            if (p * p > hi) break;
            std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
            if (start % 2 == 0) start += p;
            for (std::uint64_t m = start; m <= hi; m += 2 * p) mark[(m - lo) / 2] = 1;
        }
        for (std::uint64_t i = 0; i < len; ++i)
            if (!mark[i]) out.push_back(static_cast<std::uint32_t>(lo + 2 * i));
    }
    return out;
}

} // namespace detail

/// All primes <= limit with prefix sums of 1/p and 1/sqrt(p).
inline PrimeTable sieve(std::uint64_t limit)
{
    if (limit < 2 || limit > kMaxSieveLimit)
        detail::raise<DomainError>("sieve: limit must lie in [2, 1e9], got " + std::to_string(limit));
    auto primes = limit > kSegmentedThreshold ? detail::segmented_sieve(limit) : detail::plain_sieve(limit);
    return PrimeTable(limit, std::move(primes));
}

/// Σ_{lo < p <= hi} 1/p.
inline double sum_recip(const PrimeTable& table, double lo, double hi)
{
    detail::require(lo >= 0.0 && lo < hi, "sum_recip: need 0 <= lo < hi");
    table.require_reach(hi, "sum_recip");
    return table.prefix_recip(table.count_upto(hi)) - table.prefix_recip(table.count_upto(lo));
}

/// Σ_{lo < p <= hi} 1/sqrt(p).
inline double sum_recip_sqrt(const PrimeTable& table, double lo, double hi)
{
    detail::require(lo >= 0.0 && lo < hi, "sum_recip_sqrt: need 0 <= lo < hi");
    table.require_reach(hi, "sum_recip_sqrt");
    return table.prefix_recip_sqrt(table.count_upto(hi)) - table.prefix_recip_sqrt(table.count_upto(lo));
}

/// Σ_{p <= x} 1/p − log log x; tends to the Meissel–Mertens constant 0.2615.
inline double mertens_deviation(const PrimeTable& table, double x)
{
    detail::require(x >= 3.0, "mertens_deviation: need x >= 3");
    return sum_recip(table, 0.0, x) - std::log(std::log(x));
}

// ---------------------------------------------------------------------------
// On-disk cache: "ZLPRIMES" | u32 version | u64 limit | u64 count | LEB128 gaps

inline constexpr char kPrimeCacheMagic[8] = {'Z', 'L', 'P', 'R', 'I', 'M', 'E', 'S'};
inline constexpr std::uint32_t kPrimeCacheVersion = 1;

/// Cache directory: $ZETALAB_CACHE_DIR, else $XDG_DATA_HOME/zetalab,
/// else ~/.local/share/zetalab.
inline std::filesystem::path cache_directory()
{
    if (const char* env = std::getenv("ZETALAB_CACHE_DIR"); env && *env) return env;
    if (const char* xdg = std::getenv("XDG_DATA_HOME"); xdg && *xdg) return std::filesystem::path(xdg) / "zetalab";
    if (const char* home = std::getenv("HOME"); home && *home)
        return std::filesystem::path(home) / ".local" / "share" / "zetalab";
    return std::filesystem::temp_directory_path() / "zetalab";
}

inline void write_prime_cache(const PrimeTable& table, const std::filesystem::path& file)
{
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) detail::raise<IoError>("cannot write prime cache " + file.string());
    auto put_u64 = [&](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    out.write(kPrimeCacheMagic, 8);
    for (int i = 0; i < 4; ++i) out.put(static_cast<char>((kPrimeCacheVersion >> (8 * i)) & 0xff));
    put_u64(table.limit());
    put_u64(table.size());
    std::uint32_t prev = 0;
    for (auto p : table.primes()) {
        std::uint32_t gap = p - prev;
        prev = p;
        do {
            std::uint8_t byte = gap & 0x7f;
            gap >>= 7;
            if (gap) byte |= 0x80;
            out.put(static_cast<char>(byte));
        } while (gap);
    }
    if (!out) detail::raise<IoError>("short write to prime cache " + file.string());
}

inline PrimeTable read_prime_cache(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) detail::raise<IoError>("cannot open prime cache " + file.string());
    auto get = [&]() -> std::uint8_t {
        const int c = in.get();
        if (c == EOF) detail::raise<IoError>("truncated prime cache " + file.string());
        return static_cast<std::uint8_t>(c);
    };
    auto get_uint = [&](int bytes) {
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(get()) << (8 * i);
        return v;
    };
    char magic[8];
    for (char& c : magic) c = static_cast<char>(get());
    if (!std::equal(magic, magic + 8, kPrimeCacheMagic)) detail::raise<IoError>("bad prime cache magic");
    if (get_uint(4) != kPrimeCacheVersion) detail::raise<IoError>("unsupported prime cache version");
    const std::uint64_t limit = get_uint(8);
    const std::uint64_t count = get_uint(8);
    std::vector<std::uint32_t> primes;
    primes.reserve(count);
    std::uint32_t prev = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint32_t gap = 0;
        int shift = 0;
        std::uint8_t byte;
        do {
            byte = get();
            gap |= static_cast<std::uint32_t>(byte & 0x7f) << shift;
            shift += 7;
        } while (byte & 0x80);
        prev += gap;
        primes.push_back(prev);
    }
    return PrimeTable(limit, std::move(primes));
}

/// Sieve, going through the cache directory when `use_cache` is set.
inline PrimeTable load_or_sieve(std::uint64_t limit, bool use_cache = true)
{
    if (!use_cache) return sieve(limit);
    const auto dir = cache_directory();
    const auto file = dir / ("primes-" + std::to_string(limit) + ".bin");
    std::error_code ec;
    if (std::filesystem::exists(file, ec)) {
        try {
            auto t = read_prime_cache(file);
            if (t.limit() == limit) return t;
        } catch (const IoError&) {
            // fall through and rebuild
        }
    }
    auto table = sieve(limit);
    std::filesystem::create_directories(dir, ec);
    if (!ec) {
        // write then rename so a concurrent reader never sees a partial file
        const auto tmp = dir / (file.filename().string() + ".tmp" + std::to_string(::getpid()));
        try {
            write_prime_cache(table, tmp);
            std::filesystem::rename(tmp, file, ec);
        } catch (const IoError&) {
        }
        std::filesystem::remove(tmp, ec);
    }
    return table;
}

} // namespace zetalab
