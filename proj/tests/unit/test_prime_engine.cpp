#include <zetalab/prime_engine.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace zetalab;

namespace {

bool trial_prime(std::uint64_t n)
{
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<std::uint32_t> trial_primes(std::uint32_t limit)
{
    std::vector<std::uint32_t> v;
    for (std::uint32_t n = 2; n <= limit; ++n)
        if (trial_prime(n)) v.push_back(n);
    return v;
}

long double direct_recip(std::uint32_t lo, std::uint32_t hi)
{
    long double s = 0;
    for (std::uint32_t n = lo + 1; n <= hi; ++n)
        if (trial_prime(n)) s += 1.0L / n;
    return s;
}

} // namespace

TEST(Sieve, SmallCases)
{
    const auto t10 = sieve(10);
    EXPECT_EQ(std::vector<std::uint32_t>(t10.primes().begin(), t10.primes().end()),
              (std::vector<std::uint32_t>{2, 3, 5, 7}));
    const auto t2 = sieve(2);
    ASSERT_EQ(t2.size(), 1u);
    EXPECT_EQ(t2.primes()[0], 2u);
    EXPECT_EQ(sieve(100).size(), 25u);
}

TEST(Sieve, RejectsOutOfRangeLimits)
{
    EXPECT_THROW(sieve(1), DomainError);
    EXPECT_THROW(sieve(0), DomainError);
    EXPECT_THROW(sieve(1'000'000'001ULL), DomainError);
}

TEST(Sieve, MatchesTrialDivision)
{
    const auto t = sieve(100'000);
    const auto ref = trial_primes(100'000);
    EXPECT_EQ(std::vector<std::uint32_t>(t.primes().begin(), t.primes().end()), ref);
}

TEST(Sieve, TableInvariants)
{
    const auto t = sieve(50'000);
    ASSERT_EQ(t.cum_recip().size(), t.size());
    ASSERT_EQ(t.cum_recip_sqrt().size(), t.size());
    for (std::size_t i = 1; i < t.size(); ++i) {
        EXPECT_LT(t.primes()[i - 1], t.primes()[i]);
        EXPECT_LE(t.cum_recip()[i - 1], t.cum_recip()[i]);
        EXPECT_LE(t.cum_recip_sqrt()[i - 1], t.cum_recip_sqrt()[i]);
    }
    EXPECT_LE(t.primes().back(), 50'000u);
}

TEST(Sieve, PrimeCountsAtPowersOfTen)
{
    // k <= 6 against trial division, k = 7, 8 against the standard values
    const auto t = sieve(100'000'000);
    std::size_t trial = 0;
    std::uint32_t next = 10;
    for (std::uint32_t n = 2; n <= 1'000'000; ++n) {
        if (trial_prime(n)) ++trial;
        if (n == next) {
            EXPECT_EQ(t.count_upto(n), trial) << n;
            next *= 10;
        }
    }
    EXPECT_EQ(t.count_upto(1e7), 664'579u);
    EXPECT_EQ(t.count_upto(1e8), 5'761'455u);
}

TEST(Sieve, SegmentedAgreesWithPlain)
{
    const auto a = detail::plain_sieve(3'000'000);
    const auto b = detail::segmented_sieve(3'000'000, 4096);
    EXPECT_EQ(a, b);
    EXPECT_EQ(detail::segmented_sieve(2, 16), (std::vector<std::uint32_t>{2}));
}

TEST(SumRecip, Examples)
{
    const auto t = sieve(1000);
    EXPECT_DOUBLE_EQ(sum_recip(t, 1, 2), 0.5);
    EXPECT_NEAR(sum_recip(t, 1, 100), static_cast<double>(direct_recip(1, 100)), 1e-14);
    EXPECT_NEAR(sum_recip(t, 1, 100), 1.80281720104887094, 1e-14);
    EXPECT_THROW(sum_recip(t, 7, 7), DomainError);
    EXPECT_THROW(sum_recip(t, -1, 7), DomainError);
    EXPECT_THROW(sum_recip(t, 1, 1001), InsufficientTableError);
}

TEST(SumRecip, HalfOpenConvention)
{
    const auto t = sieve(100);
    // (7, 11] = {11}
    EXPECT_NEAR(sum_recip(t, 7, 11), 1.0 / 11, 1e-15);
    EXPECT_NEAR(sum_recip_sqrt(t, 6, 7), 1.0 / std::sqrt(7.0), 1e-15);
}

TEST(SumRecip, AdditiveOverSplits)
{
    const auto t = sieve(200'000);
    const double lo = 3.5, hi = 199'999.0;
    const double whole = sum_recip(t, lo, hi);
    for (double mid = 4.0; mid < hi; mid *= 1.7) {
        EXPECT_NEAR(sum_recip(t, lo, mid) + sum_recip(t, mid, hi), whole, 1e-12);
        EXPECT_NEAR(sum_recip_sqrt(t, lo, mid) + sum_recip_sqrt(t, mid, hi), sum_recip_sqrt(t, lo, hi), 1e-12);
    }
}

TEST(Mertens, Deviation)
{
    const auto t = sieve(1'000'000);
    EXPECT_NEAR(mertens_deviation(t, 3), 5.0 / 6.0 - std::log(std::log(3.0)), 1e-14);
    EXPECT_NEAR(mertens_deviation(t, 3), 0.739285505716634, 1e-12);
    EXPECT_THROW(mertens_deviation(t, 2), DomainError);
    EXPECT_THROW(mertens_deviation(t, 2e6), InsufficientTableError);

    // Meissel–Mertens constant
    const double M = 0.2614972128476428;
    double prev = 1e9;
    for (int j = 2; j <= 6; ++j) {
        const double dev = mertens_deviation(t, std::pow(10.0, j));
        EXPECT_LE(std::abs(dev), 1.0);
        EXPECT_LT(std::abs(dev - M), prev) << j;
        prev = std::abs(dev - M);
    }
    EXPECT_LT(prev, 0.05);
    for (double x = 3; x <= 1e6; x *= 1.37) EXPECT_LE(std::abs(mertens_deviation(t, x)), 1.0);
}

TEST(PrimeCache, RoundTripAndCorruption)
{
    const auto dir = std::filesystem::temp_directory_path() / "zetalab_cache_test";
    std::filesystem::create_directories(dir);
    const auto file = dir / "p.bin";
    const auto t = sieve(123'457);
    write_prime_cache(t, file);
    const auto r = read_prime_cache(file);
    EXPECT_EQ(r.limit(), t.limit());
    EXPECT_EQ(std::vector<std::uint32_t>(r.primes().begin(), r.primes().end()),
              std::vector<std::uint32_t>(t.primes().begin(), t.primes().end()));
    EXPECT_EQ(r.cum_recip().back(), t.cum_recip().back());

    {
        std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.put('X');
    }
    EXPECT_THROW(read_prime_cache(file), IoError);
    EXPECT_THROW(read_prime_cache(dir / "missing.bin"), IoError);
    std::filesystem::remove_all(dir);
}

TEST(PrimeCache, LoadOrSieveUsesCacheDirectory)
{
    const auto dir = std::filesystem::temp_directory_path() / "zetalab_cache_env";
    std::filesystem::remove_all(dir);
    ::setenv("ZETALAB_CACHE_DIR", dir.c_str(), 1);
    EXPECT_EQ(cache_directory(), dir);
    const auto a = load_or_sieve(5000);
    bool found = false;
    for (const auto& e : std::filesystem::directory_iterator(dir)) found = found || e.is_regular_file();
    EXPECT_TRUE(found);
    const auto b = load_or_sieve(5000);
    EXPECT_EQ(a.size(), b.size());
    EXPECT_EQ(a.size(), 669u);
    std::filesystem::remove_all(dir);
}
