#include <zetalab/quad_twist.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <numbers>

using namespace zetalab;

namespace {

bool trial_prime(std::int64_t n)
{
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Legendre symbol by Euler's criterion.
int legendre(std::int64_t a, std::int64_t p)
{
    a = ((a % p) + p) % p;
    if (a == 0) return 0;
    std::int64_t r = 1, b = a, e = (p - 1) / 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r == 1 ? 1 : -1;
}

bool fundamental_by_definition(std::int64_t d)
{
    if (d == 0 || d == 1) return false;
    auto sqf = [](std::int64_t n) {
        n = std::abs(n);
        for (std::int64_t q = 2; q * q <= n; ++q)
            if (n % (q * q) == 0) return false;
        return true;
    };
    const std::int64_t r = ((d % 4) + 4) % 4;
    if (r == 1) return sqf(d);
    if (r != 0) return false;
    const std::int64_t m = d / 4;
    const std::int64_t rm = ((m % 4) + 4) % 4;
    return (rm == 2 || rm == 3) && sqf(m);
}

// β(1/2) = Σ (-1)^k (2k+1)^{-1/2} by Cohen–Villegas–Zagier acceleration.
double beta_half_cvz()
{
    const int n = 40;
    long double d = std::pow(3.0L + std::sqrt(8.0L), n);
    d = (d + 1 / d) / 2;
    long double b = -1, c = -d, s = 0;
    for (int k = 0; k < n; ++k) {
        c = b - c;
        s += c / std::sqrt(2.0L * k + 1);
        b = (k + n) * (k - n) * b / ((k + 0.5L) * (k + 1));
    }
    return static_cast<double>(s / d);
}

// Hurwitz ζ(1/2, a) by Euler–Maclaurin in long double.
long double hurwitz_half(long double a)
{
    const int N = 60;
    long double s = 0;
    for (int n = 0; n < N; ++n) s += 1 / std::sqrt(n + a);
    const long double x = N + a;
    s += -2 * std::sqrt(x) + 0.5L / std::sqrt(x);
    static const long double B[] = {1.0L / 6, -1.0L / 30, 1.0L / 42, -1.0L / 30, 5.0L / 66, -691.0L / 2730};
    long double rising = 0.5L, fact = 2, pw = std::pow(x, -1.5L);
    for (int k = 1; k <= 6; ++k) {
        s += B[k - 1] / fact * rising * pw;
        rising *= (0.5L + 2 * k - 1) * (0.5L + 2 * k);
        pw /= x * x;
        fact *= (2.0L * k + 1) * (2 * k + 2);
    }
    return s;
}

double l_half_hurwitz(std::int64_t d)
{
    const std::int64_t q = std::abs(d);
    long double s = 0;
    for (std::int64_t a = 1; a <= q; ++a) {
        const int c = kronecker(d, a);
        if (c) s += c * hurwitz_half(static_cast<long double>(a) / q);
    }
    return static_cast<double>(s / std::sqrt(static_cast<long double>(q)));
}

std::string read_first_line(const std::filesystem::path& f)
{
    std::ifstream in(f);
    std::string line;
    std::getline(in, line);
    return line;
}

} // namespace

TEST(Kronecker, Examples)
{
    for (std::int64_t d : {-7, -4, 5, 8, 12, 13}) EXPECT_EQ(kronecker(d, 1), 1);
    EXPECT_EQ(kronecker(5, 2), -1);
    EXPECT_EQ(kronecker(17, 2), 1);
    EXPECT_EQ(kronecker(12, 3), 0);
    EXPECT_EQ(kronecker(12, 2), 0);
    EXPECT_EQ(kronecker(-3, -1), -1);
    EXPECT_EQ(kronecker(5, -1), 1);
    EXPECT_EQ(kronecker(5, 0), 0);
    EXPECT_EQ(kronecker(1, 0), 1);
    EXPECT_THROW(kronecker(0, 3), DomainError);
}

TEST(Kronecker, OddPrimesMatchEulerCriterion)
{
    for (std::int64_t p = 3; p < 300; p += 2) {
        if (!trial_prime(p)) continue;
        for (std::int64_t d = -300; d <= 300; ++d)
            if (d != 0) EXPECT_EQ(kronecker(d, p), legendre(d, p)) << d << " " << p;
    }
}

TEST(Kronecker, CompletelyMultiplicative)
{
    for (std::int64_t d = -100; d <= 100; ++d) {
        if (d == 0) continue;
        for (std::int64_t m = -100; m <= 100; ++m) {
            if (m == 0) continue; // (±1/0) = 1 is a convention, not a product
            for (std::int64_t n = 1; n <= 100; ++n) ASSERT_EQ(kronecker(d, m * n), kronecker(d, m) * kronecker(d, n));
        }
    }
}

TEST(Kronecker, PeriodicAndBalancedForFundamental)
{
    for (std::int64_t d = -500; d <= 500; ++d) {
        if (!is_fundamental(d)) continue;
        const std::int64_t q = std::abs(d);
        if (q <= 100)
            for (std::int64_t n = 0; n <= 500; ++n) ASSERT_EQ(kronecker(d, n), kronecker(d, n + q)) << d;
        int s = 0;
        for (std::int64_t n = 1; n <= q; ++n) s += kronecker(d, n);
        EXPECT_EQ(s, 0) << d;
    }
}

TEST(PStar, Definition)
{
    EXPECT_EQ(p_star(5), 5);
    EXPECT_EQ(p_star(3), -3);
    for (std::int64_t p = 3; p <= 1000; p += 2)
        if (trial_prime(p)) {
            EXPECT_EQ(((p_star(p) % 4) + 4) % 4, 1);
            EXPECT_TRUE(is_fundamental(p_star(p)));
        }
    EXPECT_THROW(p_star(2), DomainError);
    EXPECT_THROW(p_star(9), DomainError);
}

TEST(Reciprocity, ExhaustiveSmall)
{
    for (std::int64_t p = 3; p <= 200; p += 2) {
        if (!trial_prime(p)) continue;
        for (std::int64_t d = -200; d <= 200; ++d) {
            if (!is_fundamental(d) || d % p == 0) continue;
            EXPECT_EQ(kronecker(d, p), kronecker(p_star(p), d)) << d << " " << p;
        }
    }
}

TEST(Discriminants, Examples)
{
    std::vector<std::int64_t> pos, neg;
    for (const auto& f : fundamental_discriminants(2, 30))
        if (f.sign > 0) pos.push_back(f.d);
    for (const auto& f : fundamental_discriminants(1, 12))
        if (f.sign < 0) neg.push_back(f.d);
    EXPECT_EQ(pos, (std::vector<std::int64_t>{5, 8, 12, 13, 17, 21, 24, 28, 29}));
    EXPECT_EQ(neg, (std::vector<std::int64_t>{-3, -4, -7, -8, -11}));
    for (const auto& f : fundamental_discriminants(1, 10)) EXPECT_NE(f.d, 1);
    EXPECT_THROW(fundamental_discriminants(1, 2e7), CapabilityError);
    EXPECT_THROW(fundamental_discriminants(0.5, 10), DomainError);
    EXPECT_THROW(fundamental_discriminants(10, 10), DomainError);
}

TEST(Discriminants, MatchDefinitionAndOrder)
{
    const auto v = fundamental_discriminants(1, 3000);
    std::vector<std::int64_t> ref;
    for (std::int64_t a = 1; a <= 3000; ++a) {
        if (fundamental_by_definition(-a)) ref.push_back(-a);
        if (fundamental_by_definition(a)) ref.push_back(a);
    }
    ASSERT_EQ(v.size(), ref.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        EXPECT_EQ(v[i].d, ref[i]);
        EXPECT_EQ(v[i].sign, ref[i] > 0 ? 1 : -1);
        EXPECT_EQ(is_fundamental(ref[i]), true);
    }
}

TEST(Discriminants, Density)
{
    const double X = 1e5;
    long long pos = 0, neg = 0;
    for (const auto& f : fundamental_discriminants(X, 2 * X)) (f.sign > 0 ? pos : neg)++;
    const double expect = 3 / (std::numbers::pi * std::numbers::pi);
    EXPECT_NEAR(pos / X, expect, 0.02 * expect);
    EXPECT_NEAR(neg / X, expect, 0.02 * expect);
}

TEST(Prop4, Examples)
{
    const auto discs = fundamental_discriminants(50, 100);
    auto coprime = [&](std::int64_t m) {
        long long c = 0;
        for (const auto& f : discs) c += std::gcd(std::abs(f.d), m) == 1;
        return c;
    };
    const auto r9 = prop4_sum(FactoredInteger::of(9), 50);
    EXPECT_TRUE(r9.is_square);
    EXPECT_EQ(r9.sum, coprime(3));
    EXPECT_EQ(r9.main, r9.sum);
    EXPECT_TRUE(r9.bound_ok);
    const auto r3 = prop4_sum(FactoredInteger::of(3), 50);
    EXPECT_LE(std::abs(r3.sum), 6);
    EXPECT_EQ(r3.main, 0);
    const auto r225 = prop4_sum(FactoredInteger::of(225), 50);
    EXPECT_EQ(r225.sum, coprime(15));
    EXPECT_EQ(r225.count, static_cast<long long>(discs.size()));
    EXPECT_THROW(prop4_sum(FactoredInteger::of(6), 50), DomainError);
    EXPECT_THROW(prop4_sum(FactoredInteger::of(9), 2e5), CapabilityError);
}

TEST(LHalf, DirichletBeta)
{
    const double beta = beta_half_cvz();
    EXPECT_NEAR(beta, 0.66769145718960917666, 1e-15);
    EXPECT_NEAR(l_half(-4, 1e-10), beta, 1e-10);
}

TEST(LHalf, HurwitzOracle)
{
    for (std::int64_t d : {5, 8, -3, -7, 12, -20, 13, 101, -163, 1001})
        EXPECT_NEAR(l_half(d, 1e-10), l_half_hurwitz(d), 1e-9) << d;
    EXPECT_NEAR(l_half(5, 1e-10), 0.23175094750401575588, 1e-10);
    EXPECT_NEAR(l_half(8, 1e-10), 0.37369171291254730738, 1e-10);
    EXPECT_NEAR(l_half(-3, 1e-10), 0.48086755769682862618, 1e-10);
}

TEST(LHalf, LengthSelfConsistency)
{
    for (std::int64_t d = -300; d <= 300; ++d) {
        if (!is_fundamental(d)) continue;
        const long n = detail::afe_length(d, 1e-10);
        EXPECT_LT(std::abs(l_half_with_length(d, 2 * n) - l_half_with_length(d, n)), 1e-9) << d;
    }
}

TEST(LHalf, Errors)
{
    EXPECT_THROW(l_half(5, 1e-11), CapabilityError);
    EXPECT_THROW(l_half(1'000'001 * 4 + 1, 1e-8), CapabilityError);
    EXPECT_THROW(l_half(9, 1e-8), DomainError);
    EXPECT_THROW(l_half(1, 1e-8), DomainError);
}

TEST(LValueCache, ReuseIsBitIdentical)
{
    const auto file = std::filesystem::temp_directory_path() / "zetalab_lcache_test.csv";
    std::filesystem::remove(file);
    std::vector<double> first;
    {
        LValueCache c(file);
        for (std::int64_t d : {-4, 5, 8, -3, 1001}) first.push_back(c.get(d, 1e-10));
        EXPECT_EQ(c.hits(), 0);
    }
    LValueCache c(file);
    EXPECT_EQ(c.size(), 5u);
    int i = 0;
    for (std::int64_t d : {-4, 5, 8, -3, 1001}) EXPECT_EQ(c.get(d, 1e-8), first[i++]);
    EXPECT_EQ(c.hits(), 5);
    EXPECT_EQ(read_first_line(file), "d,value,tol,engine_version");
    std::filesystem::remove(file);
}

TEST(AlphaSchedule, Definition)
{
    const double X = 1e3;
    const auto a = alpha_schedule(1.0, X);
    EXPECT_NEAR(a.levels[0], std::log(2.0) / std::log(X), 1e-15);
    EXPECT_EQ(a.cap_index, 1);
    EXPECT_NEAR(a.log_threshold, -2000.0, 0.0);
    EXPECT_THROW(alpha_schedule(1.0, X, ScheduleOverrides{}.with_ratio(1.0)), ConfigError);
}

TEST(QSet, PartitionAndRecomputation)
{
    const double X = 1e3;
    const auto a = alpha_schedule(1.0, X, ScheduleOverrides{}.with_ratio(2).with_threshold(0.5).with_base(0.2));
    ASSERT_EQ(a.cap_index, 3); // 0.2, 0.4 <= 0.5 < 0.8
    const auto table = sieve(1'000'000);
    const QStructure q(a, table);
    const double L = a.levels[3] * std::log(X);
    const auto discs = fundamental_discriminants(X, 2 * X);
    long long in = 0, out = 0;
    for (const auto& f : discs) {
        bool member = true;
        for (int i = 1; i <= 3; ++i) {
            const double lo = std::exp(a.levels[i - 1] * std::log(X)), hi = std::exp(a.levels[i] * std::log(X));
            long double s = 0;
            for (std::int64_t p = 3; p <= static_cast<std::int64_t>(hi); p += 2) {
                if (p <= lo || !trial_prime(p)) continue;
                const double lp = std::log(static_cast<double>(p));
                s += kronecker(p_star(p), f.d) * std::exp(-(0.5 + 1 / L) * lp) * (L - lp) / L;
            }
            EXPECT_NEAR(q.level_sum(i, f.d), static_cast<double>(s), 1e-10);
            if (std::abs(s) > std::pow(a.levels[i], -0.75)) member = false;
        }
        const bool got = q_membership(f.d, a, table);
        EXPECT_EQ(got, member);
        (got ? in : out)++;
    }
    EXPECT_EQ(in + out, static_cast<long long>(discs.size()));
}

TEST(Theorem2, CountsAndCache)
{
    const auto r0 = theorem2_empirical(0.0, 100.0);
    EXPECT_EQ(r0.sum, static_cast<double>(fundamental_discriminants(100, 200).size()));
    EXPECT_EQ(r0.count, r0.count_pos + r0.count_neg);

    const auto file = std::filesystem::temp_directory_path() / "zetalab_t2_cache.csv";
    std::filesystem::remove(file);
    LValueCache cache(file);
    const auto a = theorem2_empirical(1.0, 300.0, &cache);
    LValueCache again(file);
    const auto b = theorem2_empirical(1.0, 300.0, &again);
    EXPECT_EQ(a.sum, b.sum);
    EXPECT_EQ(again.hits(), a.count);
    EXPECT_GE(a.sum_pos, 0.0);
    EXPECT_GE(a.sum_neg, 0.0);
    EXPECT_NEAR(a.ratio, a.sum / (300.0 * std::log(300.0)), 1e-12);
    EXPECT_THROW(theorem2_empirical(1.0, 2e4), CapabilityError);
    EXPECT_THROW(theorem2_empirical(5.0, 100), DomainError);
    std::filesystem::remove(file);
}
