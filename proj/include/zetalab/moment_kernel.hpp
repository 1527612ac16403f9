#pragma once

// Cosine-product mean values, tuple counts, and the Lemma 1/Lemma 2 bound
// evaluators, plus a Monte Carlo split of the moment over the classes
// 𝒯 and 𝒮(j).

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "poly_engine.hpp"
#include "prime_engine.hpp"
#include "rng.hpp"
#include "zeta_engine.hpp"

namespace zetalab {

using ExactRational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// n = Π p^α with distinct ascending primes.
class FactoredInteger {
public:
    struct Factor {
        std::uint64_t prime;
        int exponent;
    };

    FactoredInteger() = default;

    explicit FactoredInteger(std::vector<Factor> factors) : factors_(std::move(factors))
    {
        std::uint64_t prev = 0;
        for (const auto& f : factors_) {
            if (f.exponent < 1) detail::raise<DomainError>("FactoredInteger: exponents must be >= 1");
            if (f.prime <= prev) detail::raise<DomainError>("FactoredInteger: primes must be distinct and ascending");
            if (!is_prime(f.prime)) detail::raise<DomainError>("FactoredInteger: " + std::to_string(f.prime) + " is not prime");
            prev = f.prime;
        }
        unsigned __int128 v = 1;
        bool ok = true;
        for (const auto& f : factors_)
            for (int e = 0; e < f.exponent && ok; ++e) {
                v *= f.prime;
                if (v >= (static_cast<unsigned __int128>(1) << 63)) ok = false;
            }
        if (ok)
            value_ = static_cast<std::uint64_t>(v);
        else
            value_.reset();
    }

    /// Factor a positive integer by trial division.
    static FactoredInteger of(std::uint64_t n)
    {
        if (n == 0) detail::raise<DomainError>("FactoredInteger: n must be positive");
        std::vector<Factor> fs;
        for (std::uint64_t p = 2; p * p <= n; ++p) {
            if (n % p) continue;
            int e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            fs.push_back({p, e});
        }
        if (n > 1) fs.push_back({n, 1});
        return FactoredInteger(std::move(fs));
    }

    const std::vector<Factor>& factors() const { return factors_; }
    std::optional<std::uint64_t> value() const { return value_; }
    int total_exponent() const
    {
        int s = 0;
        for (const auto& f : factors_) s += f.exponent;
        return s;
    }
    bool is_square() const
    {
        for (const auto& f : factors_)
            if (f.exponent % 2) return false;
        return true;
    }

    static bool is_prime(std::uint64_t n)
    {
        if (n < 2) return false;
        for (std::uint64_t d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    }

private:
    std::vector<Factor> factors_;
    std::optional<std::uint64_t> value_ = 1;
};

/// f(n) = Π 2^{-α} α!/((α/2)!)², zero if any α is odd.
inline ExactRational f_value(const FactoredInteger& n)
{
    ExactRational f = 1;
    for (const auto& [p, a] : n.factors()) {
        if (a % 2) return 0;
        BigInt binom = 1; // C(a, a/2)
        for (int i = 1; i <= a / 2; ++i) binom = binom * (a / 2 + i) / i;
        f *= ExactRational(binom, BigInt(1) << a);
    }
    return f;
}

inline double cos_product_main_term(const FactoredInteger& n, double T)
{
    detail::require(T > 0.0, "cos_product_main_term: need T > 0");
    return T * static_cast<double>(f_value(n));
}

/// Top angular frequency Σα log(max p) used for the node budget.
inline double cos_product_frequency(const FactoredInteger& n)
{
    if (n.factors().empty()) return 0.0;
    return n.total_exponent() * std::log(static_cast<double>(n.factors().back().prime));
}

/// Smallest node count accepted by cos_product_quadrature.
inline long long cos_product_min_nodes(const FactoredInteger& n, double T)
{
    const double w = cos_product_frequency(n);
    return std::max<long long>(16, static_cast<long long>(std::ceil(std::max(200.0 * w, 2.0 * w * T))));
}

/// ∫_T^{2T} Π cos(t log p)^α dt by 16-point Gauss–Legendre panels.
inline double cos_product_quadrature(const FactoredInteger& n, double T, long long nodes)
{
    detail::require(T > 0.0, "cos_product_quadrature: need T > 0");
    if (!n.value() || *n.value() > 1'000'000)
        detail::raise<DomainError>("cos_product_quadrature: need n <= 1e6");
    const long long need = cos_product_min_nodes(n, T);
    if (nodes < need)
        detail::raise<CapabilityError>("cos_product_quadrature: " + std::to_string(nodes) +
                                       " nodes cannot resolve the oscillation; need at least " + std::to_string(need));
    static const GaussLegendreRule rule(16);
    std::vector<std::pair<double, int>> terms;
    for (const auto& [p, a] : n.factors()) terms.emplace_back(std::log(static_cast<double>(p)), a);

    const long long panels = (nodes + 15) / 16;
    const double h = T / static_cast<double>(panels);
    CompensatedSum total;
    for (long long q = 0; q < panels; ++q) {
        const double a = T + h * static_cast<double>(q);
        total += rule.integrate(
            [&](double t) {
                double v = 1.0;
                for (const auto& [lp, e] : terms) {
                    const double c = std::cos(t * lp);
                    for (int i = 0; i < e; ++i) v *= c;
                }
                return v;
            },
            a, a + h);
    }
    return total.value();
}

/// (n!/Πα!, (2n)!/Π(2α)!) with n = Σα.
inline std::pair<BigInt, BigInt> tuple_count(const std::vector<int>& alphas)
{
    if (alphas.empty()) detail::raise<DomainError>("tuple_count: need at least one exponent");
    int n = 0;
    for (int a : alphas) {
        if (a < 1) detail::raise<DomainError>("tuple_count: exponents must be positive");
        n += a;
    }
    if (n > 20) detail::raise<CapabilityError>("tuple_count: n = " + std::to_string(n) + " exceeds the budget of 20");
    auto fact = [](int m) {
        BigInt r = 1;
        for (int i = 2; i <= m; ++i) r *= i;
        return r;
    };
    BigInt d1 = 1, d2 = 1;
    for (int a : alphas) {
        d1 *= fact(a);
        d2 *= fact(2 * a);
    }
    return {fact(n) / d1, fact(2 * n) / d2};
}

namespace detail {

inline void require_matching_height(const BetaSchedule& sched, double T, const char* who)
{
    if (!(T > 1.0) || std::abs(std::log(T) - sched.log_height) > 1e-9 * sched.log_height)
        raise<DomainError>(std::string(who) + ": T does not match the schedule");
}

} // namespace detail

/// T exp(k² Σ_{p<=T^{β_𝓘}} 1/p).
inline double lemma1_bound(double k, const BetaSchedule& sched, const PrimeTable& table, double T)
{
    detail::require_matching_height(sched, T, "lemma1_bound");
    const double x = detail::power_bound(sched.log_bound(sched.cap_index));
    table.require_reach(x, "lemma1_bound");
    return T * std::exp(k * k * table.prefix_recip(table.count_upto(x)));
}

/// The three quantities of the Lemma 2 deduction. Raw values may underflow
/// to 0 for default-scale schedules; the logs are kept in long double.
struct Lemma2Bound {
    long double log_prefactor = 0; // -β_{j+1}^{-1} log(1/β_{j+1}) / 21
    long double log_combined = 0;  // 2k/β_j + log_prefactor
    long double log_cap = 0;       // -0.01 k/β_j
    double prefactor = 0;
    double combined = 0;
    double cap = 0;
    bool hypothesis_holds = false; // log(1/β_{j+1}) >= 900k and ratio <= 20
    bool inequality_holds = false; // combined <= cap
};

inline Lemma2Bound lemma2_bound(int j, double k, const BetaSchedule& sched)
{
    if (!(j >= 1 && j <= sched.cap_index - 1))
        detail::raise<DomainError>("lemma2_bound: need 1 <= j <= cap_index - 1 (cap_index = " +
                                   std::to_string(sched.cap_index) + ")");
    const long double log_bj = sched.log_level(j);
    const long double log_bnext = sched.log_level(j + 1);
    const long double inv_bj = std::exp(-log_bj);
    const long double inv_bnext = std::exp(-log_bnext);
    Lemma2Bound r;
    r.log_prefactor = -inv_bnext * (-log_bnext) / 21.0L;
    r.log_combined = 2.0L * k * inv_bj + r.log_prefactor;
    r.log_cap = -0.01L * k * inv_bj;
    r.prefactor = static_cast<double>(std::exp(r.log_prefactor));
    r.combined = static_cast<double>(std::exp(r.log_combined));
    r.cap = static_cast<double>(std::exp(r.log_cap));
    r.hypothesis_holds = -log_bnext >= 900.0L * k && sched.ratio <= 20.0;
    r.inequality_holds = r.log_combined <= r.log_cap;
    return r;
}

// ---------------------------------------------------------------------------

struct ClassContribution {
    std::string label; // "T" or "S(j)"
    int j = 0;
    long long count = 0;
    double measure_fraction = 0.0;
    double contribution = 0.0; // estimate of ∫_{class} |ζ|^{2k} dt
    double stderr_ = 0.0;
    std::optional<double> surrogate;        // ∫_{class} exp(2k·bound) dt
    std::optional<double> surrogate_stderr;
};

struct SplitMomentReport {
    double k = 0.0;
    double T = 0.0;
    long long samples = 0;
    std::uint64_t seed = 0;
    BetaSchedule schedule;
    std::vector<ClassContribution> classes;
    double total = 0.0;
    double total_stderr = 0.0;
    double unsplit = 0.0; // independent sample stream
    double unsplit_stderr = 0.0;
    bool consistent = false; // |total - unsplit| <= 3 combined stderr
};

/// Monte Carlo estimate of each class's share of ∫_T^{2T} |ζ(1/2+it)|^{2k} dt.
inline SplitMomentReport empirical_split_moment(double k, double T, const BetaSchedule& sched, long long samples,
                                                const PrimeTable& table, std::uint64_t rng_seed)
{
    detail::require(k >= 0.0 && k <= 4.0, "empirical_split_moment: need 0 <= k <= 4");
    detail::require(T >= 10.0 && 2.0 * T <= 1e6, "empirical_split_moment: need 10 <= T and 2T <= 1e6");
    detail::require(samples >= 1000, "empirical_split_moment: need at least 1000 samples");
    detail::require_matching_height(sched, T, "empirical_split_moment");

    const SplitStructure split(sched, table);
    const int cap = sched.cap_index;
    const auto n = static_cast<std::size_t>(samples);

    // per class: row 0 is 𝒯, row j+1 is 𝒮(j)
    std::vector<std::vector<double>> contrib(cap + 1, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> surrogate(cap + 1, std::vector<double>(n, 0.0));
    std::vector<double> total(n);
    std::vector<long long> counts(cap + 1, 0);

    UniformStream draws(rng_seed, 0);
    for (std::size_t s = 0; s < n; ++s) {
        const double t = T + T * draws.next();
        const auto d = split.classify_detailed(t);
        const double z = std::pow(zeta_abs(t), 2.0 * k) * T;
        const int row = d.cls.label == SplitLabel::T_set ? 0 : d.cls.j_or_m + 1;
        ++counts[row];
        contrib[row][s] = z;
        total[s] = z;
        const int level = row == 0 ? cap : d.cls.j_or_m;
        if (level >= 1) surrogate[row][s] = std::exp(2.0 * k * split.surrogate(d, level, t)) * T;
    }

    SplitMomentReport r;
    r.k = k;
    r.T = T;
    r.samples = samples;
    r.seed = rng_seed;
    r.schedule = sched;
    for (int row = 0; row <= cap; ++row) {
        ClassContribution c;
        c.j = row == 0 ? cap : row - 1;
        c.label = row == 0 ? std::string("T") : "S(" + std::to_string(row - 1) + ")";
        c.count = counts[row];
        c.measure_fraction = static_cast<double>(counts[row]) / static_cast<double>(samples);
        const auto me = mean_and_stderr(contrib[row]);
        c.contribution = me.mean;
        c.stderr_ = me.stderr_;
        if (row == 0 || row >= 2) {
            const auto ms = mean_and_stderr(surrogate[row]);
            c.surrogate = ms.mean;
            c.surrogate_stderr = ms.stderr_;
        }
        r.classes.push_back(c);
    }
    const auto mt = mean_and_stderr(total);
    r.total = mt.mean;
    r.total_stderr = mt.stderr_;

    UniformStream other(rng_seed + 1, 0);
    std::vector<double> plain(n);
    for (std::size_t s = 0; s < n; ++s) {
        const double t = T + T * other.next();
        plain[s] = std::pow(zeta_abs(t), 2.0 * k) * T;
    }
    const auto mu = mean_and_stderr(plain);
    r.unsplit = mu.mean;
    r.unsplit_stderr = mu.stderr_;
    r.consistent = std::abs(r.total - r.unsplit) <= 3.0 * std::hypot(r.total_stderr, r.unsplit_stderr);
    return r;
}

} // namespace zetalab
