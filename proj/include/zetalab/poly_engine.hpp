#pragma once

// Dirichlet polynomials over primes and the splitting structure built on
// them: the geometric exponent schedule, the pieces G_(i,j), the
// pointwise upper bound for log|ζ|, the square-prime pieces P_m, and the
// classification of heights into the good set and the exceptional sets.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "prime_engine.hpp"

namespace zetalab {

/// Optional replacements for the schedule constants. Thresholds and bases
/// are kept as logarithms: the default threshold e^{-1000k} underflows.
struct ScheduleOverrides {
    std::optional<double> ratio;
    std::optional<double> log_threshold;
    std::optional<double> log_base;

    ScheduleOverrides& with_ratio(double r)
    {
        ratio = r;
        return *this;
    }
    ScheduleOverrides& with_threshold(double thr)
    {
        if (!(thr > 0.0)) detail::raise<ConfigError>("schedule threshold must be positive");
        log_threshold = std::log(thr);
        return *this;
    }
    ScheduleOverrides& with_base(double base)
    {
        if (!(base > 0.0)) detail::raise<ConfigError>("schedule base must be positive");
        log_base = std::log(base);
        return *this;
    }
};

/// Geometric exponent schedule: level 0 is fixed, level i >= 1 is
/// base * ratio^{i-1}, and the cap is 1 + the last level under the threshold.
struct ExponentSchedule {
    double k = 0.0;
    double log_height = 0.0; // log T (or log X)
    double ratio = 20.0;
    double log_threshold = 0.0;
    double log_base = 0.0;
    int cap_index = 1;
    std::vector<double> levels;     // levels[0..cap_index]
    std::vector<double> log_levels; // log of levels; -inf for a zero level 0

    double threshold() const { return std::exp(log_threshold); }
    double base() const { return std::exp(log_base); }
    double level(int i) const { return i < static_cast<int>(levels.size()) ? levels[i] : std::exp(log_level(i)); }
    double log_level(int i) const
    {
        if (i < static_cast<int>(log_levels.size())) return log_levels[i];
        return log_base + (i - 1) * std::log(ratio);
    }
    /// log of height^{level i}.
    double log_bound(int i) const { return level(i) * log_height; }
};

struct BetaSchedule : ExponentSchedule {};
struct AlphaSchedule : ExponentSchedule {};

namespace detail {

inline void fill_schedule(ExponentSchedule& s, double k, double log_height, double level0,
                          const ScheduleOverrides& ov, double default_log_threshold)
{
    s.k = k;
    s.log_height = log_height;
    s.ratio = ov.ratio.value_or(20.0);
    if (!(s.ratio > 1.0) || !std::isfinite(s.ratio)) raise<ConfigError>("schedule ratio must exceed 1");
    s.log_threshold = ov.log_threshold.value_or(default_log_threshold);
    s.log_base = ov.log_base.value_or(-2.0 * std::log(std::log(log_height)));
    if (!std::isfinite(s.log_threshold) || !std::isfinite(s.log_base))
        raise<ConfigError>("schedule threshold and base must be positive and finite");

    const double log_ratio = std::log(s.ratio);
    int last = 0; // level 0 always qualifies
    for (int i = 1;; ++i) {
        if (i > 1'000'000) raise<ConfigError>("schedule: threshold too far above base for this ratio");
        if (s.log_base + (i - 1) * log_ratio <= s.log_threshold)
            last = i;
        else
            break;
    }
    s.cap_index = last + 1;
    s.levels.assign(s.cap_index + 1, 0.0);
    s.log_levels.assign(s.cap_index + 1, 0.0);
    s.levels[0] = level0;
    s.log_levels[0] = level0 > 0.0 ? std::log(level0) : -std::numeric_limits<double>::infinity();
    double level = std::exp(s.log_base);
    for (int i = 1; i <= s.cap_index; ++i) {
        s.log_levels[i] = s.log_base + (i - 1) * log_ratio;
        s.levels[i] = level;
        level *= s.ratio;
    }
}

/// exp(log_x), snapped to the nearest integer when within rounding of it,
/// so that bounds like T^{1/2} = 100 include 100.
inline double power_bound(double log_x)
{
    const double x = std::exp(log_x);
    const double r = std::round(x);
    return std::abs(x - r) <= 1e-11 * std::max(1.0, x) ? r : x;
}

} // namespace detail

/// β_0 = 0, β_i = ratio^{i-1} * base, default ratio 20, base (log log T)^{-2},
/// threshold e^{-1000k}.
inline BetaSchedule beta_schedule(double k, double T, const ScheduleOverrides& ov = {})
{
    detail::require(k >= 1.0, "beta_schedule: need k >= 1");
    detail::require(T >= 1e3, "beta_schedule: need T >= 1000");
    BetaSchedule s;
    detail::fill_schedule(s, k, std::log(T), 0.0, ov, -1000.0 * k);
    return s;
}

// ---------------------------------------------------------------------------

enum class PolyLabel { G, F, P, prop1_main, prop1_squares, custom };

inline const char* to_string(PolyLabel l)
{
    switch (l) {
    case PolyLabel::G: return "G";
    case PolyLabel::F: return "F";
    case PolyLabel::P: return "P";
    case PolyLabel::prop1_main: return "prop1_main";
    case PolyLabel::prop1_squares: return "prop1_squares";
    case PolyLabel::custom: return "custom";
    }
    return "custom";
}

struct PolyTerm {
    std::uint64_t prime = 0;
    double coeff = 0.0;
    double log_p = 0.0;
};

/// Σ coeff(p) cos(freq * t * log p) over a finite set of primes.
struct DirichletPolynomial {
    PolyLabel label = PolyLabel::custom;
    int index_i = 0; // i for G/F, m for P
    int index_j = 0; // j for G
    int freq = 1;
    std::vector<PolyTerm> terms;

    void add(std::uint64_t p, double c) { terms.push_back({p, c, std::log(static_cast<double>(p))}); }
    bool empty() const { return terms.empty(); }

    double operator()(double t) const
    {
        const double ft = freq * t;
        double s = 0.0;
        for (const auto& term : terms) s += term.coeff * std::cos(ft * term.log_p);
        return s;
    }

    double coefficient_sum() const
    {
        double s = 0.0;
        for (const auto& term : terms) s += term.coeff;
        return s;
    }
    double abs_coefficient_sum() const
    {
        double s = 0.0;
        for (const auto& term : terms) s += std::abs(term.coeff);
        return s;
    }
};

inline double eval_poly(const DirichletPolynomial& poly, double t) { return poly(t); }

namespace detail {

/// Primes in (lo, hi] with the smoothed weight p^{-1/2-1/L} log(e^L/p)/L, L = log_len.
inline void add_smoothed_terms(DirichletPolynomial& poly, const PrimeTable& table, double lo, double hi,
                               double log_len)
{
    const double len = power_bound(log_len);
    const auto [first, last] = table.index_range(lo, hi);
    const auto primes = table.primes();
    for (std::size_t idx = first; idx < last; ++idx) {
        const auto p = primes[idx];
        const double lp = std::log(static_cast<double>(p));
        double c = 0.0;
        if (static_cast<double>(p) < len) c = std::exp(-(0.5 + 1.0 / log_len) * lp) * (log_len - lp) / log_len;
        poly.add(p, std::max(0.0, c));
    }
}

} // namespace detail

/// G_(i,j): primes in (T^{β_{i-1}}, T^{β_i}] with smoothing length T^{β_j}.
inline DirichletPolynomial g_poly(int i, int j, const BetaSchedule& sched, const PrimeTable& table)
{
    if (!(1 <= i && i <= j && j <= sched.cap_index))
        detail::raise<DomainError>("g_poly: need 1 <= i <= j <= cap_index (" + std::to_string(sched.cap_index) + ")");
    const double log_len = sched.log_bound(j);
    table.require_reach(detail::power_bound(log_len), "g_poly");
    DirichletPolynomial poly;
    poly.label = PolyLabel::G;
    poly.index_i = i;
    poly.index_j = j;
    const double lo = i == 1 ? 1.0 : detail::power_bound(sched.log_bound(i - 1));
    const double hi = detail::power_bound(sched.log_bound(i));
    detail::add_smoothed_terms(poly, table, lo, hi, log_len);
    return poly;
}

/// F_i = G_(i, cap_index).
inline DirichletPolynomial f_poly(int i, const BetaSchedule& sched, const PrimeTable& table)
{
    auto poly = g_poly(i, sched.cap_index, sched, table);
    poly.label = PolyLabel::F;
    return poly;
}

/// The two Dirichlet polynomials and the additive term bounding log|ζ(1/2+it)|
/// from above (up to an unspecified O(1)).
struct Prop1Bound {
    DirichletPolynomial main;    // Σ_{p<=x} p^{-1/2-1/log x} log(x/p)/log x cos(t log p)
    DirichletPolynomial squares; // Σ_{p<=min(√x, log T)} (1/2)/p cos(2t log p)
    double additive = 0.0;       // log T / log x
    double log_T = 0.0;

    double operator()(double t) const { return main(t) + squares(t) + additive; }
};

inline Prop1Bound prop1_polys(double x, double T, const PrimeTable& table)
{
    detail::require(T > 1.0, "prop1: need T > 1");
    if (!(x >= 2.0 && x <= T * T)) detail::raise<DomainError>("prop1: need 2 <= x <= T^2");
    table.require_reach(x, "prop1");
    Prop1Bound b;
    b.log_T = std::log(T);
    const double log_x = std::log(x);
    b.main.label = PolyLabel::prop1_main;
    detail::add_smoothed_terms(b.main, table, 1.0, x, log_x);
    b.squares.label = PolyLabel::prop1_squares;
    b.squares.freq = 2;
    const double sq_hi = std::min(std::sqrt(x), b.log_T);
    const auto [first, last] = table.index_range(1.0, sq_hi);
    for (std::size_t idx = first; idx < last; ++idx) b.squares.add(table.primes()[idx], 0.5 / table.primes()[idx]);
    b.additive = b.log_T / log_x;
    return b;
}

/// Right-hand side of the pointwise bound, without the O(1).
inline double prop1_rhs(double t, double x, double T, const PrimeTable& table)
{
    if (!(t >= T && t <= 2.0 * T)) detail::raise<DomainError>("prop1_rhs: need T <= t <= 2T");
    return prop1_polys(x, T, table)(t);
}

// ---------------------------------------------------------------------------
// Set decomposition

enum class SplitLabel { T_set, S, P_bad };

inline const char* to_string(SplitLabel l)
{
    switch (l) {
    case SplitLabel::T_set: return "T";
    case SplitLabel::S: return "S";
    case SplitLabel::P_bad: return "P";
    }
    return "?";
}

struct SplitWitness {
    int i = 0;
    int l = 0;
    double value = 0.0;
};

struct SplitClassification {
    SplitLabel label = SplitLabel::T_set;
    int j_or_m = 0;
    std::optional<SplitWitness> witness;

    bool operator==(const SplitClassification& o) const { return label == o.label && j_or_m == o.j_or_m; }
};

/// All G_(i,l), 1 <= i <= l <= cap, prebuilt for repeated classification.
class SplitStructure {
public:
    SplitStructure(const BetaSchedule& sched, const PrimeTable& table) : sched_(sched)
    {
        table.require_reach(detail::power_bound(sched.log_bound(sched.cap_index)), "split structure");
        const int cap = sched.cap_index;
        polys_.resize(cap);
        for (int i = 1; i <= cap; ++i)
            for (int l = i; l <= cap; ++l) polys_[i - 1].push_back(g_poly(i, l, sched, table));
        squares_.resize(cap + 1);
        for (int j = 1; j <= cap; ++j) {
            const double x = detail::power_bound(sched.log_bound(j));
            const double hi = std::min(std::sqrt(x), sched.log_height);
            auto& sq = squares_[j];
            sq.label = PolyLabel::prop1_squares;
            sq.freq = 2;
            const auto [first, last] = table.index_range(1.0, hi);
            for (std::size_t idx = first; idx < last; ++idx) sq.add(table.primes()[idx], 0.5 / table.primes()[idx]);
        }
    }

    /// Synthetic structure from explicit pieces: pieces[i-1][l-i] plays G_(i,l).
    SplitStructure(const BetaSchedule& sched, std::vector<std::vector<DirichletPolynomial>> pieces)
        : sched_(sched), polys_(std::move(pieces)), squares_(sched.cap_index + 1)
    {
        if (static_cast<int>(polys_.size()) != sched.cap_index)
            detail::raise<ConfigError>("synthetic split structure: need one row per level");
        for (int i = 1; i <= sched.cap_index; ++i)
            if (static_cast<int>(polys_[i - 1].size()) != sched.cap_index - i + 1)
                detail::raise<ConfigError>("synthetic split structure: row " + std::to_string(i) + " has wrong length");
    }

    const BetaSchedule& schedule() const { return sched_; }
    const DirichletPolynomial& piece(int i, int l) const { return polys_[i - 1][l - i]; }

    double threshold(int i) const { return std::exp(-0.75 * sched_.log_level(i)); }

    struct Detail {
        SplitClassification cls;
        std::vector<std::vector<double>> values; // values[i-1][l-i], filled up to the failing level
    };

    Detail classify_detailed(double t) const
    {
        Detail d;
        const int cap = sched_.cap_index;
        d.values.resize(cap);
        for (int i = 1; i <= cap; ++i) {
            const double thr = threshold(i);
            for (int l = i; l <= cap; ++l) {
                const double v = piece(i, l)(t);
                d.values[i - 1].push_back(v);
                if (std::abs(v) > thr && !d.cls.witness) d.cls.witness = SplitWitness{i, l, v};
            }
            if (d.cls.witness) {
                d.cls.label = SplitLabel::S;
                d.cls.j_or_m = i - 1;
                return d;
            }
        }
        d.cls.label = SplitLabel::T_set;
        return d;
    }

    SplitClassification classify(double t) const { return classify_detailed(t).cls; }

    /// Pointwise bound at x = T^{β_j} assembled from the classified pieces:
    /// Σ_{i<=j} G_(i,j)(t) + squares + 1/β_j. Needs values for every i <= j.
    double surrogate(const Detail& d, int j, double t) const
    {
        double s = 0.0;
        for (int i = 1; i <= j; ++i) s += d.values[i - 1][j - i];
        return s + squares_[j](t) + 1.0 / sched_.level(j);
    }

private:
    BetaSchedule sched_;
    std::vector<std::vector<DirichletPolynomial>> polys_;
    std::vector<DirichletPolynomial> squares_;
};

inline SplitClassification classify_point(double t, const BetaSchedule& sched, const PrimeTable& table)
{
    const double T = std::exp(sched.log_height);
    if (!(t >= T * (1 - 1e-15) && t <= 2.0 * T * (1 + 1e-15)))
        detail::raise<DomainError>("classify_point: need T <= t <= 2T");
    return SplitStructure(sched, table).classify(t);
}

// ---------------------------------------------------------------------------
// Square-prime pieces P_m

inline int pm_max_index(double log_T) { return static_cast<int>(std::floor(std::log2(log_T))); }

/// P_m: primes in (2^m, 2^{m+1}] with coefficient 1/(2p), frequency 2.
inline DirichletPolynomial pm_poly(int m, double log_T, const PrimeTable& table)
{
    if (!(m >= 0 && m <= pm_max_index(log_T)))
        detail::raise<DomainError>("pm_poly: need 0 <= m <= log2 log T");
    const double lo = std::ldexp(1.0, m), hi = std::ldexp(1.0, m + 1);
    table.require_reach(hi, "pm_poly");
    DirichletPolynomial poly;
    poly.label = PolyLabel::P;
    poly.index_i = m;
    poly.freq = 2;
    const auto [first, last] = table.index_range(lo, hi);
    for (std::size_t idx = first; idx < last; ++idx) poly.add(table.primes()[idx], 0.5 / table.primes()[idx]);
    return poly;
}

/// t ∈ 𝒫(m): |Re P_m(t)| > 2^{-m/10} while |Re P_n(t)| <= 2^{-n/10} for m < n <= log2 log T.
inline bool pm_membership(double t, int m, double log_T, const PrimeTable& table)
{
    const int top = pm_max_index(log_T);
    if (std::abs(pm_poly(m, log_T, table)(t)) <= std::exp2(-m / 10.0)) return false;
    for (int n = m + 1; n <= top; ++n)
        if (std::abs(pm_poly(n, log_T, table)(t)) > std::exp2(-n / 10.0)) return false;
    return true;
}

/// The unique m with t ∈ 𝒫(m), or nullopt for a good point.
inline std::optional<int> pm_class(double t, double log_T, const PrimeTable& table)
{
    for (int n = pm_max_index(log_T); n >= 0; --n)
        if (std::abs(pm_poly(n, log_T, table)(t)) > std::exp2(-n / 10.0)) return n;
    return std::nullopt;
}

} // namespace zetalab
