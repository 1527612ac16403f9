#pragma once

// Quadratic characters χ_d, fundamental discriminants, orthogonality sums,
// central values L(1/2, χ_d), the α-schedule and the set 𝒬, and the
// discriminant-sum moment.

#include <boost/math/special_functions/gamma.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "moment_kernel.hpp"
#include "numerics.hpp"
#include "poly_engine.hpp"
#include "prime_engine.hpp"

namespace zetalab {

/// Kronecker symbol (d/n).
inline int kronecker(std::int64_t d, std::int64_t n)
{
    if (d == 0) detail::raise<DomainError>("kronecker: d must be nonzero");
    if (n == 0) return (d == 1 || d == -1) ? 1 : 0;
    int result = 1;
    if (n < 0) {
        n = -n;
        if (d < 0) result = -result;
    }
    int twos = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++twos;
    }
    if (twos > 0) {
        if (d % 2 == 0) return 0;
        const std::int64_t r = ((d % 8) + 8) % 8;
        if ((r == 3 || r == 5) && (twos % 2 == 1)) result = -result;
    }
    // Jacobi symbol (d/n), n odd positive
    std::int64_t a = ((d % n) + n) % n;
    std::int64_t m = n;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            const std::int64_t r = m % 8;
            if (r == 3 || r == 5) result = -result;
        }
        std::swap(a, m);
        if (a % 4 == 3 && m % 4 == 3) result = -result;
        a %= m;
    }
    return m == 1 ? result : 0;
}

/// p* = (-1)^{(p-1)/2} p.
inline std::int64_t p_star(std::int64_t p)
{
    if (p < 3 || !FactoredInteger::is_prime(static_cast<std::uint64_t>(p)))
        detail::raise<DomainError>("p_star: need an odd prime, got " + std::to_string(p));
    return p % 4 == 1 ? p : -p;
}

struct FundamentalDiscriminant {
    std::int64_t d = 0;
    int sign = 0;

    bool operator==(const FundamentalDiscriminant&) const = default;
};

namespace detail {

inline bool squarefree(std::uint64_t n)
{
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % (p * p) == 0) return false;
        if (n % p == 0) n /= p;
    }
    return true;
}

inline std::int64_t mod4(std::int64_t v) { return ((v % 4) + 4) % 4; }

/// Fundamental-discriminant test given squarefreeness of |d| and of |d|/4.
template <class Sqf>
bool fundamental_with(std::int64_t d, Sqf&& sqf)
{
    if (d == 0 || d == 1) return false;
    const std::uint64_t a = static_cast<std::uint64_t>(d < 0 ? -d : d);
    if (mod4(d) == 1) return sqf(a);
    if (a % 4 != 0) return false;
    const std::int64_t m = d / 4;
    const std::int64_t r = mod4(m);
    return (r == 2 || r == 3) && sqf(a / 4);
}

} // namespace detail

inline bool is_fundamental(std::int64_t d)
{
    return detail::fundamental_with(d, [](std::uint64_t a) { return detail::squarefree(a); });
}

inline constexpr double kMaxDiscriminantRange = 1e7;

/// All fundamental d ≠ 1 with x0 <= |d| <= x1, ascending by |d|, negative first.
inline std::vector<FundamentalDiscriminant> fundamental_discriminants(double x0, double x1)
{
    if (x1 > kMaxDiscriminantRange)
        detail::raise<CapabilityError>("fundamental_discriminants: |d| beyond 1e7 is not enumerated");
    if (!(x0 >= 1.0 && x0 < x1)) detail::raise<DomainError>("fundamental_discriminants: need 1 <= x0 < x1");
    const auto lo = static_cast<std::uint64_t>(std::ceil(x0));
    const auto hi = static_cast<std::uint64_t>(std::floor(x1));
    std::vector<char> sqf(hi + 1, 1);
    for (std::uint64_t p = 2; p * p <= hi; ++p)
        for (std::uint64_t q = p * p; q <= hi; q += p * p) sqf[q] = 0;
    auto is_sqf = [&](std::uint64_t a) { return sqf[a] != 0; };
    std::vector<FundamentalDiscriminant> out;
    for (std::uint64_t a = lo; a <= hi; ++a) {
        const auto ai = static_cast<std::int64_t>(a);
        if (detail::fundamental_with(-ai, is_sqf)) out.push_back({-ai, -1});
        if (detail::fundamental_with(ai, is_sqf)) out.push_back({ai, 1});
    }
    return out;
}

struct Prop4Result {
    long long sum = 0;
    long long main = 0; // coprime count if n is a square, else 0
    long long count = 0;
    bool is_square = false;
    bool bound_ok = false; // |sum - main| <= 2n
};

inline constexpr double kProp4Constant = 2.0;

/// Σ_d Π χ_{p_i*}(d)^{α_i} over the given discriminants.
inline Prop4Result prop4_sum(const FactoredInteger& n, const std::vector<FundamentalDiscriminant>& discs)
{
    for (const auto& f : n.factors())
        if (f.prime == 2) detail::raise<DomainError>("prop4_sum: n must be supported on odd primes");
    if (!n.value() || *n.value() > 1'000'000) detail::raise<DomainError>("prop4_sum: need n <= 1e6");
    std::vector<std::pair<std::int64_t, int>> chars;
    for (const auto& f : n.factors()) chars.emplace_back(p_star(static_cast<std::int64_t>(f.prime)), f.exponent);
    Prop4Result r;
    r.is_square = n.is_square();
    r.count = static_cast<long long>(discs.size());
    for (const auto& fd : discs) {
        int v = 1;
        bool coprime = true;
        for (const auto& [ps, a] : chars) {
            const int c = kronecker(ps, fd.d);
            if (c == 0) coprime = false;
            v *= (a % 2 == 0) ? c * c : c;
        }
        r.sum += v;
        if (coprime && r.is_square) ++r.main;
    }
    r.bound_ok = std::abs(static_cast<double>(r.sum - r.main)) <= kProp4Constant * static_cast<double>(*n.value());
    return r;
}

inline Prop4Result prop4_sum(const FactoredInteger& n, double X)
{
    if (X > 1e5) detail::raise<CapabilityError>("prop4_sum: need X <= 1e5");
    return prop4_sum(n, fundamental_discriminants(X, 2.0 * X));
}

// ---------------------------------------------------------------------------
// Central values

inline constexpr const char* kLValueEngineVersion = "afe-gamma-1";
inline constexpr double kLValueMinTol = 1e-10;
inline constexpr std::int64_t kLValueMaxAbsD = 1'000'000;

namespace detail {

/// Σ χ(n) n^{-1/2} [Q(σ, πn²λ/q) + Q(σ, πn²/(λq))], n <= n_max.
inline double afe_sum(std::int64_t d, double lambda, long n_max)
{
    const double q = static_cast<double>(d < 0 ? -d : d);
    const double sigma = d > 0 ? 0.25 : 0.75;
    CompensatedSum s;
    for (long n = 1; n <= n_max; ++n) {
        const int c = kronecker(d, n);
        if (c == 0) continue;
        const double u = std::numbers::pi * static_cast<double>(n) * static_cast<double>(n) / q;
        const double w = boost::math::gamma_q(sigma, u * lambda) + boost::math::gamma_q(sigma, u / lambda);
        s += c * w / std::sqrt(static_cast<double>(n));
    }
    return s.value();
}

inline constexpr double kRootCheckLambda = 1.25;

inline long afe_length(std::int64_t d, double tol)
{
    const double q = static_cast<double>(d < 0 ? -d : d);
    return static_cast<long>(std::ceil(std::sqrt(q * kRootCheckLambda / std::numbers::pi * (std::log(1.0 / tol) + 20.0))));
}

} // namespace detail

/// L(1/2, χ_d) with an explicit sum length. The symmetric form assumes root
/// number +1; l_half checks that assumption.
inline double l_half_with_length(std::int64_t d, long n_terms, double lambda = 1.0)
{
    if (!is_fundamental(d)) detail::raise<DomainError>("l_half: " + std::to_string(d) + " is not a fundamental discriminant");
    if (std::abs(d) > kLValueMaxAbsD) detail::raise<CapabilityError>("l_half: need |d| <= 1e6");
    detail::require(n_terms >= 1, "l_half: need at least one term");
    return detail::afe_sum(d, lambda, n_terms);
}

inline double l_half(std::int64_t d, double tol)
{
    if (!(tol >= kLValueMinTol)) detail::raise<CapabilityError>("l_half: tolerance below 1e-10 is not reachable");
    if (std::abs(d) > kLValueMaxAbsD) detail::raise<CapabilityError>("l_half: need |d| <= 1e6");
    const long n = detail::afe_length(d, tol);
    const double v = l_half_with_length(d, n, 1.0);
    const double w = l_half_with_length(d, n, detail::kRootCheckLambda);
    if (std::abs(v - w) > std::max(tol, 1e-12 * std::abs(v)))
        detail::raise<Error>("l_half: functional-equation check failed for d = " + std::to_string(d));
    return v;
}

/// Append-only CSV of (d, value, tol, engine_version).
class LValueCache {
public:
    explicit LValueCache(std::filesystem::path file) : file_(std::move(file))
    {
        std::ifstream in(file_);
        if (!in) return;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line.rfind("d,", 0) == 0) continue;
            std::stringstream ss(line);
            std::string fd, fv, ft, fe;
            if (!std::getline(ss, fd, ',') || !std::getline(ss, fv, ',') || !std::getline(ss, ft, ',') ||
                !std::getline(ss, fe))
                continue;
            if (fe != kLValueEngineVersion) continue;
            Entry e;
            std::int64_t d = 0;
            if (std::from_chars(fd.data(), fd.data() + fd.size(), d).ec != std::errc{}) continue;
            if (std::from_chars(fv.data(), fv.data() + fv.size(), e.value).ec != std::errc{}) continue;
            if (std::from_chars(ft.data(), ft.data() + ft.size(), e.tol).ec != std::errc{}) continue;
            auto it = entries_.find(d);
            if (it == entries_.end() || e.tol < it->second.tol) entries_[d] = e;
        }
    }

    const std::filesystem::path& path() const { return file_; }
    std::size_t size() const { return entries_.size(); }
    long long hits() const { return hits_; }

    double get(std::int64_t d, double tol)
    {
        auto it = entries_.find(d);
        if (it != entries_.end() && it->second.tol <= tol) {
            ++hits_;
            return it->second.value;
        }
        const double v = l_half(d, tol);
        append(d, v, tol);
        entries_[d] = {v, tol};
        return v;
    }

private:
    struct Entry {
        double value = 0.0;
        double tol = 0.0;
    };

    static std::string fmt(double v)
    {
        char buf[64];
        return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
    }

    void append(std::int64_t d, double v, double tol)
    {
        std::error_code ec;
        if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path(), ec);
        const bool fresh = !std::filesystem::exists(file_, ec) || std::filesystem::file_size(file_, ec) == 0;
        std::ofstream out(file_, std::ios::app | std::ios::binary);
        if (!out) detail::raise<IoError>("cannot write L-value cache " + file_.string());
        std::string rec;
        if (fresh) rec += "d,value,tol,engine_version\n";
        rec += std::to_string(d) + "," + fmt(v) + "," + fmt(tol) + "," + kLValueEngineVersion + "\n";
        out << rec << std::flush;
        if (!out) detail::raise<IoError>("cannot write L-value cache " + file_.string());
    }

    std::filesystem::path file_;
    std::map<std::int64_t, Entry> entries_;
    long long hits_ = 0;
};

// ---------------------------------------------------------------------------
// α-schedule and 𝒬

/// α_0 = log 2/log X, α_i = ratio^{i-1} base, threshold e^{-1000(1+k)}.
inline AlphaSchedule alpha_schedule(double k, double X, const ScheduleOverrides& ov = {})
{
    detail::require(k > 0.0, "alpha_schedule: need k > 0");
    detail::require(X >= 1e3, "alpha_schedule: need X >= 1000");
    AlphaSchedule s;
    const double log_X = std::log(X);
    detail::fill_schedule(s, k, log_X, std::log(2.0) / log_X, ov, -1000.0 * (1.0 + k));
    return s;
}

/// Per-level sums Σ χ_{p*}(d) p^{-1/2-1/(α_𝒥 log X)} log(X^{α_𝒥}/p)/log X^{α_𝒥}
/// over odd p in (X^{α_{i-1}}, X^{α_i}].
class QStructure {
public:
    QStructure(const AlphaSchedule& sched, const PrimeTable& table) : sched_(sched)
    {
        const int cap = sched.cap_index;
        const double log_len = sched.log_bound(cap);
        table.require_reach(detail::power_bound(log_len), "q_membership");
        levels_.resize(cap);
        for (int i = 1; i <= cap; ++i) {
            DirichletPolynomial poly;
            detail::add_smoothed_terms(poly, table, detail::power_bound(sched.log_bound(i - 1)),
                                       detail::power_bound(sched.log_bound(i)), log_len);
            for (const auto& t : poly.terms)
                if (t.prime != 2) levels_[i - 1].push_back({p_star(static_cast<std::int64_t>(t.prime)), t.coeff});
        }
    }

    const AlphaSchedule& schedule() const { return sched_; }

    double level_sum(int i, std::int64_t d) const
    {
        double s = 0.0;
        for (const auto& [ps, c] : levels_[i - 1]) s += c * kronecker(ps, d);
        return s;
    }

    bool contains(std::int64_t d) const
    {
        for (int i = 1; i <= sched_.cap_index; ++i)
            if (std::abs(level_sum(i, d)) > std::exp(-0.75 * sched_.log_level(i))) return false;
        return true;
    }

private:
    AlphaSchedule sched_;
    std::vector<std::vector<std::pair<std::int64_t, double>>> levels_;
};

inline bool q_membership(std::int64_t d, const AlphaSchedule& sched, const PrimeTable& table)
{
    return QStructure(sched, table).contains(d);
}

// ---------------------------------------------------------------------------

struct Theorem2Report {
    double k = 0.0;
    double X = 0.0;
    double tol = 0.0;
    long long count = 0, count_pos = 0, count_neg = 0;
    double sum = 0.0, sum_pos = 0.0, sum_neg = 0.0;
    double normalizer = 0.0; // X (log X)^{k(k+1)/2}
    double ratio = 0.0, ratio_pos = 0.0, ratio_neg = 0.0;
    double min_value = 0.0; // smallest L(1/2, χ_d) seen
};

/// Σ_{X<=|d|<=2X} |L(1/2, χ_d)|^k with per-sign parts. Values come from the
/// cache when one is supplied.
inline Theorem2Report theorem2_empirical(double k, double X, LValueCache* cache = nullptr, double tol = 1e-10)
{
    detail::require(k >= 0.0 && k <= 4.0, "theorem2_empirical: need 0 <= k <= 4");
    if (X > 1e4) detail::raise<CapabilityError>("theorem2_empirical: need X <= 1e4");
    detail::require(X >= 2.0, "theorem2_empirical: need X >= 2");
    Theorem2Report r;
    r.k = k;
    r.X = X;
    r.tol = tol;
    CompensatedSum pos, neg;
    r.min_value = std::numeric_limits<double>::infinity();
    for (const auto& fd : fundamental_discriminants(X, 2.0 * X)) {
        const double v = cache ? cache->get(fd.d, tol) : l_half(fd.d, tol);
        r.min_value = std::min(r.min_value, v);
        const double term = std::pow(std::abs(v), k);
        if (fd.sign > 0) {
            pos += term;
            ++r.count_pos;
        } else {
            neg += term;
            ++r.count_neg;
        }
    }
    r.count = r.count_pos + r.count_neg;
    r.sum_pos = pos.value();
    r.sum_neg = neg.value();
    r.sum = r.sum_pos + r.sum_neg;
    r.normalizer = X * std::pow(std::log(X), k * (k + 1.0) / 2.0);
    r.ratio = r.sum / r.normalizer;
    r.ratio_pos = r.sum_pos / r.normalizer;
    r.ratio_neg = r.sum_neg / r.normalizer;
    return r;
}

} // namespace zetalab
