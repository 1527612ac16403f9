#pragma once

// The random Euler-product model Σ_p c_p cos θ_p with θ_p i.i.d. uniform,
// its exact and Gaussian moment generating functions, the optimal
// polynomial length, and the constants a(k), f(k).

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "prime_engine.hpp"
#include "rng.hpp"

namespace zetalab {

enum class WeightScheme { plain, prop1 };

inline const char* to_string(WeightScheme w) { return w == WeightScheme::plain ? "plain" : "prop1"; }

struct ModelConfig {
    double x = 100.0;
    WeightScheme weight_scheme = WeightScheme::plain;
    double k = 1.0;
    long long n_samples = 100'000;
    std::uint64_t seed = 0;
};

struct MgfResult {
    double monte_carlo = 0.0;
    double stderr_ = 0.0;
    double exact_product = 0.0;
    double gaussian = 0.0;
    double variance = 0.0;
};

namespace detail {

inline void check_model(const ModelConfig& cfg, const PrimeTable& table)
{
    if (!(cfg.x >= 2.0)) raise<DomainError>("random model: need x >= 2");
    if (!(cfg.k >= 0.0)) raise<DomainError>("random model: need k >= 0");
    if (cfg.n_samples < 1000) raise<DomainError>("random model: need at least 1000 samples");
    table.require_reach(cfg.x, "random model");
}

} // namespace detail

/// c_p for p <= x: p^{-1/2}, or p^{-1/2-1/log x} log(x/p)/log x.
inline std::vector<double> weights(const ModelConfig& cfg, const PrimeTable& table)
{
    detail::check_model(cfg, table);
    const auto primes = table.primes().first(table.count_upto(cfg.x));
    const double lx = std::log(cfg.x);
    std::vector<double> c;
    c.reserve(primes.size());
    for (auto p : primes) {
        const double lp = std::log(static_cast<double>(p));
        if (cfg.weight_scheme == WeightScheme::plain)
            c.push_back(std::exp(-0.5 * lp));
        else
            c.push_back(std::max(0.0, std::exp(-(0.5 + 1.0 / lx) * lp) * (lx - lp) / lx));
    }
    return c;
}

/// ½ Σ c_p².
inline double model_variance(const std::vector<double>& c)
{
    CompensatedSum s;
    for (double v : c) s += 0.5 * v * v;
    return s.value();
}

namespace detail {

inline double euler_sum(const std::vector<double>& c, std::uint64_t seed, std::uint64_t draw_index)
{
    UniformStream u(seed, draw_index);
    double s = 0.0;
    for (double cp : c) s += cp * std::cos(2.0 * std::numbers::pi * u.next());
    return s;
}

} // namespace detail

/// One draw of Σ_{p<=x} c_p cos θ_p; draw `draw_index` of stream `seed`.
inline double sample_euler_sum(const ModelConfig& cfg, const PrimeTable& table, std::uint64_t draw_index)
{
    return detail::euler_sum(weights(cfg, table), cfg.seed, draw_index);
}

/// I₀(a) by its power series Σ (a²/4)^m/(m!)².
inline double bessel_i0(double a)
{
    const double q = 0.25 * a * a;
    double term = 1.0, sum = 1.0;
    for (int m = 1; m < 500; ++m) {
        term *= q / (static_cast<double>(m) * m);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

inline double gaussian_mgf(double variance, double k)
{
    detail::require(variance >= 0.0, "gaussian_mgf: need variance >= 0");
    return std::exp(2.0 * k * k * variance);
}

/// Π_{p<=x} I₀(2k c_p).
inline double mgf_exact(const ModelConfig& cfg, const PrimeTable& table)
{
    CompensatedSum log_sum;
    for (double c : weights(cfg, table)) log_sum += std::log(bessel_i0(2.0 * cfg.k * c));
    return std::exp(log_sum.value());
}

/// Sample mean and standard error of exp(2k Σ c_p cos θ_p); the other
/// fields are filled from the closed forms.
inline MgfResult mgf_monte_carlo(const ModelConfig& cfg, const PrimeTable& table)
{
    const auto c = weights(cfg, table);
    MgfResult r;
    r.variance = model_variance(c);
    r.gaussian = gaussian_mgf(r.variance, cfg.k);
    r.exact_product = mgf_exact(cfg, table);
    if (cfg.k == 0.0) {
        r.monte_carlo = 1.0;
        r.stderr_ = 0.0;
        return r;
    }
    std::vector<double> v(static_cast<std::size_t>(cfg.n_samples));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(2.0 * cfg.k * detail::euler_sum(c, cfg.seed, i));
    const auto me = mean_and_stderr(v);
    r.monte_carlo = me.mean;
    r.stderr_ = me.stderr_;
    return r;
}

struct OptimalLength {
    double log_x = 0.0;
    double predicted_bound_factor = 0.0;
};

/// Objective exp(2k log T/log x + k² log log x) / (log T)^{k²}.
inline double length_objective(double k, double log_T, double log_x)
{
    return std::exp(2.0 * k * log_T / log_x + k * k * (std::log(log_x) - std::log(log_T)));
}

/// Minimizer log x = 2 log T/k and the minimum e^{k²}(2/k)^{k²}.
inline OptimalLength optimal_length(double k, double T)
{
    detail::require(k >= 1.0, "optimal_length: need k >= 1");
    detail::require(T >= 1e3, "optimal_length: need T >= 1000");
    const double log_T = std::log(T);
    OptimalLength r;
    r.log_x = 2.0 * log_T / k;
    r.predicted_bound_factor = length_objective(k, log_T, r.log_x);
    return r;
}

struct ConstantEstimate {
    double value = 0.0;
    double tail = 0.0; // estimated |log| error from primes past the limit
};

/// Per-prime factor (1-1/p)^{k²} Σ_m (Γ(m+k)/(m!Γ(k)))² p^{-m}; at least
/// m_terms terms, then until the term drops below 1e-16 of the sum.
inline double a_factor(double k, double p, int m_terms)
{
    double coeff = 1.0, pw = 1.0, sum = 1.0;
    for (int m = 0; m < 100'000; ++m) {
        coeff *= (m + k) / (m + 1.0);
        pw /= p;
        const double term = coeff * coeff * pw;
        sum += term;
        if (m + 2 >= m_terms && term < 1e-16 * sum) break;
    }
    return std::exp(k * k * std::log1p(-1.0 / p)) * sum;
}

inline ConstantEstimate a_constant(double k, const PrimeTable& table, std::uint64_t prime_limit, int m_terms)
{
    detail::require(prime_limit >= 100, "a_constant: need prime_limit >= 100");
    detail::require(m_terms >= 20, "a_constant: need m_terms >= 20");
    detail::require(k >= 0.0, "a_constant: need k >= 0");
    if (k == 0.0) return {1.0, 0.0};
    table.require_reach(static_cast<double>(prime_limit), "a_constant");
    CompensatedSum log_sum;
    const auto primes = table.primes().first(table.count_upto(static_cast<double>(prime_limit)));
    for (auto p : primes) log_sum += std::log(a_factor(k, static_cast<double>(p), m_terms));
    // next prime after the limit
    std::uint64_t q = prime_limit + 1;
    auto is_prime = [](std::uint64_t n) {
        if (n < 2) return false;
        for (std::uint64_t d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    };
    while (!is_prime(q)) ++q;
    const double qd = static_cast<double>(q);
    const double tail = std::abs(std::log(a_factor(k, qd, m_terms))) * qd * qd / static_cast<double>(prime_limit);
    return {std::exp(log_sum.value()), tail};
}

inline ConstantEstimate a_constant(double k, std::uint64_t prime_limit, int m_terms)
{
    return a_constant(k, sieve(std::max<std::uint64_t>(prime_limit, 2)), prime_limit, m_terms);
}

struct RmtEstimate {
    double truncated = 0.0;    // value at N
    double extrapolated = 0.0; // 2 f_{2N} - f_N
};

namespace detail {

inline double log_f_rmt(double k, long long N)
{
    CompensatedSum s;
    for (long long j = 1; j <= N; ++j) {
        const double jd = static_cast<double>(j);
        // log Γ(j)Γ(j+2k)/Γ(j+k)² = log[Γ(j)/Γ(j+k)] - log[Γ(j+k)/Γ(j+2k)]
        s += std::log(boost::math::tgamma_delta_ratio(jd, k)) - std::log(boost::math::tgamma_delta_ratio(jd + k, k));
    }
    return s.value() - k * k * std::log(static_cast<double>(N));
}

} // namespace detail

/// N^{-k²} Π_{j<=N} Γ(j)Γ(j+2k)/Γ(j+k)².
inline RmtEstimate f_rmt(double k, long long N)
{
    detail::require(N >= 1000, "f_rmt: need N >= 1000");
    detail::require(k >= 0.0, "f_rmt: need k >= 0");
    if (k == 0.0) return {1.0, 1.0};
    const double fN = std::exp(detail::log_f_rmt(k, N));
    const double f2N = std::exp(detail::log_f_rmt(k, 2 * N));
    return {fN, 2.0 * f2N - fN};
}

} // namespace zetalab
