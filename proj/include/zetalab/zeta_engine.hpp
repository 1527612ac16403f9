#pragma once

// ζ(1/2+it) by Euler–Maclaurin (small |t|) and Riemann–Siegel (|t| >= 50),
// and composite Gauss–Legendre quadrature of |ζ(1/2+it)|^{2k}.

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/bernoulli.hpp>

#include "detail/riemann_siegel_coeffs.hpp"
#include "errors.hpp"
#include "numerics.hpp"

namespace zetalab {

using Complex = std::complex<double>;

enum class ZetaMethod { euler_maclaurin, riemann_siegel };

inline const char* to_string(ZetaMethod m)
{
    return m == ZetaMethod::euler_maclaurin ? "euler_maclaurin" : "riemann_siegel";
}

struct ZetaValue {
    double t = 0.0;
    Complex value;
    ZetaMethod method = ZetaMethod::euler_maclaurin;
    double est_error = 0.0;
};

struct MomentEstimate {
    double k = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;
    double value = 0.0;
    long long nodes = 0;
    double max_node_spacing = 0.0;
};

inline constexpr double kRiemannSiegelCrossover = 50.0;
inline constexpr double kMaxHeight = 1e8;

/// ζ(s) by Euler–Maclaurin summation with N direct terms and at most
/// max_terms Bernoulli corrections. `est_error`, when given, receives the
/// magnitude of the last correction used.
inline Complex euler_maclaurin_zeta(Complex s, long n_terms, int max_terms = 60, double* est_error = nullptr)
{
    const double N = static_cast<double>(n_terms);
    CompensatedSum re, im;
    for (long n = 1; n < n_terms; ++n) {
        const Complex term = std::exp(-s * std::log(static_cast<double>(n)));
        re += term.real();
        im += term.imag();
    }
    const Complex N_s = std::exp(-s * std::log(N));
    Complex tail = N * N_s / (s - 1.0) + 0.5 * N_s;
    // T_j = B_2j/(2j)! * s(s+1)...(s+2j-2) * N^{-s-2j+1}
    Complex rising = s;            // s(s+1)...(s+2j-2) for j = 1
    Complex power = N_s / N;       // N^{-s-1}
    double fact = 2.0;             // (2j)!
    double last = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= max_terms; ++j) {
        const double b = boost::math::bernoulli_b2n<double>(j);
        const Complex term = b / fact * rising * power;
        const double mag = std::abs(term);
        if (mag > prev) break; // asymptotic series started to diverge
        tail += term;
        last = mag;
        prev = mag;
        if (mag < 1e-18 * std::abs(tail + Complex(re.value(), im.value()))) break;
        rising *= (s + (2.0 * j - 1.0)) * (s + 2.0 * j);
        power /= N * N;
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    }
    if (est_error) *est_error = last;
    return Complex(re.value(), im.value()) + tail;
}

/// Riemann–Siegel theta function, asymptotic expansion (t >= 10).
inline double riemann_siegel_theta(double t)
{
    const double pi = std::numbers::pi;
    const double t2 = t * t;
    return 0.5 * t * std::log(t / (2.0 * pi)) - 0.5 * t - pi / 8.0 + 1.0 / (48.0 * t) + 7.0 / (5760.0 * t * t2) +
           31.0 / (80640.0 * t * t2 * t2);
}

namespace detail {

/// 1/sqrt(n) and log n for the Riemann–Siegel main sum.
struct MainSumTables {
    std::vector<double> inv_sqrt;
    std::vector<double> log_n;
    MainSumTables()
    {
        const auto n_max = static_cast<std::size_t>(std::sqrt(kMaxHeight / (2.0 * std::numbers::pi))) + 2;
        inv_sqrt.resize(n_max + 1);
        log_n.resize(n_max + 1);
        for (std::size_t n = 1; n <= n_max; ++n) {
            inv_sqrt[n] = 1.0 / std::sqrt(static_cast<double>(n));
            log_n[n] = std::log(static_cast<double>(n));
        }
    }
};

inline const MainSumTables& main_sum_tables()
{
    static const MainSumTables tables;
    return tables;
}

struct ZResult {
    double z;
    double theta;
    double est_error;
};

inline ZResult riemann_siegel(double t)
{
    const auto& tab = main_sum_tables();
    const auto& rs = riemann_siegel_coefficients();
    const double tau = std::sqrt(t / (2.0 * std::numbers::pi));
    const auto N = static_cast<long>(tau);
    const double p = tau - static_cast<double>(N);
    const double theta = riemann_siegel_theta(t);

    CompensatedSum main;
    for (long n = 1; n <= N; ++n) main += tab.inv_sqrt[n] * std::cos(theta - t * tab.log_n[n]);

    const double u = p - 0.5;
    double corr = 0.0;
    double scale = 1.0;
    const double inv_tau = 1.0 / tau;
    for (int k = 0; k < RiemannSiegelCoefficients::kCorrections; ++k) {
        corr += rs.eval(k, u) * scale;
        scale *= inv_tau;
    }
    const double pre = std::pow(tau, -0.5);
    const double sign = (N % 2 == 1) ? 1.0 : -1.0; // (-1)^{N-1}
    const double z = 2.0 * main.value() + sign * pre * corr;
    // Omitted corrections: sup|C4| tau^{-5} with a prefactor fitted to [50, 3000].
    const double truncation = 0.6 * pre * rs.sup_abs[4] * scale * std::sqrt(inv_tau);
    // Phase error of each cosine is about eps*(|theta| + t log n); factor 8 covers libm and theta.
    const double rounding = 8.0 * 2.2e-16 * (std::abs(theta) + t * std::log(tau + 1.0)) * 2.0 * std::sqrt(tau);
    return {z, theta, truncation + rounding};
}

} // namespace detail

/// Z(t) = e^{iθ(t)} ζ(1/2+it), real, for t >= 10.
inline double riemann_siegel_z(double t)
{
    if (!(t >= 10.0)) detail::raise<DomainError>("riemann_siegel_z: need t >= 10 (use zeta_half below that)");
    if (t > kMaxHeight) detail::raise<CapabilityError>("riemann_siegel_z: heights above 1e8 are not supported");
    return detail::riemann_siegel(t).z;
}

/// ζ(1/2+it) with an error indicator.
inline ZetaValue zeta_half(double t)
{
    if (!std::isfinite(t) || std::abs(t) > kMaxHeight)
        detail::raise<CapabilityError>("zeta_half: |t| must not exceed 1e8");
    ZetaValue out;
    out.t = t;
    const double at = std::abs(t);
    if (at < kRiemannSiegelCrossover) {
        out.method = ZetaMethod::euler_maclaurin;
        const long n_terms = 15 + static_cast<long>(std::ceil(at / 2.0));
        double err = 0.0;
        out.value = euler_maclaurin_zeta(Complex(0.5, at), n_terms, 60, &err);
        out.est_error = err + 1e-15 * std::abs(out.value) + 1e-15;
    } else {
        out.method = ZetaMethod::riemann_siegel;
        const auto r = detail::riemann_siegel(at);
        out.value = r.z * std::polar(1.0, -r.theta);
        out.est_error = r.est_error;
    }
    if (t < 0) out.value = std::conj(out.value);
    return out;
}

/// |ζ(1/2+it)| for t >= 10 using the cheapest accurate route.
inline double zeta_abs(double t)
{
    return t >= kRiemannSiegelCrossover ? std::abs(detail::riemann_siegel(t).z) : std::abs(zeta_half(t).value);
}

/// Mean spacing of zeta zeros near height t.
inline double zero_spacing(double t) { return 2.0 * std::numbers::pi / std::log(t / (2.0 * std::numbers::pi)); }

inline constexpr double kMinNodesPerUnit = 20.0;
inline constexpr double kNodesPerZeroSpacing = 40.0;

/// ∫_{t0}^{t1} |ζ(1/2+it)|^{2k} dt for several k from one set of ζ samples.
inline std::vector<MomentEstimate> moment_quadrature(std::span<const double> ks, double t0, double t1,
                                                     double nodes_per_unit)
{
    for (double k : ks)
        if (!(k >= 0.0 && k <= 4.0)) detail::raise<DomainError>("moment_quadrature: need 0 <= k <= 4");
    if (!(t0 >= 10.0 && t0 < t1 && t1 <= 1e6))
        detail::raise<DomainError>("moment_quadrature: need 10 <= t0 < t1 <= 1e6");
    if (!(nodes_per_unit >= kMinNodesPerUnit)) {
        const double needed = std::max(kMinNodesPerUnit, kNodesPerZeroSpacing / zero_spacing(t1));
        detail::raise<CapabilityError>("moment_quadrature: node density " + std::to_string(nodes_per_unit) +
                                       " per unit is too low; need at least " + std::to_string(needed) +
                                       " per unit at height " + std::to_string(t1));
    }

    std::map<int, GaussLegendreRule> rules;
    auto rule_for = [&](int m) -> const GaussLegendreRule& {
        auto it = rules.find(m);
        if (it == rules.end()) it = rules.emplace(m, GaussLegendreRule(m)).first;
        return it->second;
    };

    const std::size_t nk = ks.size();
    std::vector<CompensatedSum> sums(nk);
    long long nodes = 0;
    double max_gap = 0.0;
    double prev_node = t0;
    double a = t0;
    while (a < t1) {
        const double spacing = zero_spacing(std::max(a, 10.0));
        const double width = std::min(1.0, 0.5 * spacing);
        const double b = std::min(t1, a + width);
        const double h = b - a;
        const double density = std::max(nodes_per_unit, kNodesPerZeroSpacing / spacing);
        const int m = std::max(2, static_cast<int>(std::ceil(density * h)));
        const auto& rule = rule_for(m);
        const double half = 0.5 * h, mid = 0.5 * (a + b);
        std::vector<double> panel(nk, 0.0);
        for (int i = 0; i < m; ++i) {
            const double t = mid + half * rule.nodes[i];
            const double z = zeta_abs(t);
            for (std::size_t j = 0; j < nk; ++j) panel[j] += rule.weights[i] * std::pow(z, 2.0 * ks[j]);
            max_gap = std::max(max_gap, t - prev_node);
            prev_node = t;
        }
        for (std::size_t j = 0; j < nk; ++j) sums[j] += panel[j] * half;
        nodes += m;
        a = b;
    }
    max_gap = std::max(max_gap, t1 - prev_node);

    std::vector<MomentEstimate> out;
    for (std::size_t j = 0; j < nk; ++j)
        out.push_back({ks[j], t0, t1, std::max(0.0, sums[j].value()), nodes, max_gap});
    return out;
}

inline MomentEstimate moment_quadrature(double k, double t0, double t1, double nodes_per_unit)
{
    const double ks[] = {k};
    return moment_quadrature(std::span<const double>(ks), t0, t1, nodes_per_unit)[0];
}

} // namespace zetalab
