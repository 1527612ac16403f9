#pragma once

// Correction polynomials C0..C4 of the Riemann–Siegel remainder, as
// polynomials in u = p - 1/2 where p is the fractional part of sqrt(t/2π).
//
// Psi(p) = cos(2π(p² - p - 1/16)) / cos(2πp) = -cos(2πu² - 5π/8) / cos(2πu)
// is entire; its Taylor series is obtained once by series division in
// 150-digit arithmetic (the reciprocal of cos(2πu) alone has radius 1/4,
// so the intermediate coefficients grow like 4^n before cancelling).

#include <array>
#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

namespace zetalab::detail {

struct RiemannSiegelCoefficients {
    static constexpr int kDegree = 96;   // Taylor degree kept for Psi
    static constexpr int kCorrections = 5;
    // coeff[k][n]: coefficient of u^n in C_k
    std::array<std::vector<double>, kCorrections> coeff;
    // sup over p in [0,1) of |C_k(p)|, sampled
    std::array<double, kCorrections> sup_abs{};

    double eval(int k, double u) const
    {
        const auto& c = coeff[k];
        double s = 0.0;
        for (std::size_t n = c.size(); n-- > 0;) s = s * u + c[n];
        return s;
    }

    RiemannSiegelCoefficients()
    {
        using Real = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<150>>;
        const int K = kDegree + 13;
        const Real pi = boost::math::constants::pi<Real>();
        const Real two_pi = 2 * pi;
        const Real c58 = cos(5 * pi / 8), s58 = sin(5 * pi / 8);

        std::vector<Real> num(K + 1, Real(0)), den(K + 1, Real(0));
        // cos(2πu²) and sin(2πu²)
        {
            Real term = 1; // (2π)^j / j!
            for (int j = 0; 2 * j <= K; ++j) {
                if (j > 0) term = term * two_pi / j;
                const int deg = 2 * j;
                // cos part: j even, sign (-1)^{j/2}; sin part: j odd, sign (-1)^{(j-1)/2}
                if (j % 2 == 0) {
                    const Real v = ((j / 2) % 2 == 0) ? term : Real(-term);
                    num[deg] += -c58 * v;
                } else {
                    const Real v = (((j - 1) / 2) % 2 == 0) ? term : Real(-term);
                    num[deg] += -s58 * v;
                }
            }
        }
        // cos(2πu)
        {
            Real term = 1;
            for (int j = 0; j <= K; ++j) {
                if (j > 0) term = term * two_pi / j;
                if (j % 2 == 0) den[j] = ((j / 2) % 2 == 0) ? term : Real(-term);
            }
        }
        std::vector<Real> psi(K + 1, Real(0));
        for (int n = 0; n <= K; ++n) {
            Real acc = num[n];
            for (int j = 1; j <= n; ++j) acc -= den[j] * psi[n - j];
            psi[n] = acc / den[0];
        }

        // r-th derivative of Psi as coefficient vector
        auto deriv = [&](int r) {
            std::vector<Real> d(kDegree + 1, Real(0));
            for (int n = 0; n <= kDegree; ++n) {
                if (n + r > K) break;
                Real f = 1;
                for (int i = 1; i <= r; ++i) f *= (n + i);
                d[n] = psi[n + r] * f;
            }
            return d;
        };
        const Real pi2 = pi * pi, pi4 = pi2 * pi2, pi6 = pi4 * pi2, pi8 = pi4 * pi4;
        struct Part {
            int order;
            Real scale;
        };
        const std::array<std::vector<Part>, kCorrections> recipe = {{
            {{0, Real(1)}},
            {{3, Real(-1) / (96 * pi2)}},
            {{6, Real(1) / (18432 * pi4)}, {2, Real(1) / (64 * pi2)}},
            {{9, Real(-1) / (5308416 * pi6)}, {5, Real(-1) / (3840 * pi4)}, {1, Real(-1) / (64 * pi2)}},
            {{12, Real(1) / (2038431744 * pi8)},
             {8, Real(11) / (5898240 * pi6)},
             {4, Real(19) / (24576 * pi4)},
             {0, Real(1) / (128 * pi2)}},
        }};
        for (int k = 0; k < kCorrections; ++k) {
            std::vector<Real> acc(kDegree + 1, Real(0));
            for (const auto& part : recipe[k]) {
                const auto d = deriv(part.order);
                for (int n = 0; n <= kDegree; ++n) acc[n] += part.scale * d[n];
            }
            coeff[k].resize(kDegree + 1);
            for (int n = 0; n <= kDegree; ++n) coeff[k][n] = static_cast<double>(acc[n]);
            double sup = 0.0;
            for (int i = 0; i <= 1000; ++i) sup = std::max(sup, std::abs(eval(k, -0.5 + i / 1000.0)));
            sup_abs[k] = sup;
        }
    }
};

inline const RiemannSiegelCoefficients& riemann_siegel_coefficients()
{
    static const RiemannSiegelCoefficients table;
    return table;
}

} // namespace zetalab::detail
