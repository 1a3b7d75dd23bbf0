#pragma once

#include <complex>
#include <functional>

#include "qbm/errors.hpp"

namespace qbm {

using complex = std::complex<double>;

// Truncation control for the thermal (Matsubara) series.
struct MatsubaraConfig {
    double rel_tol = 1e-10;        // certified relative truncation error
    int max_terms = 2'000'000;     // hard cap on summed terms
    double resonance_guard = 1e-3; // half-width around integer Lambda/(2 pi T)

    void validate() const {
        if (!(rel_tol > 0.0) || rel_tol > 1e-6)
            throw DomainError("MatsubaraConfig: rel_tol must lie in (0, 1e-6]");
        if (max_terms < 1000)
            throw DomainError("MatsubaraConfig: max_terms must be >= 1000");
        if (!(resonance_guard > 0.0))
            throw DomainError("MatsubaraConfig: resonance_guard must be positive");
    }
};

// Complex digamma. Recurrence-lift to |z| >= 12, then the Bernoulli
// asymptotic series; reflection handles Re(z) < 0.5.
complex digamma(complex z);

double cot(double x);

// cot(x) - 1/x, accurate near x = 0.
double cot_minus_pole(double x);

struct SeriesValue {
    double value = 0.0;
    double tail_bound = 0.0;  // bound on the dropped remainder
};

// Thermal sum F entering the stationary coordinate variance: the exact
// Matsubara-pole contribution to <q^2> is (gamma/T^2) * F.
//   F = (1/4pi^3) a^2 sum_l  l / [(l^2-a^2)((l^2+b^2)^2 - l^2 c^2)]
// with a = Lambda/2piT, b = Omega_R/2piT, c = gamma/2piT.
double matsubara_F(double lambda, double omega_r, double gamma, double temperature,
                   const MatsubaraConfig& cfg = {}, SeriesValue* detail = nullptr);

// Thermal sum I entering the stationary momentum variance, including the
// bandwidth-pole term evaluated as -(1/2)cot(Lambda/2T); gamma*I is the full
// non-resonant-pole contribution to <p^2>.
//   I = -(1/pi) a^2 sum_l  l^3 / [(l^2-a^2)((l^2+b^2)^2 - l^2 c^2)] - (1/2)cot(pi a)
double matsubara_I(double lambda, double omega_r, double gamma, double temperature,
                   const MatsubaraConfig& cfg = {}, SeriesValue* detail = nullptr);

namespace detail {

// Sums term(l) for l = 1,2,... where term decays at least like 1/l^2 beyond
// l_scale: exact summation to max(min_terms, 4*l_scale), then a tail integral
// with an Euler-Maclaurin derivative correction. `term` must be smooth as a
// function of a real argument on the tail.
SeriesValue sum_with_tail(const std::function<double(double)>& term, double l_scale,
                          const MatsubaraConfig& cfg, int min_terms = 1000);

// Exact partial sum of term(l), l = 1..cut (no tail). Test hook.
double raw_sum(const std::function<double(double)>& term, long cut);

}  // namespace detail

}  // namespace qbm
