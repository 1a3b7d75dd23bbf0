#pragma once

#include <array>
#include <complex>

#include "qbm/params.hpp"

namespace qbm {

// Roots of the response-function denominator (s^2+Omega^2)(s+Lambda) -
// gamma*Lambda^2, ordered so that s1 ~ -gamma/2 + iW, s2 = conj(s1),
// s3 ~ -(Lambda - gamma) on the real axis.
struct GreenPoles {
    std::complex<double> s1, s2, s3;

    std::array<std::complex<double>, 3> all() const { return {s1, s2, s3}; }
};

GreenPoles poles_full(const ModelParams& p);

// Residues r_j = (s_j + Lambda) / prod_{k != j} (s_j - s_k), so that
// G(t) = sum_j r_j e^{s_j t} with G(0) = 0, G'(0) = 1.
std::array<std::complex<double>, 3> green_residues(const ModelParams& p, const GreenPoles& poles);

enum class GreenMode { Full, LargeLambda };

// Retarded Green's function, t >= 0. LargeLambda: e^{-gamma t/2} sin(Wt)/W.
double green_time(const ModelParams& p, double t, GreenMode mode = GreenMode::LargeLambda);
double green_time_deriv(const ModelParams& p, double t, GreenMode mode = GreenMode::LargeLambda);
double green_time_deriv2(const ModelParams& p, double t, GreenMode mode = GreenMode::LargeLambda);

// Cubic denominator P(s) = s^3 + Lambda s^2 + Omega^2 s + Lambda Omega_R^2
// and its derivative; shared by the stationary residue algebra.
std::complex<double> green_cubic(const ModelParams& p, std::complex<double> s);
std::complex<double> green_cubic_deriv(const ModelParams& p, std::complex<double> s);

}  // namespace qbm
