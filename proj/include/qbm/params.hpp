#pragma once

#include <complex>
#include <optional>
#include <string>

#include "qbm/errors.hpp"

namespace qbm {

// Oscillator + bath parameter bundle. Canonical entry is the renormalized
// frequency Omega_R; the bare frequency squared Omega^2 = Omega_R^2 +
// gamma*Lambda is derived. Everything is in units where hbar = k_B = 1.
struct ModelParams {
    double gamma = 0.0;        // relaxation rate
    double lambda = 0.0;       // bath bandwidth (cutoff)
    double temperature = 0.0;  // T >= 0
    double omega_r = 0.0;      // renormalized frequency, > 0
    double omega_sq = 0.0;     // bare Omega^2 = omega_r^2 + gamma*lambda
    double w = 0.0;            // W = sqrt(omega_r^2 - gamma^2/4)

    double omega_bare() const { return std::sqrt(omega_sq); }
    double stability_ratio() const { return gamma * lambda / omega_sq; }
};

// Build from the renormalized frequency. Rejects overdamped inputs
// (omega_r <= gamma/2): all closed forms here use real W.
ModelParams derive_params(double omega_r, double gamma, double lambda, double temperature);

// Build from the bare frequency; fails with InstabilityError when
// gamma*lambda >= omega_bare^2 (no stationary state exists).
ModelParams derive_params_from_bare(double omega_bare, double gamma, double lambda,
                                    double temperature);

enum class BathKind { DrudeOhmic, ExponentialOhmic, PowerLaw };
enum class CutoffShape { Drude, Exponential };

// Tagged spectral-density family. sigma(omega) is odd by construction.
struct BathSpectrum {
    BathKind kind = BathKind::DrudeOhmic;
    double gamma = 0.0;   // coupling strength
    double lambda = 0.0;  // cutoff
    // PowerLaw only:
    double omega0 = 1.0;        // reference frequency
    double k_exponent = 1.0;    // spectral exponent, > -1
    CutoffShape cutoff_shape = CutoffShape::Drude;

    static BathSpectrum drude(double gamma, double lambda);
    static BathSpectrum exponential(double gamma, double lambda);
    static BathSpectrum power_law(double gamma, double lambda, double omega0, double k_exponent,
                                  CutoffShape shape = CutoffShape::Drude);
};

double spectral_density(const BathSpectrum& spec, double omega);

// Memory kernel Sigma(tau). Drude: -gamma*Lambda^2 e^{-Lambda|tau|} sign(tau)
// in closed form (sign(0) = 0 so the kernel stays odd); other kinds by
// oscillatory quadrature of the spectral representation.
double self_energy_time(const BathSpectrum& spec, double tau, double rel_tol = 1e-10);

// Laplace transform of the memory kernel. Drude: -gamma*Lambda^2/(Lambda+s).
// Generic kinds: even/odd split of the spectral representation,
//   Sigma(s) = -(2/pi) int_0^inf sigma(w) w/(w^2+s^2) dw,
// principal-value-safe on the imaginary axis.
std::complex<double> self_energy_laplace(const BathSpectrum& spec, std::complex<double> s,
                                         double rel_tol = 1e-10);

// Scaling estimates for general power-law baths with Lambda >> omega0.
struct NonOhmicReport {
    double renorm_ratio = 0.0;           // (Omega_R^2-Omega^2)/Omega^2 estimate
    std::optional<double> p2_divergence_scale;  // absent at k = 1 (log case)
    double born_condition_value = 0.0;   // (gamma*Lambda/Omega^2)(Lambda/omega0)^(k-1)
};

NonOhmicReport nonohmic_report(const BathSpectrum& spec, double omega_r, double gamma);

}  // namespace qbm
