#pragma once

#include <complex>
#include <vector>

#include "qbm/greens.hpp"
#include "qbm/params.hpp"
#include "qbm/special.hpp"

namespace qbm {

enum class Method { ExactClosed, ExactQuadrature, BornMarkov, BornNonMarkov, DiscreteOracle };

const char* method_name(Method m);

// Equal-time second moments of the stationary state.
struct StationaryMoments {
    double q2 = 0.0;
    double p2 = 0.0;
    double pq_sym = 0.0;
    Method method = Method::ExactClosed;
};

// Stationary <q^2>, <p^2> from the residue evaluation of the spectral
// integrals with the full Drude response (cubic poles + thermal poles).
// Matsubara terms crossing the bandwidth pole are evaluated as a combined
// analytic limit inside the resonance guard.
StationaryMoments stationary_closed(const ModelParams& p, const MatsubaraConfig& cfg = {});

// Independent oracle: adaptive quadrature of the same spectral integrals.
// Accepts T = 0 (coth -> sign).
StationaryMoments stationary_quadrature(const ModelParams& p, double rel_tol = 1e-9);

// Stationary moments for a generic spectral density: the bath self-energy is
// evaluated numerically on the real axis and the bare frequency fixed by the
// zero-frequency renormalization Omega^2 = omega_r^2 - Re Sigma(0).
StationaryMoments stationary_quadrature_spectrum(const BathSpectrum& spec, double omega_r,
                                                 double temperature, double rel_tol = 1e-8);

enum class TraceKind { qq, pp };

struct CorrelationTrace {
    std::vector<double> tau_grid;
    std::vector<std::complex<double>> values;
    TraceKind kind = TraceKind::qq;
};

struct TraceOptions {
    double rel_tol = 1e-8;
    double tau_horizon = 200.0;
};

// Stationary two-time correlator <x(t+tau) x(t)> for t >> 1/gamma,
// x in {q, p}; Hermitian in tau.
CorrelationTrace correlation_trace(const ModelParams& p, const std::vector<double>& tau_grid,
                                   TraceKind kind, const TraceOptions& opts = {});

// Symmetrized noise correlator (1/2)<<xi(t)xi(t') + xi(t')xi(t)>> as a
// function of tau = t - t'. Log-divergent at tau = 0.
double noise_kernel_sym(const ModelParams& p, double tau, const MatsubaraConfig& cfg = {});

struct InitialMoments {
    double q2 = 0.0;
    double p2 = 0.0;
    double pq_sym = 0.0;
    double mean_q = 0.0;
    double mean_p = 0.0;
};

struct MomentTrajectory {
    std::vector<double> t_grid;
    std::vector<double> mean_q, mean_p;
    std::vector<double> q2, p2, pq_sym;
    Method method = Method::ExactClosed;
};

// Exact transient evolution from a factorized initial state: initial-data
// terms plus the double noise convolution, assembled in closed form from the
// pole exponentials and the thermal expansion of the noise kernel.
MomentTrajectory transient_moments(const ModelParams& p, const InitialMoments& init,
                                   const std::vector<double>& t_grid,
                                   const MatsubaraConfig& cfg = {});

namespace detail {

// Full-Drude stationary spectral weights: numerator gamma*w*Lambda^2 over
// |P(i w)|^2 (with w^2 extra for the momentum). Shared with tests.
double stationary_integrand(const ModelParams& p, double omega, bool momentum);

// Residue-sum trace used as the closed-form cross-check of correlation_trace.
std::complex<double> trace_residue(const ModelParams& p, double tau, TraceKind kind,
                                   const MatsubaraConfig& cfg = {});

}  // namespace detail

}  // namespace qbm
