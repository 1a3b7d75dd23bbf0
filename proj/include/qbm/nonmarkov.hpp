#pragma once

#include <complex>

#include "qbm/markov.hpp"

namespace qbm {

// Memory kernels of the second-moment hierarchy (tau >= 0):
//   C(tau) = gamma Lambda^2 e^{-Lambda tau} cos(Omega tau)
//   S(tau) = gamma Lambda^2 e^{-Lambda tau} sin(Omega tau)/Omega
struct MemoryKernels {
    double c = 0.0;
    double s = 0.0;
};

MemoryKernels memory_kernels(const ModelParams& p, double tau);

// Iterated-integral kernels of the derivative expansion, at coincident
// arguments: K_n(t;t) = gamma Lambda^2 / z^n [1 - e^{-z t} sum_{m<n} (zt)^m/m!]
// with z = Lambda - i Omega. Re K1 = alpha(t), Im K1/Omega = beta(t).
struct DerivativeKernels {
    std::complex<double> k1, k2, k3;
};

DerivativeKernels derivative_kernels(const ModelParams& p, double t);

struct VolterraOptions {
    double step = 0.0;          // 0: min(1/(20 Lambda), 1/(20 Omega))
    double mean_rel_tol = 1e-11;
    int corrector_iters = 2;
};

// Memory-keeping moment dynamics. First moments obey the same memory
// equation as the exact mean and are solved through the exact exponential
// auxiliary reduction; second moments by product-trapezoid Volterra stepping
// with the kernel history truncated at memory_window.
MomentTrajectory integrate_nonmarkov(const ModelParams& p, const InitialMoments& init,
                                     const std::vector<double>& t_grid, double memory_window,
                                     const VolterraOptions& opts = {},
                                     const MatsubaraConfig& cfg = {});

// Stationary state of the hierarchy (all derivative terms vanish):
//   <q^2> = coth(Omega/2T)/(2 Omega),
//   <p^2> = (Omega^2 - alpha_inf) <q^2> - f_inf/2.
StationaryMoments stationary_nonmarkov(const ModelParams& p);

}  // namespace qbm
