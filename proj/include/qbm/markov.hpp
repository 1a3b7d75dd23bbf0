#pragma once

#include "qbm/exact.hpp"
#include "qbm/params.hpp"
#include "qbm/special.hpp"

namespace qbm {

// Time-dependent coefficients of the memoryless (Markov) moment equations.
// All trigonometric arguments use the bare frequency Omega.
struct MarkovCoefficients {
    double alpha = 0.0;  // frequency-shift coefficient
    double beta = 0.0;   // damping coefficient
    double f = 0.0;      // symmetric drive
    double h = 0.0;      // momentum drive
};

MarkovCoefficients markov_coefficients(const ModelParams& p, double t,
                                       const MatsubaraConfig& cfg = {});

// Asymptotic (t -> inf) values. Exact for the Drude bath:
//   alpha = gamma Lambda^3/(Lambda^2+Omega^2),  beta = gamma Lambda^2/(Lambda^2+Omega^2),
//   h = sigma(Omega) coth(Omega/2T),
//   f = -(2 gamma/pi) [Lambda^2/(Lambda^2+Omega^2)] [psi(a) + 1/(2a) - Re psi(i e)]
// with a = Lambda/2piT, e = Omega/2piT.
MarkovCoefficients markov_coefficients_asymptotic(const ModelParams& p);

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step_fast = 0.0;  // 0: use 1/(10 Lambda) while t < 20/Lambda
    double max_step_slow = 0.0;  // 0: use 1/(10 Omega) afterwards
};

// Integrates the coupled first/second-moment system with time-dependent
// coefficients from a physical initial state.
MomentTrajectory integrate_markov(const ModelParams& p, const InitialMoments& init,
                                  const std::vector<double>& t_grid, const OdeOptions& opts = {},
                                  const MatsubaraConfig& cfg = {});

// Fixed point of the moment system with asymptotic coefficients.
StationaryMoments stationary_markov(const ModelParams& p);

}  // namespace qbm
