#pragma once

#include "qbm/exact.hpp"

namespace qbm {

enum class InteractionMode { LeadingClosed, Numerical };

struct InteractionOptions {
    double t_eval_over_gamma = 12.0;  // evaluation time in units of 1/gamma
    double step_factor = 20.0;        // grid step <= 1/(step_factor * Lambda)
    double tolerance = 0.02;          // convergence budget for the doubling check
    bool check_convergence = true;
};

// Stationary interaction energy <H_SB(inf)> = -<q B>.
// LeadingClosed: the bandwidth-enhanced terms,
//   -gamma { (Lambda/2W)[coth((W+i g/2)/2T) + c.c.] - (1/pi) log-term },
// with log-term = ln(Lambda/2piT) for 2piT > W and ln(Lambda/W) otherwise.
// Numerical: time-domain evaluation of the exact noise/response expression
// at t = t_eval (slow; serves as the oracle for the closed form).
double interaction_energy_stationary(const ModelParams& p,
                                     InteractionMode mode = InteractionMode::LeadingClosed,
                                     const InteractionOptions& opts = {});

struct EnergyFlow {
    double delta_e_system = 0.0;
    double delta_e_interaction = 0.0;
    double delta_e_bath = 0.0;  // -(system + interaction) by conservation
};

// Asymptotic energy bookkeeping for the initial state |0> of H_S times a
// thermal bath, using the exact stationary moments.
EnergyFlow energy_flow(const ModelParams& p,
                       InteractionMode mode = InteractionMode::LeadingClosed);

}  // namespace qbm
