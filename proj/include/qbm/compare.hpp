#pragma once

#include <string>
#include <vector>

#include "qbm/exact.hpp"
#include "qbm/markov.hpp"
#include "qbm/nonmarkov.hpp"

namespace qbm {

// Cross-scheme differences between the stationary second moments, plus the
// leading high-temperature predictions for regime-tagged comparison.
struct MethodDifferences {
    StationaryMoments exact, markov, nonmarkov;
    double d_p2_nm_m = 0.0;   // <p^2>_NM - <p^2>_M
    double d_q2_nm_m = 0.0;
    double d_p2_e_nm = 0.0;   // <p^2>_E - <p^2>_NM
    double d_q2_e_nm = 0.0;
    double d_p2_e_m = 0.0;
    double d_q2_e_m = 0.0;
    // leading-order high-T predictions
    double pred_p2_nm_m = 0.0;   // -T gamma Lambda / Omega^2
    double pred_q2_nm_m = 0.0;
    double pred_p2_e_nm = 0.0;   // +T gamma Lambda / Omega^2
    double pred_q2_e_nm = 0.0;
};

MethodDifferences method_differences(const ModelParams& p, const MatsubaraConfig& cfg = {});

struct ValidityThresholds {
    double weak_coupling = 0.01;  // gamma/Omega below this passes
    double born = 0.1;            // gamma*Lambda/Omega^2 below this passes
};

struct ValidityReport {
    double q_factor = 0.0;           // Q = Omega/gamma
    double ratio_lambda_omega = 0.0; // Lambda/Omega (0 when no Lambda is known)
    double weak_coupling_value = 0.0;
    bool weak_coupling_ok = false;
    double born_value = 0.0;
    bool born_ok = false;
    bool coarse_grain_ok = false;    // 1 << Lambda/Omega << Q window
    double lambda_budget = 0.0;      // stability bound Q*Omega (preset reports)
    ValidityThresholds thresholds;
};

ValidityReport validity_report(const ModelParams& p, const ValidityThresholds& thr = {});

// Experimental presets (frequencies in MHz, angular):
//   groex: micromechanical resonator, Q ~ 215
//   teufel: microwave-cavity micromechanical oscillator, Q = 1e5
//   norte: on-chip resonator designs, Q ~ 1e8
struct ExperimentPreset {
    std::string name;
    double omega_mhz = 0.0;  // angular frequency in MHz
    double q_factor = 0.0;
    double lambda_budget_mhz = 0.0;  // Q * Omega: stability bound on Lambda
};

std::vector<ExperimentPreset> experiment_presets();
ValidityReport validity_report_preset(const std::string& name, const ValidityThresholds& thr = {});
const ExperimentPreset& find_preset(const std::string& name);

struct SweepPoint {
    double lambda = 0.0;
    double temperature = 0.0;
    bool stable = true;
    StationaryMoments exact, markov, nonmarkov;
    double ratio_q2_m = 0.0, ratio_p2_m = 0.0;   // Qm/Qe, Pm/Pe
    double ratio_q2_nm = 0.0, ratio_p2_nm = 0.0; // Qnm/Qe, Pnm/Pe
};

struct SweepResult {
    double gamma = 0.0;
    double omega_r = 1.0;
    std::vector<double> lambda_grid;
    std::vector<double> temperature_grid;
    std::vector<SweepPoint> points;  // ordered T-major, then Lambda
};

SweepResult ratio_sweep(double gamma, double omega_r, const std::vector<double>& lambda_grid,
                        const std::vector<double>& temperature_grid, int jobs = 1);

std::vector<double> default_lambda_grid();
std::vector<double> default_temperature_grid();

}  // namespace qbm
