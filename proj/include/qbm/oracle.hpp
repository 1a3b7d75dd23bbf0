#pragma once

#include <vector>

#include "qbm/exact.hpp"
#include "qbm/params.hpp"
#include "qbm/sysbath.hpp"

namespace qbm {

// Explicit N-mode bath on Gauss-Legendre nodes over [0, omega_max]. The
// couplings reproduce the continuum spectral density: C_k^2 = (2/pi)
// sigma(W_k) W_k w_k.
struct DiscreteBath {
    int n_modes = 0;
    std::vector<double> frequencies;  // W_k
    std::vector<double> couplings;    // C_k
    std::vector<double> weights;      // quadrature weights w_k
    double omega_max = 0.0;
    double recurrence_time = 0.0;     // 2 pi / min-gap(W_k)
};

DiscreteBath build_bath(const BathSpectrum& spec, int n_modes, double omega_max,
                        double horizon_hint = 0.0);

// Reduced snapshot of the closed-system Gaussian state: the full second-moment
// matrix is never materialized at production sizes; the system block and the
// energy bookkeeping traces are carried instead.
struct CovarianceState {
    double time = 0.0;
    double q2 = 0.0, p2 = 0.0, pq_sym = 0.0;
    double q_bath_corr = 0.0;  // <q B> = sum_k C_k Cov(q, Q_k)
    double e_system = 0.0, e_interaction = 0.0, e_bath = 0.0, e_total = 0.0;
};

class OracleEvolution {
  public:
    // Diagonalizes the (N+1)-oscillator quadratic form once; exact covariance
    // rotation afterwards. Initial state: system (init) x thermal bath.
    OracleEvolution(const DiscreteBath& bath, const ModelParams& params,
                    const InitialMoments& init);

    CovarianceState at(double t) const;

    // Full covariance of (q, Q_1..Q_N, p, P_1..P_N) at time t; O(N^3),
    // meant for small-N verification only.
    std::vector<double> full_covariance(double t) const;  // row-major (2N+2)^2

    int dim() const { return n_; }

  private:
    int n_ = 0;  // N + 1
    double omega_sq_ = 0.0;
    std::vector<double> evals_;      // eigenvalues of the stiffness matrix
    std::vector<double> evecs_;      // column-major (n x n) orthogonal matrix
    std::vector<double> u_;          // O^T e_0
    std::vector<double> hx_, hp_;    // diag(O^T D_x O), diag(O^T D_p O)
    std::vector<double> dx_, dp_;    // initial diagonal covariances
    std::vector<double> couplings_;  // (0, C_k)
    double pq0_half_ = 0.0;
    double e_total0_ = 0.0;

    void apply_O(const double* in, double* out, bool transpose) const;
};

std::vector<CovarianceState> evolve(const DiscreteBath& bath, const ModelParams& params,
                                    const InitialMoments& init, const std::vector<double>& t_grid);

struct OracleMeasurement {
    StationaryMoments moments;       // method = DiscreteOracle
    double interaction_energy = 0.0; // time-averaged <H_SB> = -<qB>
    EnergyFlow flow;
    double energy_drift = 0.0;       // max |e_total(t) - e_total(0)| / e_total(0)
};

OracleMeasurement measure(const std::vector<CovarianceState>& states, double window_start,
                          double window_end);

}  // namespace qbm
