#include "qbm/nonmarkov.hpp"

#include <cmath>
#include <vector>

namespace qbm {

namespace {

using cplx = std::complex<double>;

}  // namespace

MemoryKernels memory_kernels(const ModelParams& p, double tau) {
    if (tau < 0.0) throw DomainError("memory_kernels: tau must be >= 0");
    const double Om = p.omega_bare();
    double envelope = p.gamma * p.lambda * p.lambda * std::exp(-p.lambda * tau);
    MemoryKernels k;
    k.c = envelope * std::cos(Om * tau);
    k.s = Om > 0.0 ? envelope * std::sin(Om * tau) / Om : envelope * tau;
    return k;
}

DerivativeKernels derivative_kernels(const ModelParams& p, double t) {
    if (t < 0.0) throw DomainError("derivative_kernels: t must be >= 0");
    const double Om = p.omega_bare();
    cplx z(p.lambda, -Om);
    cplx zt = z * t;
    cplx ez = std::exp(-zt);
    double gl2 = p.gamma * p.lambda * p.lambda;
    DerivativeKernels k;
    k.k1 = gl2 / z * (1.0 - ez);
    k.k2 = gl2 / (z * z) * (1.0 - ez * (1.0 + zt));
    k.k3 = gl2 / (z * z * z) * (1.0 - ez * (1.0 + zt + 0.5 * zt * zt));
    return k;
}

StationaryMoments stationary_nonmarkov(const ModelParams& p) {
    const double Om = p.omega_bare();
    MarkovCoefficients c = markov_coefficients_asymptotic(p);
    StationaryMoments m;
    m.method = Method::BornNonMarkov;
    double cothf = p.temperature > 0.0 ? 1.0 / std::tanh(Om / (2.0 * p.temperature)) : 1.0;
    m.q2 = 0.5 * cothf / Om;
    m.p2 = (p.omega_sq - c.alpha) * m.q2 - 0.5 * c.f;
    m.pq_sym = 0.0;
    return m;
}

namespace {

// Exact reduction of the mean memory equation: the kernel is a pure
// exponential, so M(t) = int_0^t gamma Lambda^2 e^{-Lambda (t-t')} <q>(t') dt'
// satisfies dM/dt = gamma Lambda^2 <q> - Lambda M.
struct MeanState {
    double q, p, M;
};

void integrate_means(const ModelParams& p, const InitialMoments& init,
                     const std::vector<double>& targets, std::vector<double>& mean_q,
                     std::vector<double>& mean_p, double rel_tol) {
    const double gl2 = p.gamma * p.lambda * p.lambda;
    auto rhs = [&](const MeanState& y, MeanState& dy) {
        dy.q = y.p;
        dy.p = -p.omega_sq * y.q + y.M;
        dy.M = gl2 * y.q - p.lambda * y.M;
    };
    // classic RK4 with a step resolving the bandwidth scale; the system is
    // linear and smooth, so fixed-step fourth order at h <= 1/(30 Lambda)
    // holds well past the target accuracy
    double h = 1.0 / (30.0 * std::max(p.lambda, p.omega_bare()));
    (void)rel_tol;
    MeanState y{init.mean_q, init.mean_p, 0.0};
    double t = 0.0;
    MeanState k1, k2, k3, k4, tmp;
    for (double target : targets) {
        while (t < target - 1e-15 * std::max(1.0, target)) {
            double step = std::min(h, target - t);
            rhs(y, k1);
            tmp = {y.q + 0.5 * step * k1.q, y.p + 0.5 * step * k1.p, y.M + 0.5 * step * k1.M};
            rhs(tmp, k2);
            tmp = {y.q + 0.5 * step * k2.q, y.p + 0.5 * step * k2.p, y.M + 0.5 * step * k2.M};
            rhs(tmp, k3);
            tmp = {y.q + step * k3.q, y.p + step * k3.p, y.M + step * k3.M};
            rhs(tmp, k4);
            y.q += step / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
            y.p += step / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
            y.M += step / 6.0 * (k1.M + 2.0 * k2.M + 2.0 * k3.M + k4.M);
            t += step;
            if (!std::isfinite(y.q)) throw StepFailure("integrate_nonmarkov: mean diverged");
        }
        mean_q.push_back(y.q);
        mean_p.push_back(y.p);
    }
}

}  // namespace

MomentTrajectory integrate_nonmarkov(const ModelParams& p, const InitialMoments& init,
                                     const std::vector<double>& t_grid, double memory_window,
                                     const VolterraOptions& opts, const MatsubaraConfig& cfg) {
    if (!(init.q2 > 0.0) || !(init.p2 > 0.0))
        throw UnphysicalInitError("integrate_nonmarkov: initial variances must be positive");
    if (init.q2 * init.p2 - 0.25 * init.pq_sym * init.pq_sym < 0.25 * (1.0 - 1e-12))
        throw UnphysicalInitError("integrate_nonmarkov: init violates the Heisenberg bound");
    for (size_t i = 0; i + 1 < t_grid.size(); ++i)
        if (!(t_grid[i] < t_grid[i + 1]))
            throw DomainError("integrate_nonmarkov: t_grid must be strictly increasing");
    if (t_grid.empty() || t_grid.front() < 0.0)
        throw DomainError("integrate_nonmarkov: t_grid must start at t >= 0");
    // relative kernel mass beyond the window
    if (std::exp(-p.lambda * memory_window) > 1e-8)
        throw MemoryWindowTooShort("integrate_nonmarkov: kernel mass outside window > 1e-8");

    const double Om = p.omega_bare();
    const double t_end = t_grid.back();
    double h = opts.step > 0.0 ? opts.step
                               : std::min(1.0 / (20.0 * p.lambda), 1.0 / (20.0 * Om));
    size_t n_steps = static_cast<size_t>(std::ceil(t_end / h));
    if (n_steps < 2) n_steps = 2;
    h = t_end / static_cast<double>(n_steps);
    size_t wpts = std::min(n_steps, static_cast<size_t>(std::ceil(memory_window / h)));

    // kernel and drive tables
    std::vector<double> Ck(wpts + 1), Sk(wpts + 1);
    for (size_t k = 0; k <= wpts; ++k) {
        MemoryKernels mk = memory_kernels(p, static_cast<double>(k) * h);
        Ck[k] = mk.c;
        Sk[k] = mk.s;
    }
    MarkovCoefficients cinf = markov_coefficients_asymptotic(p);
    double twoPiT = p.temperature > 0.0 ? 2.0 * 3.14159265358979323846 * p.temperature : 0.0;
    double t_sat = p.temperature > 0.0 ? 45.0 / std::min(p.lambda, twoPiT) : 45.0 / p.lambda;
    std::vector<double> fdrive(n_steps + 1), hdrive(n_steps + 1);
    for (size_t n = 0; n <= n_steps; ++n) {
        double t = static_cast<double>(n) * h;
        if (p.gamma == 0.0) {
            fdrive[n] = hdrive[n] = 0.0;
        } else if (t >= t_sat) {
            fdrive[n] = cinf.f;
            hdrive[n] = cinf.h;
        } else {
            MarkovCoefficients c = markov_coefficients(p, t, cfg);
            fdrive[n] = c.f;
            hdrive[n] = c.h;
        }
    }

    std::vector<double> q2(n_steps + 1), pq(n_steps + 1), p2(n_steps + 1);
    q2[0] = init.q2;
    pq[0] = init.pq_sym;
    p2[0] = init.p2;

    auto memory = [&](size_t n, double q2n, double pqn, double& M1, double& M2) {
        // trapezoid over tau = 0..min(n, wpts)*h of the kernel * history
        size_t K = std::min(n, wpts);
        double m1 = 0.0, m2 = 0.0;
        for (size_t k = 0; k <= K; ++k) {
            double wq2 = k == 0 ? q2n : q2[n - k];
            double wpq = k == 0 ? pqn : pq[n - k];
            double wgt = (k == 0 || k == K) ? 0.5 : 1.0;
            m1 += wgt * (2.0 * Ck[k] * wq2 + Sk[k] * wpq);
            m2 += wgt * (Ck[k] * wpq - 2.0 * p.omega_sq * Sk[k] * wq2);
        }
        M1 = m1 * h;
        M2 = m2 * h;
    };

    auto rhs = [&](size_t n, double q2n, double pqn, double p2n, double M1, double M2, double& dq2,
                   double& dpq, double& dp2) {
        dq2 = pqn;
        dpq = 2.0 * p2n - 2.0 * p.omega_sq * q2n + M1 + fdrive[n];
        dp2 = -p.omega_sq * pqn + M2 + hdrive[n];
    };

    for (size_t n = 0; n < n_steps; ++n) {
        double M1, M2, dq2, dpq, dp2;
        memory(n, q2[n], pq[n], M1, M2);
        rhs(n, q2[n], pq[n], p2[n], M1, M2, dq2, dpq, dp2);

        // predictor
        double q2p = q2[n] + h * dq2;
        double pqp = pq[n] + h * dpq;
        double p2p = p2[n] + h * dp2;
        for (int it = 0; it < opts.corrector_iters; ++it) {
            double M1p, M2p, dq2p, dpqp, dp2p;
            memory(n + 1, q2p, pqp, M1p, M2p);
            rhs(n + 1, q2p, pqp, p2p, M1p, M2p, dq2p, dpqp, dp2p);
            q2p = q2[n] + 0.5 * h * (dq2 + dq2p);
            pqp = pq[n] + 0.5 * h * (dpq + dpqp);
            p2p = p2[n] + 0.5 * h * (dp2 + dp2p);
        }
        q2[n + 1] = q2p;
        pq[n + 1] = pqp;
        p2[n + 1] = p2p;
        if (!std::isfinite(q2p) || !std::isfinite(p2p))
            throw StepFailure("integrate_nonmarkov: second moments diverged");
    }

    MomentTrajectory out;
    out.t_grid = t_grid;
    out.method = Method::BornNonMarkov;
    integrate_means(p, init, t_grid, out.mean_q, out.mean_p, opts.mean_rel_tol);
    for (double target : t_grid) {
        double pos = target / h;
        size_t i = std::min(static_cast<size_t>(pos), n_steps - 1);
        double w = pos - static_cast<double>(i);
        out.q2.push_back((1.0 - w) * q2[i] + w * q2[i + 1]);
        out.pq_sym.push_back((1.0 - w) * pq[i] + w * pq[i + 1]);
        out.p2.push_back((1.0 - w) * p2[i] + w * p2[i + 1]);
    }
    return out;
}

}  // namespace qbm
