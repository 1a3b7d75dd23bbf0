#include "qbm/markov.hpp"

#include <cmath>

namespace qbm {

namespace {

constexpr double kPi = 3.14159265358979323846;
using cplx = std::complex<double>;

// chi(x, t) = e^{-(x - i Omega) t} / (x - i Omega)
cplx chi(double x, double t, double omega) {
    cplx z(x, -omega);
    return std::exp(-z * t) / z;
}

cplx chi_deriv(double x, double t, double omega) {
    cplx z(x, -omega);
    return -std::exp(-z * t) * (t + 1.0 / z) / z;
}

// S_t: transient part of int_0^t (g^> + g^<) e^{i Omega tau} dtau, so that
// J(t) = J_inf - S_t. Resonant bandwidth/thermal terms are paired.
cplx drive_transient(const ModelParams& p, double t, const MatsubaraConfig& cfg) {
    const double T = p.temperature;
    const double Om = p.omega_bare();
    const double gl2 = p.gamma * p.lambda * p.lambda;
    const double twoPiT = 2.0 * kPi * T;
    const double a = p.lambda / twoPiT;
    if (std::min(p.lambda, twoPiT) * t > 45.0) return 0.0;

    long lstar = std::lround(a);
    bool paired = lstar >= 1 && std::abs(a - lstar) < cfg.resonance_guard;

    auto term = [&](double l) -> cplx {
        if (paired && std::lround(l) == lstar && std::abs(l - static_cast<double>(lstar)) < 0.5)
            return 0.0;
        double nu = twoPiT * l;
        if (nu * t > 45.0) return 0.0;
        return -4.0 * T * gl2 * nu * chi(nu, t, Om) / ((p.lambda - nu) * (p.lambda + nu));
    };
    auto term_re = [&](double l) { return term(l).real(); };
    auto term_im = [&](double l) { return term(l).imag(); };
    SeriesValue sre = detail::sum_with_tail(term_re, a, cfg);
    SeriesValue sim = detail::sum_with_tail(term_im, a, cfg);
    cplx series(sre.value, sim.value);

    cplx band;
    if (!paired) {
        band = gl2 * cot(kPi * a) * chi(p.lambda, t, Om);
    } else {
        double nu = twoPiT * static_cast<double>(lstar);
        double delta = a - static_cast<double>(lstar);
        double m = 0.5 * (p.lambda + nu);
        cplx dd = chi_deriv(m, t, Om);  // [chi(Lambda)-chi(nu)]/(Lambda-nu) to O(eps^2)
        band = 2.0 * gl2 * T * (dd + chi(nu, t, Om) / (p.lambda + nu)) +
               gl2 * cot_minus_pole(kPi * delta) * chi(p.lambda, t, Om);
    }
    return band + series;
}

}  // namespace

MarkovCoefficients markov_coefficients_asymptotic(const ModelParams& p) {
    const double Om = p.omega_bare();
    const double l2o2 = p.lambda * p.lambda + p.omega_sq;
    MarkovCoefficients c;
    c.alpha = p.gamma * p.lambda * p.lambda * p.lambda / l2o2;
    c.beta = p.gamma * p.lambda * p.lambda / l2o2;
    if (p.gamma == 0.0) return c;
    double suppress = p.lambda * p.lambda / l2o2;
    if (p.temperature > 0.0) {
        double twoPiT = 2.0 * kPi * p.temperature;
        double a = p.lambda / twoPiT;
        double e = Om / twoPiT;
        double bracket =
            (digamma(cplx(a, 0.0)) + 1.0 / (2.0 * a) - digamma(cplx(0.0, e))).real();
        c.f = -2.0 * p.gamma / kPi * suppress * bracket;
        c.h = p.gamma * Om * suppress / std::tanh(Om / (2.0 * p.temperature));
    } else {
        c.f = -2.0 * p.gamma / kPi * suppress * std::log(p.lambda / Om);
        c.h = p.gamma * Om * suppress;
    }
    return c;
}

MarkovCoefficients markov_coefficients(const ModelParams& p, double t,
                                       const MatsubaraConfig& cfg) {
    cfg.validate();
    if (t < 0.0) throw DomainError("markov_coefficients: t must be >= 0");
    const double Om = p.omega_bare();
    MarkovCoefficients c;
    if (t == 0.0) return c;
    // alpha, beta from the first derivative-expansion kernel
    cplx z(p.lambda, -Om);
    cplx K1 = p.gamma * p.lambda * p.lambda * (1.0 - std::exp(-z * t)) / z;
    c.alpha = K1.real();
    c.beta = Om > 0.0 ? K1.imag() / Om : 0.0;
    if (p.gamma == 0.0) return c;
    if (!(p.temperature > 0.0))
        throw DomainError("markov_coefficients: drives need T > 0 (asymptotics handle T = 0)");

    MarkovCoefficients inf = markov_coefficients_asymptotic(p);
    cplx Jinf(inf.h, Om * inf.f);
    cplx J = Jinf - drive_transient(p, t, cfg);
    c.h = J.real();
    c.f = J.imag() / Om;
    return c;
}

StationaryMoments stationary_markov(const ModelParams& p) {
    MarkovCoefficients c = markov_coefficients_asymptotic(p);
    const double Om = p.omega_bare();
    StationaryMoments m;
    m.method = Method::BornMarkov;
    if (p.gamma == 0.0) {
        double cothf =
            p.temperature > 0.0 ? 1.0 / std::tanh(Om / (2.0 * p.temperature)) : 1.0;
        m.p2 = 0.5 * Om * cothf;
        m.q2 = m.p2 / p.omega_sq;
        return m;
    }
    // h/(2 beta) collapses to (Omega/2) coth(Omega/2T): the Lambda^2/(Lambda^2+Omega^2)
    // factors cancel exactly for the Drude bath.
    double cothf = p.temperature > 0.0 ? 1.0 / std::tanh(Om / (2.0 * p.temperature)) : 1.0;
    m.p2 = 0.5 * Om * cothf;
    m.q2 = (2.0 * m.p2 + c.f) / (2.0 * (p.omega_sq - c.alpha));
    m.pq_sym = 0.0;
    return m;
}

// ---------------------------------------------------------------------------
// Moment ODE integration (embedded Dormand-Prince 5(4))
// ---------------------------------------------------------------------------

namespace {

struct State5 {
    double v[5];  // q, p, q2, pq, p2
};

State5 axpy(const State5& y, double a, const State5& d) {
    State5 r;
    for (int i = 0; i < 5; ++i) r.v[i] = y.v[i] + a * d.v[i];
    return r;
}

}  // namespace

MomentTrajectory integrate_markov(const ModelParams& p, const InitialMoments& init,
                                  const std::vector<double>& t_grid, const OdeOptions& opts,
                                  const MatsubaraConfig& cfg) {
    if (!(init.q2 > 0.0) || !(init.p2 > 0.0))
        throw UnphysicalInitError("integrate_markov: initial variances must be positive");
    if (init.q2 * init.p2 - 0.25 * init.pq_sym * init.pq_sym < 0.25 * (1.0 - 1e-12))
        throw UnphysicalInitError("integrate_markov: init violates the Heisenberg bound");
    for (size_t i = 0; i + 1 < t_grid.size(); ++i)
        if (!(t_grid[i] < t_grid[i + 1]))
            throw DomainError("integrate_markov: t_grid must be strictly increasing");
    if (t_grid.empty() || t_grid.front() < 0.0)
        throw DomainError("integrate_markov: t_grid must start at t >= 0");

    const double Om = p.omega_bare();
    auto rhs = [&](double t, const State5& y, State5& dy) {
        MarkovCoefficients c = markov_coefficients(p, t, cfg);
        double stiff = p.omega_sq - c.alpha;
        dy.v[0] = y.v[1];
        dy.v[1] = -stiff * y.v[0] - c.beta * y.v[1];
        dy.v[2] = y.v[3];
        dy.v[3] = 2.0 * y.v[4] - 2.0 * stiff * y.v[2] - c.beta * y.v[3] + c.f;
        dy.v[4] = -stiff * y.v[3] - 2.0 * c.beta * y.v[4] + c.h;
    };

    // Dormand-Prince coefficients
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    double max_fast = opts.max_step_fast > 0.0 ? opts.max_step_fast : 0.1 / p.lambda;
    double max_slow = opts.max_step_slow > 0.0 ? opts.max_step_slow : 0.1 / std::max(Om, 1e-6);
    double t_fast = 20.0 / p.lambda;

    State5 y{{init.mean_q, init.mean_p, init.q2, init.pq_sym, init.p2}};
    double t = 0.0;
    MomentTrajectory out;
    out.t_grid = t_grid;
    out.method = Method::BornMarkov;

    State5 k1, k2, k3, k4, k5, k6, k7, tmp;
    rhs(t, y, k1);
    double hstep = max_fast;

    auto record = [&](const State5& s) {
        out.mean_q.push_back(s.v[0]);
        out.mean_p.push_back(s.v[1]);
        out.q2.push_back(s.v[2]);
        out.pq_sym.push_back(s.v[3]);
        out.p2.push_back(s.v[4]);
    };

    for (double target : t_grid) {
        if (target == 0.0 && t == 0.0) {
            record(y);
            continue;
        }
        while (t < target) {
            double cap = t < t_fast ? max_fast : max_slow;
            double h = std::min({hstep, cap, target - t});
            bool accepted = false;
            for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
                tmp = axpy(y, h * a21, k1);
                rhs(t + h / 5.0, tmp, k2);
                tmp = y;
                for (int i = 0; i < 5; ++i) tmp.v[i] += h * (a31 * k1.v[i] + a32 * k2.v[i]);
                rhs(t + 3.0 * h / 10.0, tmp, k3);
                tmp = y;
                for (int i = 0; i < 5; ++i)
                    tmp.v[i] += h * (a41 * k1.v[i] + a42 * k2.v[i] + a43 * k3.v[i]);
                rhs(t + 4.0 * h / 5.0, tmp, k4);
                tmp = y;
                for (int i = 0; i < 5; ++i)
                    tmp.v[i] +=
                        h * (a51 * k1.v[i] + a52 * k2.v[i] + a53 * k3.v[i] + a54 * k4.v[i]);
                rhs(t + 8.0 * h / 9.0, tmp, k5);
                tmp = y;
                for (int i = 0; i < 5; ++i)
                    tmp.v[i] += h * (a61 * k1.v[i] + a62 * k2.v[i] + a63 * k3.v[i] +
                                     a64 * k4.v[i] + a65 * k5.v[i]);
                rhs(t + h, tmp, k6);
                State5 y5 = y;
                for (int i = 0; i < 5; ++i)
                    y5.v[i] += h * (b1 * k1.v[i] + b3 * k3.v[i] + b4 * k4.v[i] + b5 * k5.v[i] +
                                    b6 * k6.v[i]);
                rhs(t + h, y5, k7);
                double err = 0.0, scale_norm = 0.0;
                for (int i = 0; i < 5; ++i) {
                    double e = h * (e1 * k1.v[i] + e3 * k3.v[i] + e4 * k4.v[i] + e5 * k5.v[i] +
                                    e6 * k6.v[i] + e7 * k7.v[i]);
                    double sc = opts.abs_tol +
                                opts.rel_tol * std::max(std::abs(y.v[i]), std::abs(y5.v[i]));
                    err += (e / sc) * (e / sc);
                    scale_norm += 1.0;
                }
                err = std::sqrt(err / scale_norm);
                if (!std::isfinite(err)) throw StepFailure("integrate_markov: non-finite state");
                if (err <= 1.0) {
                    t += h;
                    y = y5;
                    k1 = k7;  // FSAL
                    accepted = true;
                    double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
                    hstep = h * std::min(5.0, std::max(0.2, grow));
                } else {
                    h *= std::max(0.2, 0.9 * std::pow(err, -0.25));
                    if (h < 1e-14 * std::max(1.0, t))
                        throw StepFailure("integrate_markov: step size underflow");
                }
            }
            if (!accepted) throw StepFailure("integrate_markov: repeated step rejection");
        }
        record(y);
    }
    return out;
}

}  // namespace qbm
