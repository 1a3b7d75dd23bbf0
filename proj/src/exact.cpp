#include "qbm/exact.hpp"

#include <algorithm>
#include <cmath>

#include "qbm/quad.hpp"

namespace qbm {

namespace {

constexpr double kPi = 3.14159265358979323846;
using cplx = std::complex<double>;

cplx coth(cplx z) { return 1.0 / std::tanh(z); }

// phi1(z) = (e^z - 1)/z and derivatives, stable near z = 0.
cplx phi1(cplx z) {
    if (std::abs(z) < 0.5) {
        cplx acc = 1.0, term = 1.0;
        for (int n = 1; n < 16; ++n) {
            term *= z / static_cast<double>(n + 1);
            acc += term;
        }
        return acc;
    }
    return (std::exp(z) - 1.0) / z;
}

cplx phi1_d1(cplx z) {
    if (std::abs(z) < 0.5) {
        // sum_{n>=0} (n+1) z^n / (n+2)!
        cplx acc = 0.0, zp = 1.0;
        double fact = 2.0;  // (n+2)!
        for (int n = 0; n < 18; ++n) {
            acc += static_cast<double>(n + 1) / fact * zp;
            zp *= z;
            fact *= static_cast<double>(n + 3);
        }
        return acc;
    }
    return (std::exp(z) * (z - 1.0) + 1.0) / (z * z);
}

cplx phi1_d2(cplx z) {
    if (std::abs(z) < 0.5) {
        // sum_{n>=0} (n+1)(n+2) z^n / (n+3)!
        cplx acc = 0.0, zp = 1.0;
        double fact = 6.0;  // (n+3)!
        for (int n = 0; n < 18; ++n) {
            acc += static_cast<double>((n + 1) * (n + 2)) / fact * zp;
            zp *= z;
            fact *= static_cast<double>(n + 4);
        }
        return acc;
    }
    return (std::exp(z) * (z * z - 2.0 * z + 2.0) - 2.0) / (z * z * z);
}

cplx phi1_d3(cplx z) {
    if (std::abs(z) < 0.5) {
        // sum_{n>=0} (n+1)(n+2)(n+3) z^n / (n+4)!
        cplx acc = 0.0, zp = 1.0;
        double fact = 24.0;  // (n+4)!
        for (int n = 0; n < 18; ++n) {
            acc += static_cast<double>((n + 1) * (n + 2) * (n + 3)) / fact * zp;
            zp *= z;
            fact *= static_cast<double>(n + 5);
        }
        return acc;
    }
    return (std::exp(z) * (z * z * z - 3.0 * z * z + 6.0 * z - 6.0) + 6.0) / (z * z * z * z);
}

// E(x; t) = int_0^t e^{x u} du = t phi1(x t)
cplx E_int(cplx x, double t) { return t * phi1(x * t); }

// Divided difference [E(x)-E(y)]/(x-y) and its derivative wrt y.
struct DDValue {
    cplx dd;
    cplx d_dy;
};

DDValue dd_E(cplx x, cplx y, double t) {
    cplx dz = (x - y) * t;
    if (std::abs(dz) < 0.02) {
        cplx m = 0.5 * (x + y) * t;
        cplx dd = t * t * (phi1_d1(m) + dz * dz / 24.0 * phi1_d3(m));
        cplx ddy = t * t * t * (0.5 * phi1_d2(m) - dz / 12.0 * phi1_d3(m));
        return {dd, ddy};
    }
    cplx Ex = E_int(x, t), Ey = E_int(y, t);
    cplx dd = (Ex - Ey) / (x - y);
    cplx Eyp = t * t * phi1_d1(y * t);
    cplx ddy = (dd - Eyp) / (x - y);
    return {dd, ddy};
}

struct PoleData {
    GreenPoles poles;
    std::array<cplx, 3> residues;
    double A;  // |s3|
};

PoleData pole_data(const ModelParams& p) {
    PoleData d;
    d.poles = poles_full(p);
    d.residues = green_residues(p, d.poles);
    d.A = -d.poles.s3.real();
    return d;
}

// ---------------------------------------------------------------------------
// Stationary closed form: residues of the spectral integrals
//   <q^2> = (1/2pi) int gamma w Lambda^2 coth(w/2T) / |P(iw)|^2 dw
// (w^2 extra in the numerator for <p^2>).
// ---------------------------------------------------------------------------

struct ClosedParts {
    double resonant = 0.0;    // complex-pair poles
    double bandwidth = 0.0;   // real-root pole (+ paired Matsubara term if resonant)
    double thermal = 0.0;     // remaining Matsubara poles
};

double free_thermal_moment(const ModelParams& p, bool momentum) {
    double c = p.temperature > 0.0 ? 1.0 / std::tanh(p.omega_r / (2.0 * p.temperature)) : 1.0;
    return momentum ? 0.5 * p.omega_r * c : 0.5 * c / p.omega_r;
}

ClosedParts closed_parts(const ModelParams& p, bool momentum, const MatsubaraConfig& cfg) {
    cfg.validate();
    if (p.gamma == 0.0) {
        // decoupled oscillator: the spectral-integral route degenerates
        return {free_thermal_moment(p, momentum), 0.0, 0.0};
    }
    if (!(p.temperature > 0.0))
        throw DomainError("stationary_closed: T = 0 needs the quadrature path");
    PoleData d = pole_data(p);
    const double T = p.temperature;
    const double gl2 = p.gamma * p.lambda * p.lambda;
    const cplx s1 = d.poles.s1;
    const double A = d.A;
    const double twoPiT = 2.0 * kPi * T;
    const double a_res = A / twoPiT;  // bandwidth pole in Matsubara units

    ClosedParts out;

    // Complex pair: 2 Re[gamma w1^(1|3) Lambda^2 coth(w1/2T) / (P(-s1) P'(s1))]
    cplx w1 = cplx(0.0, -1.0) * s1;
    cplx num = gl2 * w1 * coth(w1 / (2.0 * T));
    if (momentum) num *= w1 * w1;
    out.resonant = 2.0 * (num / (green_cubic(p, -s1) * green_cubic_deriv(p, s1))).real();

    double g1 = (green_cubic(p, cplx(A)) * green_cubic_deriv(p, cplx(-A))).real();

    long lstar = std::lround(a_res);
    bool paired = lstar >= 1 && std::abs(a_res - lstar) < cfg.resonance_guard;

    auto mats_term = [&](double l) {
        double nu = twoPiT * l;
        double pp = (green_cubic(p, cplx(nu)) * green_cubic(p, cplx(-nu))).real();
        double numl = -2.0 * T * gl2 * nu;
        if (momentum) numl *= -nu * nu;
        return numl / pp;
    };

    if (!paired) {
        double x = A / (2.0 * T);
        double ct = cot(x);
        double numb = gl2 * A * ct;
        if (momentum) numb *= -A * A;
        out.bandwidth = numb / g1;
        SeriesValue s = detail::sum_with_tail(mats_term, a_res, cfg);
        out.thermal = s.value;
        return out;
    }

    // Paired evaluation: the bandwidth pole and the resonant Matsubara term
    // diverge individually but cancel; deflate the combination analytically.
    double nu = twoPiT * static_cast<double>(lstar);
    double eps = A - nu;
    double x = eps / (2.0 * T);  // cot(A/2T) = cot(pi lstar + x) = cot(x)

    // polynomial data at the real root: P(A - e) and Q(e) = P(s3 + e)/e
    double pA = green_cubic(p, cplx(A)).real();
    double dA = green_cubic_deriv(p, cplx(A)).real();
    double qA = 6.0 * A + 2.0 * p.lambda;        // P''(A)
    double dm = green_cubic_deriv(p, cplx(-A)).real();
    double qm = -6.0 * A + 2.0 * p.lambda;       // P''(-A)

    // N(eps)/eps coefficients for the paired numerator (q2 flavor):
    //   N = A P(nu) Q(eps) - nu g1, nu = A - eps
    double c1, c2, c3, c4, c5;
    if (!momentum) {
        c1 = A * (pA * qm / 2.0 - dA * dm) + pA * dm;
        c2 = A * (pA - dA * qm / 2.0 + qA * dm / 2.0);
        c3 = A * (-dA - dm + qA * qm / 4.0);
        c4 = 6.0 * A * A;
        c5 = -A;
    } else {
        double A3 = A * A * A;
        c1 = A3 * (pA * qm / 2.0 - dA * dm) + 3.0 * A * A * pA * dm;
        c2 = A3 * (pA - dA * qm / 2.0 + qA * dm / 2.0) - 3.0 * A * pA * dm;
        c3 = A3 * (-dA - dm + qA * qm / 4.0) + pA * dm;
        c4 = 6.0 * A3 * A;
        c5 = -A3;
    }
    double n_over_eps = c1 + eps * (c2 + eps * (c3 + eps * (c4 + eps * c5)));

    double Pnu = green_cubic(p, cplx(nu)).real();
    double Qeps = dm + 0.5 * eps * qm + eps * eps;  // P(s3+e)/e expansion, P'''/6 = 1
    double sign = momentum ? -1.0 : 1.0;
    double pair = sign * gl2 * (2.0 * T * n_over_eps / (g1 * Pnu * Qeps) +
                                (momentum ? A * A * A : A) * cot_minus_pole(x) / g1);
    out.bandwidth = pair;

    auto mats_skip = [&](double l) {
        if (std::lround(l) == lstar && std::abs(l - static_cast<double>(lstar)) < 0.5)
            return 0.0;
        return mats_term(l);
    };
    SeriesValue s = detail::sum_with_tail(mats_skip, a_res, cfg);
    out.thermal = s.value;
    return out;
}

double closed_moment(const ModelParams& p, bool momentum, const MatsubaraConfig& cfg) {
    ClosedParts parts = closed_parts(p, momentum, cfg);
    return parts.resonant + parts.bandwidth + parts.thermal;
}

}  // namespace

const char* method_name(Method m) {
    switch (m) {
        case Method::ExactClosed: return "exact_closed";
        case Method::ExactQuadrature: return "exact_quadrature";
        case Method::BornMarkov: return "born_markov";
        case Method::BornNonMarkov: return "born_nonmarkov";
        case Method::DiscreteOracle: return "discrete_oracle";
    }
    return "unknown";
}

StationaryMoments stationary_closed(const ModelParams& p, const MatsubaraConfig& cfg) {
    StationaryMoments m;
    m.q2 = closed_moment(p, false, cfg);
    m.p2 = closed_moment(p, true, cfg);
    m.pq_sym = 0.0;
    m.method = Method::ExactClosed;
    return m;
}

namespace detail {

double stationary_integrand(const ModelParams& p, double omega, bool momentum) {
    cplx piw = green_cubic(p, cplx(0.0, omega));
    double den = std::norm(piw);
    double cothf = p.temperature > 0.0 ? 1.0 / std::tanh(omega / (2.0 * p.temperature))
                                       : (omega > 0.0 ? 1.0 : -1.0);
    double num = p.gamma * omega * p.lambda * p.lambda * cothf;
    if (momentum) num *= omega * omega;
    return num / den / (2.0 * kPi);
}

}  // namespace detail

namespace {

std::vector<double> stationary_breakpoints(const ModelParams& p) {
    PoleData d = pole_data(p);
    double What = d.poles.s1.imag();
    double ghat = std::max(-2.0 * d.poles.s1.real(), 1e-14 * What);
    std::vector<double> pts{0.0};
    for (double k : {50.0, 10.0, 2.0}) {
        double lo = What - k * ghat, hi = What + k * ghat;
        if (lo > 0.0) pts.push_back(lo);
        pts.push_back(hi);
    }
    pts.push_back(What);
    pts.push_back(2.0 * What);
    for (double m : {0.5, 1.0, 3.0, 10.0, 30.0})
        pts.push_back(m * p.lambda);
    if (p.temperature > 0.0) pts.push_back(2.0 * p.temperature);
    std::vector<double> cleaned;
    for (double x : pts)
        if (x >= 0.0) cleaned.push_back(x);
    return cleaned;
}

}  // namespace

StationaryMoments stationary_quadrature(const ModelParams& p, double rel_tol) {
    if (p.gamma == 0.0) {
        StationaryMoments m;
        double c = p.temperature > 0.0 ? 1.0 / std::tanh(p.omega_r / (2.0 * p.temperature)) : 1.0;
        m.q2 = 0.5 * c / p.omega_r;
        m.p2 = 0.5 * p.omega_r * c;
        m.method = Method::ExactQuadrature;
        return m;
    }
    quad::Options opts;
    opts.rel_tol = std::max(1e-13, rel_tol / 10.0);
    auto pts = stationary_breakpoints(p);
    StationaryMoments m;
    m.q2 = 2.0 * quad::integrate_segmented(
                     [&](double w) { return detail::stationary_integrand(p, w, false); }, pts,
                     true, opts);
    m.p2 = 2.0 * quad::integrate_segmented(
                     [&](double w) { return detail::stationary_integrand(p, w, true); }, pts, true,
                     opts);
    m.pq_sym = 0.0;
    m.method = Method::ExactQuadrature;
    return m;
}

StationaryMoments stationary_quadrature_spectrum(const BathSpectrum& spec, double omega_r,
                                                 double temperature, double rel_tol) {
    if (!(omega_r > 0.0)) throw DomainError("stationary_quadrature_spectrum: omega_r must be > 0");
    if (spec.kind == BathKind::PowerLaw && spec.k_exponent <= 0.0)
        throw DomainError("stationary_quadrature_spectrum: validated only for k > 0");
    double re_sigma0 = self_energy_laplace(spec, cplx(0.0, 0.0), rel_tol * 1e-2).real();
    double omega_sq = omega_r * omega_r - re_sigma0;  // zero-frequency renormalization
    if (!(omega_sq > 0.0))
        throw InstabilityError("stationary_quadrature_spectrum: bare frequency not positive");

    double inner_tol = std::max(1e-11, rel_tol * 1e-2);
    auto denom = [&](double w) {
        double re = self_energy_laplace(spec, cplx(0.0, w), inner_tol).real();
        double sig = spectral_density(spec, w);
        double rewpart = omega_sq - w * w + re;
        return rewpart * rewpart + sig * sig;
    };
    auto integrand = [&](double w, bool momentum) {
        double num = spectral_density(spec, w) / std::tanh(w / (2.0 * temperature));
        if (momentum) num *= w * w;
        return num / denom(w) / kPi;
    };
    if (!(temperature > 0.0)) throw DomainError("stationary_quadrature_spectrum: needs T > 0");

    // Resonance location from the renormalized frequency; width ~ sigma(w)/w.
    double What = omega_r;
    double ghat = std::max(std::abs(spectral_density(spec, What)) / What, 1e-12);
    std::vector<double> pts{0.0, What, 2.0 * What, 0.5 * spec.lambda, spec.lambda,
                            3.0 * spec.lambda, 10.0 * spec.lambda, 30.0 * spec.lambda};
    for (double k : {50.0, 10.0, 2.0}) {
        if (What - k * ghat > 0.0) pts.push_back(What - k * ghat);
        pts.push_back(What + k * ghat);
    }
    quad::Options opts;
    opts.rel_tol = std::max(1e-10, rel_tol / 10.0);
    opts.max_depth = 14;
    StationaryMoments m;
    m.q2 = quad::integrate_segmented([&](double w) { return integrand(w, false); }, pts, true, opts);
    m.p2 = quad::integrate_segmented([&](double w) { return integrand(w, true); }, pts, true, opts);
    m.pq_sym = 0.0;
    m.method = Method::ExactQuadrature;
    return m;
}

// ---------------------------------------------------------------------------
// Two-time traces
// ---------------------------------------------------------------------------

CorrelationTrace correlation_trace(const ModelParams& p, const std::vector<double>& tau_grid,
                                   TraceKind kind, const TraceOptions& opts) {
    if (!(p.gamma > 0.0))
        throw DomainError("correlation_trace: stationary traces need gamma > 0");
    CorrelationTrace tr;
    tr.tau_grid = tau_grid;
    tr.kind = kind;
    tr.values.reserve(tau_grid.size());
    bool momentum = kind == TraceKind::pp;
    const double T = p.temperature;
    const double gl2 = p.gamma * p.lambda * p.lambda;

    quad::Options q;
    q.rel_tol = std::max(1e-12, opts.rel_tol / 10.0);
    q.max_depth = 14;

    double X = 60.0 * p.lambda;  // truncation of the oscillatory integral
    auto base_pts = stationary_breakpoints(p);

    for (double tau : tau_grid) {
        double at = std::abs(tau);
        if (at > opts.tau_horizon)
            throw QuadratureFailure("correlation_trace: |tau| beyond configured horizon");
        auto fre = [&](double w) {
            double cothf = T > 0.0 ? 1.0 / std::tanh(w / (2.0 * T)) : 1.0;
            double num = gl2 * w * cothf;
            if (momentum) num *= w * w;
            return num * std::cos(w * at) / std::norm(green_cubic(p, cplx(0.0, w))) / kPi;
        };
        auto fim = [&](double w) {
            double num = gl2 * w;
            if (momentum) num *= w * w;
            return -num * std::sin(w * at) / std::norm(green_cubic(p, cplx(0.0, w))) / kPi;
        };
        std::vector<double> pts = base_pts;
        if (at > 0.0) {
            double period = kPi / at;
            size_t max_chunks = 200000;
            if (X / period > static_cast<double>(max_chunks))
                throw QuadratureFailure("correlation_trace: oscillation too fast for horizon");
            for (double x = period; x < X; x += period) pts.push_back(x);
        }
        pts.push_back(X);
        std::vector<double> capped;
        for (double x : pts)
            if (x <= X) capped.push_back(x);
        double re = quad::integrate_segmented(fre, capped, false, q);
        double im = quad::integrate_segmented(fim, capped, false, q);
        // two-term asymptotic tail of the truncated oscillatory integral
        auto env = [&](double w) {
            double num = gl2 * w * (momentum ? w * w : 1.0);
            return num / std::norm(green_cubic(p, cplx(0.0, w))) / kPi;
        };
        double f0 = env(X);
        double fp = (env(X * 1.001) - env(X * 0.999)) / (0.002 * X);
        double cothX = T > 0.0 ? 1.0 / std::tanh(X / (2.0 * T)) : 1.0;
        if (at * X > 1.0) {
            // int_X^inf f cos = -f(X)sin(X tau)/tau - f'(X)cos(X tau)/tau^2 + ...
            re += cothX * (-f0 * std::sin(X * at) / at - fp * std::cos(X * at) / (at * at));
            // im part carries -int_X^inf f sin = -(f(X)cos/tau - f'(X)sin/tau^2)
            im += -(f0 * std::cos(X * at) / at - fp * std::sin(X * at) / (at * at));
        } else {
            // near-coincidence: envelope tail, f ~ c/w^5 (qq) or c/w^3 (pp)
            double tail = momentum ? 0.5 * f0 * X : 0.25 * f0 * X;
            re += cothX * tail * std::cos(X * at);
            im += -tail * std::sin(X * at);
        }
        cplx v(re, im);
        if (tau < 0.0) v = std::conj(v);
        tr.values.push_back(v);
    }
    return tr;
}

namespace detail {

std::complex<double> trace_residue(const ModelParams& p, double tau, TraceKind kind,
                                   const MatsubaraConfig& cfg) {
    cfg.validate();
    if (!(p.temperature > 0.0)) throw DomainError("trace_residue: needs T > 0");
    if (!(p.gamma > 0.0)) throw DomainError("trace_residue: needs gamma > 0");
    bool momentum = kind == TraceKind::pp;
    double at = std::abs(tau);
    const double T = p.temperature;
    const double gl2 = p.gamma * p.lambda * p.lambda;
    PoleData d = pole_data(p);
    const double twoPiT = 2.0 * kPi * T;
    double a_res = d.A / twoPiT;
    long lstar = std::lround(a_res);
    if (lstar >= 1 && std::abs(a_res - lstar) < cfg.resonance_guard)
        throw ResonanceError("trace_residue: resonant parameters");

    auto nbose = [&](cplx w) { return 1.0 / (std::exp(w / T) - 1.0); };
    cplx total = 0.0;
    for (cplx s : {d.poles.s1, d.poles.s2, d.poles.s3}) {
        cplx w = cplx(0.0, -1.0) * s;
        cplx num = gl2 * w * nbose(w) * std::exp(cplx(0.0, 1.0) * w * at);
        if (momentum) num *= w * w;
        total += 2.0 * num / (green_cubic(p, -s) * green_cubic_deriv(p, s));
    }
    if (p.gamma > 0.0) {
        auto term = [&](double l) {
            double nu = twoPiT * l;
            double numl = -2.0 * T * gl2 * nu * std::exp(-nu * at);
            if (momentum) numl *= -nu * nu;
            return numl / (green_cubic(p, cplx(nu)) * green_cubic(p, cplx(-nu))).real();
        };
        SeriesValue s = detail::sum_with_tail(term, a_res, cfg);
        total += s.value;
    }
    if (tau < 0.0) total = std::conj(total);
    return total;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Symmetrized noise kernel
// ---------------------------------------------------------------------------

double noise_kernel_sym(const ModelParams& p, double tau, const MatsubaraConfig& cfg) {
    cfg.validate();
    if (!(p.temperature > 0.0)) throw DomainError("noise_kernel_sym: needs T > 0");
    if (tau == 0.0)
        throw DomainError("noise_kernel_sym: logarithmically divergent at tau = 0");
    double at = std::abs(tau);
    const double T = p.temperature;
    const double gl2 = p.gamma * p.lambda * p.lambda;
    const double twoPiT = 2.0 * kPi * T;
    double a = p.lambda / twoPiT;

    long lstar = std::lround(a);
    bool paired = lstar >= 1 && std::abs(a - lstar) < cfg.resonance_guard;

    auto term = [&](double l) {
        if (paired && std::lround(l) == lstar && std::abs(l - static_cast<double>(lstar)) < 0.5)
            return 0.0;
        double nu = twoPiT * l;
        return l * std::exp(-nu * at) / (a * a - l * l);
    };
    double cut_scale = std::max(a, 8.0 / (twoPiT * at));
    SeriesValue s = detail::sum_with_tail(term, cut_scale, cfg);
    double series_part = -gl2 / kPi * s.value;

    double band;
    if (!paired) {
        band = 0.5 * gl2 * cot(kPi * a) * std::exp(-p.lambda * at);
    } else {
        // combined limit with the resonant thermal term
        double delta = a - static_cast<double>(lstar);
        double m = 0.5 * (a + static_cast<double>(lstar));
        double c = twoPiT * at;
        auto phi_deriv = [&](double x) {
            return std::exp(-c * x) * (a / ((a + x) * (a + x)) - c * x / (a + x));
        };
        band = gl2 / kPi * phi_deriv(m) +
               0.5 * gl2 * cot_minus_pole(kPi * delta) * std::exp(-p.lambda * at);
        // note: the lstar series term was skipped above
    }
    return band + series_part;
}

// ---------------------------------------------------------------------------
// Transient evolution
// ---------------------------------------------------------------------------

namespace {

struct NoiseAssembler {
    const ModelParams& p;
    const MatsubaraConfig& cfg;
    PoleData d;
    std::array<cplx, 3> s;
    std::array<cplx, 3> rg;   // residues of G
    double twoPiT, a;
    long lstar = -1;  // paired Matsubara index, or -1

    NoiseAssembler(const ModelParams& p_, const MatsubaraConfig& cfg_) : p(p_), cfg(cfg_) {
        d = pole_data(p);
        s = d.poles.all();
        rg = d.residues;
        twoPiT = 2.0 * kPi * p.temperature;
        a = p.lambda / twoPiT;
        long l0 = std::lround(a);
        if (l0 >= 1 && std::abs(a - l0) < cfg.resonance_guard) lstar = l0;
    }

    // X(mu, t) = sum_{jk} wj_j wk_k I_jk(mu, t) and dX/dmu, with
    // I_jk = DD_E(s_j+s_k, s_j-mu; t) + DD_E(s_j+s_k, s_k-mu; t).
    void eval_X(double mu, double t, const std::array<cplx, 3>& wj, const std::array<cplx, 3>& wk,
                cplx& X, cplx& dX) const {
        X = 0.0;
        dX = 0.0;
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
                cplx w = wj[j] * wk[k];
                if (w == cplx(0.0)) continue;
                DDValue d1 = dd_E(s[j] + s[k], s[j] - mu, t);
                DDValue d2 = dd_E(s[j] + s[k], s[k] - mu, t);
                X += w * (d1.dd + d2.dd);
                dX += w * (-d1.d_dy - d2.d_dy);
            }
        }
    }

    // Noise contribution N(t) = int_0^t int_0^t A(t-t1) B(t-t2) Ksym(t1-t2),
    // with A = sum_j wj_j e^{s_j u}, B = sum_k wk_k e^{s_k v}.
    double eval(double t, const std::array<cplx, 3>& wj, const std::array<cplx, 3>& wk) const {
        if (p.gamma == 0.0 || t == 0.0) return 0.0;
        const double T = p.temperature;
        const double gl2 = p.gamma * p.lambda * p.lambda;
        cplx X, dX;

        // thermal series
        auto term = [&](double l) {
            if (lstar > 0 && std::lround(l) == lstar &&
                std::abs(l - static_cast<double>(lstar)) < 0.5)
                return 0.0;
            double mu = twoPiT * l;
            cplx Xl, dXl;
            eval_X(mu, t, wj, wk, Xl, dXl);
            double kappa = -gl2 / kPi * l / (a * a - l * l);
            return kappa * Xl.real();
        };
        SeriesValue sv = detail::sum_with_tail(term, std::max(a, 4.0), cfg, 400);
        double series_part = sv.value;

        double band;
        if (lstar < 0) {
            eval_X(p.lambda, t, wj, wk, X, dX);
            band = 0.5 * gl2 * cot(kPi * a) * X.real();
        } else {
            // paired with the lstar thermal term:
            //   (gl2/pi) d/dx [ x X(2 pi T x) / (a+x) ] at midpoint + regular cot part
            double delta = a - static_cast<double>(lstar);
            double m = 0.5 * (a + static_cast<double>(lstar));
            double mu_m = twoPiT * m;
            eval_X(mu_m, t, wj, wk, X, dX);
            double xi_prime =
                (a / ((a + m) * (a + m)) * X + m / (a + m) * twoPiT * dX).real();
            cplx XL, dXL;
            eval_X(p.lambda, t, wj, wk, XL, dXL);
            band = gl2 / kPi * xi_prime + 0.5 * gl2 * cot_minus_pole(kPi * delta) * XL.real();
        }
        return band + series_part;
    }
};

}  // namespace

MomentTrajectory transient_moments(const ModelParams& p, const InitialMoments& init,
                                   const std::vector<double>& t_grid, const MatsubaraConfig& cfg) {
    cfg.validate();
    if (!(init.q2 > 0.0) || !(init.p2 > 0.0))
        throw UnphysicalInitError("transient_moments: initial variances must be positive");
    double het = init.q2 * init.p2 - 0.25 * init.pq_sym * init.pq_sym;
    if (het < 0.25 * (1.0 - 1e-12))
        throw UnphysicalInitError("transient_moments: initial state violates the Heisenberg bound");
    for (size_t i = 0; i + 1 < t_grid.size(); ++i)
        if (!(t_grid[i] < t_grid[i + 1]))
            throw DomainError("transient_moments: t_grid must be strictly increasing");
    if (!t_grid.empty() && t_grid.front() < 0.0)
        throw DomainError("transient_moments: t must be >= 0");
    if (p.gamma > 0.0 && !(p.temperature > 0.0))
        throw DomainError("transient_moments: needs T > 0 when coupled");

    MomentTrajectory out;
    out.t_grid = t_grid;
    out.method = Method::ExactClosed;
    out.mean_q.reserve(t_grid.size());
    out.mean_p.reserve(t_grid.size());
    out.q2.reserve(t_grid.size());
    out.p2.reserve(t_grid.size());
    out.pq_sym.reserve(t_grid.size());

    NoiseAssembler noise(p, cfg);
    auto s = noise.s;
    auto rg = noise.rg;
    std::array<cplx, 3> rG, rGd, rGdd;
    for (int j = 0; j < 3; ++j) {
        rG[j] = rg[j];
        rGd[j] = rg[j] * s[j];
        rGdd[j] = rg[j] * s[j] * s[j];
    }

    for (double t : t_grid) {
        double G = 0.0, Gd = 0.0, Gdd = 0.0;
        for (int j = 0; j < 3; ++j) {
            cplx e = std::exp(s[j] * t);
            G += (rG[j] * e).real();
            Gd += (rGd[j] * e).real();
            Gdd += (rGdd[j] * e).real();
        }
        out.mean_q.push_back(Gd * init.mean_q + G * init.mean_p);
        out.mean_p.push_back(Gdd * init.mean_q + Gd * init.mean_p);

        double q2 = Gd * Gd * init.q2 + G * G * init.p2 + Gd * G * init.pq_sym;
        double p2 = Gdd * Gdd * init.q2 + Gd * Gd * init.p2 + Gdd * Gd * init.pq_sym;
        double pq = 2.0 * (Gd * Gdd * init.q2 + G * Gd * init.p2) +
                    (Gd * Gd + G * Gdd) * init.pq_sym;

        q2 += noise.eval(t, rG, rG);
        p2 += noise.eval(t, rGd, rGd);
        pq += 2.0 * noise.eval(t, rGd, rG);

        out.q2.push_back(q2);
        out.p2.push_back(p2);
        out.pq_sym.push_back(pq);
    }
    return out;
}

}  // namespace qbm
