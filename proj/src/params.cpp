#include "qbm/params.hpp"

#include <cmath>

#include "qbm/quad.hpp"

namespace qbm {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_common(double gamma, double lambda, double temperature) {
    if (!(gamma >= 0.0)) throw DomainError("params: gamma must be >= 0");
    if (!(lambda > 0.0)) throw DomainError("params: lambda must be > 0");
    if (!(temperature >= 0.0)) throw DomainError("params: temperature must be >= 0");
}

}  // namespace

ModelParams derive_params(double omega_r, double gamma, double lambda, double temperature) {
    check_common(gamma, lambda, temperature);
    if (!(omega_r > 0.0)) throw DomainError("params: omega_r must be > 0");
    if (omega_r <= gamma / 2.0)
        throw OverdampedError("params: overdamped (omega_r <= gamma/2) is not supported");
    ModelParams p;
    p.gamma = gamma;
    p.lambda = lambda;
    p.temperature = temperature;
    p.omega_r = omega_r;
    p.omega_sq = omega_r * omega_r + gamma * lambda;
    p.w = std::sqrt(omega_r * omega_r - 0.25 * gamma * gamma);
    return p;
}

ModelParams derive_params_from_bare(double omega_bare, double gamma, double lambda,
                                    double temperature) {
    check_common(gamma, lambda, temperature);
    if (!(omega_bare > 0.0)) throw DomainError("params: omega_bare must be > 0");
    double omega_r_sq = omega_bare * omega_bare - gamma * lambda;
    if (omega_r_sq <= 0.0)
        throw InstabilityError("params: gamma*lambda >= Omega^2 implies an instability");
    return derive_params(std::sqrt(omega_r_sq), gamma, lambda, temperature);
}

BathSpectrum BathSpectrum::drude(double gamma, double lambda) {
    BathSpectrum s;
    s.kind = BathKind::DrudeOhmic;
    s.gamma = gamma;
    s.lambda = lambda;
    return s;
}

BathSpectrum BathSpectrum::exponential(double gamma, double lambda) {
    BathSpectrum s;
    s.kind = BathKind::ExponentialOhmic;
    s.gamma = gamma;
    s.lambda = lambda;
    return s;
}

BathSpectrum BathSpectrum::power_law(double gamma, double lambda, double omega0, double k_exponent,
                                     CutoffShape shape) {
    if (!(k_exponent > -1.0))
        throw DomainError("BathSpectrum: power-law exponent k must be > -1 (infrared divergence)");
    if (!(omega0 > 0.0)) throw DomainError("BathSpectrum: omega0 must be > 0");
    BathSpectrum s;
    s.kind = BathKind::PowerLaw;
    s.gamma = gamma;
    s.lambda = lambda;
    s.omega0 = omega0;
    s.k_exponent = k_exponent;
    s.cutoff_shape = shape;
    return s;
}

double spectral_density(const BathSpectrum& spec, double omega) {
    double aw = std::abs(omega);
    switch (spec.kind) {
        case BathKind::DrudeOhmic:
            return spec.gamma * omega * spec.lambda * spec.lambda /
                   (spec.lambda * spec.lambda + omega * omega);
        case BathKind::ExponentialOhmic:
            return spec.gamma * omega * std::exp(-aw / spec.lambda);
        case BathKind::PowerLaw: {
            double x = aw / spec.lambda;
            double cutoff = spec.cutoff_shape == CutoffShape::Drude ? 1.0 / (1.0 + x * x)
                                                                    : std::exp(-x);
            return spec.gamma * omega * std::pow(aw / spec.omega0, spec.k_exponent - 1.0) * cutoff;
        }
    }
    return 0.0;
}

double self_energy_time(const BathSpectrum& spec, double tau, double rel_tol) {
    if (spec.kind == BathKind::DrudeOhmic) {
        if (tau == 0.0) return 0.0;  // sign(0) = 0 keeps the kernel odd
        double s = tau > 0.0 ? 1.0 : -1.0;
        return -spec.gamma * spec.lambda * spec.lambda * std::exp(-spec.lambda * std::abs(tau)) * s;
    }
    if (tau == 0.0) return 0.0;
    // Sigma(tau) = -(2/pi) int_0^inf sigma(w) sin(w tau) dw
    double at = std::abs(tau);
    double sgn = tau > 0.0 ? 1.0 : -1.0;
    auto f = [&](double w) { return spectral_density(spec, w) * std::sin(w * at); };
    // Integrate over whole half-periods of the oscillation out to the cutoff
    // decay, then let the adaptive tail finish.
    std::vector<double> pts;
    double period = kPi / at;
    double horizon = std::max(10.0 * spec.lambda, 4.0 * period);
    pts.push_back(0.0);
    for (double x = period; x < horizon; x += period) pts.push_back(x);
    pts.push_back(horizon);
    quad::Options opts;
    opts.rel_tol = rel_tol;
    double v = quad::integrate_segmented(f, pts, /*add_tail=*/true, opts);
    return -sgn * 2.0 / kPi * v;
}

std::complex<double> self_energy_laplace(const BathSpectrum& spec, std::complex<double> s,
                                         double rel_tol) {
    if (spec.kind == BathKind::DrudeOhmic) {
        if (s == std::complex<double>(-spec.lambda, 0.0))
            throw DomainError("self_energy_laplace: s at the Drude pole -Lambda");
        return -spec.gamma * spec.lambda * spec.lambda / (spec.lambda + s);
    }
    // Sigma(s) = -(2/pi) int_0^inf sigma(w) w / (w^2 + s^2) dw
    quad::Options opts;
    opts.rel_tol = rel_tol;
    std::complex<double> s2 = s * s;
    bool on_axis = s.real() == 0.0 && s.imag() != 0.0;
    double lam = spec.lambda;
    if (!on_axis) {
        if (s.real() < 0.0)
            throw DomainError("self_energy_laplace: generic kinds need Re(s) >= 0");
        auto fre = [&](double w) {
            std::complex<double> den = w * w + s2;
            return spectral_density(spec, w) * w * (1.0 / den).real();
        };
        auto fim = [&](double w) {
            std::complex<double> den = w * w + s2;
            return spectral_density(spec, w) * w * (1.0 / den).imag();
        };
        std::vector<double> pts{0.0, std::abs(s), lam, 5.0 * lam};
        double re = quad::integrate_segmented(fre, pts, true, opts);
        double im = quad::integrate_segmented(fim, pts, true, opts);
        return -2.0 / kPi * std::complex<double>(re, im);
    }
    // s = i y: principal value across the pole at w = |y| using
    // int [g(w) - g(y)]/(w^2-y^2) with P int_0^inf dw/(w^2-y^2) = 0.
    double y = std::abs(s.imag());
    double gy = spectral_density(spec, y) * y;
    if (spec.kind == BathKind::PowerLaw && spec.k_exponent <= 0.0 && y == 0.0)
        throw DomainError("self_energy_laplace: s = 0 infrared-divergent for k <= 0");
    auto f = [&](double w) {
        double num = spectral_density(spec, w) * w - gy;
        double den = (w - y) * (w + y);
        if (std::abs(w - y) < 1e-9 * std::max(1.0, y)) {
            // derivative limit of the regularized integrand
            double h = 1e-6 * std::max(1.0, y);
            double d = (spectral_density(spec, y + h) * (y + h) -
                        spectral_density(spec, y - h) * (y - h)) /
                       (2.0 * h);
            return d / (2.0 * y);
        }
        return num / den;
    };
    std::vector<double> pts{0.0, 0.5 * y, y, 2.0 * y, lam, 5.0 * lam};
    double v = quad::integrate_segmented(f, pts, true, opts);
    return {-2.0 / kPi * v, 0.0};
}

NonOhmicReport nonohmic_report(const BathSpectrum& spec, double omega_r, double gamma) {
    if (spec.kind != BathKind::PowerLaw)
        throw DomainError("nonohmic_report: requires a PowerLaw spectrum");
    if (!(omega_r > 0.0)) throw DomainError("nonohmic_report: omega_r must be > 0");
    double k = spec.k_exponent;
    double ratio_pow = std::pow(spec.lambda / spec.omega0, k - 1.0);
    double om2 = omega_r * omega_r;
    NonOhmicReport r;
    r.renorm_ratio = -(gamma * spec.lambda / om2) * ratio_pow;
    r.born_condition_value = (gamma * spec.lambda / om2) * ratio_pow;
    if (k == 1.0) {
        r.p2_divergence_scale = std::nullopt;  // logarithmic case: use the Ohmic closed form
    } else {
        r.p2_divergence_scale = gamma / (k - 1.0) * ratio_pow;
    }
    return r;
}

}  // namespace qbm
