#include "qbm/greens.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace qbm {

namespace {

using cplx = std::complex<double>;

cplx newton_polish(const ModelParams& p, cplx s) {
    for (int i = 0; i < 3; ++i) {
        cplx f = green_cubic(p, s);
        cplx df = green_cubic_deriv(p, s);
        if (df == cplx(0.0)) break;
        cplx step = f / df;
        s -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(s))) break;
    }
    return s;
}

}  // namespace

cplx green_cubic(const ModelParams& p, cplx s) {
    // Constant coefficient written as Lambda*Omega_R^2: forming it as
    // Lambda*Omega^2 - gamma*Lambda^2 would cancel catastrophically.
    return ((s + p.lambda) * s + p.omega_sq) * s + p.lambda * p.omega_r * p.omega_r;
}

cplx green_cubic_deriv(const ModelParams& p, cplx s) {
    return (3.0 * s + 2.0 * p.lambda) * s + p.omega_sq;
}

GreenPoles poles_full(const ModelParams& p) {
    if (p.gamma == 0.0) {
        return {cplx(0.0, p.omega_r), cplx(0.0, -p.omega_r), cplx(-p.lambda, 0.0)};
    }
    Eigen::Matrix3d companion;
    companion << 0.0, 0.0, -p.lambda * p.omega_r * p.omega_r,
                 1.0, 0.0, -p.omega_sq,
                 0.0, 1.0, -p.lambda;
    Eigen::EigenSolver<Eigen::Matrix3d> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw RootFindingFailure("poles_full: companion eigenvalue solve failed");
    std::array<cplx, 3> roots;
    for (int i = 0; i < 3; ++i) roots[i] = newton_polish(p, solver.eigenvalues()[i]);

    // One root is real (underdamped params), the other two a conjugate pair.
    auto real_it = std::min_element(roots.begin(), roots.end(),
                                    [](cplx a, cplx b) { return std::abs(a.imag()) < std::abs(b.imag()); });
    cplx s3(real_it->real(), 0.0);
    std::array<cplx, 2> pair;
    int k = 0;
    for (auto& r : roots)
        if (&r != &*real_it) pair[k++] = r;
    cplx s1(0.5 * (pair[0].real() + pair[1].real()),
            0.5 * (std::abs(pair[0].imag()) + std::abs(pair[1].imag())));
    s1 = newton_polish(p, s1);
    GreenPoles poles{s1, std::conj(s1), s3};

    double scale = std::max({std::abs(s1), std::abs(s3), 1.0});
    for (cplx r : poles.all()) {
        if (std::abs(green_cubic(p, r)) > 1e-9 * scale * scale * scale)
            throw RootFindingFailure("poles_full: residual too large after polish");
    }
    return poles;
}

std::array<cplx, 3> green_residues(const ModelParams& p, const GreenPoles& poles) {
    auto s = poles.all();
    std::array<cplx, 3> r;
    for (int j = 0; j < 3; ++j) {
        cplx denom = 1.0;
        for (int k = 0; k < 3; ++k)
            if (k != j) denom *= s[j] - s[k];
        r[j] = (s[j] + p.lambda) / denom;
    }
    return r;
}

namespace {

double green_sum(const ModelParams& p, double t, int deriv) {
    GreenPoles poles = poles_full(p);
    auto res = green_residues(p, poles);
    auto s = poles.all();
    cplx sum = 0.0;
    for (int j = 0; j < 3; ++j) {
        cplx f = res[j] * std::exp(s[j] * t);
        for (int d = 0; d < deriv; ++d) f *= s[j];
        sum += f;
    }
    return sum.real();
}

}  // namespace

double green_time(const ModelParams& p, double t, GreenMode mode) {
    if (t < 0.0) throw DomainError("green_time: t must be >= 0");
    if (mode == GreenMode::Full) return green_sum(p, t, 0);
    if (p.gamma == 0.0) return std::sin(p.omega_r * t) / p.omega_r;
    return std::exp(-0.5 * p.gamma * t) * std::sin(p.w * t) / p.w;
}

double green_time_deriv(const ModelParams& p, double t, GreenMode mode) {
    if (t < 0.0) throw DomainError("green_time_deriv: t must be >= 0");
    if (mode == GreenMode::Full) return green_sum(p, t, 1);
    double e = std::exp(-0.5 * p.gamma * t);
    return e * (std::cos(p.w * t) - 0.5 * p.gamma * std::sin(p.w * t) / p.w);
}

double green_time_deriv2(const ModelParams& p, double t, GreenMode mode) {
    if (t < 0.0) throw DomainError("green_time_deriv2: t must be >= 0");
    if (mode == GreenMode::Full) return green_sum(p, t, 2);
    double e = std::exp(-0.5 * p.gamma * t);
    double g2 = 0.25 * p.gamma * p.gamma;
    return e * ((g2 / p.w - p.w) * std::sin(p.w * t) - p.gamma * std::cos(p.w * t));
}

}  // namespace qbm
