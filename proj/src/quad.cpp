#include "qbm/quad.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qbm::quad {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

double integrate_one(const std::function<double(double)>& f, double a, double b,
                     const Options& opts, double* err_out) {
    double error = 0.0;
    double v = GK::integrate(f, a, b, opts.max_depth, opts.rel_tol, &error);
    if (err_out) *err_out = error;
    return v;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts) {
    double err = 0.0;
    double v = integrate_one(f, a, b, opts, &err);
    double scale = std::max(std::abs(v), 1e-300);
    if (err > 10.0 * opts.rel_tol * scale && err > opts.abs_tol)
        throw QuadratureFailure("adaptive quadrature did not reach tolerance (err=" +
                                std::to_string(err) + ", value=" + std::to_string(v) + ")");
    return v;
}

double integrate_segmented(const std::function<double(double)>& f,
                           const std::vector<double>& breakpoints, bool add_tail,
                           const Options& opts) {
    std::vector<double> pts = breakpoints;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 2 && !add_tail)
        throw DomainError("integrate_segmented: needs at least one segment");

    double total = 0.0, err_total = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        double err = 0.0;
        total += integrate_one(f, pts[i], pts[i + 1], opts, &err);
        err_total += err;
    }
    if (add_tail) {
        double err = 0.0;
        total += integrate_one(f, pts.back(), std::numeric_limits<double>::infinity(), opts, &err);
        err_total += err;
    }
    double scale = std::max(std::abs(total), 1e-300);
    if (err_total > 10.0 * opts.rel_tol * scale && err_total > opts.abs_tol)
        throw QuadratureFailure("segmented quadrature did not reach tolerance");
    return total;
}

}  // namespace qbm::quad
