#pragma once

#include <functional>
#include <vector>

#include "qbm/errors.hpp"

namespace qbm::quad {

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;   // accepted when the error estimate is below either
    int max_depth = 17;
};

// Adaptive Gauss-Kronrod on [a, b]; b may be +infinity.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts = {});

// Integrates across the sorted breakpoints, then [back, +inf).
// Splitting at known features (resonances, cutoff shoulders) keeps the
// adaptive rule from missing narrow structure.
double integrate_segmented(const std::function<double(double)>& f,
                           const std::vector<double>& breakpoints, bool add_tail,
                           const Options& opts = {});

}  // namespace qbm::quad
