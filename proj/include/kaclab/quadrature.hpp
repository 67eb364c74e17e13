#pragma once

#include <functional>

namespace kaclab {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_depth = 60;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;
    long n_evals = 0;
};

/// Adaptive panel-bisection quadrature of f over [a, b] with an embedded
/// Gauss 7 / Kronrod 15 pair. Handles boundary powers like (r^2 - v^2)^{k/2}
/// by graded refinement near the endpoints.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, QuadratureOptions opts = {});

/// Same, but throws std::runtime_error reporting the achieved error estimate
/// when the tolerances are not met.
double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          QuadratureOptions opts = {});

}  // namespace kaclab
