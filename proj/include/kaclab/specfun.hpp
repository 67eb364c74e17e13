#pragma once

namespace kaclab {

/// Natural log of the Gamma function, Lanczos approximation (g = 7, 9 terms)
/// with the reflection formula for x < 0.5. Throws std::domain_error for
/// non-positive integers and non-finite input.
double log_gamma(double x);

/// log Beta(a, b) = log Gamma(a) + log Gamma(b) - log Gamma(a + b).
double log_beta(double a, double b);

/// Log surface area of the unit sphere S^{n-1} embedded in R^n:
/// log(2 pi^{n/2} / Gamma(n/2)). Requires n >= 1.
double sphere_log_area(int n);

struct GammaRatio {
    double exact;
    double asymptotic;
};

/// log of Gamma(N/2) / Gamma((N+m)/2), exact and its large-N asymptotic
/// -(m/2) log(N/2). Requires N >= 1 and N + m > 0.
GammaRatio gamma_ratio_log(double N, double m);

}  // namespace kaclab
