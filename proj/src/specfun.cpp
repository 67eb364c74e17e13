#include "kaclab/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace kaclab {

namespace {

constexpr double kLogSqrtTwoPi = 0.91893853320467274178;
constexpr double kLogPi = 1.1447298858494001741;

// Lanczos coefficients for g = 7, 9 terms.
constexpr double kLanczos[9] = {
    0.99999999999980993,    676.5203681218851,     -1259.1392167224028,
    771.32342877765313,     -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7,
};

double log_gamma_lanczos(double x) {
    double z = x - 1.0;
    double acc = kLanczos[0];
    for (int i = 1; i < 9; ++i) acc += kLanczos[i] / (z + i);
    double t = z + 7.5;
    return kLogSqrtTwoPi + (z + 0.5) * std::log(t) - t + std::log(acc);
}

}  // namespace

double log_gamma(double x) {
    if (!std::isfinite(x)) throw std::domain_error("log_gamma: non-finite argument");
    if (x <= 0.0 && x == std::floor(x))
        throw std::domain_error("log_gamma: pole at non-positive integer");
    if (x < 0.5) {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
        double s = std::sin(M_PI * x);
        return kLogPi - std::log(std::abs(s)) - log_gamma(1.0 - x);
    }
    return log_gamma_lanczos(x);
}

double log_beta(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double sphere_log_area(int n) {
    if (n < 1) throw std::domain_error("sphere_log_area: dimension must be >= 1");
    return std::log(2.0) + 0.5 * n * kLogPi - log_gamma(0.5 * n);
}

GammaRatio gamma_ratio_log(double N, double m) {
    if (N < 1.0) throw std::domain_error("gamma_ratio_log: N must be >= 1");
    if (N + m <= 0.0) throw std::domain_error("gamma_ratio_log: N + m must be positive");
    GammaRatio r;
    r.exact = log_gamma(0.5 * N) - log_gamma(0.5 * (N + m));
    r.asymptotic = -0.5 * m * std::log(0.5 * N);
    return r;
}

}  // namespace kaclab
