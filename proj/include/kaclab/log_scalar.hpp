#pragma once

#include <cmath>
#include <limits>

namespace kaclab {

/// Signed real number stored as the natural log of its magnitude.
/// Used for quantities that overflow double range, such as normalization
/// constants of high-dimensional densities. sign == 0 encodes exact zero,
/// in which case log_mag is ignored.
struct LogScalar {
    double log_mag = 0.0;
    int sign = 0;

    static LogScalar zero() { return {0.0, 0}; }
    static LogScalar one() { return {0.0, +1}; }

    static LogScalar from_value(double v) {
        if (v == 0.0) return zero();
        return {std::log(std::abs(v)), v > 0.0 ? +1 : -1};
    }

    static LogScalar from_log(double log_mag, int sign = +1) {
        if (sign == 0) return zero();
        return {log_mag, sign > 0 ? +1 : -1};
    }

    /// Value as a plain double; overflows to +-infinity when log_mag > ~709.
    double value() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(log_mag);
    }

    /// Log of the magnitude; -infinity for zero.
    double log() const {
        if (sign == 0) return -std::numeric_limits<double>::infinity();
        return log_mag;
    }

    bool is_zero() const { return sign == 0; }

    LogScalar operator*(const LogScalar& o) const {
        if (sign == 0 || o.sign == 0) return zero();
        return {log_mag + o.log_mag, sign * o.sign};
    }

    LogScalar operator/(const LogScalar& o) const {
        return *this * LogScalar{-o.log_mag, o.sign};
    }

    LogScalar operator+(const LogScalar& o) const {
        if (sign == 0) return o;
        if (o.sign == 0) return *this;
        const LogScalar& big = (log_mag >= o.log_mag) ? *this : o;
        const LogScalar& small = (log_mag >= o.log_mag) ? o : *this;
        double d = small.log_mag - big.log_mag;
        if (big.sign == small.sign)
            return {big.log_mag + std::log1p(std::exp(d)), big.sign};
        if (d == 0.0) return zero();
        return {big.log_mag + std::log1p(-std::exp(d)), big.sign};
    }

    LogScalar operator-(const LogScalar& o) const {
        return *this + LogScalar{o.log_mag, -o.sign};
    }

    /// Integer power; sign follows parity for negative bases.
    LogScalar pow(double e) const {
        if (sign == 0) return zero();
        int s = sign;
        if (sign < 0) {
            double r = std::fmod(e, 2.0);
            s = (r == 0.0) ? +1 : -1;
        }
        return {log_mag * e, s};
    }
};

}  // namespace kaclab
