#include "kaclab/normalization.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "kaclab/specfun.hpp"

namespace kaclab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2 = 0.69314718055994530942;
constexpr double kLogTwoPi = 1.8378770664093454836;
constexpr double kLogSqrtPi = 0.57236494292470008707;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMaxOutsideMass = 1e-6;

constexpr double kGl4Nodes[4] = {0.069431844202973712, 0.33000947820757187,
                                 0.66999052179242813, 0.93056815579702629};
constexpr double kGl4Weights[4] = {0.17392742256872693, 0.32607257743127307,
                                   0.32607257743127307, 0.17392742256872693};

/// The convolution runs on a grid finer than the requested nodes; cell-mass
/// placement error near the singular edge of the single-coordinate law decays
/// like the 3/2 power of the fine spacing. Low orders keep a visible boundary
/// layer (the order-2 law can even jump at zero) and get a finer grid.
constexpr int kOversample = 8;
constexpr int kOversampleLowOrder = 32;
constexpr int kLowOrderLimit = 4;

/// Mass of w = v^2 in each grid cell [j dw, (j+1) dw], integrated in s =
/// sqrt(w) where the law of |v| has no endpoint singularity.
std::vector<double> cell_masses(const Density1D& f, double grid_max,
                                int n_points) {
    std::vector<double> masses(static_cast<std::size_t>(n_points));
    const double dw = grid_max / n_points;
    double s_lo = 0.0;
    for (int j = 0; j < n_points; ++j) {
        const double s_hi = std::sqrt((j + 1) * dw);
        const double len = s_hi - s_lo;
        double acc = 0.0;
        for (int q = 0; q < 4; ++q) {
            const double s = s_lo + kGl4Nodes[q] * len;
            acc += kGl4Weights[q] * (f.eval(s) + f.eval(-s));
        }
        masses[static_cast<std::size_t>(j)] = acc * len;
        s_lo = s_hi;
    }
    return masses;
}

std::string grid_error_message(double mass_outside, double suggested) {
    std::ostringstream msg;
    msg << "squared-law grid truncates an estimated mass of " << mass_outside
        << "; retry with grid_max >= " << suggested;
    return msg.str();
}

}  // namespace

GridTooSmallError::GridTooSmallError(double mass_outside_arg,
                                     double suggested_grid_max_arg)
    : std::runtime_error(
          grid_error_message(mass_outside_arg, suggested_grid_max_arg)),
      mass_outside(mass_outside_arg),
      suggested_grid_max(suggested_grid_max_arg) {}

SquaredLawTable::SquaredLawTable(const Density1D& f, int N, double grid_max,
                                 int n_points) {
    if (N < 1) {
        throw std::invalid_argument("SquaredLawTable: N must be >= 1");
    }
    if (n_points < 2 || (n_points & (n_points - 1)) != 0) {
        throw std::invalid_argument(
            "SquaredLawTable: n_points must be a power of two >= 2");
    }
    const bool auto_grid = grid_max <= 0.0;
    const int oversample = N <= kLowOrderLimit ? kOversampleLowOrder : kOversample;
    const int fine_points = n_points * oversample;
    double gmax = auto_grid ? 4.0 * N : grid_max;
    std::vector<double> masses;
    for (;;) {
        masses = cell_masses(f, gmax, fine_points);
        const double on_grid =
            std::accumulate(masses.begin(), masses.end(), 0.0);
        const double tail = std::max(0.0, 1.0 - on_grid);
        const double outside = std::min(1.0, N * tail);
        if (outside <= kMaxOutsideMass) {
            break;
        }
        if (!auto_grid) {
            throw GridTooSmallError(outside, 2.0 * gmax);
        }
        gmax *= 2.0;
    }
    grid_max_ = gmax;
    n_points_ = n_points;
    order_ = N;
    dw_ = gmax / n_points;

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, masses);
    spectrum_ = Eigen::Map<Eigen::ArrayXcd>(spec.data(), fine_points);
}

Eigen::ArrayXd SquaredLawTable::order_density(int order) const {
    if (order < 1 || order > order_) {
        throw std::invalid_argument(
            "order_density: order must lie in [1, construction order]");
    }
    const int fine = static_cast<int>(spectrum_.size());
    const double fine_dw = grid_max_ / fine;
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(fine));
    for (int k = 0; k < fine; ++k) {
        const std::complex<double> base = spectrum_[k];
        const double mag = std::abs(base);
        std::complex<double> powered =
            mag == 0.0 ? std::complex<double>(0.0, 0.0)
                       : std::polar(std::pow(mag, order),
                                    std::arg(base) * order);
        const double k_signed = k <= fine / 2 ? k : k - fine;
        powered *= std::polar(1.0, -kPi * k_signed * order / fine);
        spec[static_cast<std::size_t>(k)] = powered;
    }
    spec[0].imag(0.0);
    spec[static_cast<std::size_t>(fine / 2)].imag(0.0);
    for (int k = 1; k < fine / 2; ++k) {
        spec[static_cast<std::size_t>(fine - k)] =
            std::conj(spec[static_cast<std::size_t>(k)]);
    }

    Eigen::FFT<double> fft;
    std::vector<double> values;
    fft.inv(values, spec);
    const int n = n_points_;
    const int step = fine / n;
    Eigen::ArrayXd density(n);
    for (int k = 0; k < n; ++k) {
        density(k) =
            std::max(0.0, values[static_cast<std::size_t>(k * step)]) /
            fine_dw;
    }
    if (order == 2) {
        // The order-2 law may jump at zero, where the circular shift leaves
        // node 0 empty; rebuild it one-sidedly from nearby nodes.
        density(0) = std::max(0.0, 2.0 * density(4) - density(8));
    }
    const double head = 0.5 * (density(0) + density(n - 1));
    const double mass = dw_ * (density.sum() - head);
    if (mass > 0.0) {
        density /= mass;
    }
    return density;
}

SquaredLawGrid SquaredLawTable::grid(int order) const {
    const Eigen::ArrayXd density = order_density(order);
    SquaredLawGrid result;
    result.grid_max = grid_max_;
    result.n_points = n_points_;
    result.order = order;
    result.dw = dw_;
    result.log_density_values.reserve(static_cast<std::size_t>(n_points_));
    for (int k = 0; k < n_points_; ++k) {
        result.log_density_values.push_back(LogScalar::from_value(density(k)));
    }
    return result;
}

double log_interp_density(const Eigen::ArrayXd& density, double dw, double u) {
    const auto n = density.size();
    if (!(dw > 0.0) || n < 2) {
        throw std::invalid_argument(
            "log_interp_density: need dw > 0 and at least two nodes");
    }
    const double x = u / dw;
    if (x < 0.0 || x > static_cast<double>(n - 1)) {
        return kNegInf;
    }
    auto i = static_cast<Eigen::Index>(x);
    if (i >= n - 1) {
        i = n - 2;
    }
    const double frac = x - static_cast<double>(i);
    const double lo = density(i);
    const double hi = density(i + 1);
    if (lo > 0.0 && hi > 0.0) {
        return (1.0 - frac) * std::log(lo) + frac * std::log(hi);
    }
    const double linear = (1.0 - frac) * lo + frac * hi;
    return linear > 0.0 ? std::log(linear) : kNegInf;
}

SquaredLawGrid squared_law(const Density1D& f, int N, double grid_max,
                           int n_points) {
    return SquaredLawTable(f, N, grid_max, n_points).grid(N);
}

LogScalar znorm_exact(const Eigen::ArrayXd& order_density, double dw, int order,
                      double u) {
    if (!(u > 0.0)) {
        throw std::invalid_argument("znorm_exact: u must be positive");
    }
    const double log_p = log_interp_density(order_density, dw, u);
    if (log_p == kNegInf) {
        return LogScalar::zero();
    }
    const double log_z = kLn2 + log_p - sphere_log_area(order) -
                         0.5 * (order - 2) * std::log(u);
    return LogScalar::from_log(log_z);
}

LogScalar znorm_exact(const SquaredLawTable& table, int order, double u) {
    return znorm_exact(table.order_density(order), table.dw(), order, u);
}

LogScalar znorm_exact(const Density1D& f, int N, double u) {
    const SquaredLawTable table(f, N);
    return znorm_exact(table, N, u);
}

LogScalar znorm_asymptotic(const MixtureParams& params, int N, double u) {
    if (N < 1) {
        throw std::invalid_argument("znorm_asymptotic: N must be >= 1");
    }
    if (!(u > 0.0)) {
        throw std::invalid_argument("znorm_asymptotic: u must be positive");
    }
    if (!(params.sigma_N_sq > 0.0)) {
        throw std::invalid_argument(
            "znorm_asymptotic: params.sigma_N_sq must be positive");
    }
    const double variance = params.sigma_N_sq;
    const double shift = u - N;
    const double log_z = kLn2 - 0.5 * std::log(static_cast<double>(N)) -
                         0.5 * std::log(variance) - sphere_log_area(N) -
                         0.5 * (N - 2) * std::log(u) -
                         shift * shift / (2.0 * N * variance) -
                         0.5 * kLogTwoPi;
    return LogScalar::from_log(log_z);
}

PolyPower poly_fixed(double m) { return PolyPower{m, false}; }

PolyPower poly_varying() { return PolyPower{0.0, true}; }

LogScalar zpoly(int N, PolyPower power) {
    if (N < 2) {
        throw std::invalid_argument("zpoly: N must be >= 2");
    }
    const double n = N;
    if (power.is_varying) {
        return LogScalar::from_log(0.5 * (n + 2.0) * std::log(n) -
                                   (n - 1.0) * kLn2);
    }
    return LogScalar::from_log(
        std::log(n) + moment_integral_log(N, std::sqrt(n), power.m));
}

LogScalar zpoly_gamma_route(int N) {
    if (N < 2) {
        throw std::invalid_argument("zpoly_gamma_route: N must be >= 2");
    }
    const double n = N;
    const double log_z = 0.5 * (n + 2.0) * std::log(n) + log_gamma(n / 2.0) +
                         log_gamma((n + 1.0) / 2.0) - kLogSqrtPi - log_gamma(n);
    return LogScalar::from_log(log_z);
}

double moment_integral_log(int N, double r, double m) {
    if (N < 2) {
        throw std::invalid_argument("moment_integral_log: N must be >= 2");
    }
    if (!(r > 0.0)) {
        throw std::invalid_argument("moment_integral_log: r must be positive");
    }
    if (!(m > -1.0)) {
        throw std::invalid_argument(
            "moment_integral_log: m must exceed -1 for an integrable moment");
    }
    return m * std::log(r) + log_gamma(0.5 * N) + log_gamma(0.5 * (m + 1.0)) -
           kLogSqrtPi - log_gamma(0.5 * (N + m));
}

}  // namespace kaclab
