#include "kaclab/density1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "kaclab/quadrature.hpp"

namespace kaclab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454836;

double log_gaussian(double x, double a) {
    return -0.5 * (kLogTwoPi + std::log(a)) - x * x / (2.0 * a);
}

double log_sum_exp2(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

MixtureParams make_mixture_params(int N, double eta) {
    if (N < 1) throw std::invalid_argument("make_mixture_params: need N >= 1");
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("make_mixture_params: need eta in (0, 1]");
    MixtureParams p;
    p.eta = eta;
    p.delta_N = std::pow(static_cast<double>(N), -eta);
    p.sigma_N_sq = 3.0 / (4.0 * p.delta_N * (1.0 - p.delta_N)) - 1.0;
    if (!(p.delta_N > 0.0) || !(p.delta_N < 1.0))
        throw std::invalid_argument("make_mixture_params: delta_N out of (0, 1)");
    return p;
}

Density1D make_gaussian(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("make_gaussian: variance must be positive");
    Density1D f;
    f.name = "gaussian(" + std::to_string(a) + ")";
    f.log_eval = [a](double x) { return log_gaussian(x, a); };
    double inf = std::numeric_limits<double>::infinity();
    f.support = {-inf, inf};
    double cut = 40.0 * std::sqrt(a);
    f.quad_range = {-cut, cut};
    f.second_moment = a;
    f.sampler = [a](RngStream& rng) { return std::sqrt(a) * rng.normal(); };
    validate_density(f);
    return f;
}

Density1D make_mixture_1d(const MixtureParams& params) {
    double delta = params.delta_N;
    double a1 = 1.0 / (2.0 * delta);
    double a2 = 1.0 / (2.0 * (1.0 - delta));
    double log_d = std::log(delta);
    double log_1md = std::log1p(-delta);

    Density1D f;
    f.name = "mixture1d(delta=" + std::to_string(delta) + ")";
    f.log_eval = [=](double x) {
        return log_sum_exp2(log_d + log_gaussian(x, a1), log_1md + log_gaussian(x, a2));
    };
    double inf = std::numeric_limits<double>::infinity();
    f.support = {-inf, inf};
    double cut = 40.0 * std::sqrt(std::max(a1, a2));
    f.quad_range = {-cut, cut};
    f.second_moment = delta * a1 + (1.0 - delta) * a2;
    f.sampler = [=](RngStream& rng) {
        double a = rng.uniform01() < delta ? a1 : a2;
        return std::sqrt(a) * rng.normal();
    };
    validate_density(f);
    return f;
}

Density1D make_bump() {
    auto shape = [](double x) {
        if (x <= 0.0 || x >= 0.5) return kNegInf;
        return -1.0 / (x * (0.5 - x));
    };
    QuadratureOptions tight;
    tight.abs_tol = 1e-18;
    tight.rel_tol = 1e-12;
    double mass = integrate_or_throw([&](double x) { return std::exp(shape(x)); }, 0.0, 0.5,
                                     tight);
    double log_c = -std::log(mass);

    Density1D f;
    f.name = "bump";
    f.log_eval = [=](double x) {
        double s = shape(x);
        return s == kNegInf ? kNegInf : log_c + s;
    };
    f.support = {0.0, 0.5};
    f.quad_range = {0.0, 0.5};
    f.second_moment = integrate_or_throw(
        [&](double x) { return x * x * std::exp(log_c + shape(x)); }, 0.0, 0.5, tight);
    f.sampler = make_inverse_cdf_sampler(f.log_eval, f.quad_range);
    validate_density(f);
    return f;
}

Density1D make_uniform01() {
    Density1D f;
    f.name = "uniform01";
    f.log_eval = [](double x) { return (x < 0.0 || x > 1.0) ? kNegInf : 0.0; };
    f.support = {0.0, 1.0};
    f.quad_range = {0.0, 1.0};
    f.second_moment = 1.0 / 3.0;
    f.sampler = [](RngStream& rng) { return rng.uniform01(); };
    validate_density(f);
    return f;
}

Density1D scale_density(const Density1D& f, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("scale_density: scale must be positive");
    Density1D g;
    g.name = f.name + "/scaled(" + std::to_string(eps) + ")";
    auto base = f.log_eval;
    double log_eps = std::log(eps);
    g.log_eval = [=](double x) { return base(x / eps) - log_eps; };
    g.support = {f.support.lo * eps, f.support.hi * eps};
    g.quad_range = {f.quad_range.lo * eps, f.quad_range.hi * eps};
    g.second_moment = eps * eps * f.second_moment;
    if (f.sampler) {
        auto inner = f.sampler;
        g.sampler = [=](RngStream& rng) { return eps * inner(rng); };
    }
    return g;
}

void validate_density(const Density1D& f) {
    QuadratureOptions opts;
    opts.abs_tol = 1e-12;
    opts.rel_tol = 1e-10;
    double mass = integrate_or_throw([&](double x) { return f.eval(x); }, f.quad_range.lo,
                                     f.quad_range.hi, opts);
    if (std::abs(mass - 1.0) > 1e-8)
        throw std::domain_error("Density1D '" + f.name + "': mass " + std::to_string(mass) +
                                " is not 1 within 1e-8");
    double m2 = integrate_or_throw([&](double x) { return x * x * f.eval(x); },
                                   f.quad_range.lo, f.quad_range.hi, opts);
    if (std::abs(m2 - f.second_moment) > 1e-6)
        throw std::domain_error("Density1D '" + f.name + "': second moment mismatch");
}

std::function<double(RngStream&)> make_inverse_cdf_sampler(
    const std::function<double(double)>& log_eval, Interval range, int n_cells) {
    if (n_cells < 2) throw std::invalid_argument("make_inverse_cdf_sampler: need n_cells >= 2");
    if (!(range.hi > range.lo))
        throw std::invalid_argument("make_inverse_cdf_sampler: empty range");

    struct Table {
        double lo, width;
        std::vector<double> cumulative;   // size n_cells + 1, normalized to 1
        std::vector<double> edge_density; // size n_cells + 1
    };
    auto table = std::make_shared<Table>();
    table->lo = range.lo;
    table->width = (range.hi - range.lo) / n_cells;

    // 4-point Gauss-Legendre nodes on [0, 1].
    const double nodes[4] = {0.069431844202974, 0.330009478207572, 0.669990521792428,
                             0.930568155797026};
    const double weights[4] = {0.173927422568727, 0.326072577431273, 0.326072577431273,
                               0.173927422568727};

    table->cumulative.resize(n_cells + 1, 0.0);
    table->edge_density.resize(n_cells + 1, 0.0);
    // Masses are taken relative to the peak log value, so densities whose
    // logs exceed double range (|v|^N factors) still tabulate; the shift
    // cancels in the normalization.
    std::vector<double> edge_log(n_cells + 1);
    std::vector<double> node_log(4 * static_cast<std::size_t>(n_cells));
    double log_shift = kNegInf;
    for (int j = 0; j <= n_cells; ++j) {
        edge_log[j] = log_eval(range.lo + j * table->width);
        log_shift = std::max(log_shift, edge_log[j]);
    }
    for (int j = 0; j < n_cells; ++j) {
        double a = range.lo + j * table->width;
        for (int q = 0; q < 4; ++q) {
            node_log[4 * j + q] = log_eval(a + nodes[q] * table->width);
            log_shift = std::max(log_shift, node_log[4 * j + q]);
        }
    }
    if (!std::isfinite(log_shift))
        throw std::domain_error("make_inverse_cdf_sampler: density has no mass on the range");
    for (int j = 0; j <= n_cells; ++j) {
        double v = std::exp(edge_log[j] - log_shift);
        table->edge_density[j] = std::isfinite(v) ? v : 0.0;
    }
    double total = 0.0;
    for (int j = 0; j < n_cells; ++j) {
        double m = 0.0;
        for (int q = 0; q < 4; ++q) m += weights[q] * std::exp(node_log[4 * j + q] - log_shift);
        total += m * table->width;
        table->cumulative[j + 1] = total;
    }
    if (!(total > 0.0))
        throw std::domain_error("make_inverse_cdf_sampler: density has no mass on the range");
    for (auto& c : table->cumulative) c /= total;

    return [table](RngStream& rng) {
        double u = rng.uniform01();
        auto it = std::upper_bound(table->cumulative.begin(), table->cumulative.end(), u);
        int j = static_cast<int>(std::max<std::ptrdiff_t>(
            0, std::min<std::ptrdiff_t>(it - table->cumulative.begin() - 1,
                                        static_cast<std::ptrdiff_t>(
                                            table->cumulative.size()) - 2)));
        double cell_mass = table->cumulative[j + 1] - table->cumulative[j];
        double t = cell_mass > 0.0 ? (u - table->cumulative[j]) / cell_mass : 0.5;
        double f_lo = table->edge_density[j];
        double f_hi = table->edge_density[j + 1];
        double s;
        double slope = f_hi - f_lo;
        double avg = 0.5 * (f_lo + f_hi);
        if (avg <= 0.0 || std::abs(slope) < 1e-12 * avg) {
            s = t;
        } else {
            double disc = f_lo * f_lo + slope * (f_lo + f_hi) * t;
            s = (std::sqrt(std::max(0.0, disc)) - f_lo) / slope;
            s = std::min(1.0, std::max(0.0, s));
        }
        return table->lo + (j + s) * table->width;
    };
}

}  // namespace kaclab
