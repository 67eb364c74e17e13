#include "kaclab/entropy.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kaclab/normalization.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/specfun.hpp"
#include "kaclab/sphere.hpp"

namespace kaclab {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kNegInf = -std::numeric_limits<double>::infinity();

struct SupportViolation {};

std::string format_value(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

/// Mean/variance of a per-sample value plus plain sums of a per-sample
/// weight, sharded like estimate_mean: sample j always uses stream (seed, j)
/// and shard results merge in a fixed order.
struct WeightedStats {
    RunningStats stats;
    double weight_sum = 0.0;
    double weight_sq_sum = 0.0;

    void merge(const WeightedStats& o) {
        stats.merge(o.stats);
        weight_sum += o.weight_sum;
        weight_sq_sum += o.weight_sq_sum;
    }
};

template <class PerSample>
WeightedStats sharded_weighted_mean(const char* who, std::int64_t n, std::uint64_t seed,
                                    PerSample&& per_sample) {
    auto run_shard = [&](std::int64_t lo, std::int64_t hi) {
        WeightedStats acc;
        for (std::int64_t j = lo; j < hi; ++j) {
            RngStream stream(seed, static_cast<std::uint64_t>(j));
            auto [x, w] = per_sample(stream);
            if (!std::isfinite(x))
                throw std::runtime_error(std::string(who) +
                                         ": non-finite contribution at stream index " +
                                         std::to_string(j));
            acc.stats.add(x);
            acc.weight_sum += w;
            acc.weight_sq_sum += w * w;
        }
        return acc;
    };

    const int shards = 8;
    const std::int64_t base = n / shards;
    const std::int64_t rem = n % shards;
    auto cut = [&](int s) { return s * base + std::min<std::int64_t>(s, rem); };

    std::vector<std::future<WeightedStats>> futures;
    futures.reserve(shards - 1);
    for (int s = 1; s < shards; ++s)
        futures.push_back(std::async(std::launch::async, run_shard, cut(s), cut(s + 1)));
    WeightedStats total = run_shard(cut(0), cut(1));
    for (auto& f : futures) total.merge(f.get());
    return total;
}

double entropy_weighted_integrand(double x) {
    const double l = x;
    if (l == kNegInf) return 0.0;
    return std::exp(l) * l;
}

std::optional<std::string> optional_field(const std::optional<double>& x) {
    if (!x) return std::nullopt;
    return format_value(*x);
}

}  // namespace

double shannon_integral(const Density1D& f) {
    auto integrand = [&f](double x) {
        const double l = f.log_eval(x);
        return entropy_weighted_integrand(l);
    };
    QuadratureOptions opts;
    opts.abs_tol = 1e-12;
    opts.rel_tol = 1e-10;
    return integrate_or_throw(integrand, f.quad_range.lo, f.quad_range.hi, opts);
}

double rel_entropy_1d(const Density1D& f, const Density1D& g) {
    auto integrand = [&f, &g](double x) {
        const double lf = f.log_eval(x);
        if (lf == kNegInf) return 0.0;
        const double lg = g.log_eval(x);
        if (lg == kNegInf) throw SupportViolation{};
        return std::exp(lf) * (lf - lg);
    };
    QuadratureOptions opts;
    opts.abs_tol = 1e-12;
    opts.rel_tol = 1e-10;
    try {
        return integrate_or_throw(integrand, f.quad_range.lo, f.quad_range.hi, opts);
    } catch (const SupportViolation&) {
        return std::numeric_limits<double>::infinity();
    }
}

EntropyEstimate entropy_mc(const DensityFamily& family, std::int64_t n,
                           EntropyStrategy strategy, std::uint64_t seed) {
    if (family.dim < 3)
        throw std::invalid_argument("entropy_mc: family dimension must be at least 3");
    if (n < 16) throw std::invalid_argument("entropy_mc: need at least 16 samples");
    if (!family.log_density)
        throw std::invalid_argument("entropy_mc: family carries no log density");

    EntropyEstimate est;
    est.n_samples = n;
    if (strategy == EntropyStrategy::self_sampled) {
        if (!family.exact_sampler)
            throw std::invalid_argument("entropy_mc: family '" + family.name +
                                        "' carries no exact sampler");
        const WeightedStats acc =
            sharded_weighted_mean("entropy_mc", n, seed, [&family](RngStream& stream) {
                const SpherePoint p = family.exact_sampler(stream);
                return std::pair<double, double>{family.log_density(p), 1.0};
            });
        est.value = acc.stats.mean;
        est.std_error = acc.stats.std_error_of_mean();
        est.method = EstimateMethod::self_sampled;
        est.ess = static_cast<double>(n);
        return est;
    }

    const int dim = family.dim;
    const double radius = std::sqrt(static_cast<double>(dim));
    const WeightedStats acc =
        sharded_weighted_mean("entropy_mc", n, seed, [&family, dim, radius](RngStream& stream) {
            const SpherePoint p = sample_uniform(dim, radius, stream);
            const double ld = family.log_density(p);
            if (ld == kNegInf) return std::pair<double, double>{0.0, 0.0};
            return std::pair<double, double>{entropy_weighted_integrand(ld), std::exp(ld)};
        });
    est.value = acc.stats.mean;
    est.std_error = acc.stats.std_error_of_mean();
    est.method = EstimateMethod::uniform_weighted;
    est.ess = acc.weight_sq_sum > 0.0
                  ? acc.weight_sum * acc.weight_sum / acc.weight_sq_sum
                  : 0.0;
    return est;
}

double entropy_mixture_reduced(int N, double eta, MarginalMode mode) {
    if (N < 4) throw std::invalid_argument("entropy_mixture_reduced: need N >= 4");

    const MixtureParams params = make_mixture_params(N, eta);
    const Density1D f = make_mixture_1d(params);

    std::function<double(double)> pi1;
    double log_z = 0.0;
    if (mode == MarginalMode::exact) {
        const DensityFamily family = make_mixture_family(N, eta);
        auto marginal = std::make_shared<ConditionedMarginal>(family, 1, MarginalMode::exact);
        log_z = family.log_znorm.log();
        pi1 = [marginal](double v) {
            Eigen::VectorXd head(1);
            head << v;
            return marginal->value(head);
        };
    } else {
        const double sigma_sq = params.sigma_N_sq;
        const double scale = std::sqrt(N / (N - 1.0));
        pi1 = [&f, N, sigma_sq, scale](double v) {
            const double gap = 1.0 - v * v;
            const double log_window = -gap * gap / (2.0 * (N - 1.0) * sigma_sq);
            return scale * std::exp(f.log_eval(v) + log_window);
        };
        log_z = znorm_asymptotic(params, N, static_cast<double>(N)).log();
    }

    auto integrand = [&](double v) { return pi1(v) * f.log_eval(v); };
    QuadratureOptions opts;
    opts.abs_tol = 1e-11;
    opts.rel_tol = 1e-9;
    const double reduced =
        2.0 * integrate_or_throw(integrand, 0.0, std::sqrt(static_cast<double>(N)), opts);
    return reduced - log_z / N;
}

double entropy_concentration_exact(int N, const Density1D& phi, double eps) {
    if (N < 3) throw std::invalid_argument("entropy_concentration_exact: need N >= 3");
    if (!(eps > 0.0) || !(eps < 0.5 * kPi))
        throw std::invalid_argument(
            "entropy_concentration_exact: cap width must sit in (0, pi/2), got " +
            format_value(eps));
    if (phi.support.lo < 0.0 || phi.support.hi > 0.5)
        throw std::invalid_argument(
            "entropy_concentration_exact: profile must live inside [0, 1/2]");

    const Density1D phi_eps = scale_density(phi, eps);
    const double profile_term = shannon_integral(phi_eps);
    const double area_ratio =
        log_gamma(0.5 * (N - 1)) + 0.5 * std::log(kPi) - log_gamma(0.5 * N);

    auto sin_integrand = [&phi_eps](double xi) {
        const double l = phi_eps.log_eval(xi);
        if (l == kNegInf) return 0.0;
        return std::exp(l) * std::log(std::sin(xi));
    };
    QuadratureOptions opts;
    opts.abs_tol = 1e-12;
    opts.rel_tol = 1e-10;
    const double sin_term =
        integrate_or_throw(sin_integrand, phi_eps.quad_range.lo, phi_eps.quad_range.hi, opts);

    return profile_term + area_ratio - (N - 2) * sin_term - std::log(2.0 * N);
}

StereoEntropy entropy_stereo(int N, const Density1D& zeta, double beta,
                             std::int64_t n, std::uint64_t seed) {
    if (N < 3) throw std::invalid_argument("entropy_stereo: need N >= 3");
    if (!std::isfinite(beta)) throw std::invalid_argument("entropy_stereo: beta must be finite");
    if (zeta.support.lo < 0.0 || zeta.support.hi > 1.0)
        throw std::invalid_argument("entropy_stereo: chart factor must live inside [0, 1]");
    if (n < 16) throw std::invalid_argument("entropy_stereo: need at least 16 samples");

    const double n_f = static_cast<double>(N);
    const double deterministic = (N - 1) * shannon_integral(zeta) + sphere_log_area(N) -
                                 (N - 1) * std::log(2.0 * std::sqrt(n_f));

    const auto draw = zeta.sampler ? zeta.sampler
                                   : make_inverse_cdf_sampler(zeta.log_eval, zeta.support);
    const WeightedStats acc =
        sharded_weighted_mean("entropy_stereo", n, seed, [&draw, N, n_f, beta](RngStream& stream) {
            double norm_sq = 0.0;
            for (int i = 0; i + 1 < N; ++i) {
                const double x = beta + draw(stream);
                norm_sq += x * x;
            }
            return std::pair<double, double>{std::log(n_f + norm_sq), 1.0};
        });

    StereoEntropy out;
    out.deterministic_part = deterministic;
    out.estimate.value = deterministic + (N - 1) * acc.stats.mean;
    out.estimate.std_error = (N - 1) * acc.stats.std_error_of_mean();
    out.estimate.n_samples = n;
    out.estimate.method = EstimateMethod::self_sampled;
    out.estimate.ess = static_cast<double>(n);
    out.lower_bound = out.estimate.value - std::log(n_f);
    return out;
}

double entropy_poly_bound(int N) {
    if (N < 4) throw std::invalid_argument("entropy_poly_bound: need N >= 4");
    const double alpha = 2.0 / std::log(2.0);
    const double log_tail = (N - 1) * std::log(2.0) + log_gamma(0.5 * (N - alpha + 1)) +
                            log_gamma(0.5 * N) - 0.5 * std::log(kPi) - std::log(alpha) -
                            1.0 - log_gamma(N - 0.5 * alpha);
    const double tail = -std::exp(log_tail);
    const double log_n = std::log(static_cast<double>(N));
    return 0.5 * log_n + tail - 0.5 * (N + 2) * log_n / N + (N - 1) * std::log(2.0) / N;
}

double entropy_poly_fixed_bound(int N, double m) {
    if (N < 4) throw std::invalid_argument("entropy_poly_fixed_bound: need N >= 4");
    if (!(m > 0.0)) throw std::invalid_argument("entropy_poly_fixed_bound: need m > 0");
    if (m == 2.0) return 0.0;
    return 0.5 * m * std::log(static_cast<double>(N)) - zpoly(N, poly_fixed(m)).log();
}

ConvexEntropyBounds entropy_convex_bounds(double h_g, double h_f, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("entropy_convex_bounds: alpha must sit in (0, 1)");
    if (!std::isfinite(h_g) || !std::isfinite(h_f))
        throw std::invalid_argument("entropy_convex_bounds: component entropies must be finite");
    ConvexEntropyBounds out;
    out.upper = (1.0 - alpha) * h_g + alpha * h_f;
    out.lower = out.upper + (1.0 - alpha) * std::log(1.0 - alpha) + alpha * std::log(alpha);
    return out;
}

bool cklp_check(double tv_estimate, double h, double tolerance) {
    if (!(tv_estimate >= 0.0) || !(tv_estimate <= 2.0))
        throw std::invalid_argument("cklp_check: total variation must sit in [0, 2], got " +
                                    format_value(tv_estimate));
    if (!(h >= 0.0))
        throw std::invalid_argument("cklp_check: entropy must be nonnegative, got " +
                                    format_value(h));
    return tv_estimate * tv_estimate <= 2.0 * h + tolerance;
}

bool entropy_bound_respected(const EntropyReport& report) {
    if (!report.bound_lower) return true;
    if (report.estimate.method == EstimateMethod::closed_form) return true;
    const double n = static_cast<double>(report.N);
    return report.estimate.value / n >= *report.bound_lower - 3.0 * report.estimate.std_error / n;
}

void write_entropy_csv_header(std::ostream& out) {
    out << "family,N,method,h_per_particle,std_error_per_particle,target,bound_lower,ess\n";
}

void write_entropy_csv_row(const EntropyReport& report, std::ostream& out) {
    const double n = static_cast<double>(report.N);
    out << report.family << ',' << report.N << ',' << method_name(report.estimate.method) << ','
        << format_value(report.h_per_particle) << ','
        << format_value(report.estimate.std_error / n) << ','
        << optional_field(report.target).value_or("") << ','
        << optional_field(report.bound_lower).value_or("") << ','
        << format_value(report.estimate.ess) << '\n';
}

}  // namespace kaclab
