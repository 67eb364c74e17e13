#include "kaclab/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kaclab/log_scalar.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/rng.hpp"
#include "kaclab/specfun.hpp"

namespace kaclab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_marginal_order(const char* who, int N, int k) {
    if (k < 1) {
        throw std::invalid_argument(std::string(who) +
                                    ": marginal order k must be at least 1");
    }
    if (N < k + 3) {
        throw std::invalid_argument(
            std::string(who) + ": need N >= k + 3 so the conditioned sphere "
                               "keeps positive dimension");
    }
}

Eigen::VectorXd linspace(double lo, double hi, int n) {
    Eigen::VectorXd axis(n);
    for (int i = 0; i < n; ++i) {
        axis(i) = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    }
    return axis;
}

double limit_product(const Density1D& limit, const Eigen::VectorXd& v) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double term = limit.log_eval(v(i));
        if (term == kNegInf) {
            return 0.0;
        }
        acc += term;
    }
    return std::exp(acc);
}

std::string format_value(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::string(buf);
}

ChaoticityResult histogram_gap(const DensityFamily& family, int k,
                               const GridSpec& spec) {
    if (k != 1) {
        throw std::invalid_argument(
            "chaoticity_gap: histogram marginals support k = 1 only");
    }
    if (!family.exact_sampler) {
        throw std::invalid_argument("chaoticity_gap: family '" + family.name +
                                    "' has no exact sampler to histogram");
    }
    if (spec.histogram_samples < 1000) {
        throw std::invalid_argument(
            "chaoticity_gap: need at least 1000 histogram samples");
    }
    const Density1D& limit = *family.claimed_limit;
    const int bins = spec.points_per_axis > 0 ? spec.points_per_axis : 200;
    double lo = spec.lo;
    double hi = spec.hi;
    if (!(lo < hi)) {
        hi = 4.0 * std::sqrt(2.0);
        lo = -hi;
    }
    const double width = (hi - lo) / bins;
    const long n = spec.histogram_samples;

    std::vector<long> counts(static_cast<std::size_t>(bins), 0);
    for (long s = 0; s < n; ++s) {
        RngStream rng(spec.seed, static_cast<std::uint64_t>(s));
        const SpherePoint point = family.exact_sampler(rng);
        const double x = point.coords(0);
        if (x < lo || x >= hi) {
            continue;
        }
        ++counts[static_cast<std::size_t>((x - lo) / width)];
    }

    MarginalGrid grid;
    grid.k = 1;
    grid.N = family.dim;
    grid.points.resize(bins, 1);
    grid.values.resize(bins);
    grid.limit_values.resize(bins);
    grid.std_errors.resize(bins);
    for (int b = 0; b < bins; ++b) {
        const double center = lo + (b + 0.5) * width;
        const double p_hat = static_cast<double>(counts[b]) / n;
        grid.points(b, 0) = center;
        grid.values(b) = p_hat / width;
        grid.limit_values(b) =
            limit_product(limit, grid.points.row(b).transpose());
        grid.std_errors(b) = std::sqrt(p_hat * (1.0 - p_hat) / n) / width;
    }

    const Eigen::VectorXd gaps =
        (grid.values - grid.limit_values).cwiseAbs();
    ChaoticityResult result;
    result.sup_gap = gaps.maxCoeff();
    result.l1_gap = gaps.sum() * width;
    result.grid = std::move(grid);
    return result;
}

}  // namespace

double marginal_prefactor_log(int N, int k, const Eigen::VectorXd& v) {
    check_marginal_order("marginal_prefactor_log", N, k);
    if (v.size() != k) {
        throw std::invalid_argument(
            "marginal_prefactor_log: v must carry exactly k coordinates");
    }
    const double u_rest = static_cast<double>(N) - v.squaredNorm();
    if (u_rest <= 0.0) {
        return kNegInf;
    }
    return sphere_log_area(N - k) - sphere_log_area(N) +
           0.5 * (N - k - 2) * std::log(u_rest) -
           0.5 * (N - 2) * std::log(static_cast<double>(N));
}

ConditionedMarginal::ConditionedMarginal(const DensityFamily& family, int k,
                                         MarginalMode mode)
    : dim_(family.dim), k_(k), mode_(mode) {
    check_marginal_order("ConditionedMarginal", family.dim, k);
    if (family.route != MarginalRoute::conditioned || !family.base_density) {
        throw std::invalid_argument("ConditionedMarginal: family '" +
                                    family.name +
                                    "' is not a conditioned tensorization");
    }
    base_ = *family.base_density;
    sigma_sq_ = family.base_sigma_sq;
    if (mode_ == MarginalMode::asymptotic) {
        if (std::abs(base_.second_moment - 1.0) > 1e-9) {
            throw std::invalid_argument(
                "ConditionedMarginal: the asymptotic mode needs a base "
                "density with unit second moment");
        }
        if (!(sigma_sq_ > 0.0)) {
            throw std::invalid_argument(
                "ConditionedMarginal: the asymptotic mode needs a positive "
                "squared-coordinate variance");
        }
        return;
    }
    if (!family.znorm_table) {
        throw std::invalid_argument("ConditionedMarginal: family '" +
                                    family.name +
                                    "' carries no squared-law table");
    }
    rest_density_ = family.znorm_table->order_density(dim_ - k_);
    dw_ = family.znorm_table->dw();
    log_z_full_ = family.log_znorm.log();
}

double ConditionedMarginal::value(const Eigen::VectorXd& v) const {
    const double prefactor = marginal_prefactor_log(dim_, k_, v);
    if (prefactor == kNegInf) {
        return 0.0;
    }
    double log_f = 0.0;
    for (int i = 0; i < k_; ++i) {
        const double term = base_.log_eval(v(i));
        if (term == kNegInf) {
            return 0.0;
        }
        log_f += term;
    }
    const double u_rest = static_cast<double>(dim_) - v.squaredNorm();
    double log_ratio;
    if (mode_ == MarginalMode::exact) {
        const LogScalar z_rest =
            znorm_exact(rest_density_, dw_, dim_ - k_, u_rest);
        if (z_rest.is_zero()) {
            return 0.0;
        }
        log_ratio = z_rest.log() - log_z_full_;
    } else {
        MixtureParams params;
        params.sigma_N_sq = sigma_sq_;
        const LogScalar z_rest =
            znorm_asymptotic(params, dim_ - k_, u_rest);
        const LogScalar z_full =
            znorm_asymptotic(params, dim_, static_cast<double>(dim_));
        log_ratio = z_rest.log() - z_full.log();
    }
    return std::exp(prefactor + log_ratio + log_f);
}

double marginal_conditioned_tensor(const DensityFamily& family, int k,
                                   const Eigen::VectorXd& v,
                                   MarginalMode mode) {
    return ConditionedMarginal(family, k, mode).value(v);
}

double marginal_polynomial(int N, int k, const Eigen::VectorXd& v,
                           PolyPower power) {
    const double prefactor = marginal_prefactor_log(N, k, v);
    if (prefactor == kNegInf) {
        return 0.0;
    }
    const double m = power.is_varying ? static_cast<double>(N) : power.m;
    if (!(m > 0.0)) {
        throw std::invalid_argument(
            "marginal_polynomial: the power must be positive");
    }
    const double u_rest = static_cast<double>(N) - v.squaredNorm();
    LogScalar observed = LogScalar::zero();
    for (int i = 0; i < k; ++i) {
        const double a = std::abs(v(i));
        if (a > 0.0) {
            observed = observed + LogScalar::from_log(m * std::log(a));
        }
    }
    observed =
        observed +
        LogScalar::from_log(std::log(static_cast<double>(N - k)) +
                            moment_integral_log(N - k, std::sqrt(u_rest), m));
    return std::exp(prefactor + observed.log() - zpoly(N, power).log());
}

ChaoticityResult chaoticity_gap(const DensityFamily& family, int k,
                                const GridSpec& spec) {
    check_marginal_order("chaoticity_gap", family.dim, k);
    if (!family.claimed_limit) {
        throw std::invalid_argument("chaoticity_gap: family '" + family.name +
                                    "' claims no limit law");
    }
    if (k > 2) {
        throw std::invalid_argument(
            "chaoticity_gap: only k = 1 and k = 2 windows are supported");
    }
    if (family.route == MarginalRoute::histogram) {
        return histogram_gap(family, k, spec);
    }

    const int N = family.dim;
    std::shared_ptr<ConditionedMarginal> conditioned;
    std::function<double(const Eigen::VectorXd&)> evaluate;
    switch (family.route) {
        case MarginalRoute::prefactor_only:
            evaluate = [N, k](const Eigen::VectorXd& v) {
                const double lp = marginal_prefactor_log(N, k, v);
                return lp == kNegInf ? 0.0 : std::exp(lp);
            };
            break;
        case MarginalRoute::conditioned:
            conditioned =
                std::make_shared<ConditionedMarginal>(family, k, spec.mode);
            evaluate = [conditioned](const Eigen::VectorXd& v) {
                return conditioned->value(v);
            };
            break;
        case MarginalRoute::polynomial:
            if (!family.power) {
                throw std::invalid_argument("chaoticity_gap: family '" +
                                            family.name +
                                            "' carries no power rule");
            }
            evaluate = [N, k, power = *family.power](const Eigen::VectorXd& v) {
                return marginal_polynomial(N, k, v, power);
            };
            break;
        default:
            break;
    }

    const int n = spec.points_per_axis > 0 ? spec.points_per_axis
                                           : (k == 1 ? 161 : 41);
    if (n < 2) {
        throw std::invalid_argument(
            "chaoticity_gap: need at least two points per axis");
    }
    double lo = spec.lo;
    double hi = spec.hi;
    if (!(lo < hi)) {
        const double w = (k == 1) ? 4.0 : 3.0;
        lo = -w;
        hi = w;
    }
    const Eigen::VectorXd axis = linspace(lo, hi, n);
    const Density1D& limit = *family.claimed_limit;

    MarginalGrid grid;
    grid.k = k;
    grid.N = N;
    const int rows = (k == 1) ? n : n * n;
    grid.points.resize(rows, k);
    grid.values.resize(rows);
    grid.limit_values.resize(rows);
    grid.std_errors = Eigen::VectorXd::Zero(rows);
    Eigen::VectorXd v(k);
    for (int r = 0; r < rows; ++r) {
        if (k == 1) {
            v(0) = axis(r);
        } else {
            v(0) = axis(r / n);
            v(1) = axis(r % n);
        }
        grid.points.row(r) = v.transpose();
        grid.values(r) = evaluate(v);
        grid.limit_values(r) = limit_product(limit, v);
    }

    ChaoticityResult result;
    result.sup_gap = (grid.values - grid.limit_values).cwiseAbs().maxCoeff();
    if (k == 1) {
        QuadratureOptions options;
        options.abs_tol = 1e-9;
        options.rel_tol = 1e-7;
        const auto gap = [&evaluate, &limit](double x) {
            Eigen::VectorXd point(1);
            point(0) = x;
            const double log_limit = limit.log_eval(x);
            const double reference =
                log_limit == kNegInf ? 0.0 : std::exp(log_limit);
            return std::abs(evaluate(point) - reference);
        };
        result.l1_gap = integrate_adaptive(gap, lo, hi, options).value;
    } else {
        const double h = axis(1) - axis(0);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double weight =
                    ((i == 0 || i == n - 1) ? 0.5 : 1.0) *
                    ((j == 0 || j == n - 1) ? 0.5 : 1.0);
                acc += weight * std::abs(grid.values(i * n + j) -
                                         grid.limit_values(i * n + j));
            }
        }
        result.l1_gap = acc * h * h;
    }
    result.grid = std::move(grid);
    return result;
}

void write_marginal_csv(const MarginalGrid& grid, std::ostream& out) {
    out << (grid.k == 2 ? "k,N,v1,v2,pi_k,limit,abs_gap"
                        : "k,N,v1,pi_k,limit,abs_gap")
        << '\n';
    for (Eigen::Index r = 0; r < grid.points.rows(); ++r) {
        out << grid.k << ',' << grid.N;
        for (int i = 0; i < grid.k; ++i) {
            out << ',' << format_value(grid.points(r, i));
        }
        const double gap = std::abs(grid.values(r) - grid.limit_values(r));
        out << ',' << format_value(grid.values(r)) << ','
            << format_value(grid.limit_values(r)) << ',' << format_value(gap)
            << '\n';
    }
}

}  // namespace kaclab
