#include "kaclab/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "kaclab/quadrature.hpp"
#include "kaclab/specfun.hpp"

namespace kaclab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

void check_dim(const char* who, int dim) {
    if (dim < 3) {
        throw std::invalid_argument(std::string(who) + ": dim must be >= 3");
    }
}

double fourth_moment(const Density1D& f) {
    const auto integrand = [&f](double x) { return x * x * x * x * f.eval(x); };
    const QuadratureResult res =
        integrate_adaptive(integrand, f.quad_range.lo, f.quad_range.hi);
    if (!res.converged || !std::isfinite(res.value)) {
        throw std::domain_error("make_conditioned_tensor: fourth moment of '" +
                                f.name + "' did not converge");
    }
    return res.value;
}

/// Streaming log-sum-exp accumulator; all-(-inf) inputs yield -inf.
class LogSumExp {
  public:
    void add(double t) {
        if (t == kNegInf) {
            return;
        }
        if (t <= peak_) {
            acc_ += std::exp(t - peak_);
        } else {
            acc_ = acc_ * std::exp(peak_ - t) + 1.0;
            peak_ = t;
        }
    }

    double value() const {
        return peak_ == kNegInf ? kNegInf : peak_ + std::log(acc_);
    }

  private:
    double peak_ = kNegInf;
    double acc_ = 0.0;
};

/// Point with coordinate `axis` set to anchor and the remaining mass spread
/// uniformly over the orthogonal directions.
SpherePoint embed_with_axis(int dim, double radius, int axis, double anchor,
                            double minor_radius, RngStream& rng) {
    Eigen::VectorXd w(dim - 1);
    double norm_sq = 0.0;
    do {
        for (int j = 0; j < dim - 1; ++j) {
            w(j) = rng.normal();
        }
        norm_sq = w.squaredNorm();
    } while (!(norm_sq > 0.0));
    const double scale = minor_radius / std::sqrt(norm_sq);
    Eigen::VectorXd coords(dim);
    int pos = 0;
    for (int j = 0; j < dim; ++j) {
        coords(j) = (j == axis) ? anchor : scale * w(pos++);
    }
    return make_sphere_point(std::move(coords), radius);
}

std::function<double(RngStream&)> sampler_or_inverse_cdf(const Density1D& f) {
    if (f.sampler) {
        return f.sampler;
    }
    return make_inverse_cdf_sampler(f.log_eval, f.support);
}

}  // namespace

DensityFamily make_uniform_family(int dim) {
    check_dim("make_uniform_family", dim);
    DensityFamily fam;
    fam.name = "uniform";
    fam.dim = dim;
    fam.route = MarginalRoute::prefactor_only;
    fam.log_density = [](const SpherePoint&) { return 0.0; };
    const double radius = std::sqrt(static_cast<double>(dim));
    fam.exact_sampler = [dim, radius](RngStream& rng) {
        return sample_uniform(dim, radius, rng);
    };
    fam.claimed_limit = make_gaussian(1.0);
    return fam;
}

DensityFamily make_conditioned_tensor(const Density1D& f, int dim,
                                      const ZnormAccessor& znorm,
                                      int n_points) {
    check_dim("make_conditioned_tensor", dim);
    validate_density(f);
    const double m4 = fourth_moment(f);

    DensityFamily fam;
    fam.name = "tensor(" + f.name + ")";
    fam.dim = dim;
    fam.route = MarginalRoute::conditioned;
    fam.base_density = f;
    fam.base_sigma_sq = m4 - f.second_moment * f.second_moment;
    fam.parameters["m2"] = f.second_moment;
    fam.parameters["m4"] = m4;
    fam.znorm_table =
        std::make_shared<const SquaredLawTable>(f, dim, 0.0, n_points);

    const double u = static_cast<double>(dim);
    fam.log_znorm =
        znorm ? znorm(f, dim, u) : znorm_exact(*fam.znorm_table, dim, u);
    if (fam.log_znorm.is_zero()) {
        throw std::domain_error(
            "make_conditioned_tensor: normalization of '" + f.name +
            "' vanishes at the sphere radius");
    }

    const double log_z = fam.log_znorm.log();
    const auto log_eval = f.log_eval;
    fam.log_density = [log_eval, log_z](const SpherePoint& p) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < p.coords.size(); ++i) {
            const double term = log_eval(p.coords(i));
            if (term == kNegInf) {
                return kNegInf;
            }
            acc += term;
        }
        return acc - log_z;
    };

    if (std::abs(f.second_moment - 1.0) <= 1e-9) {
        fam.claimed_limit = f;
    }
    return fam;
}

DensityFamily make_mixture_family(int dim, double eta,
                                  const ZnormAccessor& znorm, int n_points) {
    const MixtureParams params = make_mixture_params(dim, eta);
    DensityFamily fam =
        make_conditioned_tensor(make_mixture_1d(params), dim, znorm, n_points);
    fam.name = "mixture(eta=" + std::to_string(eta) + ")";
    fam.base_sigma_sq = params.sigma_N_sq;
    fam.claimed_limit = make_gaussian(0.5);
    fam.parameters["eta"] = eta;
    fam.parameters["delta"] = params.delta_N;
    fam.parameters["sigma_sq"] = params.sigma_N_sq;
    return fam;
}

DensityFamily make_polynomial_family(int dim, PolyPower power) {
    check_dim("make_polynomial_family", dim);
    if (!power.is_varying && !(power.m > 0.0)) {
        throw std::invalid_argument(
            "make_polynomial_family: fixed power m must be positive");
    }
    const double m = power.is_varying ? static_cast<double>(dim) : power.m;
    const double radius = std::sqrt(static_cast<double>(dim));

    DensityFamily fam;
    fam.name = power.is_varying
                   ? std::string("poly(varying)")
                   : "poly(m=" + std::to_string(power.m) + ")";
    fam.dim = dim;
    fam.route = MarginalRoute::polynomial;
    fam.power = power;
    fam.log_znorm = zpoly(dim, power);
    fam.parameters["m"] = m;
    fam.parameters["varying"] = power.is_varying ? 1.0 : 0.0;

    const double log_zfrak = fam.log_znorm.log();
    fam.log_density = [m, log_zfrak](const SpherePoint& p) {
        const double amax = p.coords.cwiseAbs().maxCoeff();
        if (!(amax > 0.0)) {
            return kNegInf;
        }
        double acc = 0.0;
        for (Eigen::Index i = 0; i < p.coords.size(); ++i) {
            acc += std::pow(std::abs(p.coords(i)) / amax, m);
        }
        return m * std::log(amax) + std::log(acc) - log_zfrak;
    };

    const double dimd = static_cast<double>(dim);
    const auto coord_log = [m, dimd](double v) {
        const double rest = dimd - v * v;
        const double a = std::abs(v);
        if (!(rest > 0.0) || !(a > 0.0)) {
            return kNegInf;
        }
        return m * std::log(a) + 0.5 * (dimd - 3.0) * std::log(rest);
    };
    const auto coord_sampler =
        make_inverse_cdf_sampler(coord_log, Interval{-radius, radius});
    fam.exact_sampler = [dim, radius, coord_sampler](RngStream& rng) {
        const int axis = static_cast<int>(
            rng.uniform_index(static_cast<std::uint64_t>(dim)));
        const double vi = coord_sampler(rng);
        const double minor = std::sqrt(std::max(0.0, dim - vi * vi));
        return embed_with_axis(dim, radius, axis, vi, minor, rng);
    };

    fam.claimed_limit = make_gaussian(power.is_varying ? 0.5 : 1.0);
    return fam;
}

DensityFamily make_concentration_family(int dim, const Density1D& phi,
                                        double eps) {
    check_dim("make_concentration_family", dim);
    if (!(phi.support.lo >= 0.0) || !(phi.support.hi <= 0.5)) {
        throw std::invalid_argument(
            "make_concentration_family: phi must be supported inside (0, 1/2)");
    }
    if (!(eps > 0.0) || !(eps < 0.5 * kPi)) {
        throw std::invalid_argument(
            "make_concentration_family: eps must lie in (0, pi/2)");
    }
    const Density1D phi_eps = scale_density(phi, eps);
    const double radius = std::sqrt(static_cast<double>(dim));
    const double log_cap_const = log_gamma(0.5 * (dim - 1)) +
                                 0.5 * std::log(kPi) - log_gamma(0.5 * dim);
    const double log_n_poles = std::log(2.0 * dim);

    DensityFamily fam;
    fam.name = "concentration(eps=" + std::to_string(eps) + ")";
    fam.dim = dim;
    fam.route = MarginalRoute::histogram;
    fam.parameters["eps"] = eps;

    const auto phi_log = phi_eps.log_eval;
    fam.log_density = [dim, radius, log_cap_const, log_n_poles,
                       phi_log](const SpherePoint& p) {
        LogSumExp lse;
        for (int i = 0; i < dim; ++i) {
            for (const double sign : {1.0, -1.0}) {
                const double cosine =
                    std::clamp(sign * p.coords(i) / radius, -1.0, 1.0);
                const double xi = std::acos(cosine);
                const double lp = phi_log(xi);
                if (lp == kNegInf) {
                    continue;
                }
                lse.add(log_cap_const + lp - (dim - 2.0) * std::log(std::sin(xi)));
            }
        }
        const double total = lse.value();
        return total == kNegInf ? kNegInf : total - log_n_poles;
    };

    const auto elevation_sampler = sampler_or_inverse_cdf(phi_eps);
    fam.exact_sampler = [dim, radius, elevation_sampler](RngStream& rng) {
        const auto pole = rng.uniform_index(2 * static_cast<std::uint64_t>(dim));
        const int axis = static_cast<int>(pole / 2);
        const double sign = (pole % 2 == 0) ? 1.0 : -1.0;
        const double xi = elevation_sampler(rng);
        return embed_with_axis(dim, radius, axis, sign * radius * std::cos(xi),
                               radius * std::sin(xi), rng);
    };
    return fam;
}

DensityFamily make_stereographic_family(int dim, const Density1D& zeta,
                                        double beta) {
    check_dim("make_stereographic_family", dim);
    if (!(zeta.support.lo >= 0.0) || !(zeta.support.hi <= 1.0)) {
        throw std::invalid_argument(
            "make_stereographic_family: zeta must be supported inside [0, 1]");
    }
    for (const double t : {0.05, 0.15, 0.25, 0.35, 0.45}) {
        const double lo = zeta.log_eval(0.5 - t);
        const double hi = zeta.log_eval(0.5 + t);
        const bool both_zero = lo == kNegInf && hi == kNegInf;
        if (!both_zero && !(std::abs(lo - hi) <= 1e-9 * std::max(1.0, std::abs(lo)))) {
            throw std::invalid_argument(
                "make_stereographic_family: zeta must be symmetric about 1/2");
        }
    }
    if (!std::isfinite(beta)) {
        throw std::invalid_argument(
            "make_stereographic_family: beta must be finite");
    }

    const double radius = std::sqrt(static_cast<double>(dim));
    const double chart_const =
        sphere_log_area(dim) + (2.0 * dim - 2.0) * std::log(radius);

    DensityFamily fam;
    fam.name = "stereo(beta=" + std::to_string(beta) + ")";
    fam.dim = dim;
    fam.route = MarginalRoute::histogram;
    fam.parameters["beta"] = beta;

    const auto zeta_log = zeta.log_eval;
    fam.log_density = [dim, radius, chart_const, beta,
                       zeta_log](const SpherePoint& p) {
        LogSumExp lse;
        for (int i = 0; i < dim; ++i) {
            const double denom = radius + p.coords(i);
            if (denom <= 1e-9 * radius) {
                continue;
            }
            double term = chart_const - (dim - 1.0) * std::log(denom);
            for (int j = 0; j < dim && term != kNegInf; ++j) {
                if (j != i) {
                    term += zeta_log(radius * p.coords(j) / denom - beta);
                }
            }
            lse.add(term);
        }
        const double total = lse.value();
        return total == kNegInf ? kNegInf
                                : total - std::log(static_cast<double>(dim));
    };

    const auto zeta_sampler = sampler_or_inverse_cdf(zeta);
    fam.exact_sampler = [dim, radius, beta, zeta_sampler](RngStream& rng) {
        const auto axis = rng.uniform_index(static_cast<std::uint64_t>(dim));
        EuclideanPoint x(dim - 1);
        for (int j = 0; j < dim - 1; ++j) {
            x(j) = beta + zeta_sampler(rng);
        }
        SpherePoint v = stereo_forward(x, radius);
        std::swap(v.coords(static_cast<Eigen::Index>(axis)),
                  v.coords(dim - 1));
        return v;
    };
    return fam;
}

DensityFamily make_convex_combination(const DensityFamily& g,
                                      const DensityFamily& f, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument(
            "make_convex_combination: alpha must lie in (0, 1)");
    }
    if (g.dim != f.dim) {
        throw std::invalid_argument(
            "make_convex_combination: components live on different spheres");
    }

    DensityFamily fam;
    fam.name = "convex(alpha=" + std::to_string(alpha) + ";" + g.name + ";" +
               f.name + ")";
    fam.dim = g.dim;
    fam.route = MarginalRoute::histogram;
    fam.parameters["alpha"] = alpha;

    const double log_alpha = std::log(alpha);
    const double log_rest = std::log1p(-alpha);
    const auto log_g = g.log_density;
    const auto log_f = f.log_density;
    fam.log_density = [log_g, log_f, log_alpha, log_rest](const SpherePoint& p) {
        LogSumExp lse;
        lse.add(log_rest + log_g(p));
        lse.add(log_alpha + log_f(p));
        return lse.value();
    };

    if (g.exact_sampler && f.exact_sampler) {
        const auto sample_g = g.exact_sampler;
        const auto sample_f = f.exact_sampler;
        fam.exact_sampler = [sample_g, sample_f, alpha](RngStream& rng) {
            return rng.uniform01() < alpha ? sample_f(rng) : sample_g(rng);
        };
    }
    fam.claimed_limit = g.claimed_limit;
    return fam;
}

}  // namespace kaclab
