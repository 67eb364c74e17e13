#include "kaclab/sphere.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kaclab/quadrature.hpp"
#include "kaclab/specfun.hpp"

namespace kaclab {

namespace {

struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n) {
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

double ball_weight_log_prefactor(int N, int j, double R) {
    return sphere_log_area(N - j) - sphere_log_area(N) + (2.0 - N) * std::log(R);
}

double boundary_power(double r2_minus_s, double expo) {
    if (r2_minus_s <= 0.0) return 0.0;
    return std::pow(r2_minus_s, expo);
}

SpherePoint embed_head(const Eigen::VectorXd& head, double inner_radius, int N, double R) {
    SpherePoint p;
    p.dim = N;
    p.radius = R;
    p.coords = Eigen::VectorXd::Zero(N);
    p.coords.head(head.size()) = head;
    p.coords(head.size()) = inner_radius;
    return p;
}

}  // namespace

SpherePoint make_sphere_point(Eigen::VectorXd coords, double radius) {
    if (coords.size() < 2) throw std::invalid_argument("SpherePoint: need dim >= 2");
    if (!(radius > 0.0)) throw std::invalid_argument("SpherePoint: radius must be positive");
    double s = coords.squaredNorm();
    if (std::abs(s - radius * radius) > 1e-10 * radius * radius)
        throw std::invalid_argument("SpherePoint: coordinates violate the sphere constraint");
    SpherePoint p;
    p.dim = static_cast<int>(coords.size());
    p.radius = radius;
    p.coords = std::move(coords);
    return p;
}

SpherePoint sample_uniform(int N, double R, RngStream& rng) {
    if (N < 2) throw std::invalid_argument("sample_uniform: need N >= 2");
    if (!(R > 0.0)) throw std::invalid_argument("sample_uniform: radius must be positive");
    Eigen::VectorXd z(N);
    double norm = 0.0;
    do {
        for (int i = 0; i < N; ++i) z(i) = rng.normal();
        norm = z.norm();
    } while (norm == 0.0);
    SpherePoint p;
    p.dim = N;
    p.radius = R;
    p.coords = z * (R / norm);
    return p;
}

double fubini_reduce(const std::function<double(const SpherePoint&)>& F, int N, double R,
                     int j, const InnerAverage& inner) {
    if (j < 1 || j > N - 2) throw std::invalid_argument("fubini_reduce: need 1 <= j <= N-2");
    if (j > 3) throw std::invalid_argument("fubini_reduce: only j <= 3 is supported");
    if (!(R > 0.0)) throw std::invalid_argument("fubini_reduce: radius must be positive");

    double log_pref = ball_weight_log_prefactor(N, j, R);
    double pref = std::exp(log_pref);
    double expo = 0.5 * (N - j - 2);
    double R2 = R * R;

    auto averaged = [&](const Eigen::VectorXd& head, double r) {
        if (inner) return inner(head, r);
        return F(embed_head(head, r, N, R));
    };

    if (j == 1) {
        auto integrand = [&](double v) {
            double rem = R2 - v * v;
            double w = pref * boundary_power(rem, expo);
            if (w == 0.0) return 0.0;
            Eigen::VectorXd head(1);
            head(0) = v;
            return w * averaged(head, std::sqrt(rem));
        };
        return integrate_or_throw(integrand, -R, R);
    }

    if (j == 2) {
        QuadratureOptions inner_opts;
        inner_opts.abs_tol = 1e-12;
        inner_opts.rel_tol = 1e-9;
        auto outer = [&](double v1) {
            double rem1 = R2 - v1 * v1;
            if (rem1 <= 0.0) return 0.0;
            double lim = std::sqrt(rem1);
            auto inner_fn = [&](double v2) {
                double rem = rem1 - v2 * v2;
                double w = pref * boundary_power(rem, expo);
                if (w == 0.0) return 0.0;
                Eigen::VectorXd head(2);
                head << v1, v2;
                return w * averaged(head, std::sqrt(rem));
            };
            return integrate_adaptive(inner_fn, -lim, lim, inner_opts).value;
        };
        return integrate_or_throw(outer, -R, R);
    }

    static const GaussLegendre polar = gauss_legendre(16);
    const int n_azimuth = 32;
    auto radial = [&](double rho) {
        double rem = R2 - rho * rho;
        double w = pref * boundary_power(rem, expo);
        if (w == 0.0) return 0.0;
        double r = std::sqrt(rem);
        double shell_avg = 0.0;
        for (int iu = 0; iu < 16; ++iu) {
            double u = polar.nodes[iu];
            double su = std::sqrt(std::max(0.0, 1.0 - u * u));
            double ring = 0.0;
            for (int ia = 0; ia < n_azimuth; ++ia) {
                double phi = 2.0 * M_PI * (ia + 0.5) / n_azimuth;
                Eigen::VectorXd head(3);
                head << rho * su * std::cos(phi), rho * su * std::sin(phi), rho * u;
                ring += averaged(head, r);
            }
            shell_avg += polar.weights[iu] * ring / n_azimuth;
        }
        shell_avg *= 0.5;
        return 4.0 * M_PI * rho * rho * w * shell_avg;
    };
    return integrate_or_throw(radial, 0.0, R);
}

double elevation_integral(const std::function<double(double)>& g, int k, double R) {
    if (k < 3) throw std::invalid_argument("elevation_integral: need k >= 3");
    if (!(R > 0.0)) throw std::invalid_argument("elevation_integral: radius must be positive");
    double log_pref = log_gamma(0.5 * k) - log_gamma(0.5 * (k - 1)) - 0.5 * std::log(M_PI);
    auto integrand = [&](double phi) {
        return g(phi) * std::pow(std::sin(phi), k - 2);
    };
    return std::exp(log_pref) * integrate_or_throw(integrand, 0.0, M_PI);
}

SpherePoint stereo_forward(const EuclideanPoint& x, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("stereo_forward: radius must be positive");
    int n = static_cast<int>(x.size());
    double s2 = x.squaredNorm();
    double denom = R * R + s2;
    SpherePoint p;
    p.dim = n + 1;
    p.radius = R;
    p.coords.resize(n + 1);
    p.coords.head(n) = (2.0 * R * R / denom) * x;
    p.coords(n) = R * (R * R - s2) / denom;
    return p;
}

EuclideanPoint stereo_inverse(const SpherePoint& v, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("stereo_inverse: radius must be positive");
    int n = v.dim - 1;
    double last = v.coords(n);
    if (last <= -R + 1e-9 * R)
        throw std::domain_error("stereo_inverse: point too close to the south pole");
    return (R / (R + last)) * v.coords.head(n);
}

double stereo_log_jacobian(const EuclideanPoint& x, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("stereo_log_jacobian: radius must be positive");
    double n = static_cast<double>(x.size());
    return n * std::log(2.0 * R * R / (R * R + x.squaredNorm()));
}

}  // namespace kaclab
