#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "kaclab/density1d.hpp"
#include "kaclab/entropy.hpp"
#include "kaclab/families.hpp"
#include "kaclab/log_scalar.hpp"
#include "kaclab/marginals.hpp"
#include "kaclab/normalization.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/rng.hpp"
#include "kaclab/specfun.hpp"
#include "kaclab/sphere.hpp"
#include "kaclab/statistics.hpp"

using kaclab::Density1D;
using kaclab::DensityFamily;
using kaclab::EntropyEstimate;
using kaclab::EntropyReport;
using kaclab::EntropyStrategy;
using kaclab::MarginalMode;
using kaclab::SpherePoint;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kInf = std::numeric_limits<double>::infinity();
const double kNegInf = -kInf;

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double rel_tol = 1e-9) {
    kaclab::QuadratureOptions opts;
    opts.abs_tol = 1e-12;
    opts.rel_tol = rel_tol;
    return kaclab::integrate_or_throw(f, lo, hi, opts);
}

/// Exact rejection sampler from the uniform proposal, valid because the
/// one-dimensional factor is maximal at the origin so dim * log f(0) caps
/// the log density of any conditioned tensorization.
DensityFamily with_rejection_sampler(DensityFamily family) {
    const auto log_density = family.log_density;
    const int dim = family.dim;
    const double radius = std::sqrt(static_cast<double>(dim));
    const double log_cap = dim * family.base_density->log_eval(0.0) - family.log_znorm.log();
    family.exact_sampler = [log_density, dim, radius, log_cap](kaclab::RngStream& rng) {
        for (;;) {
            SpherePoint p = kaclab::sample_uniform(dim, radius, rng);
            if (std::log(rng.uniform01()) < log_density(p) - log_cap) return p;
        }
    };
    return family;
}

}  // namespace

TEST_CASE("gaussian entropy integrals hit their closed forms") {
    const Density1D gauss = kaclab::make_gaussian(1.0);
    const Density1D half = kaclab::make_gaussian(0.5);

    CHECK(std::fabs(kaclab::rel_entropy_1d(gauss, gauss)) <= 1e-10);
    CHECK(kaclab::rel_entropy_1d(half, gauss) ==
          doctest::Approx(0.5 * std::log(2.0) - 0.25).epsilon(1e-9));

    for (double a : {0.25, 0.5, 1.0, 2.0}) {
        const Density1D m_a = kaclab::make_gaussian(a);
        const double shannon = kaclab::shannon_integral(m_a);
        CHECK(shannon == doctest::Approx(-0.5 * std::log(2.0 * kPi * a) - 0.5).epsilon(1e-9));
        const double cross = shannon - kaclab::rel_entropy_1d(m_a, gauss);
        CHECK(cross == doctest::Approx(-0.5 * std::log(2.0 * kPi) - 0.5 * a).epsilon(1e-9));
    }

    CHECK(kaclab::rel_entropy_1d(kaclab::make_uniform01(), gauss) ==
          doctest::Approx(0.5 * std::log(2.0 * kPi) + 1.0 / 6.0).epsilon(1e-9));

    const Density1D bump = kaclab::make_bump();
    CHECK(kaclab::rel_entropy_1d(bump, kaclab::make_uniform01()) ==
          doctest::Approx(kaclab::shannon_integral(bump)).epsilon(1e-10));
    CHECK(kaclab::shannon_integral(bump) == doctest::Approx(1.7832).epsilon(1e-4));
}

TEST_CASE("relative entropy reports support violations as infinity") {
    const Density1D gauss = kaclab::make_gaussian(1.0);
    const Density1D u01 = kaclab::make_uniform01();
    const Density1D bump = kaclab::make_bump();

    CHECK(std::isinf(kaclab::rel_entropy_1d(gauss, u01)));
    CHECK(kaclab::rel_entropy_1d(gauss, u01) > 0.0);
    CHECK(std::isinf(kaclab::rel_entropy_1d(u01, bump)));

    CHECK(kaclab::rel_entropy_1d(kaclab::make_gaussian(2.0), gauss) >= 0.0);
    CHECK(kaclab::rel_entropy_1d(gauss, kaclab::make_gaussian(2.0)) >= 0.0);
}

TEST_CASE("uniform family entropy vanishes identically") {
    const DensityFamily uniform = kaclab::make_uniform_family(10);

    const EntropyEstimate weighted =
        kaclab::entropy_mc(uniform, 1024, EntropyStrategy::uniform_weighted, 5);
    CHECK(weighted.value == 0.0);
    CHECK(weighted.std_error == 0.0);
    CHECK(weighted.ess == doctest::Approx(1024.0).epsilon(1e-12));
    CHECK(weighted.reliable());
    CHECK(weighted.method == kaclab::EstimateMethod::uniform_weighted);

    const EntropyEstimate sampled =
        kaclab::entropy_mc(uniform, 1024, EntropyStrategy::self_sampled, 5);
    CHECK(sampled.value == 0.0);
    CHECK(sampled.std_error == 0.0);
    CHECK(sampled.ess == doctest::Approx(1024.0));
}

TEST_CASE("entropy strategies agree with each other and the reduced integral") {
    const DensityFamily mixture = kaclab::make_mixture_family(10, 0.9);

    const EntropyEstimate weighted =
        kaclab::entropy_mc(mixture, 400000, EntropyStrategy::uniform_weighted, 22);
    CHECK(weighted.ess > 100000.0);

    const DensityFamily sampled_family = with_rejection_sampler(mixture);
    const EntropyEstimate sampled =
        kaclab::entropy_mc(sampled_family, 4000, EntropyStrategy::self_sampled, 21);
    CHECK(sampled.ess == doctest::Approx(4000.0));

    const double combined = sampled.std_error + weighted.std_error;
    CHECK(std::fabs(sampled.value - weighted.value) <= 3.0 * combined);

    const double reduced = 10.0 * kaclab::entropy_mixture_reduced(10, 0.9, MarginalMode::exact);
    CHECK(reduced >= 0.0);
    CHECK(std::fabs(sampled.value - reduced) <= 3.0 * sampled.std_error);
    CHECK(std::fabs(weighted.value - reduced) <= 3.0 * weighted.std_error);
    MESSAGE("mixture N=10: weighted ", weighted.value, " +- ", weighted.std_error,
            ", sampled ", sampled.value, " +- ", sampled.std_error, ", reduced ", reduced);
}

TEST_CASE("mixture reduced entropy climbs to half log two") {
    const double target = 0.5 * std::log(2.0);
    const std::vector<int> dims = {100, 1000, 10000};
    const std::vector<double> frozen = {0.28505, 0.33239, 0.34395};

    std::vector<double> gaps;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const double h = kaclab::entropy_mixture_reduced(dims[i], 0.9, MarginalMode::asymptotic);
        CHECK(h == doctest::Approx(frozen[i]).epsilon(5e-4));
        CHECK(h < target);
        gaps.push_back(std::fabs(h - target));
    }
    CHECK(gaps[1] < gaps[0]);
    CHECK(gaps[2] < gaps[1]);

    const double limit_entropy =
        kaclab::rel_entropy_1d(kaclab::make_gaussian(0.5), kaclab::make_gaussian(1.0));
    CHECK(target == doctest::Approx(limit_entropy + 0.25).epsilon(1e-9));

    CHECK_THROWS_AS(kaclab::entropy_mixture_reduced(3, 0.9, MarginalMode::exact),
                    std::invalid_argument);
}

TEST_CASE("mixture reduced exact stays inside the measured correction envelope") {
    const int n = 100;
    const double eta = 0.9;
    const kaclab::MixtureParams params = kaclab::make_mixture_params(n, eta);
    const Density1D f = kaclab::make_mixture_1d(params);
    const DensityFamily family = kaclab::make_mixture_family(n, eta);

    const double log_r_full = kaclab::znorm_exact(*family.znorm_table, n, 100.0).log() -
                              kaclab::znorm_asymptotic(params, n, 100.0).log();
    const Eigen::ArrayXd rest = family.znorm_table->order_density(n - 1);
    const double dw = family.znorm_table->dw();
    auto rho = [&](double v) {
        const kaclab::LogScalar exact = kaclab::znorm_exact(rest, dw, n - 1, 100.0 - v * v);
        if (exact.is_zero()) return 0.0;
        const double local = kaclab::znorm_asymptotic(params, n - 1, 100.0 - v * v).log();
        return std::exp(exact.log() - local - log_r_full);
    };
    const double scale = std::sqrt(n / (n - 1.0));
    auto pi_asym = [&](double v) {
        const double gap = 1.0 - v * v;
        return scale *
               std::exp(f.log_eval(v) - gap * gap / (2.0 * (n - 1.0) * params.sigma_N_sq));
    };

    const double h_exact = kaclab::entropy_mixture_reduced(n, eta, MarginalMode::exact);
    const double h_asym = kaclab::entropy_mixture_reduced(n, eta, MarginalMode::asymptotic);
    const double identity =
        2.0 * integrate([&](double v) { return pi_asym(v) * (rho(v) - 1.0) * f.log_eval(v); },
                        0.0, 10.0, 1e-8) -
        log_r_full / n;
    CHECK(h_exact - h_asym == doctest::Approx(identity).epsilon(1e-6));

    double sup_rho = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double v = 9.99 * i / 400.0;
        sup_rho = std::max(sup_rho, std::fabs(rho(v) - 1.0));
    }
    const double abs_log =
        2.0 * integrate([&](double v) { return pi_asym(v) * std::fabs(f.log_eval(v)); }, 0.0,
                        10.0, 1e-8);
    const double envelope = sup_rho * abs_log + std::fabs(log_r_full) / n;
    CHECK(std::fabs(h_exact - h_asym) <= envelope);
    MESSAGE("N=100 correction: exact ", h_exact, ", asymptotic ", h_asym, ", envelope ",
            envelope);
}

TEST_CASE("concentration entropy closed form rises past its logarithmic floor") {
    const Density1D bump = kaclab::make_bump();
    const double bump_log_x =
        integrate([&](double x) { return bump.eval(x) * std::log(x); }, 1e-9, 0.5, 1e-8);

    const std::vector<int> dims = {10, 100, 1000, 10000};
    const std::vector<double> frozen = {1.825, 2.841, 3.320, 3.619};
    std::vector<double> per_particle;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const double eps = 1.0 / std::log(dims[i] + std::exp(1.0));
        const double h = kaclab::entropy_concentration_exact(dims[i], bump, eps) / dims[i];
        CHECK(h == doctest::Approx(frozen[i]).epsilon(2e-3));
        per_particle.push_back(h);
        const double floor = -std::log(eps) - std::log(2.0) - bump_log_x - 1.0;
        if (dims[i] >= 1000) CHECK(h > floor);
    }
    CHECK(std::is_sorted(per_particle.begin(), per_particle.end()));
    CHECK(per_particle.front() < per_particle.back());

    for (double eps : {0.1, 0.01}) {
        const Density1D scaled = kaclab::scale_density(bump, eps);
        CHECK(kaclab::shannon_integral(scaled) ==
              doctest::Approx(kaclab::shannon_integral(bump) - std::log(eps)).epsilon(1e-8));

        const double sin_term = integrate(
            [&](double xi) {
                const double l = scaled.log_eval(xi);
                return l == kNegInf ? 0.0 : std::exp(l) * std::log(std::sin(xi));
            },
            scaled.quad_range.lo, scaled.quad_range.hi, 1e-10);
        CHECK(sin_term <= std::log(eps) + bump_log_x);
    }

    CHECK_THROWS_AS(kaclab::entropy_concentration_exact(10, bump, 0.5 * kPi),
                    std::invalid_argument);
    CHECK_THROWS_AS(kaclab::entropy_concentration_exact(10, bump, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(kaclab::entropy_concentration_exact(2, bump, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(kaclab::entropy_concentration_exact(10, kaclab::make_uniform01(), 0.1),
                    std::invalid_argument);
}

TEST_CASE("stereographic entropy splits into chart terms plus a sampled mean") {
    const Density1D u01 = kaclab::make_uniform01();

    const kaclab::StereoEntropy flat = kaclab::entropy_stereo(10, u01, 0.0, 40000, 7);
    CHECK(flat.deterministic_part ==
          doctest::Approx(kaclab::sphere_log_area(10) - 9.0 * std::log(2.0 * std::sqrt(10.0)))
              .epsilon(1e-8));
    const double mc_mean = (flat.estimate.value - flat.deterministic_part) / 9.0;
    CHECK(mc_mean >= std::log(10.0));
    CHECK(mc_mean <= std::log(20.0));
    CHECK(flat.lower_bound == doctest::Approx(flat.estimate.value - std::log(10.0)));
    CHECK(flat.estimate.ess == doctest::Approx(40000.0));
    CHECK(flat.estimate.method == kaclab::EstimateMethod::self_sampled);

    std::vector<double> per_particle;
    for (int n : {100, 1000}) {
        const double beta = std::sqrt(static_cast<double>(n));
        const kaclab::StereoEntropy s = kaclab::entropy_stereo(n, u01, beta, 20000, 9);
        const double lb = s.lower_bound / n;
        CHECK(lb > std::log(1.0 + (beta - 1.0) * (beta - 1.0)) - 2.0);
        per_particle.push_back(lb);
    }
    CHECK(per_particle[1] > per_particle[0]);

    CHECK_THROWS_AS(kaclab::entropy_stereo(2, u01, 0.0, 1000, 1), std::invalid_argument);
    CHECK_THROWS_AS(kaclab::entropy_stereo(10, u01, kInf, 1000, 1), std::invalid_argument);
    CHECK_THROWS_AS(kaclab::entropy_stereo(10, kaclab::make_gaussian(1.0), 0.0, 1000, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(kaclab::entropy_stereo(10, u01, 0.0, 8, 1), std::invalid_argument);
}

TEST_CASE("varying power entropy bound is sharp and monotone") {
    CHECK(kaclab::entropy_poly_bound(100) == doctest::Approx(0.29246).epsilon(1e-4));
    CHECK(kaclab::entropy_poly_bound(10000) == doctest::Approx(0.34557).epsilon(1e-4));

    const double target = 0.5 * std::log(2.0);
    double previous = -kInf;
    for (int n : {20, 100, 1000, 10000, 100000}) {
        const double bound = kaclab::entropy_poly_bound(n);
        CHECK(bound < target);
        CHECK(bound > previous);
        previous = bound;
    }
    CHECK(std::fabs(kaclab::entropy_poly_bound(10000) - target) < 0.02);

    const double alpha = 2.0 / std::log(2.0);
    const double floor = -1.0 / (alpha * std::exp(1.0));
    for (int i = 1; i <= 10000; ++i) {
        const double t = static_cast<double>(i) / 10000.0;
        CHECK(std::pow(t, alpha) * std::log(t) >= floor - 1e-15);
    }

    CHECK_THROWS_AS(kaclab::entropy_poly_bound(3), std::invalid_argument);
}

TEST_CASE("fixed power entropy bound collapses at the quadratic power") {
    for (int n : {10, 100, 1000}) CHECK(kaclab::entropy_poly_fixed_bound(n, 2.0) == 0.0);

    std::vector<double> per_particle;
    for (int n : {100, 1000, 10000}) {
        const double b = kaclab::entropy_poly_fixed_bound(n, 4.0) / n;
        CHECK(b > 0.0);
        per_particle.push_back(b);
    }
    CHECK(per_particle[1] < per_particle[0]);
    CHECK(per_particle[2] < per_particle[1]);
    CHECK(per_particle.back() < 1e-3);

    const DensityFamily quartic = kaclab::make_polynomial_family(20, kaclab::poly_fixed(4.0));
    const EntropyEstimate est =
        kaclab::entropy_mc(quartic, 40000, EntropyStrategy::self_sampled, 15);
    CHECK(est.value >= -3.0 * est.std_error);
    CHECK(est.value <= kaclab::entropy_poly_fixed_bound(20, 4.0) + 3.0 * est.std_error);

    CHECK_THROWS_AS(kaclab::entropy_poly_fixed_bound(3, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(kaclab::entropy_poly_fixed_bound(10, 0.0), std::invalid_argument);
}

TEST_CASE("varying power family clears its entropy floor by sampling") {
    const DensityFamily poly = kaclab::make_polynomial_family(20, kaclab::poly_varying());
    const EntropyEstimate est =
        kaclab::entropy_mc(poly, 100000, EntropyStrategy::self_sampled, 11);
    const double bound = kaclab::entropy_poly_bound(20);
    CHECK(est.value / 20.0 >= bound - 3.0 * est.std_error / 20.0);

    EntropyReport report;
    report.family = poly.name;
    report.N = 20;
    report.estimate = est;
    report.h_per_particle = est.value / 20.0;
    report.bound_lower = bound;
    CHECK(kaclab::entropy_bound_respected(report));
    MESSAGE("poly varying N=20: H/N = ", est.value / 20.0, " vs bound ", bound);
}

TEST_CASE("convexity bounds sandwich the mixed family entropy") {
    const kaclab::ConvexEntropyBounds anchor = kaclab::entropy_convex_bounds(0.0, 0.0, 0.5);
    CHECK(anchor.upper == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(anchor.lower == doctest::Approx(-std::log(2.0)).epsilon(1e-12));

    for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const kaclab::ConvexEntropyBounds b = kaclab::entropy_convex_bounds(1.3, 0.4, alpha);
        CHECK(b.lower <= b.upper);
        CHECK(b.upper - b.lower <= std::log(2.0) + 1e-12);
    }

    CHECK_THROWS_AS(kaclab::entropy_convex_bounds(0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(kaclab::entropy_convex_bounds(0.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(kaclab::entropy_convex_bounds(kInf, 0.0, 0.5), std::invalid_argument);

    const DensityFamily uniform = kaclab::make_uniform_family(20);
    const DensityFamily poly = kaclab::make_polynomial_family(20, kaclab::poly_varying());
    const EntropyEstimate h_f = kaclab::entropy_mc(poly, 100000, EntropyStrategy::self_sampled, 13);
    const DensityFamily mixed = kaclab::make_convex_combination(uniform, poly, 0.3);
    const EntropyEstimate h_c =
        kaclab::entropy_mc(mixed, 100000, EntropyStrategy::self_sampled, 14);

    const kaclab::ConvexEntropyBounds bounds = kaclab::entropy_convex_bounds(0.0, h_f.value, 0.3);
    const double slack = 3.0 * (h_c.std_error + 0.3 * h_f.std_error);
    CHECK(h_c.value >= bounds.lower - slack);
    CHECK(h_c.value <= bounds.upper + slack);
}

TEST_CASE("entropy dominates squared total variation") {
    CHECK(kaclab::cklp_check(0.0, 0.0));
    CHECK(kaclab::cklp_check(1.0, 0.5));
    CHECK_FALSE(kaclab::cklp_check(1.1, 0.5));
    CHECK(kaclab::cklp_check(1.1, 0.5, 0.25));
    CHECK_THROWS_AS(kaclab::cklp_check(-0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(kaclab::cklp_check(2.1, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(kaclab::cklp_check(0.5, -0.1), std::invalid_argument);

    const DensityFamily poly = kaclab::make_polynomial_family(20, kaclab::poly_varying());
    const auto log_density = poly.log_density;
    const EntropyEstimate tv = kaclab::estimate_mean(
        [&](const SpherePoint& p) { return std::fabs(std::exp(log_density(p)) - 1.0); },
        [&](kaclab::RngStream& rng) { return kaclab::sample_uniform(20, std::sqrt(20.0), rng); },
        200000, 8, 31);
    const EntropyEstimate h = kaclab::entropy_mc(poly, 100000, EntropyStrategy::self_sampled, 11);
    const double tolerance = 6.0 * (2.0 * tv.value * tv.std_error + 2.0 * h.std_error);
    CHECK(kaclab::cklp_check(std::min(tv.value, 2.0), std::max(h.value, 0.0), tolerance));

    const DensityFamily mixture = kaclab::make_mixture_family(100, 0.9);
    kaclab::GridSpec spec;
    spec.mode = MarginalMode::asymptotic;
    const kaclab::ChaoticityResult gap = kaclab::chaoticity_gap(mixture, 1, spec);
    const double h_total = 100.0 * kaclab::entropy_mixture_reduced(100, 0.9, MarginalMode::exact);
    CHECK(kaclab::cklp_check(gap.l1_gap, h_total));
    MESSAGE("mixture N=100 surrogate: tv ", gap.l1_gap, " vs sqrt(2H) ",
            std::sqrt(2.0 * h_total));
}

TEST_CASE("degenerate weights flag the estimate instead of failing") {
    const DensityFamily caps = kaclab::make_concentration_family(20, kaclab::make_bump(), 0.1);
    const EntropyEstimate est =
        kaclab::entropy_mc(caps, 20000, EntropyStrategy::uniform_weighted, 3);
    CHECK(est.ess < 100.0);
    CHECK_FALSE(est.reliable());
    CHECK(est.value == 0.0);
    CHECK(est.std_error == 0.0);
}

TEST_CASE("entropy reports serialize to csv rows") {
    EntropyReport report;
    report.family = "tensor:mixture:eta=0.9";
    report.N = 10;
    report.estimate.value = 1.5;
    report.estimate.std_error = 0.02;
    report.estimate.method = kaclab::EstimateMethod::self_sampled;
    report.estimate.ess = 4000.0;
    report.h_per_particle = 0.15;
    report.target = 0.5 * std::log(2.0);
    report.bound_lower = 0.1;

    std::ostringstream out;
    kaclab::write_entropy_csv_header(out);
    kaclab::write_entropy_csv_row(report, out);
    CHECK(out.str() ==
          "family,N,method,h_per_particle,std_error_per_particle,target,bound_lower,ess\n"
          "tensor:mixture:eta=0.9,10,self-sampled,0.15,0.002,0.34657359028,0.1,4000\n");

    EntropyReport closed;
    closed.family = "concentration:eps=auto";
    closed.N = 100;
    closed.estimate.value = 284.1;
    closed.estimate.method = kaclab::EstimateMethod::closed_form;
    closed.h_per_particle = 2.841;
    std::ostringstream bare;
    kaclab::write_entropy_csv_row(closed, bare);
    CHECK(bare.str() == "concentration:eps=auto,100,closed-form,2.841,0,,,0\n");

    std::ostringstream again;
    kaclab::write_entropy_csv_header(again);
    kaclab::write_entropy_csv_row(report, again);
    CHECK(again.str() == out.str());
}

TEST_CASE("reports respect their lower bounds only within three sigma") {
    EntropyReport report;
    report.N = 10;
    report.estimate.value = 1.0;
    report.estimate.std_error = 0.01;
    report.estimate.method = kaclab::EstimateMethod::self_sampled;
    CHECK(kaclab::entropy_bound_respected(report));

    report.bound_lower = 0.099;
    CHECK(kaclab::entropy_bound_respected(report));
    report.bound_lower = 0.2;
    CHECK_FALSE(kaclab::entropy_bound_respected(report));

    report.estimate.method = kaclab::EstimateMethod::closed_form;
    CHECK(kaclab::entropy_bound_respected(report));
}

TEST_CASE("entropy monte carlo validates its inputs") {
    const DensityFamily mixture = kaclab::make_mixture_family(10, 0.9);
    CHECK_THROWS_AS(kaclab::entropy_mc(mixture, 8, EntropyStrategy::uniform_weighted, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(kaclab::entropy_mc(mixture, 1000, EntropyStrategy::self_sampled, 1),
                    std::invalid_argument);

    DensityFamily hollow;
    hollow.dim = 10;
    CHECK_THROWS_AS(kaclab::entropy_mc(hollow, 1000, EntropyStrategy::uniform_weighted, 1),
                    std::invalid_argument);
    hollow.dim = 2;
    hollow.log_density = [](const SpherePoint&) { return 0.0; };
    CHECK_THROWS_AS(kaclab::entropy_mc(hollow, 1000, EntropyStrategy::uniform_weighted, 1),
                    std::invalid_argument);
}
