#include "kaclab/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "kaclab/density1d.hpp"
#include "kaclab/marginals.hpp"
#include "kaclab/normalization.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/rng.hpp"
#include "kaclab/specfun.hpp"
#include "kaclab/sphere.hpp"

namespace kaclab {

namespace {

const double kHalfLogTwo = 0.5 * std::log(2.0);
const double kLimitRelEntropy = kHalfLogTwo - 0.25;

std::string format_value(double x) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.12g", x);
    return buffer;
}

std::string format_fixed5(double x) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.5f", x);
    return buffer;
}

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

double parse_double(const std::string& text) {
    std::size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &consumed);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number '" + text + "'");
    }
    if (consumed != text.size())
        throw std::invalid_argument("config: bad number '" + text + "'");
    return value;
}

std::int64_t parse_integer(const std::string& text) {
    std::size_t consumed = 0;
    std::int64_t value = 0;
    try {
        value = std::stoll(text, &consumed);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer '" + text + "'");
    }
    if (consumed != text.size())
        throw std::invalid_argument("config: bad integer '" + text + "'");
    return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::uint64_t sub_seed(std::uint64_t seed, int N, int role) {
    std::uint64_t z =
        seed ^ (0x9E3779B97F4A7C15ULL *
                (static_cast<std::uint64_t>(N) * 4ULL +
                 static_cast<std::uint64_t>(role) + 1ULL));
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    return z;
}

double resolve_eps(const std::string& rule, Scenario scenario, int N) {
    std::string chosen = rule;
    if (chosen == "auto")
        chosen = scenario == Scenario::thm_convex ? "invsq" : "invlog";
    if (chosen == "invlog") return 1.0 / std::log(N + std::exp(1.0));
    if (chosen == "invsq")
        return 1.0 / (static_cast<double>(N) * static_cast<double>(N));
    throw std::invalid_argument("eps-rule: expected auto, invlog, or invsq");
}

double resolve_beta(const std::string& rule, int N) {
    if (rule == "sqrt") return std::sqrt(static_cast<double>(N));
    if (rule == "log") return std::log(static_cast<double>(N));
    throw std::invalid_argument("beta-rule: expected sqrt or log");
}

/// Log-moment of the bump profile against ln x, a fixed ingredient of the
/// concentration entropy floor.
double bump_log_moment() {
    static const double value = [] {
        const Density1D bump = make_bump();
        return integrate_or_throw(
            [&bump](double x) {
                const double l = bump.log_eval(x);
                return std::isinf(l) ? 0.0 : std::exp(l) * std::log(x);
            },
            1e-9, 0.5, QuadratureOptions{});
    }();
    return value;
}

/// Finite-N verdict on entropic chaoticity: the per-particle entropy must sit
/// within max(3 sigma, 0.02) of the limit's relative entropy to say yes, and
/// clear it by 3 sigma plus 0.05 to say no.
ChaoticityVerdict classify_chaoticity(double h, double sigma,
                                      std::optional<double> limit_entropy) {
    if (!limit_entropy) return ChaoticityVerdict::undetermined;
    if (std::fabs(h - *limit_entropy) <= std::max(3.0 * sigma, 0.02))
        return ChaoticityVerdict::yes;
    if (h - 3.0 * sigma > *limit_entropy + 0.05) return ChaoticityVerdict::no;
    return ChaoticityVerdict::undetermined;
}

struct RowProduct {
    ScenarioRow row;
    std::vector<ScenarioAssertion> asserts;
};

ScenarioAssertion cklp_assertion(int N, double tv, double sigma_tv,
                                 double h_total, double sigma_h) {
    ScenarioAssertion a;
    a.name = "cklp-N" + std::to_string(N);
    const double tv_clamped = std::clamp(tv, 0.0, 2.0);
    const double tolerance =
        6.0 * (2.0 * tv_clamped * sigma_tv + 2.0 * sigma_h);
    a.holds = h_total >= 0.0 && cklp_check(tv_clamped, h_total, tolerance);
    a.detail = "tv^2=" + format_value(tv_clamped * tv_clamped) +
               " 2H=" + format_value(2.0 * h_total) +
               " tol=" + format_value(tolerance);
    return a;
}

RowProduct mixture_row(const ScenarioConfig& c, int N, const char*& stage) {
    stage = "family";
    DensityFamily family = make_mixture_family(N, c.eta);

    stage = "entropy";
    const double h = entropy_mixture_reduced(N, c.eta, MarginalMode::asymptotic);

    stage = "chaoticity";
    GridSpec spec;
    spec.mode = MarginalMode::asymptotic;
    spec.seed = sub_seed(c.seed, N, 1);
    const ChaoticityResult gap = chaoticity_gap(family, 1, spec);

    RowProduct out;
    EntropyReport& report = out.row.report;
    report.family = "tensor:mixture:eta=" + format_value(c.eta);
    report.N = N;
    report.h_per_particle = h;
    report.estimate = {N * h, 0.0, 1, EstimateMethod::exact_reduction, 0.0};
    report.target = kHalfLogTwo;
    report.entropically_chaotic = classify_chaoticity(h, 0.0, kLimitRelEntropy);
    out.row.sup_gap = gap.sup_gap;
    out.row.l1_gap = gap.l1_gap;
    out.asserts.push_back(cklp_assertion(N, gap.l1_gap, 0.0, N * h, 0.0));
    return out;
}

RowProduct polynomial_row(const ScenarioConfig& c, int N, const char*& stage) {
    const bool varying = c.m == 0.0;
    stage = "family";
    DensityFamily family =
        make_polynomial_family(N, varying ? poly_varying() : poly_fixed(c.m));

    stage = "entropy";
    const EntropyEstimate estimate = entropy_mc(
        family, c.samples, EntropyStrategy::self_sampled, sub_seed(c.seed, N, 0));

    stage = "chaoticity";
    const ChaoticityResult gap = chaoticity_gap(family, 1);

    stage = "bound";
    RowProduct out;
    EntropyReport& report = out.row.report;
    report.family = varying ? "poly:varying" : "poly:m=" + format_value(c.m);
    report.N = N;
    report.estimate = estimate;
    report.h_per_particle = estimate.value / N;
    out.row.sup_gap = gap.sup_gap;
    out.row.l1_gap = gap.l1_gap;

    ScenarioAssertion bound_assert;
    if (varying) {
        report.target = kHalfLogTwo;
        report.bound_lower = entropy_poly_bound(N);
        report.entropically_chaotic = classify_chaoticity(
            report.h_per_particle, estimate.std_error / N, kLimitRelEntropy);
        bound_assert.name = "entropy-above-bound-N" + std::to_string(N);
        bound_assert.holds = entropy_bound_respected(report);
        bound_assert.detail = "h=" + format_value(report.h_per_particle) +
                              " bound=" + format_value(*report.bound_lower) +
                              " sigma=" + format_value(estimate.std_error / N);
    } else {
        report.target = 0.0;
        report.entropically_chaotic = classify_chaoticity(
            report.h_per_particle, estimate.std_error / N, 0.0);
        const double upper_total = entropy_poly_fixed_bound(N, c.m);
        bound_assert.name = "entropy-below-bound-N" + std::to_string(N);
        bound_assert.holds =
            estimate.value <= upper_total + 3.0 * estimate.std_error &&
            estimate.value >= -3.0 * estimate.std_error;
        bound_assert.detail = "H=" + format_value(estimate.value) +
                              " bound=" + format_value(upper_total) +
                              " sigma=" + format_value(estimate.std_error);
    }
    out.asserts.push_back(std::move(bound_assert));
    out.asserts.push_back(cklp_assertion(N, gap.l1_gap, 0.0, estimate.value,
                                         estimate.std_error));
    return out;
}

RowProduct concentration_row(const ScenarioConfig& c, int N,
                             const char*& stage) {
    stage = "family";
    const double eps = resolve_eps(c.eps_rule, c.scenario, N);
    const Density1D bump = make_bump();
    [[maybe_unused]] DensityFamily family =
        make_concentration_family(N, bump, eps);

    stage = "entropy";
    const double h_total = entropy_concentration_exact(N, bump, eps);

    stage = "bound";
    const double floor =
        -std::log(eps) - std::log(2.0) - bump_log_moment() - 1.0;

    RowProduct out;
    EntropyReport& report = out.row.report;
    report.family = "concentration:eps=" + format_value(eps);
    report.N = N;
    report.h_per_particle = h_total / N;
    report.estimate = {h_total, 0.0, 1, EstimateMethod::closed_form, 0.0};
    report.bound_lower = floor;
    return out;
}

RowProduct stereographic_row(const ScenarioConfig& c, int N,
                             const char*& stage) {
    stage = "family";
    const double beta = resolve_beta(c.beta_rule, N);
    const Density1D zeta = make_uniform01();
    [[maybe_unused]] DensityFamily family =
        make_stereographic_family(N, zeta, beta);

    stage = "entropy";
    const StereoEntropy stereo =
        entropy_stereo(N, zeta, beta, c.samples, sub_seed(c.seed, N, 0));

    stage = "bound";
    const double floor = std::log1p((beta - 1.0) * (beta - 1.0)) - 2.0;

    RowProduct out;
    EntropyReport& report = out.row.report;
    report.family = "stereo:beta=" + format_value(beta);
    report.N = N;
    report.estimate = stereo.estimate;
    report.estimate.value = stereo.lower_bound;
    report.h_per_particle = stereo.lower_bound / N;
    report.bound_lower = floor;

    ScenarioAssertion floor_assert;
    floor_assert.name = "floor-exceeded-N" + std::to_string(N);
    floor_assert.holds = entropy_bound_respected(report);
    floor_assert.detail =
        "h=" + format_value(report.h_per_particle) +
        " floor=" + format_value(floor) +
        " sigma=" + format_value(report.estimate.std_error / N);
    out.asserts.push_back(std::move(floor_assert));
    return out;
}

RowProduct convex_row(const ScenarioConfig& c, int N, const char*& stage) {
    stage = "family";
    const double eps = resolve_eps(c.eps_rule, c.scenario, N);
    const Density1D bump = make_bump();
    const double h_f_total = entropy_concentration_exact(N, bump, eps);
    const double alpha = std::min(0.5, 1.0 / std::sqrt(h_f_total / N));
    DensityFamily uniform = make_uniform_family(N);
    DensityFamily concentration = make_concentration_family(N, bump, eps);
    DensityFamily family =
        make_convex_combination(uniform, concentration, alpha);

    stage = "chaoticity";
    GridSpec spec;
    spec.histogram_samples = c.samples;
    spec.seed = sub_seed(c.seed, N, 1);
    const ChaoticityResult gap = chaoticity_gap(family, 1, spec);

    stage = "bound";
    const double lower_total = (1.0 - alpha) * std::log1p(-alpha) +
                               alpha * std::log(alpha) + alpha * h_f_total;

    RowProduct out;
    EntropyReport& report = out.row.report;
    report.family = "convex:G=uniform;F=concentration:eps=" +
                    format_value(eps) + ";alpha=" + format_value(alpha);
    report.N = N;
    report.h_per_particle = lower_total / N;
    report.estimate = {lower_total, 0.0, 1, EstimateMethod::closed_form, 0.0};
    report.bound_lower = lower_total / N;
    report.entropically_chaotic =
        classify_chaoticity(lower_total / N, 0.0, 0.0);
    out.row.sup_gap = gap.sup_gap;
    out.row.l1_gap = gap.l1_gap;

    const double cell_width =
        gap.grid.points.rows() > 1 ? gap.grid.points(1, 0) - gap.grid.points(0, 0)
                                   : 0.0;
    const double sigma_l1 = gap.grid.std_errors.sum() * cell_width;
    out.asserts.push_back(
        cklp_assertion(N, gap.l1_gap, sigma_l1, lower_total, 0.0));
    return out;
}

RowProduct build_row(const ScenarioConfig& c, int N) {
    const char* stage = "family";
    try {
        switch (c.scenario) {
            case Scenario::thm_mixture:
                return mixture_row(c, N, stage);
            case Scenario::thm_polynomial:
                return polynomial_row(c, N, stage);
            case Scenario::thm_concentration:
                return concentration_row(c, N, stage);
            case Scenario::thm_stereographic:
                return stereographic_row(c, N, stage);
            case Scenario::thm_convex:
                return convex_row(c, N, stage);
            case Scenario::verify:
                break;
        }
        throw std::logic_error("verify scenario has no per-N pipeline");
    } catch (const std::exception& e) {
        throw std::runtime_error(scenario_name(c.scenario) +
                                 ": N=" + std::to_string(N) +
                                 " stage=" + stage + ": " + e.what());
    }
}

std::string decreasing_chain(const std::vector<double>& values) {
    std::string text;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) text += " > ";
        text += format_value(values[i]);
    }
    return text;
}

ScenarioAssertion chain_assertion(const std::string& name,
                                  const std::vector<double>& values,
                                  bool increasing) {
    ScenarioAssertion a;
    a.name = name;
    a.holds = true;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const bool step_ok =
            increasing ? values[i] > values[i - 1] : values[i] < values[i - 1];
        if (!step_ok) a.holds = false;
    }
    std::string text;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) text += increasing ? " < " : " > ";
        text += format_value(values[i]);
    }
    a.detail = text;
    return a;
}

std::vector<double> collect(const std::vector<ScenarioRow>& rows,
                            const std::function<double(const ScenarioRow&)>& f) {
    std::vector<double> values;
    values.reserve(rows.size());
    for (const ScenarioRow& row : rows) values.push_back(f(row));
    return values;
}

void add_trend_assertions(const ScenarioConfig& c,
                          const std::vector<ScenarioRow>& rows,
                          ScenarioResult& result) {
    auto& asserts = result.assertions;
    switch (c.scenario) {
        case Scenario::thm_mixture: {
            asserts.push_back(chain_assertion(
                "entropy-gap-decreasing",
                collect(rows,
                        [](const ScenarioRow& r) {
                            return std::fabs(r.report.h_per_particle -
                                             kHalfLogTwo);
                        }),
                false));
            asserts.push_back(chain_assertion(
                "marginal-sup-decreasing",
                collect(rows,
                        [](const ScenarioRow& r) { return *r.sup_gap; }),
                false));
            ScenarioAssertion offset;
            offset.name = "target-offset-quarter";
            const double limit_entropy =
                rel_entropy_1d(make_gaussian(0.5), make_gaussian(1.0));
            offset.holds =
                std::fabs(kHalfLogTwo - (limit_entropy + 0.25)) <= 1e-9;
            offset.detail = "target=" + format_value(kHalfLogTwo) +
                            " limit-entropy=" + format_value(limit_entropy);
            asserts.push_back(std::move(offset));
            result.target_line = kHalfLogTwo;
            result.limit_line = kLimitRelEntropy;
            break;
        }
        case Scenario::thm_polynomial: {
            asserts.push_back(chain_assertion(
                "marginal-sup-decreasing",
                collect(rows,
                        [](const ScenarioRow& r) { return *r.sup_gap; }),
                false));
            if (c.m == 0.0) {
                result.target_line = kHalfLogTwo;
                result.limit_line = kLimitRelEntropy;
            } else {
                result.target_line = 0.0;
                result.limit_line = 0.0;
            }
            break;
        }
        case Scenario::thm_concentration: {
            asserts.push_back(chain_assertion(
                "entropy-increasing",
                collect(rows,
                        [](const ScenarioRow& r) {
                            return r.report.h_per_particle;
                        }),
                true));
            const ScenarioRow& last = rows.back();
            ScenarioAssertion floor_assert;
            floor_assert.name =
                "floor-exceeded-N" + std::to_string(last.report.N);
            floor_assert.holds =
                last.report.h_per_particle > *last.report.bound_lower;
            floor_assert.detail =
                "h=" + format_value(last.report.h_per_particle) +
                " floor=" + format_value(*last.report.bound_lower);
            asserts.push_back(std::move(floor_assert));

            const double eps =
                resolve_eps(c.eps_rule, c.scenario, last.report.N);
            const Density1D bump = make_bump();
            const double scaled = shannon_integral(scale_density(bump, eps));
            const double expected = shannon_integral(bump) - std::log(eps);
            ScenarioAssertion scale_assert;
            scale_assert.name = "scale-identity";
            scale_assert.holds = std::fabs(scaled - expected) <= 1e-8;
            scale_assert.detail = "deviation=" + format_value(scaled - expected);
            asserts.push_back(std::move(scale_assert));
            break;
        }
        case Scenario::thm_stereographic: {
            asserts.push_back(chain_assertion(
                "entropy-increasing",
                collect(rows,
                        [](const ScenarioRow& r) {
                            return r.report.h_per_particle;
                        }),
                true));
            break;
        }
        case Scenario::thm_convex: {
            asserts.push_back(chain_assertion(
                "marginal-sup-decreasing",
                collect(rows,
                        [](const ScenarioRow& r) { return *r.sup_gap; }),
                false));
            for (std::size_t i = 1; i < rows.size(); ++i) {
                const double step = rows[i].report.h_per_particle -
                                    rows[i - 1].report.h_per_particle;
                ScenarioAssertion divergence;
                divergence.name =
                    "lower-bound-divergence-N" +
                    std::to_string(rows[i - 1].report.N) + "-N" +
                    std::to_string(rows[i].report.N);
                divergence.holds = step >= 0.5;
                divergence.detail = "step=" + format_value(step);
                asserts.push_back(std::move(divergence));
            }
            break;
        }
        case Scenario::verify:
            break;
    }
}

ScenarioAssertion guarded_check(const std::string& name,
                                const std::function<std::pair<bool, std::string>()>& check) {
    ScenarioAssertion a;
    a.name = name;
    try {
        auto [holds, detail] = check();
        a.holds = holds;
        a.detail = detail;
    } catch (const std::exception& e) {
        a.holds = false;
        a.detail = std::string("error: ") + e.what();
    }
    return a;
}

std::vector<ScenarioAssertion> run_verify_battery() {
    std::vector<ScenarioAssertion> checks;

    checks.push_back(guarded_check("gamma-duplication", [] {
        double worst = 0.0;
        for (double x = 0.5; x <= 20.0; x += 0.5) {
            const double lhs = log_gamma(2.0 * x);
            const double rhs = log_gamma(x) + log_gamma(x + 0.5) +
                               (2.0 * x - 1.0) * std::log(2.0) -
                               0.5 * std::log(std::acos(-1.0));
            worst = std::max(worst,
                             std::fabs(lhs - rhs) / std::max(1.0, std::fabs(lhs)));
        }
        return std::pair{worst <= 1e-12, "max-rel-dev=" + format_value(worst)};
    }));

    checks.push_back(guarded_check("beta-integral", [] {
        double worst = 0.0;
        const double pairs[][2] = {{0.5, 1.5}, {1.0, 1.0}, {2.0, 3.0}, {3.5, 2.5}};
        for (const auto& ab : pairs) {
            const double a = ab[0];
            const double b = ab[1];
            const double quadrature = integrate_or_throw(
                [a, b](double t) {
                    return std::pow(t, a - 1.0) * std::pow(1.0 - t, b - 1.0);
                },
                0.0, 1.0, QuadratureOptions{});
            const double closed = std::exp(log_beta(a, b));
            worst = std::max(worst, std::fabs(quadrature - closed) / closed);
        }
        return std::pair{worst <= 1e-8, "max-rel-dev=" + format_value(worst)};
    }));

    checks.push_back(guarded_check("sphere-area-recursion", [] {
        double worst = 0.0;
        for (int n = 1; n <= 40; ++n) {
            const double lhs = sphere_log_area(n + 2);
            const double rhs = sphere_log_area(n) +
                               std::log(2.0 * std::acos(-1.0)) -
                               std::log(static_cast<double>(n));
            worst = std::max(worst, std::fabs(lhs - rhs));
        }
        return std::pair{worst <= 1e-12, "max-dev=" + format_value(worst)};
    }));

    checks.push_back(guarded_check("stereo-roundtrip", [] {
        const double radius = 2.0;
        Eigen::VectorXd x(3);
        x << 0.3, -1.2, 0.7;
        Eigen::VectorXd y(3);
        y << 2.5, 0.1, -0.4;
        const SpherePoint px = stereo_forward(x, radius);
        const SpherePoint py = stereo_forward(y, radius);
        double worst = (stereo_inverse(px, radius) - x).cwiseAbs().maxCoeff();
        worst = std::max(worst, std::fabs(px.coords.squaredNorm() -
                                          radius * radius));
        const double chordal = (px.coords - py.coords).squaredNorm();
        const double closed =
            4.0 * std::pow(radius, 4) * (x - y).squaredNorm() /
            ((radius * radius + x.squaredNorm()) *
             (radius * radius + y.squaredNorm()));
        worst = std::max(worst, std::fabs(chordal - closed));
        return std::pair{worst <= 1e-10, "max-dev=" + format_value(worst)};
    }));

    checks.push_back(guarded_check("squared-moment", [] {
        const double quadrature = fubini_reduce(
            [](const SpherePoint& p) {
                return p.coords(0) * p.coords(0);
            },
            5, std::sqrt(5.0), 1);
        return std::pair{std::fabs(quadrature - 1.0) <= 1e-8,
                         "value=" + format_value(quadrature)};
    }));

    checks.push_back(guarded_check("fourth-moment", [] {
        const int N = 5;
        const double quadrature = fubini_reduce(
            [](const SpherePoint& p) {
                const double v = p.coords(0);
                return v * v * v * v;
            },
            N, std::sqrt(static_cast<double>(N)), 1);
        const double closed = 3.0 * N / (N + 2.0);
        const double route =
            std::exp(moment_integral_log(N, std::sqrt(static_cast<double>(N)), 4.0));
        const double dev = std::max(std::fabs(quadrature - closed),
                                    std::fabs(route - closed));
        return std::pair{dev <= 1e-8, "max-dev=" + format_value(dev)};
    }));

    checks.push_back(guarded_check("znorm-varying-closed-form", [] {
        const int N = 50;
        const double closed =
            0.5 * (N + 2.0) * std::log(static_cast<double>(N)) -
            (N - 1.0) * std::log(2.0);
        const double dev =
            std::max(std::fabs(zpoly(N, poly_varying()).log() - closed),
                     std::fabs(zpoly_gamma_route(N).log() - closed));
        return std::pair{dev <= 1e-10, "max-dev=" + format_value(dev)};
    }));

    checks.push_back(guarded_check("znorm-quadratic", [] {
        double worst = 0.0;
        for (int N : {10, 100}) {
            worst = std::max(worst,
                             std::fabs(zpoly(N, poly_fixed(2.0)).log() -
                                       std::log(static_cast<double>(N))));
        }
        return std::pair{worst <= 1e-12, "max-dev=" + format_value(worst)};
    }));

    checks.push_back(guarded_check("znorm-gaussian-fft", [] {
        const int N = 20;
        DensityFamily family = make_conditioned_tensor(make_gaussian(1.0), N);
        const double closed =
            -0.5 * N * std::log(2.0 * std::acos(-1.0)) - 0.5 * N;
        const double dev =
            std::fabs(family.log_znorm.log() - closed) / std::fabs(closed);
        return std::pair{dev <= 1e-5, "rel-dev=" + format_value(dev)};
    }));

    checks.push_back(guarded_check("uniform-marginal-mass", [] {
        const int N = 6;
        const double mass = integrate_or_throw(
            [N](double v) {
                Eigen::VectorXd point(1);
                point << v;
                return std::exp(marginal_prefactor_log(N, 1, point));
            },
            -std::sqrt(6.0) + 1e-12, std::sqrt(6.0) - 1e-12,
            QuadratureOptions{});
        return std::pair{std::fabs(mass - 1.0) <= 1e-8,
                         "mass=" + format_value(mass)};
    }));

    checks.push_back(guarded_check("poly-quadratic-marginal", [] {
        const int N = 12;
        double worst = 0.0;
        for (double v : {0.0, 0.5, -0.5, 1.0, -2.0}) {
            Eigen::VectorXd point(1);
            point << v;
            const double poly =
                marginal_polynomial(N, 1, point, poly_fixed(2.0));
            const double prefactor =
                std::exp(marginal_prefactor_log(N, 1, point));
            worst = std::max(worst, std::fabs(poly - prefactor));
        }
        return std::pair{worst <= 1e-10, "max-dev=" + format_value(worst)};
    }));

    checks.push_back(guarded_check("entropy-anchors", [] {
        const double rel =
            rel_entropy_1d(make_gaussian(0.5), make_gaussian(1.0));
        const double shannon = shannon_integral(make_gaussian(1.0));
        const double dev = std::max(
            std::fabs(rel - kLimitRelEntropy),
            std::fabs(shannon +
                      0.5 * std::log(2.0 * std::acos(-1.0)) + 0.5));
        return std::pair{dev <= 1e-9, "max-dev=" + format_value(dev)};
    }));

    checks.push_back(guarded_check("concentration-scale-identity", [] {
        const Density1D bump = make_bump();
        const double eps = 0.1;
        const double dev =
            shannon_integral(scale_density(bump, eps)) -
            (shannon_integral(bump) - std::log(eps));
        return std::pair{std::fabs(dev) <= 1e-8,
                         "deviation=" + format_value(dev)};
    }));

    checks.push_back(guarded_check("convex-bound-anchor", [] {
        const ConvexEntropyBounds bounds = entropy_convex_bounds(0.0, 0.0, 0.5);
        const double dev = std::max(std::fabs(bounds.lower + std::log(2.0)),
                                    std::fabs(bounds.upper));
        return std::pair{dev <= 1e-12, "max-dev=" + format_value(dev)};
    }));

    checks.push_back(guarded_check("cklp-anchors", [] {
        const bool ok = cklp_check(0.1, 1.0) && !cklp_check(1.9999, 1.0) &&
                        cklp_check(0.0, 0.0);
        return std::pair{ok, std::string("anchor-set")};
    }));

    checks.push_back(guarded_check("rng-reproducibility", [] {
        RngStream first(9, 4);
        RngStream second(9, 4);
        bool ok = true;
        for (int i = 0; i < 3; ++i)
            ok = ok && first.uniform01() == second.uniform01();
        return std::pair{ok, std::string("three-draws")};
    }));

    return checks;
}

std::vector<int> default_sweep(Scenario scenario) {
    switch (scenario) {
        case Scenario::thm_mixture:
            return {100, 1000, 10000};
        case Scenario::thm_polynomial:
            return {50, 100, 200};
        case Scenario::thm_concentration:
            return {10, 100, 1000, 10000};
        case Scenario::thm_stereographic:
        case Scenario::thm_convex:
            return {100, 1000};
        case Scenario::verify:
            return {};
    }
    return {};
}

bool uses_samples(Scenario scenario) {
    return scenario == Scenario::thm_polynomial ||
           scenario == Scenario::thm_stereographic ||
           scenario == Scenario::thm_convex;
}

void validate_config(const ScenarioConfig& c) {
    if (c.eps_rule != "auto" && c.eps_rule != "invlog" && c.eps_rule != "invsq")
        throw std::invalid_argument("eps-rule: expected auto, invlog, or invsq");
    if (c.beta_rule != "sqrt" && c.beta_rule != "log")
        throw std::invalid_argument("beta-rule: expected sqrt or log");
    if (c.alpha_rule != "adaptive")
        throw std::invalid_argument("alpha-rule: expected adaptive");
    if (!std::isfinite(c.m) || c.m < 0.0)
        throw std::invalid_argument("m: expected a nonnegative power");
    if (!std::isfinite(c.eta) || c.eta <= 0.0 || c.eta > 1.0)
        throw std::invalid_argument("eta: expected a value in (0, 1]");
    if (c.samples < 1)
        throw std::invalid_argument("samples: expected a positive count");
}

void validate_n_list(const std::vector<int>& n_list) {
    if (n_list.empty())
        throw std::invalid_argument("N list must not be empty");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 4)
            throw std::invalid_argument(
                "N list entries must be at least 4, got " +
                std::to_string(n_list[i]));
        if (i > 0 && n_list[i] <= n_list[i - 1])
            throw std::invalid_argument("N list must be strictly increasing");
    }
}

std::string render_csv(const ScenarioResult& result) {
    std::ostringstream out;
    write_entropy_csv_header(out);
    for (const ScenarioRow& row : result.rows)
        write_entropy_csv_row(row.report, out);
    for (const ScenarioRow& row : result.rows) {
        if (!row.sup_gap) continue;
        out << "# gap," << row.report.N << ',' << format_value(*row.sup_gap)
            << ',' << format_value(row.l1_gap.value_or(0.0)) << '\n';
    }
    for (const ScenarioAssertion& a : result.assertions)
        out << "# assert," << a.name << ',' << (a.holds ? "true" : "false")
            << ',' << a.detail << '\n';
    out << "# verdict," << (result.pass ? "PASS" : "FAIL") << '\n';
    return out.str();
}

}  // namespace

Scenario parse_scenario(const std::string& name) {
    if (name == "thm-mixture") return Scenario::thm_mixture;
    if (name == "thm-polynomial") return Scenario::thm_polynomial;
    if (name == "thm-concentration") return Scenario::thm_concentration;
    if (name == "thm-stereographic") return Scenario::thm_stereographic;
    if (name == "thm-convex") return Scenario::thm_convex;
    if (name == "verify") return Scenario::verify;
    throw std::invalid_argument("scenario: unknown name '" + name + "'");
}

std::string scenario_name(Scenario scenario) {
    switch (scenario) {
        case Scenario::thm_mixture:
            return "thm-mixture";
        case Scenario::thm_polynomial:
            return "thm-polynomial";
        case Scenario::thm_concentration:
            return "thm-concentration";
        case Scenario::thm_stereographic:
            return "thm-stereographic";
        case Scenario::thm_convex:
            return "thm-convex";
        case Scenario::verify:
            return "verify";
    }
    return "verify";
}

void apply_config_entry(ScenarioConfig& config, const std::string& key,
                        const std::string& value) {
    if (value.empty())
        throw std::invalid_argument("config: empty value for key '" + key + "'");
    if (key == "scenario") {
        config.scenario = parse_scenario(value);
    } else if (key == "N") {
        std::vector<int> n_list;
        for (const std::string& part : split(value, ',')) {
            const std::string token = trim(part);
            const std::int64_t n = parse_integer(token);
            if (n < 1 || n > 1000000)
                throw std::invalid_argument("config: N entry out of range '" +
                                            token + "'");
            n_list.push_back(static_cast<int>(n));
        }
        config.n_list = std::move(n_list);
    } else if (key == "samples") {
        config.samples = parse_integer(value);
    } else if (key == "seed") {
        const std::int64_t seed = parse_integer(value);
        if (seed < 0)
            throw std::invalid_argument("config: seed must be nonnegative");
        config.seed = static_cast<std::uint64_t>(seed);
    } else if (key == "eta") {
        config.eta = parse_double(value);
    } else if (key == "eps-rule") {
        config.eps_rule = value;
    } else if (key == "beta-rule") {
        config.beta_rule = value;
    } else if (key == "alpha-rule") {
        config.alpha_rule = value;
    } else if (key == "m") {
        config.m = parse_double(value);
    } else if (key == "csv") {
        config.csv_path = value;
    } else if (key == "svg") {
        config.svg_path = value;
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open '" + path + "'");
    ScenarioConfig config;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " +
                                        std::to_string(line_number) +
                                        " is not 'key = value'");
        apply_config_entry(config, trim(line.substr(0, eq)),
                           trim(line.substr(eq + 1)));
    }
    return config;
}

DensityFamily make_family(const std::string& descriptor, int N) {
    if (descriptor == "uniform") return make_uniform_family(N);
    if (descriptor.starts_with("tensor:mixture:eta="))
        return make_mixture_family(
            N, parse_double(descriptor.substr(std::string("tensor:mixture:eta=").size())));
    if (descriptor == "poly:varying")
        return make_polynomial_family(N, poly_varying());
    if (descriptor.starts_with("poly:m="))
        return make_polynomial_family(
            N, poly_fixed(parse_double(descriptor.substr(std::string("poly:m=").size()))));
    if (descriptor.starts_with("concentration:eps=")) {
        const std::string value =
            descriptor.substr(std::string("concentration:eps=").size());
        const double eps = value == "auto"
                               ? 1.0 / std::log(N + std::exp(1.0))
                               : parse_double(value);
        return make_concentration_family(N, make_bump(), eps);
    }
    if (descriptor.starts_with("stereo:beta=")) {
        const std::string value =
            descriptor.substr(std::string("stereo:beta=").size());
        double beta = 0.0;
        if (value == "sqrt" || value == "log")
            beta = resolve_beta(value, N);
        else
            beta = parse_double(value);
        return make_stereographic_family(N, make_uniform01(), beta);
    }
    if (descriptor.starts_with("convex:")) {
        const std::vector<std::string> parts =
            split(descriptor.substr(std::string("convex:").size()), ';');
        if (parts.size() != 3 || !parts[0].starts_with("G=") ||
            !parts[1].starts_with("F=") || !parts[2].starts_with("alpha="))
            throw std::invalid_argument(
                "family: convex descriptor needs G=..;F=..;alpha=..");
        const std::string g_desc = parts[0].substr(2);
        const std::string f_desc = parts[1].substr(2);
        const std::string alpha_text =
            parts[2].substr(std::string("alpha=").size());
        if (g_desc.starts_with("convex:") || f_desc.starts_with("convex:"))
            throw std::invalid_argument(
                "family: convex descriptors nest one level only");
        DensityFamily g = make_family(g_desc, N);
        DensityFamily f = make_family(f_desc, N);
        double alpha = 0.0;
        if (alpha_text == "auto") {
            if (!f_desc.starts_with("concentration:eps="))
                throw std::invalid_argument(
                    "family: alpha=auto needs a concentration component");
            const std::string eps_text =
                f_desc.substr(std::string("concentration:eps=").size());
            const double eps = eps_text == "auto"
                                   ? 1.0 / std::log(N + std::exp(1.0))
                                   : parse_double(eps_text);
            const double h_per =
                entropy_concentration_exact(N, make_bump(), eps) / N;
            alpha = std::min(0.5, 1.0 / std::sqrt(h_per));
        } else {
            alpha = parse_double(alpha_text);
        }
        return make_convex_combination(g, f, alpha);
    }
    throw std::invalid_argument("family: unknown descriptor '" + descriptor +
                                "'");
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    ScenarioConfig c = config;
    validate_config(c);

    ScenarioResult result;
    result.scenario = c.scenario;
    if (c.scenario == Scenario::verify) {
        result.assertions = run_verify_battery();
    } else {
        if (c.n_list.empty()) c.n_list = default_sweep(c.scenario);
        validate_n_list(c.n_list);
        if (uses_samples(c.scenario) && c.samples < 1000)
            throw std::invalid_argument(
                "samples: Monte Carlo scenarios need at least 1000, got " +
                std::to_string(c.samples));

        std::vector<std::future<RowProduct>> futures;
        futures.reserve(c.n_list.size());
        for (const int n : c.n_list)
            futures.push_back(std::async(std::launch::async,
                                         [&c, n] { return build_row(c, n); }));
        std::vector<RowProduct> products;
        products.reserve(futures.size());
        for (auto& future : futures) products.push_back(future.get());

        for (RowProduct& product : products)
            result.rows.push_back(std::move(product.row));
        for (RowProduct& product : products)
            for (ScenarioAssertion& a : product.asserts)
                result.assertions.push_back(std::move(a));
        add_trend_assertions(c, result.rows, result);
    }

    result.pass = std::all_of(
        result.assertions.begin(), result.assertions.end(),
        [](const ScenarioAssertion& a) { return a.holds; });
    result.verdict = "PASS";
    if (!result.pass) {
        for (const ScenarioAssertion& a : result.assertions) {
            if (!a.holds) {
                result.verdict = "FAIL: " + a.name;
                break;
            }
        }
    }
    result.csv_text = render_csv(result);

    if (!c.csv_path.empty()) {
        std::ofstream out(c.csv_path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open csv path '" + c.csv_path +
                                     "'");
        out << result.csv_text;
    }
    if (!c.svg_path.empty() && c.scenario != Scenario::verify)
        emit_plot(result, c.svg_path);

    result.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return result;
}

namespace {

std::string pixel(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", v);
    return buffer;
}

struct PlotFrame {
    double left = 0.0;
    double right = 0.0;
    double top = 0.0;
    double bottom = 0.0;
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;

    double px(double x) const {
        return left + (x - x_min) / (x_max - x_min) * (right - left);
    }
    double py(double y) const {
        return bottom - (y - y_min) / (y_max - y_min) * (bottom - top);
    }
};

void pad_range(double& lo, double& hi) {
    if (hi - lo < 1e-12) {
        const double pad = std::max(0.1, std::fabs(hi) * 0.5);
        lo -= pad;
        hi += pad;
    } else {
        const double pad = 0.08 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
}

void draw_line(std::ostringstream& out, double x1, double y1, double x2,
               double y2, const std::string& style) {
    out << "<line x1=\"" << pixel(x1) << "\" y1=\"" << pixel(y1) << "\" x2=\""
        << pixel(x2) << "\" y2=\"" << pixel(y2) << "\" " << style << "/>\n";
}

void draw_text(std::ostringstream& out, double x, double y,
               const std::string& text, const std::string& extra) {
    out << "<text x=\"" << pixel(x) << "\" y=\"" << pixel(y)
        << "\" font-family=\"monospace\" font-size=\"11\" " << extra << ">"
        << text << "</text>\n";
}

void draw_frame(std::ostringstream& out, const PlotFrame& f,
                const std::vector<std::pair<double, std::string>>& x_ticks,
                const std::string& y_label) {
    const std::string axis = "stroke=\"#444444\" stroke-width=\"1\"";
    draw_line(out, f.left, f.top, f.left, f.bottom, axis);
    draw_line(out, f.left, f.bottom, f.right, f.bottom, axis);
    for (int i = 0; i <= 4; ++i) {
        const double y = f.y_min + (f.y_max - f.y_min) * i / 4.0;
        const double yp = f.py(y);
        draw_line(out, f.left - 4.0, yp, f.left, yp, axis);
        char label[32];
        std::snprintf(label, sizeof(label), "%.4g",
                      y < 0 && y > -5e-13 ? 0.0 : y);
        draw_text(out, f.left - 8.0, yp + 4.0, label, "text-anchor=\"end\"");
    }
    for (const auto& [x, label] : x_ticks) {
        const double xp = f.px(x);
        draw_line(out, xp, f.bottom, xp, f.bottom + 4.0, axis);
        draw_text(out, xp, f.bottom + 16.0, label, "text-anchor=\"middle\"");
    }
    draw_text(out, f.left, f.top - 8.0, y_label, "text-anchor=\"start\"");
}

void draw_reference(std::ostringstream& out, const PlotFrame& f, double value,
                    const std::string& color) {
    if (value < f.y_min || value > f.y_max) return;
    const double yp = f.py(value);
    draw_line(out, f.left, yp, f.right, yp,
              "stroke=\"" + color + "\" stroke-width=\"1\" stroke-dasharray=\"6 4\"");
    draw_text(out, f.right - 4.0, yp - 4.0, format_fixed5(value),
              "text-anchor=\"end\" fill=\"" + color + "\"");
}

void draw_series(std::ostringstream& out, const PlotFrame& f,
                 const std::vector<double>& xs, const std::vector<double>& ys,
                 const std::vector<double>& errors, const std::string& color) {
    std::string points;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) points += ' ';
        points += pixel(f.px(xs[i])) + "," + pixel(f.py(ys[i]));
    }
    out << "<polyline points=\"" << points << "\" fill=\"none\" stroke=\""
        << color << "\" stroke-width=\"2\"/>\n";
    const std::string bar = "stroke=\"" + color + "\" stroke-width=\"1\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double xp = f.px(xs[i]);
        if (i < errors.size() && errors[i] > 0.0) {
            const double lo = f.py(ys[i] - errors[i]);
            const double hi = f.py(ys[i] + errors[i]);
            draw_line(out, xp, lo, xp, hi, bar);
            draw_line(out, xp - 3.0, lo, xp + 3.0, lo, bar);
            draw_line(out, xp - 3.0, hi, xp + 3.0, hi, bar);
        }
        out << "<circle cx=\"" << pixel(xp) << "\" cy=\""
            << pixel(f.py(ys[i])) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
}

}  // namespace

std::string render_plot_svg(const ScenarioResult& result) {
    if (result.rows.size() < 2)
        throw std::invalid_argument(
            "render_plot_svg: need at least 2 rows, got " +
            std::to_string(result.rows.size()));

    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> errors;
    std::vector<double> sups;
    std::vector<std::pair<double, std::string>> x_ticks;
    bool has_sup = true;
    for (const ScenarioRow& row : result.rows) {
        const double x = std::log(static_cast<double>(row.report.N));
        xs.push_back(x);
        ys.push_back(row.report.h_per_particle);
        errors.push_back(row.report.estimate.std_error / row.report.N);
        x_ticks.emplace_back(x, std::to_string(row.report.N));
        if (row.sup_gap)
            sups.push_back(*row.sup_gap);
        else
            has_sup = false;
    }

    const double width = 720.0;
    const double top_margin = 50.0;
    const double panel1_height = 270.0;
    const double panel_gap = 62.0;
    const double panel2_height = 190.0;
    const double bottom_margin = 52.0;
    const double height =
        top_margin + panel1_height +
        (has_sup ? panel_gap + panel2_height : 0.0) + bottom_margin;

    PlotFrame frame1;
    frame1.left = 86.0;
    frame1.right = width - 26.0;
    frame1.top = top_margin;
    frame1.bottom = top_margin + panel1_height;
    frame1.x_min = xs.front();
    frame1.x_max = xs.back();
    frame1.y_min = ys.front();
    frame1.y_max = ys.front();
    for (std::size_t i = 0; i < ys.size(); ++i) {
        frame1.y_min = std::min(frame1.y_min, ys[i] - errors[i]);
        frame1.y_max = std::max(frame1.y_max, ys[i] + errors[i]);
    }
    if (result.target_line) {
        frame1.y_min = std::min(frame1.y_min, *result.target_line);
        frame1.y_max = std::max(frame1.y_max, *result.target_line);
    }
    if (result.limit_line) {
        frame1.y_min = std::min(frame1.y_min, *result.limit_line);
        frame1.y_max = std::max(frame1.y_max, *result.limit_line);
    }
    pad_range(frame1.y_min, frame1.y_max);

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixel(width)
        << "\" height=\"" << pixel(height) << "\" viewBox=\"0 0 "
        << pixel(width) << ' ' << pixel(height) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << pixel(width) << "\" height=\""
        << pixel(height) << "\" fill=\"#ffffff\"/>\n";
    draw_text(out, frame1.left, 24.0,
              scenario_name(result.scenario) + " sweep, verdict " +
                  (result.pass ? "PASS" : "FAIL"),
              "text-anchor=\"start\" font-weight=\"bold\"");

    draw_frame(out, frame1, x_ticks, "h per particle");
    if (result.target_line)
        draw_reference(out, frame1, *result.target_line, "#c44e52");
    if (result.limit_line &&
        (!result.target_line ||
         std::fabs(*result.limit_line - *result.target_line) > 1e-12))
        draw_reference(out, frame1, *result.limit_line, "#55a868");
    draw_series(out, frame1, xs, ys, errors, "#1f6fb2");

    if (has_sup) {
        PlotFrame frame2 = frame1;
        frame2.top = frame1.bottom + panel_gap;
        frame2.bottom = frame2.top + panel2_height;
        frame2.y_min = 0.0;
        frame2.y_max = *std::max_element(sups.begin(), sups.end());
        if (frame2.y_max <= 0.0) frame2.y_max = 1.0;
        frame2.y_max *= 1.15;
        draw_frame(out, frame2, x_ticks, "sup gap to limit");
        draw_series(out, frame2, xs, sups, {}, "#8172b2");
        draw_text(out, (frame2.left + frame2.right) / 2.0,
                  frame2.bottom + 34.0, "N (log spacing)",
                  "text-anchor=\"middle\"");
    } else {
        draw_text(out, (frame1.left + frame1.right) / 2.0,
                  frame1.bottom + 34.0, "N (log spacing)",
                  "text-anchor=\"middle\"");
    }
    out << "</svg>\n";
    return out.str();
}

void emit_plot(const ScenarioResult& result, const std::string& path) {
    const std::string svg = render_plot_svg(result);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open svg path '" + path + "'");
    out << svg;
}

}  // namespace kaclab
