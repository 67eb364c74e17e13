#pragma once

#include <functional>
#include <string>

#include "kaclab/rng.hpp"

namespace kaclab {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// One-dimensional probability density: log evaluation, support, second
/// moment, optional exact sampler, and a finite quadrature window carrying
/// all mass up to double precision.
struct Density1D {
    std::string name;
    std::function<double(double)> log_eval;
    Interval support;
    Interval quad_range;
    double second_moment = 0.0;
    std::function<double(RngStream&)> sampler;

    double eval(double x) const { return std::exp(log_eval(x)); }
};

/// Parameters of the two-branch Gaussian mixture family at a given N:
/// delta_N = N^{-eta}, sigma_N_sq = 3/(4 delta_N (1-delta_N)) - 1.
struct MixtureParams {
    double eta = 0.0;
    double delta_N = 0.0;
    double sigma_N_sq = 0.0;
};

MixtureParams make_mixture_params(int N, double eta);

/// Centered Gaussian M_a with variance a.
Density1D make_gaussian(double a);

/// The mixture density delta M_{1/(2 delta)} + (1 - delta) M_{1/(2(1-delta))},
/// with second moment exactly 1.
Density1D make_mixture_1d(const MixtureParams& params);

/// Normalized smooth bump exp(-1/(x(1/2-x))) on (0, 1/2).
Density1D make_bump();

/// Uniform density on [0, 1].
Density1D make_uniform01();

/// Rescaled density f(x/eps)/eps on the eps-scaled support.
Density1D scale_density(const Density1D& f, double eps);

/// Checks the construction invariants by adaptive quadrature: unit mass to
/// 1e-8 and the stored second moment to 1e-6. Throws on violation.
void validate_density(const Density1D& f);

/// Deterministic inverse-CDF sampler over a finite range, built from a
/// cached table of cell masses with linear-density resolution within cells.
std::function<double(RngStream&)> make_inverse_cdf_sampler(
    const std::function<double(double)>& log_eval, Interval range, int n_cells = 4096);

}  // namespace kaclab
