#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "kaclab/density1d.hpp"
#include "kaclab/families.hpp"
#include "kaclab/marginals.hpp"
#include "kaclab/statistics.hpp"

namespace kaclab {

/// Integral of f ln f over the quadrature window of f.
double shannon_integral(const Density1D& f);

/// Relative entropy integral of f ln(f/g). Returns +infinity when g vanishes
/// somewhere f carries mass; the violation is detected on the quadrature
/// grid, not by a thrown error.
double rel_entropy_1d(const Density1D& f, const Density1D& g);

/// Monte Carlo strategy for the total entropy H_N(F) = int F ln F d sigma.
/// uniform_weighted averages F ln F over uniform sphere draws and reports
/// the weight-based effective sample size; self_sampled averages ln F over
/// exact samples of the family and requires an exact sampler.
enum class EntropyStrategy { uniform_weighted, self_sampled };

EntropyEstimate entropy_mc(const DensityFamily& family, std::int64_t n,
                           EntropyStrategy strategy, std::uint64_t seed);

/// Per-particle entropy H_N/N of the mixture family through the reduced
/// one-dimensional integral of Pi_1 ln f_N minus (ln Z_N)/N. The mode picks
/// the normalization ratio: FFT-exact tables or the local-CLT form.
double entropy_mixture_reduced(int N, double eta, MarginalMode mode);

/// Total entropy of the concentrated-caps family with profile phi and cap
/// width eps, evaluated in closed form up to one-dimensional quadratures.
/// Requires eps < pi/2 so the caps stay disjoint.
double entropy_concentration_exact(int N, const Density1D& phi, double eps);

/// Entropy of the single-chart stereographic pushforward. The estimate
/// carries the total H_N of that chart law; subtracting ln N certifies a
/// lower bound for the entropy of the pole-averaged family.
struct StereoEntropy {
    EntropyEstimate estimate;
    double deterministic_part = 0.0;
    double lower_bound = 0.0;
};

StereoEntropy entropy_stereo(int N, const Density1D& zeta, double beta,
                             std::int64_t n, std::uint64_t seed);

/// Finite-N lower bound for the per-particle entropy of the varying-power
/// family, with the heavy-tail term kept as an exact Gamma ratio.
double entropy_poly_bound(int N);

/// Upper bound (m ln N)/2 - ln zpoly for the total entropy of the fixed-power
/// family; identically zero at m = 2 where zpoly(N, 2) = N.
double entropy_poly_fixed_bound(int N, double m);

/// Convexity sandwich for the total entropy of (1 - alpha) G + alpha F in
/// terms of the component entropies.
struct ConvexEntropyBounds {
    double lower = 0.0;
    double upper = 0.0;
};

ConvexEntropyBounds entropy_convex_bounds(double h_g, double h_f, double alpha);

/// Total-variation versus entropy consistency: tv^2 <= 2 H + tolerance.
/// Callers inflate the tolerance by their statistical error.
bool cklp_check(double tv_estimate, double h, double tolerance = 0.0);

enum class ChaoticityVerdict { yes, no, undetermined };

/// One row of an entropy experiment: the estimate plus the limit target and
/// the lower bound it is judged against.
struct EntropyReport {
    std::string family;
    int N = 0;
    double h_per_particle = 0.0;
    EntropyEstimate estimate;
    std::optional<double> target;
    std::optional<double> bound_lower;
    ChaoticityVerdict entropically_chaotic = ChaoticityVerdict::undetermined;
};

/// True when the report carries no lower bound, is a closed form, or its
/// per-particle estimate stays above the bound minus three standard errors.
bool entropy_bound_respected(const EntropyReport& report);

void write_entropy_csv_header(std::ostream& out);
void write_entropy_csv_row(const EntropyReport& report, std::ostream& out);

}  // namespace kaclab
