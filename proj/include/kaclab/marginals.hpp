#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>

#include "kaclab/families.hpp"
#include "kaclab/normalization.hpp"

namespace kaclab {

/// Log of the k-particle marginal of the uniform measure on the sphere of
/// radius sqrt(N), evaluated at the coordinate vector v.  Returns -infinity
/// outside the admissible ball (sum of squares at least N).
double marginal_prefactor_log(int N, int k, const Eigen::VectorXd& v);

enum class MarginalMode {
    exact,
    asymptotic,
};

/// Cached evaluator for marginals of conditioned tensorizations.  The exact
/// mode extracts the two needed order densities from the family's squared-law
/// table once, so repeated evaluations only pay for interpolation.
class ConditionedMarginal {
  public:
    ConditionedMarginal(const DensityFamily& family, int k, MarginalMode mode);

    double value(const Eigen::VectorXd& v) const;

    int order() const { return dim_; }

  private:
    int dim_ = 0;
    int k_ = 0;
    MarginalMode mode_ = MarginalMode::exact;
    Density1D base_;
    double log_z_full_ = 0.0;
    Eigen::ArrayXd rest_density_;
    double dw_ = 0.0;
    double sigma_sq_ = 0.0;
};

/// One-shot convenience wrapper around ConditionedMarginal.
double marginal_conditioned_tensor(const DensityFamily& family, int k,
                                   const Eigen::VectorXd& v, MarginalMode mode);

/// k-particle marginal of the polynomial family with the given power rule.
double marginal_polynomial(int N, int k, const Eigen::VectorXd& v,
                           PolyPower power);

/// Evaluation window for chaoticity gaps.  Zero points_per_axis or an empty
/// window picks the per-route default (161 points on [-4, 4] for k = 1,
/// 41 x 41 on [-3, 3]^2 for k = 2, 200 histogram bins on +-4 sqrt(2)).
struct GridSpec {
    int points_per_axis = 0;
    double lo = 0.0;
    double hi = 0.0;
    long histogram_samples = 200000;
    std::uint64_t seed = 1;
    MarginalMode mode = MarginalMode::exact;
};

/// k-particle marginal tabulated on a lexicographically ordered grid next to
/// the family's claimed limit.  std_errors is nonzero only for histogram
/// estimates.
struct MarginalGrid {
    int k = 1;
    int N = 0;
    Eigen::MatrixXd points;
    Eigen::VectorXd values;
    Eigen::VectorXd limit_values;
    Eigen::VectorXd std_errors;
};

struct ChaoticityResult {
    MarginalGrid grid;
    double sup_gap = 0.0;
    double l1_gap = 0.0;
};

/// Tabulates the k-particle marginal of the family against its claimed limit
/// and reports the sup and L1 gaps over the window.  Families without an
/// analytic marginal route are histogrammed from their exact sampler (k = 1
/// only).
ChaoticityResult chaoticity_gap(const DensityFamily& family, int k,
                                const GridSpec& spec = {});

/// Writes `k,N,v1[,v2],pi_k,limit,abs_gap` rows for every grid point.
void write_marginal_csv(const MarginalGrid& grid, std::ostream& out);

}  // namespace kaclab
