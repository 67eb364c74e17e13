#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "kaclab/density1d.hpp"
#include "kaclab/log_scalar.hpp"
#include "kaclab/normalization.hpp"
#include "kaclab/rng.hpp"
#include "kaclab/sphere.hpp"

namespace kaclab {

/// Evaluation route the marginal machinery takes for a family.
enum class MarginalRoute { prefactor_only, conditioned, polynomial, histogram };

/// Probability density on the Kac sphere S^{N-1}(sqrt N) relative to the
/// uniform measure, with the metadata downstream consumers need: an optional
/// exact sampler, the claimed single-particle limit, and the ingredients of
/// the analytic marginal routes.
struct DensityFamily {
    std::string name;
    int dim = 0;
    std::function<double(const SpherePoint&)> log_density;
    std::function<SpherePoint(RngStream&)> exact_sampler;
    std::optional<Density1D> claimed_limit;
    std::map<std::string, double> parameters;

    MarginalRoute route = MarginalRoute::histogram;
    std::optional<Density1D> base_density;
    double base_sigma_sq = 0.0;
    LogScalar log_znorm = LogScalar::one();
    std::shared_ptr<const SquaredLawTable> znorm_table;
    std::optional<PolyPower> power;
};

/// Override hook for the conditioned-tensor normalization Z_order(f, sqrt(u));
/// an empty function selects the FFT route on the family's cached table.
using ZnormAccessor =
    std::function<LogScalar(const Density1D&, int order, double u)>;

/// Uniform density on the sphere (log density identically zero); claimed
/// limit is the standard Gaussian.
DensityFamily make_uniform_family(int dim);

/// Tensor product of f conditioned to the sphere: log density
/// sum_i log f(v_i) - log Z_dim(f, sqrt(dim)). Requires dim >= 3 and a finite
/// fourth moment of f. The claimed limit is f itself when its second moment
/// is 1; other second moments put the product law's mass off the sphere
/// radius, so no limit is claimed.
DensityFamily make_conditioned_tensor(const Density1D& f, int dim,
                                      const ZnormAccessor& znorm = {},
                                      int n_points = 1 << 16);

/// Conditioned tensorization of the two-branch Gaussian mixture with
/// delta = dim^{-eta}; claimed limit M_{1/2}.
DensityFamily make_mixture_family(int dim, double eta,
                                  const ZnormAccessor& znorm = {},
                                  int n_points = 1 << 16);

/// Density proportional to sum_i |v_i|^m, with an exact sampler mixing over
/// the distinguished coordinate. Claimed limit is the standard Gaussian for
/// fixed m and M_{1/2} for the varying power m = dim.
DensityFamily make_polynomial_family(int dim, PolyPower power);

/// Equal mixture of 2 dim spherical caps of angular radius eps/2 around the
/// poles +-sqrt(dim) e_i, with elevation profile phi(x/eps)/eps. phi must be
/// supported inside (0, 1/2) and eps must stay below pi/2 so the caps are
/// disjoint.
DensityFamily make_concentration_family(int dim, const Density1D& phi,
                                        double eps);

/// Pushforward of the shifted product law zeta^{(dim-1)}(. - beta) through
/// the inverse stereographic charts, averaged over the dim coordinate poles.
/// zeta must live on [0, 1] and be symmetric about 1/2.
DensityFamily make_stereographic_family(int dim, const Density1D& zeta,
                                        double beta);

/// Convex combination (1 - alpha) g + alpha f of two families on the same
/// sphere; inherits the claimed limit of g and samples by a Bernoulli(alpha)
/// pick of f when both components carry exact samplers.
DensityFamily make_convex_combination(const DensityFamily& g,
                                      const DensityFamily& f, double alpha);

}  // namespace kaclab
