#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "kaclab/density1d.hpp"
#include "kaclab/log_scalar.hpp"

namespace kaclab {

/// Density of W = sum_{i<=order} v_i^2 under iid coordinates v_i ~ f,
/// tabulated at the nodes w_k = k * grid_max / n_points of [0, grid_max].
struct SquaredLawGrid {
    double grid_max = 0.0;
    int n_points = 0;
    int order = 1;
    double dw = 0.0;
    std::vector<LogScalar> log_density_values;
};

/// Raised when the requested grid truncates more than 1e-6 of the mass of W;
/// carries the estimated outside mass and a workable grid_max.
class GridTooSmallError : public std::runtime_error {
  public:
    GridTooSmallError(double mass_outside, double suggested_grid_max);
    double mass_outside;
    double suggested_grid_max;
};

/// FFT-convolution engine behind squared_law: computes the single-coordinate
/// cell-mass spectrum once, then serves the order-n density for any n up to
/// the construction order. Immutable after construction.
class SquaredLawTable {
  public:
    /// grid_max <= 0 selects the default 4N, doubled automatically until the
    /// truncated mass estimate drops below 1e-6. An explicit grid_max that
    /// truncates that much mass throws GridTooSmallError instead.
    SquaredLawTable(const Density1D& f, int N, double grid_max = 0.0,
                    int n_points = 1 << 16);

    /// Density values of the order-n law on the nodes, renormalized to unit
    /// trapezoidal mass.
    Eigen::ArrayXd order_density(int order) const;

    /// Public-type view of order_density.
    SquaredLawGrid grid(int order) const;

    double grid_max() const { return grid_max_; }
    double dw() const { return dw_; }
    int n_points() const { return n_points_; }
    int order() const { return order_; }

  private:
    Eigen::ArrayXcd spectrum_;
    double grid_max_ = 0.0;
    double dw_ = 0.0;
    int n_points_ = 0;
    int order_ = 0;
};

/// Log-linear interpolation of a node-tabulated density at u; returns -inf
/// where the density vanishes.
double log_interp_density(const Eigen::ArrayXd& density, double dw, double u);

/// Density of W under N iid coordinates distributed as f (see SquaredLawTable).
SquaredLawGrid squared_law(const Density1D& f, int N, double grid_max = 0.0,
                           int n_points = 1 << 16);

/// Normalization constant Z_N(f, sqrt(u)) = 2 p_W(u) / (|S^{N-1}| u^{(N-2)/2})
/// via the FFT route. The overload taking a table reuses its grid, and the
/// array overload evaluates against an already extracted order density so
/// sweeps over u avoid repeated inverse transforms.
LogScalar znorm_exact(const Density1D& f, int N, double u);
LogScalar znorm_exact(const SquaredLawTable& table, int order, double u);
LogScalar znorm_exact(const Eigen::ArrayXd& order_density, double dw, int order,
                      double u);

/// Large-N asymptotic of the mixture normalization with the correction term
/// set to zero: [2 / (sqrt(N) Sigma_N |S^{N-1}| u^{(N-2)/2})]
/// * exp(-(u-N)^2 / (2 N Sigma_N^2)) / sqrt(2 pi).
LogScalar znorm_asymptotic(const MixtureParams& params, int N, double u);

/// Power selector for the polynomial families: a fixed exponent m, or the
/// dimension-coupled choice m = N.
struct PolyPower {
    double m = 0.0;
    bool is_varying = false;
};
PolyPower poly_fixed(double m);
PolyPower poly_varying();

/// Normalization of the polynomial density sum_i |v_i|^m on the Kac sphere:
/// the exact Gamma expression for fixed m, and the closed form
/// (N+2)/2 ln N - (N-1) ln 2 for the varying power m = N.
LogScalar zpoly(int N, PolyPower power);

/// Gamma-function route to the varying-power normalization, kept separate so
/// the closed form can be cross-checked against it.
LogScalar zpoly_gamma_route(int N);

/// ln of the sphere-average of |v_1|^m on the sphere of radius r in R^N.
double moment_integral_log(int N, double r, double m);

}  // namespace kaclab
