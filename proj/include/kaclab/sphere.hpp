#pragma once

#include <Eigen/Dense>
#include <functional>

#include "kaclab/rng.hpp"

namespace kaclab {

/// Point on the sphere of radius R in R^N, the constraint surface sum v_i^2 = R^2.
struct SpherePoint {
    int dim = 0;
    double radius = 0.0;
    Eigen::VectorXd coords;
};

using EuclideanPoint = Eigen::VectorXd;

/// Builds a SpherePoint, validating |sum v_i^2 - R^2| <= 1e-10 R^2.
SpherePoint make_sphere_point(Eigen::VectorXd coords, double radius);

/// Uniform draw on the sphere of radius R in R^N (N standard normals rescaled).
SpherePoint sample_uniform(int N, double R, RngStream& rng);

/// Average of F over the inner sphere left after fixing j head coordinates;
/// arguments are the head vector and the inner-sphere radius.
using InnerAverage = std::function<double(const Eigen::VectorXd&, double)>;

/// Dimensional-reduction quadrature: integrates F over the uniform measure on
/// the sphere of radius R in R^N by an outer j-dimensional adaptive quadrature
/// over the ball sum v_i^2 <= R^2 with weight
/// (|S^{N-j-1}|/|S^{N-1}|) R^{2-N} (R^2 - sum v_i^2)^{(N-j-2)/2}
/// times the inner-sphere average. When `inner` is not supplied, F must be
/// measurable in the head coordinates and is evaluated at (head, r, 0, ..., 0).
/// Supports 1 <= j <= 3 (j <= 2 tensorized panels, j = 3 spherical shells).
double fubini_reduce(const std::function<double(const SpherePoint&)>& F, int N, double R,
                     int j, const InnerAverage& inner = {});

/// Normalized elevation-angle quadrature on the sphere in R^k:
/// [Gamma(k/2) / (Gamma((k-1)/2) sqrt(pi))] * integral of g(phi) sin^{k-2}(phi)
/// over [0, pi]. The value does not depend on the radius R; the parameter is
/// kept for interface symmetry and validated positive.
double elevation_integral(const std::function<double(double)>& g, int k, double R);

/// Stereographic chart of the sphere of radius R in R^{n+1} from the plane R^n:
/// head coordinates 2R^2 x / (R^2 + |x|^2), last coordinate R(R^2-|x|^2)/(R^2+|x|^2).
SpherePoint stereo_forward(const EuclideanPoint& x, double R);

/// Inverse chart x_i = R v_i / (R + v_{n+1}); rejects points within
/// 1e-9 R of the south pole.
EuclideanPoint stereo_inverse(const SpherePoint& v, double R);

/// Log surface-element density of the chart relative to Lebesgue measure:
/// n ln(2R^2 / (R^2 + |x|^2)).
double stereo_log_jacobian(const EuclideanPoint& x, double R);

}  // namespace kaclab
