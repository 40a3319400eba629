#pragma once
#include <Eigen/Dense>

#include "moller/clifford.hpp"
#include "moller/geometry.hpp"

namespace md {

// Per-point transports along lambda -> (lambda, p) in the cylinder Z = [0,1] x M
// with g_Z = dlambda^2 + g_lambda, g_lambda the convex path.
struct TransportResult {
    Eigen::Matrix2d wp;   // frame transport TM0 -> TM1, coordinate components (t,x)
    Mat2 kappa;           // spinor transport
    double lambda_step;
};

// Integrates the parallel-transport ODE from lambda=0 to 1 for the coordinate
// components Y0 = (vt, vx): spatial part Y' + (1/2) h_l^-1 (d_l h_l) Y = 0,
// time part keeps beta_l^-1 d_t parallel.
Eigen::Vector2d transport_vector(const MetricPath& path, double t, double x,
                                 const Eigen::Vector2d& Y0, double lambda_step = 1e-3);

TransportResult transport_frame(const MetricPath& path, const GammaRep& rep, double t,
                                double x, double lambda_step = 1e-3);

// Spinor transport: boost lift exp(theta/2 * gamma0 gamma1) of the frame rotation.
Mat2 transport_spinor(const MetricPath& path, const GammaRep& rep, double t, double x,
                      double lambda_step = 1e-3);

// Covector transport by duality: wp(xi) := (wp(xi^sharp0))^flat1.
Eigen::Vector2d transport_covector(const MetricPath& path, double t, double x,
                                   const Eigen::Vector2d& xi, double lambda_step = 1e-3);

// Weighted spinor identification kappa^f = f * kappa with pointwise inverse.
struct KappaF {
    double f;
    Mat2 kappa;
    Vec2c apply(const Vec2c& psi) const { return f * (kappa * psi); }
    Vec2c apply_inverse(const Vec2c& psi) const {
        return (1.0 / f) * kappa.inverse().eval() * psi;
    }
};

KappaF kappa_f(double f_value, const Mat2& kappa);

}  // namespace md
