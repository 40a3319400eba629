#pragma once
#include <Eigen/Dense>
#include <complex>

#include "moller/geometry.hpp"

namespace md {

using Mat2 = Eigen::Matrix2cd;
using Vec2c = Eigen::Vector2cd;
// spinor field on a slice: column j = value at grid node j
using SpinorSlice = Eigen::Matrix2Xcd;

// Concrete 2x2 Clifford representation for signature (-,+):
//   gamma(e_mu)gamma(e_nu) + gamma(e_nu)gamma(e_mu) = -2 eta_{mu nu} Id
// with spin product <psi,phi> = psi^dag M phi (indefinite, signature (1,1)).
struct GammaRep {
    Mat2 gamma0;
    Mat2 gamma1;
    Mat2 spin_form;  // M
    Mat2 chirality;  // G
};

GammaRep make_canonical_rep();

// Clifford multiplication by the tangent vector v = vt*d_t + vx*d_x at (t,x),
// expressed through the orthonormal frame e0 = beta^-1 d_t, e1 = h^-1/2 d_x.
Mat2 clifford_of(const GammaRep& rep, const SplitMetric& g, double t, double x,
                 double vt, double vx);

// g(v,w) for coordinate components
double metric_eval(const SplitMetric& g, double t, double x, double vt, double vx,
                   double wt, double wx);

// Hermitian product of slices at time t:
//   sum_j w_j <psi_j, sigma(n^flat) phi_j>  with w_j = volume_slice weights.
// In the canonical rep sigma(n^flat) * M-pairing reduces to the plain l2 dot,
// so this equals sum_j w_j psi_j^dag phi_j for any split metric.
std::complex<double> slice_product(const GammaRep& rep, const SplitMetric& g, double t,
                                   const SpinorSlice& psi, const SpinorSlice& phi);

}  // namespace md
