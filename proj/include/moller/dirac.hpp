#pragma once
#include <functional>
#include <optional>

#include "moller/clifford.hpp"
#include "moller/geometry.hpp"
#include "moller/transport.hpp"

namespace md {

using MatField = std::function<Mat2(double, double)>;

// First-order system S = sigma_dt * d_t + A * d_x + B acting on spinor fields.
// The principal symbol sigma(xi) = xi_t*sigma_dt + xi_x*A is Hermitian w.r.t.
// the spin form for real covectors, and positive on future timelike ones.
struct FirstOrderSystem {
    MatField sigma_dt;
    MatField A;
    MatField B;
    SplitMetric metric;  // the metric the system lives on (quadrature/cones)
    GammaRep rep;

    Mat2 symbol(double t, double x, double xi_t, double xi_x) const {
        return xi_t * sigma_dt(t, x) + xi_x * A(t, x);
    }
};

// Symbol-adapted musical map: sharp(xi) = (+xi_t/beta^2, -xi_x/h), fixed so
// that sigma(dt) is positive definite w.r.t. the spin form and the boundary
// form of the future conormal is positive on outgoing modes.
Eigen::Vector2d sharp(const SplitMetric& g, double t, double x, const Eigen::Vector2d& xi);
Eigen::Vector2d flat(const SplitMetric& g, double t, double x, const Eigen::Vector2d& v);

FirstOrderSystem build_dirac(const SplitMetric& g, const GammaRep& rep,
                             std::optional<MatField> potential = std::nullopt);

// D01^f = kappa^f D0 kappa^f^-1 expressed on M1. kf(t,x) supplies the pointwise
// weighted spinor map; derivative terms are folded into the zero-order part.
FirstOrderSystem intertwine(const FirstOrderSystem& D0, const SplitMetric& g1,
                            std::function<KappaF(double, double)> kf);

// (1-chi) D01 + chi D1 + 1/2 (sigma_{D1} - sigma_{D01})(dchi)
FirstOrderSystem interpolate_operator(const FirstOrderSystem& D01,
                                      const FirstOrderSystem& D1, const ChiProfile& chi);

// |int <D psi, phi> + int <psi, D phi>| over random compactly supported bumps,
// discrete quadrature with vol = beta sqrt(h) of the attached metric.
double check_skew_adjoint(const FirstOrderSystem& D, int Nx, int Nt, unsigned seed = 7);

}  // namespace md
