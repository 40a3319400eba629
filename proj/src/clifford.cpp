#include "moller/clifford.hpp"

namespace md {

GammaRep make_canonical_rep() {
    GammaRep r;
    r.gamma0 << 0, 1, 1, 0;
    r.gamma1 << 0, 1, -1, 0;
    r.spin_form = r.gamma0;
    r.chirality = r.gamma0 * r.gamma1;
    return r;
}

Mat2 clifford_of(const GammaRep& rep, const SplitMetric& g, double t, double x,
                 double vt, double vx) {
    // small overhang tolerated: coefficient callables are closed forms and the
    // intertwined operators finite-difference them just past the edges
    const double mt = 1e-2 * g.T, mx = 1e-2 * g.L;
    if (t < -mt || t > g.T + mt || x < -mx || x > g.L + mx)
        throw std::domain_error("clifford_of: point outside domain");
    const double v0 = g.beta(t, x) * vt;        // frame component along e0
    const double v1 = std::sqrt(g.h(t, x)) * vx;  // frame component along e1
    return v0 * rep.gamma0 + v1 * rep.gamma1;
}

double metric_eval(const SplitMetric& g, double t, double x, double vt, double vx,
                   double wt, double wx) {
    const double b = g.beta(t, x);
    return -b * b * vt * wt + g.h(t, x) * vx * wx;
}

std::complex<double> slice_product(const GammaRep& rep, const SplitMetric& g, double t,
                                   const SpinorSlice& psi, const SpinorSlice& phi) {
    if (psi.cols() != phi.cols())
        throw std::invalid_argument("slice_product: grid shape mismatch");
    const int N = static_cast<int>(psi.cols()) - 1;
    const auto w = volume_slice(g, t, N);
    // sigma(n^flat) for the unit conormal beta*dt is gamma0; pairing matrix M*gamma0.
    const Mat2 S = rep.spin_form * rep.gamma0;
    std::complex<double> acc = 0.0;
    for (int j = 0; j <= N; ++j)
        acc += w[j] * (psi.col(j).adjoint() * S * phi.col(j))(0, 0);
    return acc;
}

}  // namespace md
