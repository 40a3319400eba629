#include "moller/transport.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace md {

namespace {

// RK4 on y' = f(lam, y), componentwise decoupled rates
Eigen::Vector2d rk4_transport(const MetricPath& path, double t, double x,
                              Eigen::Vector2d y, double step) {
    auto rate = [&](double lam, const Eigen::Vector2d& v) -> Eigen::Vector2d {
        const double b0 = path.g0.beta(t, x), b1 = path.g1.beta(t, x);
        const double h0 = path.g0.h(t, x), h1 = path.g1.h(t, x);
        const double bl = (1.0 - lam) * b0 + lam * b1;
        const double hl = (1.0 - lam) * h0 + lam * h1;
        Eigen::Vector2d d;
        d(0) = -v(0) * (b1 - b0) / bl;            // d/dlam (ct * beta_l) = 0
        d(1) = -0.5 * v(1) * (h1 - h0) / hl;      // Y' + 1/2 h^-1 h' Y = 0
        return d;
    };
    int n = std::max(1, (int)std::ceil(1.0 / step));
    const double dl = 1.0 / n;
    double lam = 0.0;
    for (int i = 0; i < n; ++i) {
        Eigen::Vector2d k1 = rate(lam, y);
        Eigen::Vector2d k2 = rate(lam + 0.5 * dl, y + 0.5 * dl * k1);
        Eigen::Vector2d k3 = rate(lam + 0.5 * dl, y + 0.5 * dl * k2);
        Eigen::Vector2d k4 = rate(lam + dl, y + dl * k3);
        y += (dl / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        lam += dl;
    }
    return y;
}

}  // namespace

Eigen::Vector2d transport_vector(const MetricPath& path, double t, double x,
                                 const Eigen::Vector2d& Y0, double lambda_step) {
    return rk4_transport(path, t, x, Y0, lambda_step);
}

TransportResult transport_frame(const MetricPath& path, const GammaRep& rep, double t,
                                double x, double lambda_step) {
    TransportResult out;
    out.lambda_step = lambda_step;

    const double b0 = path.g0.beta(t, x);
    const double h0 = path.g0.h(t, x);
    // transport the g0-orthonormal frame e0 = (1/b0, 0), e1 = (0, 1/sqrt(h0))
    Eigen::Vector2d E0 = transport_vector(path, t, x, {1.0 / b0, 0.0}, lambda_step);
    Eigen::Vector2d E1 = transport_vector(path, t, x, {0.0, 1.0 / std::sqrt(h0)}, lambda_step);
    out.wp.col(0) = E0 * b0;  // columns: image of d_t, d_x in coordinates
    out.wp.col(1) = E1 * std::sqrt(h0);
    // fix the column scaling: wp maps coordinate vectors; d_t = b0 * e0
    // (E0 is the image of e0, so image of d_t is b0*E0, image of d_x is sqrt(h0)*E1)

    // rapidity of the transported frame against the g1-orthonormal frame
    const double b1 = path.g1.beta(t, x);
    const double h1 = path.g1.h(t, x);
    const double c = b1 * E0(0);              // e0^1-component of E0
    const double s = std::sqrt(h1) * E0(1);   // e1^1-component of E0
    const double theta = 0.5 * std::log((c + s) / (c - s));

    const Mat2 gen = rep.gamma0 * rep.gamma1;
    const Mat2 kp = (0.5 * theta * gen).exp();
    const Mat2 km = (-0.5 * theta * gen).exp();

    // pick the lift sign by the Clifford-intertwining residual on the frame
    auto residual = [&](const Mat2& k) {
        double r = 0.0;
        // gamma1(wp v) k - k gamma0(v) for v in {e0, e1}
        Mat2 g1E0 = clifford_of(rep, path.g1, t, x, E0(0), E0(1));
        Mat2 g1E1 = clifford_of(rep, path.g1, t, x, E1(0), E1(1));
        r += (g1E0 * k - k * rep.gamma0).norm();
        r += (g1E1 * k - k * rep.gamma1).norm();
        return r;
    };
    out.kappa = residual(kp) <= residual(km) ? kp : km;
    return out;
}

Mat2 transport_spinor(const MetricPath& path, const GammaRep& rep, double t, double x,
                      double lambda_step) {
    return transport_frame(path, rep, t, x, lambda_step).kappa;
}

Eigen::Vector2d transport_covector(const MetricPath& path, double t, double x,
                                   const Eigen::Vector2d& xi, double lambda_step) {
    // sharp/flat in the symbol-adapted convention; the sign cancels in the
    // round trip so the duality transport is convention-independent
    const double b0 = path.g0.beta(t, x), h0 = path.g0.h(t, x);
    const double b1 = path.g1.beta(t, x), h1 = path.g1.h(t, x);
    Eigen::Vector2d v{xi(0) / (b0 * b0), -xi(1) / h0};
    Eigen::Vector2d w = transport_vector(path, t, x, v, lambda_step);
    return {b1 * b1 * w(0), -h1 * w(1)};
}

KappaF kappa_f(double f_value, const Mat2& kappa) {
    if (!(f_value > 0.0)) throw std::invalid_argument("kappa_f: f must be positive");
    return KappaF{f_value, kappa};
}

}  // namespace md
