#include "moller/dirac.hpp"

#include <random>

namespace md {

namespace {
constexpr double kFD = 1e-5;  // step for derivatives of closed-form coefficients
}

Eigen::Vector2d sharp(const SplitMetric& g, double t, double x, const Eigen::Vector2d& xi) {
    const double b = g.beta(t, x);
    return {xi(0) / (b * b), -xi(1) / g.h(t, x)};
}

Eigen::Vector2d flat(const SplitMetric& g, double t, double x, const Eigen::Vector2d& v) {
    const double b = g.beta(t, x);
    return {b * b * v(0), -g.h(t, x) * v(1)};
}

FirstOrderSystem build_dirac(const SplitMetric& g, const GammaRep& rep,
                             std::optional<MatField> potential) {
    if (potential) {
        // spot-check skewness w.r.t. the spin form
        const Mat2 M = rep.spin_form;
        for (double t : {0.1 * g.T, 0.6 * g.T})
            for (double x : {0.2 * g.L, 0.7 * g.L}) {
                const Mat2 MV = M * (*potential)(t, x);
                if ((MV + MV.adjoint()).norm() > 1e-10)
                    throw std::invalid_argument("build_dirac: potential is not skew w.r.t. the spin form");
            }
    }
    FirstOrderSystem D;
    D.metric = g;
    D.rep = rep;
    D.sigma_dt = [g, rep](double t, double x) -> Mat2 {
        return rep.gamma0 / g.beta(t, x);
    };
    D.A = [g, rep](double t, double x) -> Mat2 {
        return -rep.gamma1 / std::sqrt(g.h(t, x));
    };
    D.B = [g, rep, potential](double t, double x) -> Mat2 {
        const double b = g.beta(t, x);
        const double h = g.h(t, x);
        const double dbdx = (g.beta(t, x + kFD) - g.beta(t, x - kFD)) / (2 * kFD);
        const double dhdt = (g.h(t + kFD, x) - g.h(t - kFD, x)) / (2 * kFD);
        const double p = dbdx / (b * std::sqrt(h));
        const double q = dhdt / (2.0 * b * h);
        Mat2 B = 0.5 * (q * rep.gamma0 - p * rep.gamma1);
        if (potential) B += (*potential)(t, x);
        return B;
    };
    return D;
}

FirstOrderSystem intertwine(const FirstOrderSystem& D0, const SplitMetric& g1,
                            std::function<KappaF(double, double)> kf) {
    FirstOrderSystem D;
    D.metric = g1;
    D.rep = D0.rep;
    auto s0 = D0.sigma_dt;
    auto A0 = D0.A;
    auto B0 = D0.B;
    D.sigma_dt = [s0, kf](double t, double x) -> Mat2 {
        KappaF k = kf(t, x);
        return k.kappa * s0(t, x) * k.kappa.inverse();
    };
    D.A = [A0, kf](double t, double x) -> Mat2 {
        KappaF k = kf(t, x);
        return k.kappa * A0(t, x) * k.kappa.inverse();
    };
    D.B = [s0, A0, B0, kf](double t, double x) -> Mat2 {
        KappaF k = kf(t, x);
        const Mat2 ki = k.kappa.inverse();
        KappaF ktp = kf(t + kFD, x), ktm = kf(t - kFD, x);
        KappaF kxp = kf(t, x + kFD), kxm = kf(t, x - kFD);
        const double dft = (ktp.f - ktm.f) / (2 * kFD);
        const double dfx = (kxp.f - kxm.f) / (2 * kFD);
        const Mat2 dki_dt = (ktp.kappa.inverse() - ktm.kappa.inverse()) / (2 * kFD);
        const Mat2 dki_dx = (kxp.kappa.inverse() - kxm.kappa.inverse()) / (2 * kFD);
        Mat2 out = k.kappa * B0(t, x) * ki;
        out -= (dft / k.f) * (k.kappa * s0(t, x) * ki);
        out -= (dfx / k.f) * (k.kappa * A0(t, x) * ki);
        out += k.kappa * s0(t, x) * dki_dt;
        out += k.kappa * A0(t, x) * dki_dx;
        return out;
    };
    return D;
}

FirstOrderSystem interpolate_operator(const FirstOrderSystem& D01,
                                      const FirstOrderSystem& D1, const ChiProfile& chi) {
    FirstOrderSystem D;
    D.metric = D1.metric;
    D.rep = D1.rep;
    auto c = chi.chi;
    auto dc = chi.dchi;
    auto s01 = D01.sigma_dt, A01 = D01.A, B01 = D01.B;
    auto s1 = D1.sigma_dt, A1 = D1.A, B1 = D1.B;
    auto weight = [c](double t) {
        const double v = c(t);
        if (v < -1e-12 || v > 1.0 + 1e-12)
            throw std::invalid_argument("interpolate_operator: chi out of [0,1]");
        return v;
    };
    D.sigma_dt = [=](double t, double x) -> Mat2 {
        const double w = weight(t);
        return (1.0 - w) * s01(t, x) + w * s1(t, x);
    };
    D.A = [=](double t, double x) -> Mat2 {
        const double w = weight(t);
        return (1.0 - w) * A01(t, x) + w * A1(t, x);
    };
    D.B = [=](double t, double x) -> Mat2 {
        const double w = weight(t);
        Mat2 out = (1.0 - w) * B01(t, x) + w * B1(t, x);
        // sigma(dchi) = chi'(t) * sigma(dt)
        out += 0.5 * dc(t) * (s1(t, x) - s01(t, x));
        return out;
    };
    return D;
}

double check_skew_adjoint(const FirstOrderSystem& D, int Nx, int Nt, unsigned seed) {
    const double T = D.metric.T, L = D.metric.L;
    const double dx = L / Nx, dt = T / Nt;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    // two random smooth compactly supported sections
    struct Sec {
        double kx, wt;
        Vec2c amp;
    };
    auto mk = [&]() {
        Sec s;
        s.kx = 2.0 * M_PI * std::round(3.0 * uni(rng));
        s.wt = 2.0 * M_PI * std::round(3.0 * uni(rng));
        s.amp = Vec2c(std::complex<double>(uni(rng), uni(rng)),
                      std::complex<double>(uni(rng), uni(rng)));
        return s;
    };
    Sec sp = mk(), sq = mk();
    auto eval = [&](const Sec& s, double t, double x) -> Vec2c {
        const double env = smooth_window(t / T, 0.12, 0.88, 0.12) *
                           smooth_window(x / L, 0.12, 0.88, 0.12);
        const std::complex<double> ph =
            std::exp(std::complex<double>(0.0, s.kx * x / L + s.wt * t / T));
        return env * ph * s.amp;
    };

    // sample on the grid
    std::vector<SpinorSlice> psi(Nt + 1, SpinorSlice(2, Nx + 1)), phi = psi;
    for (int k = 0; k <= Nt; ++k)
        for (int j = 0; j <= Nx; ++j) {
            psi[k].col(j) = eval(sp, k * dt, j * dx);
            phi[k].col(j) = eval(sq, k * dt, j * dx);
        }

    auto apply_D = [&](const std::vector<SpinorSlice>& u, int k, int j) -> Vec2c {
        const double t = k * dt, x = j * dx;
        Vec2c du_t, du_x;
        if (k == 0)
            du_t = (u[1].col(j) - u[0].col(j)) / dt;
        else if (k == Nt)
            du_t = (u[Nt].col(j) - u[Nt - 1].col(j)) / dt;
        else
            du_t = (u[k + 1].col(j) - u[k - 1].col(j)) / (2 * dt);
        if (j == 0)
            du_x = (u[k].col(1) - u[k].col(0)) / dx;
        else if (j == Nx)
            du_x = (u[k].col(Nx) - u[k].col(Nx - 1)) / dx;
        else
            du_x = (u[k].col(j + 1) - u[k].col(j - 1)) / (2 * dx);
        return D.sigma_dt(t, x) * du_t + D.A(t, x) * du_x + D.B(t, x) * u[k].col(j);
    };

    const Mat2 M = D.rep.spin_form;
    std::complex<double> acc = 0.0;
    double norm2 = 0.0;
    for (int k = 0; k <= Nt; ++k)
        for (int j = 0; j <= Nx; ++j) {
            const double t = k * dt, x = j * dx;
            double w = dt * dx * D.metric.beta(t, x) * std::sqrt(D.metric.h(t, x));
            if (k == 0 || k == Nt) w *= 0.5;
            if (j == 0 || j == Nx) w *= 0.5;
            const Vec2c Dp = apply_D(psi, k, j), Dq = apply_D(phi, k, j);
            acc += w * ((Dp.adjoint() * M * phi[k].col(j))(0, 0) +
                        (psi[k].col(j).adjoint() * M * Dq)(0, 0));
            norm2 += w * (psi[k].col(j).squaredNorm() + phi[k].col(j).squaredNorm());
        }
    return std::abs(acc) / norm2;
}

}  // namespace md
