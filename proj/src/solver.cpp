#include "moller/solver.hpp"

#include <sstream>

namespace md {

SpinorHistory SpinorHistory::reversed() const {
    SpinorHistory out;
    out.times.assign(times.rbegin(), times.rend());
    out.slices.assign(slices.rbegin(), slices.rend());
    return out;
}

std::string EvolutionReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "t,energy,boundary_residual,support_left,support_right\n";
    for (size_t i = 0; i < t.size(); ++i)
        os << t[i] << "," << energy[i] << "," << boundary_residual[i] << ","
           << support_left[i] << "," << support_right[i] << "\n";
    return os.str();
}

std::complex<double> herm_product(const FirstOrderSystem& D, double t,
                                  const SpinorSlice& psi, const SpinorSlice& phi) {
    if (psi.cols() != phi.cols()) throw std::invalid_argument("herm_product: shape mismatch");
    const int N = static_cast<int>(psi.cols()) - 1;
    const double dx = D.metric.L / N;
    const Mat2 M = D.rep.spin_form;
    std::complex<double> acc = 0.0;
    for (int j = 0; j <= N; ++j) {
        const double x = j * dx;
        double w = dx * D.metric.beta(t, x) * std::sqrt(D.metric.h(t, x));
        if (j == 0 || j == N) w *= 0.5;
        acc += w * (psi.col(j).adjoint() * (M * D.sigma_dt(t, x)) * phi.col(j))(0, 0);
    }
    return acc;
}

namespace {

double max_system_speed(const FirstOrderSystem& D, double ta, double tb) {
    double s = 0.0;
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            const double t = ta + (tb - ta) * i / 20.0;
            const double x = D.metric.L * j / 20.0;
            const Mat2 m = D.sigma_dt(t, x).inverse() * D.A(t, x);
            Eigen::ComplexEigenSolver<Mat2> es(m);
            s = std::max(s, es.eigenvalues().cwiseAbs().maxCoeff());
        }
    return s;
}

struct BoundaryOps {
    Mat2 sat;  // full penalty matrix applied to psi at the node
};

// SAT penalty at boundary node b: (2 tau / P_bb) F^-1 Lambda_- (Id - pi_B)
BoundaryOps make_sat(const FirstOrderSystem& D, const BoundarySpace& B, double t,
                     double dx, bool right, double tau) {
    const double x = right ? D.metric.L : 0.0;
    const double mu = D.metric.beta(t, x) * std::sqrt(D.metric.h(t, x));
    const Mat2 M = D.rep.spin_form;
    const Mat2 F = mu * M * D.sigma_dt(t, x);
    const Mat2 lam = (right ? 1.0 : -1.0) * mu * (M * D.A(t, x));
    Eigen::SelfAdjointEigenSolver<Mat2> es(lam);
    Mat2 lam_minus = Mat2::Zero();
    for (int i = 0; i < 2; ++i) {
        const double ev = es.eigenvalues()(i);
        if (ev < 0.0)
            lam_minus += ev * es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    }
    const double Pbb = 0.5 * dx;
    BoundaryOps out;
    out.sat = (2.0 * tau / Pbb) * F.inverse() * lam_minus *
              (Mat2::Identity() - B.projector);
    return out;
}

SpinorSlice rhs(const FirstOrderSystem& D, const BoundarySpace& Bl, const BoundarySpace& Br,
                const SourceFn& source, double t, double dx, const SpinorSlice& U,
                double tau) {
    const int N = static_cast<int>(U.cols()) - 1;
    SpinorSlice dU(2, N + 1);
    for (int j = 0; j <= N; ++j) {
        const double x = j * dx;
        Vec2c du;
        if (j == 0)
            du = (U.col(1) - U.col(0)) / dx;
        else if (j == N)
            du = (U.col(N) - U.col(N - 1)) / dx;
        else
            du = (U.col(j + 1) - U.col(j - 1)) / (2 * dx);
        Vec2c f = source ? source(t, x) : Vec2c::Zero().eval();
        dU.col(j) = D.sigma_dt(t, x).inverse() *
                    (f - D.A(t, x) * du - D.B(t, x) * U.col(j));
    }
    dU.col(0) += make_sat(D, Bl, t, dx, false, tau).sat * U.col(0);
    dU.col(N) += make_sat(D, Br, t, dx, true, tau).sat * U.col(N);
    return dU;
}

void append_report(EvolutionReport* rep, const FirstOrderSystem& D, const BoundarySpace& Bl,
                   const BoundarySpace& Br, double t_phys, const SpinorSlice& U) {
    if (!rep) return;
    const int N = static_cast<int>(U.cols()) - 1;
    const double dx = D.metric.L / N;
    rep->t.push_back(t_phys);
    rep->energy.push_back(std::real(herm_product(D, t_phys, U, U)));
    const double br = ((Mat2::Identity() - Bl.projector) * U.col(0)).norm() +
                      ((Mat2::Identity() - Br.projector) * U.col(N)).norm();
    rep->boundary_residual.push_back(br);
    const double mx = U.cwiseAbs().maxCoeff();
    double lo = D.metric.L, hi = 0.0;  // empty-support convention lo > hi
    if (mx > 0.0) {
        for (int j = 0; j <= N; ++j)
            if (U.col(j).norm() > 1e-12 * mx) {
                lo = std::min(lo, j * dx);
                hi = std::max(hi, j * dx);
            }
    }
    rep->support_left.push_back(lo);
    rep->support_right.push_back(hi);
}

}  // namespace

SpinorHistory evolve(const FirstOrderSystem& D, const BoundarySpace& Bl,
                     const BoundarySpace& Br, const SpinorSlice& data,
                     const SourceFn& source, const Grid& grid, double tau,
                     EvolutionReport* report) {
    if (grid.cfl <= 0.0 || grid.cfl > 1.0)
        throw std::invalid_argument("evolve: CFL number out of range");

    if (grid.t1 < grid.t0) {
        // time reflection about the interval midpoint: s -> t0 + t1 - s
        const double t0 = grid.t0, t1 = grid.t1;
        FirstOrderSystem R;
        R.metric = D.metric;
        R.rep = D.rep;
        auto s0 = D.sigma_dt, A0 = D.A, B0 = D.B;
        R.sigma_dt = [s0, t0, t1](double s, double x) { return s0(t0 + t1 - s, x); };
        R.A = [A0, t0, t1](double s, double x) -> Mat2 { return -A0(t0 + t1 - s, x); };
        R.B = [B0, t0, t1](double s, double x) -> Mat2 { return -B0(t0 + t1 - s, x); };
        SourceFn rsrc;
        if (source)
            rsrc = [source, t0, t1](double s, double x) -> Vec2c {
                return -source(t0 + t1 - s, x);
            };
        Grid rg = grid;
        rg.t0 = t1;
        rg.t1 = t0;
        SpinorHistory h = evolve(R, Bl, Br, data, rsrc, rg, tau, report);
        for (auto& t : h.times) t = t0 + t1 - t;
        if (report)
            for (auto& t : report->t) t = t0 + t1 - t;
        return h;
    }

    const int N = grid.N;
    const double dx = D.metric.L / N;
    const double smax = std::max(1e-12, max_system_speed(D, grid.t0, grid.t1));
    const double dt0 = grid.cfl * dx / smax;
    const int nsteps = std::max(1, (int)std::ceil((grid.t1 - grid.t0) / dt0 - 1e-12));
    const double dt = (grid.t1 - grid.t0) / nsteps;

    SpinorHistory hist;
    SpinorSlice U = data;
    hist.times.push_back(grid.t0);
    hist.slices.push_back(U);
    append_report(report, D, Bl, Br, grid.t0, U);

    for (int s = 0; s < nsteps; ++s) {
        const double t = grid.t0 + s * dt;
        SpinorSlice k1 = rhs(D, Bl, Br, source, t, dx, U, tau);
        SpinorSlice k2 = rhs(D, Bl, Br, source, t + 0.5 * dt, dx, (U + 0.5 * dt * k1).eval(), tau);
        SpinorSlice k3 = rhs(D, Bl, Br, source, t + 0.5 * dt, dx, (U + 0.5 * dt * k2).eval(), tau);
        SpinorSlice k4 = rhs(D, Bl, Br, source, t + dt, dx, (U + dt * k3).eval(), tau);
        U += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!U.allFinite()) throw std::runtime_error("evolve: divergence (NaN/Inf) detected");
        hist.times.push_back(t + dt);
        hist.slices.push_back(U);
        append_report(report, D, Bl, Br, t + dt, U);
    }
    return hist;
}

SpinorSlice restrict_slice(const SpinorHistory& hist, double t) {
    if (hist.times.empty()) throw std::invalid_argument("restrict_slice: empty history");
    const double lo = std::min(hist.times.front(), hist.times.back());
    const double hi = std::max(hist.times.front(), hist.times.back());
    if (t < lo - 1e-9 || t > hi + 1e-9)
        throw std::out_of_range("restrict_slice: time outside stored range");
    size_t best = 0;
    double bd = std::abs(hist.times[0] - t);
    for (size_t i = 1; i < hist.times.size(); ++i) {
        const double d = std::abs(hist.times[i] - t);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return hist.slices[best];
}

SpinorHistory green(const FirstOrderSystem& D, const BoundarySpace& Bl,
                    const BoundarySpace& Br, const SourceFn& source, int direction,
                    const Grid& grid) {
    // support guard: the source must vanish near both temporal ends
    {
        const int N = grid.N;
        const double dx = D.metric.L / N;
        const double span = grid.t1 - grid.t0;
        for (double tg : {grid.t0, grid.t0 + 0.02 * span, grid.t1 - 0.02 * span, grid.t1})
            for (int j = 0; j <= N; ++j)
                if (source && source(tg, j * dx).norm() > 1e-14)
                    throw std::invalid_argument("green: source touches the temporal ends");
    }
    SpinorSlice zero = SpinorSlice::Zero(2, grid.N + 1);
    if (direction > 0) return evolve(D, Bl, Br, zero, source, grid);
    Grid back = grid;
    back.t0 = grid.t1;
    back.t1 = grid.t0;
    return evolve(D, Bl, Br, zero, source, back).reversed();
}

double check_energy_identity(const SpinorHistory& hist, const FirstOrderSystem& D) {
    if (hist.times.empty()) return 0.0;
    const double e0 = std::real(herm_product(D, hist.times[0], hist.slices[0], hist.slices[0]));
    double drift = 0.0;
    for (size_t i = 0; i < hist.times.size(); ++i) {
        const double e = std::real(herm_product(D, hist.times[i], hist.slices[i], hist.slices[i]));
        drift = std::max(drift, std::abs(e - e0));
    }
    return drift;
}

double interior_residual(const FirstOrderSystem& D, const SpinorHistory& hist,
                         const SourceFn& source, int t_margin, int x_margin) {
    const int nt = static_cast<int>(hist.times.size()) - 1;
    const int N = static_cast<int>(hist.slices[0].cols()) - 1;
    const double dx = D.metric.L / N;
    const double dt = hist.times[1] - hist.times[0];
    double acc = 0.0;
    double vol = 0.0;
    for (int k = t_margin; k <= nt - t_margin; ++k) {
        const double t = hist.times[k];
        for (int j = x_margin; j <= N - x_margin; ++j) {
            const double x = j * dx;
            const Vec2c du_t = (hist.slices[k + 1].col(j) - hist.slices[k - 1].col(j)) / (2 * dt);
            const Vec2c du_x = (hist.slices[k].col(j + 1) - hist.slices[k].col(j - 1)) / (2 * dx);
            Vec2c r = D.sigma_dt(t, x) * du_t + D.A(t, x) * du_x +
                      D.B(t, x) * hist.slices[k].col(j);
            if (source) r -= source(t, x);
            acc += r.squaredNorm() * std::abs(dt) * dx;
            vol += std::abs(dt) * dx;
        }
    }
    return std::sqrt(acc / std::max(vol, 1e-300));
}

double mass_outside_cone(const SpinorHistory& hist, const FirstOrderSystem& D, double a,
                         double b, const std::function<double(double)>& speed,
                         double inflate) {
    const int N = static_cast<int>(hist.slices[0].cols()) - 1;
    const double dx = D.metric.L / N;
    double worst = 0.0;
    double radius = 0.0;
    for (size_t k = 0; k < hist.times.size(); ++k) {
        if (k > 0) {
            const double dt = std::abs(hist.times[k] - hist.times[k - 1]);
            radius += 0.5 * dt * (speed(hist.times[k]) + speed(hist.times[k - 1]));
        }
        const double lo = a - radius - inflate;
        const double hi = b + radius + inflate;
        double inside = 0.0, outside = 0.0;
        for (int j = 0; j <= N; ++j) {
            const double x = j * dx;
            const double m = hist.slices[k].col(j).squaredNorm();
            if (x < lo || x > hi)
                outside += m;
            else
                inside += m;
        }
        const double tot = inside + outside;
        if (tot > 0.0) worst = std::max(worst, outside / tot);
    }
    return worst;
}

}  // namespace md
