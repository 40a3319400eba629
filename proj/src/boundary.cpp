#include "moller/boundary.hpp"

namespace md {

Eigen::Vector2d outward_normal(const SplitMetric& g, double t, BoundarySide side) {
    const double x = side == BoundarySide::Left ? 0.0 : g.L;
    const double s = side == BoundarySide::Left ? -1.0 : 1.0;
    return {0.0, s / std::sqrt(g.h(t, x))};
}

namespace {
BoundarySide side_of(const SplitMetric& g, double x) {
    if (std::abs(x) < 1e-12) return BoundarySide::Left;
    if (std::abs(x - g.L) < 1e-12) return BoundarySide::Right;
    throw std::domain_error("boundary projector requested at an interior point");
}
}  // namespace

BoundarySpace mit_projector(const GammaRep& rep, const SplitMetric& g, double t,
                            BoundarySide side) {
    const double x = side == BoundarySide::Left ? 0.0 : g.L;
    const Eigen::Vector2d n = outward_normal(g, t, side);
    const Mat2 gn = clifford_of(rep, g, t, x, n(0), n(1));
    BoundarySpace B;
    B.projector = 0.5 * (Mat2::Identity() + std::complex<double>(0, 1) * gn);
    B.side = side;
    B.label = BoundaryLabel::MIT;
    return B;
}

BoundarySpace mit_projector(const GammaRep& rep, const SplitMetric& g, double t, double x) {
    return mit_projector(rep, g, t, side_of(g, x));
}

BoundarySpace chiral_projector(const GammaRep& rep, const SplitMetric& g, double t,
                               BoundarySide side, int sign) {
    const double x = side == BoundarySide::Left ? 0.0 : g.L;
    const Eigen::Vector2d n = outward_normal(g, t, side);
    const Mat2 gn = clifford_of(rep, g, t, x, n(0), n(1));
    BoundarySpace B;
    B.projector = 0.5 * (Mat2::Identity() + double(sign) * gn * rep.chirality);
    B.side = side;
    B.label = sign > 0 ? BoundaryLabel::ChiralPlus : BoundaryLabel::ChiralMinus;
    return B;
}

BoundarySpace interpolated_mit(const GammaRep& rep, const MetricPath& path, double chi_value,
                               double t, BoundarySide side) {
    if (chi_value < -1e-12 || chi_value > 1.0 + 1e-12)
        throw std::invalid_argument("interpolated_mit: chi out of [0,1]");
    const double x = side == BoundarySide::Left ? 0.0 : path.g1.L;
    const Eigen::Vector2d n1 = outward_normal(path.g1, t, side);
    const Eigen::Vector2d n0 = outward_normal(path.g0, t, side);
    const Eigen::Vector2d wpn0 = transport_vector(path, t, x, n0);
    const Eigen::Vector2d v = chi_value * n1 + (1.0 - chi_value) * wpn0;
    const double norm2 = metric_eval(path.g1, t, x, v(0), v(1), v(0), v(1));
    if (!(norm2 > 1e-20))
        throw std::runtime_error("interpolated_mit: interpolated normal degenerated");
    const Mat2 gv = clifford_of(rep, path.g1, t, x, v(0), v(1));
    BoundarySpace B;
    B.projector = 0.5 * (Mat2::Identity() +
                         std::complex<double>(0, 1) / std::sqrt(norm2) * gv);
    B.side = side;
    B.label = BoundaryLabel::Interpolated;
    return B;
}

BoundarySpace adjoint_space(const GammaRep& rep, const BoundarySpace& B, const Mat2& sigma_n) {
    if (std::abs(sigma_n.determinant()) < 1e-14)
        throw std::invalid_argument("adjoint_space: singular boundary symbol");
    // spanning vector of ran B
    Eigen::JacobiSVD<Mat2> svd(B.projector, Eigen::ComputeFullU);
    const Vec2c w = svd.matrixU().col(0);
    const Vec2c z = rep.spin_form * (sigma_n * w);
    // spin-form orthocomplement of span(sigma_n w): w'^dag z = 0
    Vec2c wp;
    wp << std::conj(z(1)), -std::conj(z(0));
    wp.normalize();
    BoundarySpace out;
    out.projector = wp * wp.adjoint();
    out.side = B.side;
    out.label = BoundaryLabel::Custom;
    return out;
}

Mat2 SubspaceFamily::phi_matrix(double t) const {
    // pi_{W0} along the splitting V = W0 + W0': solve coordinates in (w0, wperp)
    Mat2 basis;
    basis.col(0) = w0;
    basis.col(1) = wperp;
    const Mat2 binv = basis.inverse();
    // phi_t = Id + t * Fw0 * (row extracting the w0-coordinate)
    return Mat2::Identity() + t * (Fw0 * binv.row(0));
}

SubspaceFamily interpolate_subspace(const Vec2c& w0, const Vec2c& w1, const Mat2& q) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(q);
    if (!(es.eigenvalues()(0) < 0.0 && es.eigenvalues()(1) > 0.0))
        throw std::invalid_argument("interpolate_subspace: q must have inertia (1,1)");
    auto qval = [&](const Vec2c& v) { return std::real((v.adjoint() * q * v)(0, 0)); };
    if (qval(w0) < -1e-12 || qval(w1) < -1e-12)
        throw std::invalid_argument("interpolate_subspace: subspaces must satisfy q >= 0");
    SubspaceFamily fam;
    fam.w0 = w0;
    fam.wperp = es.eigenvectors().col(0);  // negative direction, W0'
    // w1 = alpha*w0 + gamma*wperp
    Mat2 basis;
    basis.col(0) = w0;
    basis.col(1) = fam.wperp;
    const Vec2c coef = basis.inverse() * w1;
    if (std::abs(coef(0)) < 1e-14)
        throw std::runtime_error("interpolate_subspace: W1 meets W0' (construction fails)");
    fam.Fw0 = (coef(1) / coef(0)) * fam.wperp;
    return fam;
}

namespace {

// H0 u = sigma^-1 (-A du/dx - B u) on a slice sampled over [0,L]; coefficients
// optionally time-differentiated (j-th commutator with d_t).
SpinorSlice apply_H(const FirstOrderSystem& D, const SpinorSlice& u, double t, double L,
                    int tderiv) {
    const int N = static_cast<int>(u.cols()) - 1;
    const double dx = L / N;
    const double dtc = 1e-5;
    auto coef = [&](const MatField& F, double x) -> Mat2 {
        if (tderiv == 0) return F(t, x);
        return (F(t + dtc, x) - F(t - dtc, x)) / (2 * dtc);
    };
    SpinorSlice out(2, N + 1);
    for (int j = 0; j <= N; ++j) {
        const double x = j * dx;
        Vec2c du;
        if (j == 0)
            du = (-3.0 * u.col(0) + 4.0 * u.col(1) - u.col(2)) / (2 * dx);
        else if (j == N)
            du = (3.0 * u.col(N) - 4.0 * u.col(N - 1) + u.col(N - 2)) / (2 * dx);
        else
            du = (u.col(j + 1) - u.col(j - 1)) / (2 * dx);
        // sigma^-1 * (time-differentiated (-A, -B)); for tderiv=0 this is H0
        const Mat2 si = D.sigma_dt(t, x).inverse();
        out.col(j) = si * (-coef(D.A, x) * du - coef(D.B, x) * u.col(j));
    }
    return out;
}

}  // namespace

std::vector<double> check_compatibility(const SpinorSlice& data, const SourceFn& source,
                                        const FirstOrderSystem& D, const ProjFn& proj_left,
                                        const ProjFn& proj_right, double t0, int order) {
    if (order < 0 || order > 2)
        throw std::invalid_argument("check_compatibility: order must be in {0,1,2}");
    const int N = static_cast<int>(data.cols()) - 1;
    if (N < 4) throw std::invalid_argument("check_compatibility: stencil needs >= 5 nodes");
    const double L = D.metric.L;
    const double dx = L / N;
    const double dtc = 1e-5;

    auto src_slice = [&](double t, int tderiv) {
        SpinorSlice s = SpinorSlice::Zero(2, N + 1);
        if (!source) return s;
        for (int j = 0; j <= N; ++j) {
            const double x = j * dx;
            auto val = [&](double tt) -> Vec2c {
                return D.sigma_dt(tt, x).inverse() * source(tt, x);
            };
            s.col(j) = tderiv == 0 ? val(t) : (val(t + dtc) - val(t - dtc)) / (2 * dtc);
        }
        return s;
    };

    // h_0, h_1, h_2 of the recursion
    std::vector<SpinorSlice> hk;
    hk.push_back(data);
    if (order >= 1) hk.push_back(apply_H(D, hk[0], t0, L, 0) + src_slice(t0, 0));
    if (order >= 2)
        hk.push_back(apply_H(D, hk[1], t0, L, 0) + apply_H(D, hk[0], t0, L, 1) +
                     src_slice(t0, 1));

    auto pibar = [&](const ProjFn& p, double t, int j) -> Mat2 {
        auto v = [&](double tt) -> Mat2 { return Mat2::Identity() - p(tt); };
        if (j == 0) return v(t);
        if (j == 1) return (v(t + dtc) - v(t - dtc)) / (2 * dtc);
        return (v(t + dtc) - 2.0 * v(t) + v(t - dtc)) / (dtc * dtc);
    };

    std::vector<double> res;
    for (int k = 0; k <= order; ++k) {
        double worst = 0.0;
        for (int side = 0; side < 2; ++side) {
            const ProjFn& p = side == 0 ? proj_left : proj_right;
            const int node = side == 0 ? 0 : N;
            Vec2c acc = Vec2c::Zero();
            for (int j = 0; j <= k; ++j) {
                double binom = (k == 2 && j == 1) ? 2.0 : 1.0;
                acc += binom * pibar(p, t0, j) * hk[k - j].col(node);
            }
            worst = std::max(worst, acc.norm());
        }
        res.push_back(worst);
    }
    return res;
}

std::vector<double> check_compatibility(const SpinorSlice& data, const SourceFn& source,
                                        const FirstOrderSystem& D, const BoundarySpace& Bl,
                                        const BoundarySpace& Br, double t0, int order) {
    Mat2 pl = Bl.projector, pr = Br.projector;
    return check_compatibility(
        data, source, D, [pl](double) { return pl; }, [pr](double) { return pr; }, t0,
        order);
}

}  // namespace md
