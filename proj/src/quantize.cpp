#include "moller/quantize.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <stdexcept>

namespace md {

namespace {

MatX kron(const MatX& a, const MatX& b) {
    MatX out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

MatX swap_halves(int k) {
    MatX s = MatX::Zero(2 * k, 2 * k);
    s.block(0, k, k, k).setIdentity();
    s.block(k, 0, k, k).setIdentity();
    return s;
}

VecX chol_solve(const MatX& L, const VecX& rhs) {
    // solves L L^dag a = rhs
    VecX y = L.triangularView<Eigen::Lower>().solve(rhs);
    return L.adjoint().triangularView<Eigen::Upper>().solve(y);
}

Vec2c span_of(const Mat2& proj) {
    Vec2c c0 = proj.col(0), c1 = proj.col(1);
    Vec2c v = c0.norm() >= c1.norm() ? c0 : c1;
    if (v.norm() < 1e-10) throw std::runtime_error("degenerate boundary projector");
    return v.normalized();
}

}  // namespace

MatX DoubledSpace::gram_doubled() const {
    MatX g = MatX::Zero(2 * k, 2 * k);
    g.topLeftCorner(k, k) = gram;
    g.bottomRightCorner(k, k) = gram.conjugate();
    return g;
}

VecX DoubledSpace::gamma_apply(const VecX& v) const {
    if (v.size() != 2 * k) throw std::invalid_argument("doubled vector size");
    VecX out(2 * k);
    out.head(k) = v.tail(k).conjugate();
    out.tail(k) = v.head(k).conjugate();
    return out;
}

VecX DoubledSpace::to_on(const VecX& v) const {
    VecX out(2 * k);
    out.head(k) = chol_L.adjoint() * v.head(k);
    out.tail(k) = chol_L.transpose() * v.tail(k);
    return out;
}

VecX DoubledSpace::from_on(const VecX& v) const {
    VecX out(2 * k);
    out.head(k) = chol_L.adjoint().triangularView<Eigen::Upper>().solve(v.head(k));
    out.tail(k) = chol_L.transpose().triangularView<Eigen::Upper>().solve(v.tail(k));
    return out;
}

DoubledSpace build_doubled_space(const std::vector<SpinorSlice>& solutions,
                                 const FirstOrderSystem& D, double t_ref) {
    DoubledSpace s;
    s.basis = solutions;
    s.t_ref = t_ref;
    s.k = static_cast<int>(solutions.size());
    if (s.k == 0) throw std::invalid_argument("empty solution family");
    s.gram.resize(s.k, s.k);
    for (int i = 0; i < s.k; ++i)
        for (int j = 0; j < s.k; ++j)
            s.gram(i, j) = herm_product(D, t_ref, solutions[i], solutions[j]);
    s.gram = 0.5 * (s.gram + s.gram.adjoint()).eval();
    Eigen::LLT<MatX> llt(s.gram);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("solution gram not positive definite");
    s.chol_L = llt.matrixL();
    return s;
}

MatX CarRep::xi_on(const VecX& v_on) const {
    const int dim = 1 << k;
    MatX out = MatX::Zero(dim, dim);
    MatX s = swap_halves(k);
    for (int i = 0; i < k; ++i) {
        std::complex<double> alpha = wbasis.col(i).dot(v_on);           // w_i^dag v
        std::complex<double> beta = (s * wbasis.col(i).conjugate()).dot(v_on);
        out += alpha * ann[i] + beta * ann[i].adjoint();
    }
    return out;
}

MatX CarRep::xi(const VecX& doubled_raw) const {
    return xi_on(space->to_on(doubled_raw));
}

VecX CarRep::vacuum() const {
    VecX v = VecX::Zero(1 << k);
    v(0) = 1.0;
    return v;
}

std::complex<double> CarRep::vac_expect(const MatX& X) const { return X(0, 0); }

namespace {

CarRep make_jw(const DoubledSpace& space, const MatX& wbasis) {
    CarRep rep;
    rep.k = space.k;
    rep.space = &space;
    rep.wbasis = wbasis;
    if (rep.k > 12) throw std::invalid_argument("CAR representation too large");
    MatX a(2, 2), z(2, 2), id2 = MatX::Identity(2, 2);
    a << 0, 1, 0, 0;
    z << 1, 0, 0, -1;
    for (int i = 0; i < rep.k; ++i) {
        MatX m = MatX::Identity(1, 1);
        for (int j = 0; j < rep.k; ++j) m = kron(m, j < i ? z : (j == i ? a : id2));
        rep.ann.push_back(m);
    }
    return rep;
}

}  // namespace

CarRep car_representation(const DoubledSpace& space) {
    MatX w = MatX::Zero(2 * space.k, space.k);
    w.topRows(space.k).setIdentity();
    return make_jw(space, w);
}

CarRep car_representation(const DoubledSpace& space, const QuasiFreeState& st) {
    // transform Q to ON coordinates and take the (near-)kernel eigenvectors
    const int k = space.k;
    MatX t = MatX::Zero(2 * k, 2 * k), tinv = MatX::Zero(2 * k, 2 * k);
    t.topLeftCorner(k, k) = space.chol_L.adjoint();
    t.bottomRightCorner(k, k) = space.chol_L.transpose();
    tinv.topLeftCorner(k, k) =
        MatX(space.chol_L.adjoint()).inverse();
    tinv.bottomRightCorner(k, k) = MatX(space.chol_L.transpose()).inverse();
    MatX q_on = t * st.Q * tinv;
    MatX sym = 0.5 * (q_on + q_on.adjoint());
    Eigen::SelfAdjointEigenSolver<MatX> es(sym);
    if (es.eigenvalues()(k - 1) > 0.5 || es.eigenvalues()(k) < 0.5)
        throw std::runtime_error("state is not pure enough to adapt a Fock vacuum");
    return make_jw(space, es.eigenvectors().leftCols(k));
}

MatX gamma_conj(const MatX& Q) {
    const int k = static_cast<int>(Q.rows()) / 2;
    MatX s = swap_halves(k);
    return s * Q.conjugate() * s;
}

StateCertificate certify_state(const DoubledSpace& space, const QuasiFreeState& st) {
    StateCertificate c;
    MatX gd = space.gram_doubled();
    MatX m = gd * st.Q;
    c.herm_residual = (m - m.adjoint()).norm() / std::max(1.0, m.norm());
    c.gamma_residual =
        (st.Q + gamma_conj(st.Q) - MatX::Identity(2 * space.k, 2 * space.k)).norm();
    Eigen::GeneralizedSelfAdjointEigenSolver<MatX> es(0.5 * (m + m.adjoint()), gd);
    c.q_min = es.eigenvalues().minCoeff();
    c.q_max = es.eigenvalues().maxCoeff();
    return c;
}

SpinorSlice UltrastaticHamiltonian::mode_slice(int i) const {
    VecX full = prolong * evecs.col(i);
    SpinorSlice s(2, N + 1);
    for (int j = 0; j <= N; ++j) {
        s(0, j) = full(2 * j);
        s(1, j) = full(2 * j + 1);
    }
    return s;
}

SpinorSlice UltrastaticHamiltonian::project_positive(const SpinorSlice& s) const {
    VecX full(2 * (N + 1));
    for (int j = 0; j <= N; ++j) {
        full(2 * j) = s(0, j) * wdiag[2 * j];
        full(2 * j + 1) = s(1, j) * wdiag[2 * j + 1];
    }
    VecX red = evecs.adjoint() * (prolong.adjoint() * full);
    for (int m = 0; m < red.size(); ++m)
        if (evals(m) <= 0.0) red(m) = 0.0;
    VecX back = prolong * (evecs * red);
    SpinorSlice out(2, N + 1);
    for (int j = 0; j <= N; ++j) {
        out(0, j) = back(2 * j);
        out(1, j) = back(2 * j + 1);
    }
    return out;
}

UltrastaticHamiltonian boundary_hamiltonian(const FirstOrderSystem& D,
                                            const BoundarySpace& Bl,
                                            const BoundarySpace& Br, int N) {
    const SplitMetric& g = D.metric;
    const double ta = 0.0, tb = 0.5 * g.T;
    for (double x : {0.0, g.L / 3.0, 0.7 * g.L, g.L}) {
        double drift = (D.sigma_dt(ta, x) - D.sigma_dt(tb, x)).norm() +
                       (D.A(ta, x) - D.A(tb, x)).norm() + (D.B(ta, x) - D.B(tb, x)).norm();
        if (drift > 1e-10)
            throw std::invalid_argument("boundary_hamiltonian needs a static system");
    }

    UltrastaticHamiltonian ham;
    ham.N = N;
    const double dx = g.L / N;
    const int n2 = 2 * (N + 1);
    ham.wdiag.resize(n2);
    for (int j = 0; j <= N; ++j) {
        double pj = (j == 0 || j == N) ? 0.5 * dx : dx;
        double w = pj * std::sqrt(g.h(0.0, j * dx));
        ham.wdiag[2 * j] = ham.wdiag[2 * j + 1] = w;
    }

    // dense L = -sigma^-1 (A d_x + B), one-sided first derivative at the ends
    MatX lf = MatX::Zero(n2, n2);
    for (int j = 0; j <= N; ++j) {
        const double x = j * dx;
        Mat2 si = D.sigma_dt(0.0, x).inverse();
        Mat2 a = si * D.A(0.0, x), b = si * D.B(0.0, x);
        auto add = [&](int l, double c, const Mat2& m) {
            lf.block<2, 2>(2 * j, 2 * l) -= c * m;
        };
        if (j == 0) {
            add(0, -1.0 / dx, a);
            add(1, 1.0 / dx, a);
        } else if (j == N) {
            add(N - 1, -1.0 / dx, a);
            add(N, 1.0 / dx, a);
        } else {
            add(j - 1, -0.5 / dx, a);
            add(j + 1, 0.5 / dx, a);
        }
        add(j, 1.0, b);
    }

    // restriction to the boundary-constrained subspace, W-orthonormal columns
    const int nred = 2 * N;
    ham.prolong = MatX::Zero(n2, nred);
    int col = 0;
    Vec2c ul = span_of(Bl.projector), ur = span_of(Br.projector);
    ham.prolong.block<2, 1>(0, col++) = ul / std::sqrt(ham.wdiag[0]);
    for (int j = 1; j < N; ++j) {
        double s = 1.0 / std::sqrt(ham.wdiag[2 * j]);
        ham.prolong(2 * j, col++) = s;
        ham.prolong(2 * j + 1, col++) = s;
    }
    ham.prolong.block<2, 1>(2 * N, col++) = ur / std::sqrt(ham.wdiag[2 * N]);

    MatX w = MatX::Zero(n2, n2);
    for (int i = 0; i < n2; ++i) w(i, i) = ham.wdiag[i];
    MatX hred = ham.prolong.adjoint() * w *
                (std::complex<double>(0.0, 1.0) * lf) * ham.prolong;

    Eigen::ComplexEigenSolver<MatX> raw(hred, false);
    ham.max_imag = raw.eigenvalues().imag().cwiseAbs().maxCoeff();

    Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (hred + hred.adjoint()));
    ham.evals = es.eigenvalues();
    ham.evecs = es.eigenvectors();

    // The central stencil carries a sawtooth doubler branch exactly degenerate
    // with the physical one, so the eigensolver returns arbitrary mixtures
    // within each pair. Rotate each (near-)degenerate cluster to diagonalize
    // the second-difference roughness form; that splits the cluster into a
    // smooth mode and a grid-scale one and makes the split reproducible.
    const int nmodes = static_cast<int>(ham.evals.size());
    auto rough_of = [&](const VecX& red) {
        VecX full = ham.prolong * red;
        double hf = 0.0, tot = 0.0;
        for (int j = 1; j < N; ++j)
            for (int c = 0; c < 2; ++c) {
                std::complex<double> d2 = full(2 * (j + 1) + c) - 2.0 * full(2 * j + c) +
                                          full(2 * (j - 1) + c);
                hf += std::norm(d2);
                tot += 4.0 * std::norm(full(2 * j + c));
            }
        return hf / std::max(tot, 1e-300);
    };
    auto rough_pair = [&](const VecX& ra, const VecX& rb) {
        VecX fa = ham.prolong * ra, fb = ham.prolong * rb;
        std::complex<double> acc = 0.0;
        for (int j = 1; j < N; ++j)
            for (int c = 0; c < 2; ++c) {
                std::complex<double> da = fa(2 * (j + 1) + c) - 2.0 * fa(2 * j + c) +
                                          fa(2 * (j - 1) + c);
                std::complex<double> db = fb(2 * (j + 1) + c) - 2.0 * fb(2 * j + c) +
                                          fb(2 * (j - 1) + c);
                acc += std::conj(da) * db;
            }
        return acc;
    };
    ham.roughness.resize(nmodes);
    const double scale = std::max(1.0, ham.evals.cwiseAbs().maxCoeff());
    int lo = 0;
    while (lo < nmodes) {
        int hi = lo + 1;
        while (hi < nmodes && ham.evals(hi) - ham.evals(lo) < 1e-8 * scale) ++hi;
        const int m = hi - lo;
        if (m > 1) {
            MatX r(m, m);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    r(a, b) = rough_pair(ham.evecs.col(lo + a), ham.evecs.col(lo + b));
            Eigen::SelfAdjointEigenSolver<MatX> res(0.5 * (r + r.adjoint()));
            ham.evecs.middleCols(lo, m) =
                (ham.evecs.middleCols(lo, m) * res.eigenvectors()).eval();
        }
        for (int a = lo; a < hi; ++a) ham.roughness[a] = rough_of(ham.evecs.col(a));
        lo = hi;
    }
    return ham;
}

std::vector<int> UltrastaticHamiltonian::smooth_modes_near_zero(int count) const {
    std::vector<int> idx;
    for (int i = 0; i < evals.size(); ++i)
        if (roughness[i] < 1.0) idx.push_back(i);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return std::abs(evals(a)) < std::abs(evals(b)); });
    if (static_cast<int>(idx.size()) < count)
        throw std::runtime_error("not enough resolved modes");
    idx.resize(count);
    return idx;
}

QuasiFreeState ground_state_Q(const UltrastaticHamiltonian& ham, const DoubledSpace& space) {
    if (ham.evals.cwiseAbs().minCoeff() < 1e-10)
        throw std::runtime_error("Hamiltonian has a near-zero mode; ground state undefined");
    const int k = space.k;
    for (const auto& s : space.basis)
        if (s.cols() != ham.N + 1) throw std::invalid_argument("grid mismatch");

    auto wprod = [&](const SpinorSlice& u, const SpinorSlice& v) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j <= ham.N; ++j)
            acc += ham.wdiag[2 * j] * (u.col(j).dot(v.col(j)));
        return acc;
    };

    MatX p(k, k);
    for (int i = 0; i < k; ++i) {
        SpinorSlice phi = ham.project_positive(space.basis[i]);
        VecX m(k);
        for (int j = 0; j < k; ++j) m(j) = wprod(space.basis[j], phi);
        p.col(i) = chol_solve(space.chol_L, m);
    }

    QuasiFreeState st;
    st.Q = MatX::Zero(2 * k, 2 * k);
    st.Q.topLeftCorner(k, k) = p;
    st.Q.bottomRightCorner(k, k) = MatX::Identity(k, k) - p.conjugate();
    return st;
}

SpinorSlice causal_propagator_slice(const FirstOrderSystem& D, const BoundarySpace& Bl,
                                    const BoundarySpace& Br, const Grid& grid,
                                    const SourceFn& f, double t_ref) {
    SpinorHistory ret = green(D, Bl, Br, f, +1, grid);
    SpinorHistory adv = green(D, Bl, Br, f, -1, grid);
    return restrict_slice(ret, t_ref) - restrict_slice(adv, t_ref);
}

std::complex<double> two_point(const StateContext& ctx, const SourceFn& f1,
                               const SourceFn& f2) {
    const int k = ctx.space.k;
    auto coords = [&](const SourceFn& f) {
        SpinorSlice s =
            causal_propagator_slice(ctx.D, ctx.Bl, ctx.Br, ctx.grid, f, ctx.space.t_ref);
        VecX m(k);
        for (int j = 0; j < k; ++j)
            m(j) = herm_product(ctx.D, ctx.space.t_ref, ctx.space.basis[j], s);
        VecX v = VecX::Zero(2 * k);
        v.head(k) = chol_solve(ctx.space.chol_L, m);
        return v;
    };
    VecX v1 = coords(f1), v2 = coords(f2);
    return (v1.adjoint() * ctx.space.gram_doubled() * ctx.state.Q * v2)(0);
}

std::pair<DoubledSpace, QuasiFreeState> pullback_state(const QuasiFreeState& st1,
                                                       const DoubledSpace& space1,
                                                       const MollerPlan& plan) {
    if (std::abs(space1.t_ref - plan.grid.t1) > 1e-9)
        throw std::invalid_argument("state space must sit on Sigma_+");
    std::vector<SpinorSlice> pulled;
    pulled.reserve(space1.basis.size());
    for (const auto& b : space1.basis) pulled.push_back(moller_inverse(plan, b));
    DoubledSpace space0 = build_doubled_space(pulled, plan.D0, plan.grid.t0);

    // exact pullback: omega_0(u,v) = u^dag G1 Q1 v in shared raw coordinates,
    // so Q0 = G0^-1 G1 Q1; its invariant deviations are the unitarity defect
    MatX g0 = space0.gram_doubled(), g1 = space1.gram_doubled();
    QuasiFreeState st0;
    st0.Q = g0.fullPivLu().solve(g1 * st1.Q);
    return {space0, st0};
}

}  // namespace md
