// Acceptance gate: one pass/fail line per criterion, exit 0 iff all pass.
#include <cstdio>
#include <limits>
#include <optional>
#include <random>

#include "moller/quantize.hpp"
#include "moller/report.hpp"

using namespace md;
using cplx = std::complex<double>;

namespace {

int g_failures = 0;

void report(int num, const char* what, bool ok, const std::string& detail) {
    std::printf("%s criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", num, what,
                detail.c_str());
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

SplitMetric random_metric(std::mt19937& rng, double T, double L) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    switch (static_cast<int>(3.0 * U(rng)) % 3) {
        case 0: return minkowski_metric(T, L);
        case 1: return conformal_metric(T, L, 0.05 + 0.15 * U(rng));
        default: return bump_metric(T, L, 0.15 * U(rng), 0.15 * U(rng));
    }
}

SpinorSlice gaussian_data(int N, double c, double width, int k, const Vec2c& amp,
                          double lo, double hi) {
    SpinorSlice s(2, N + 1);
    for (int j = 0; j <= N; ++j) {
        double x = static_cast<double>(j) / N;
        double u = (x - c) / width;
        double w = std::exp(-u * u) * smooth_window(x, lo, hi, 0.15 * (hi - lo));
        s.col(j) = w * std::exp(cplx(0, 2 * M_PI * k * x)) * amp;
    }
    return s;
}

struct FlatSetup {
    GammaRep rep = make_canonical_rep();
    SplitMetric g = minkowski_metric(2.0, 1.0);
    FirstOrderSystem D = build_dirac(g, rep);
    BoundarySpace bl = mit_projector(rep, g, 0.0, BoundarySide::Left);
    BoundarySpace br = mit_projector(rep, g, 0.0, BoundarySide::Right);
};

// --- criterion 1: representation and Clifford identities ---------------------

void criterion_1() {
    GammaRep rep = make_canonical_rep();
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0;
    const Mat2 id = Mat2::Identity();
    worst = std::max(worst, (rep.gamma0 * rep.gamma0 - id).norm());
    worst = std::max(worst, (rep.gamma1 * rep.gamma1 + id).norm());
    worst = std::max(worst, (rep.gamma0 * rep.gamma1 + rep.gamma1 * rep.gamma0).norm());
    worst = std::max(worst,
                     (rep.gamma0.adjoint() * rep.spin_form - rep.spin_form * rep.gamma0).norm());
    worst = std::max(worst,
                     (rep.gamma1.adjoint() * rep.spin_form - rep.spin_form * rep.gamma1).norm());
    for (int trial = 0; trial < 1000; ++trial) {
        SplitMetric g = random_metric(rng, 1.0, 1.0);
        double t = 0.5 + 0.4 * U(rng), x = 0.5 + 0.4 * U(rng);
        double vt = U(rng), vx = U(rng), wt = U(rng), wx = U(rng);
        Mat2 gv = clifford_of(rep, g, t, x, vt, vx);
        Mat2 gw = clifford_of(rep, g, t, x, wt, wx);
        double gvw = metric_eval(g, t, x, vt, vx, wt, wx);
        worst = std::max(worst, (gv * gw + gw * gv + 2.0 * gvw * id).norm());
    }
    report(1, "Clifford representation identities", worst <= 1e-12, "max " + fmt(worst));
}

// --- criterion 2: lambda-transport against closed forms ----------------------

void criterion_2() {
    std::mt19937 rng(202);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0;
    bool positive = true;
    for (int trial = 0; trial < 100; ++trial) {
        MetricPath p{random_metric(rng, 1.0, 1.0), random_metric(rng, 1.0, 1.0)};
        double t = 0.5 + 0.4 * U(rng), x = 0.5 + 0.4 * U(rng);
        Eigen::Vector2d y0(U(rng), U(rng));
        Eigen::Vector2d y = transport_vector(p, t, x, y0);
        double b0 = p.g0.beta(t, x), b1 = p.g1.beta(t, x);
        double h0 = p.g0.h(t, x), h1 = p.g1.h(t, x);
        worst = std::max(worst, std::abs(y(0) - y0(0) * b0 / b1));
        worst = std::max(worst, std::abs(y(1) - y0(1) * std::sqrt(h0 / h1)));
        // transported outward normal keeps pointing outward
        for (BoundarySide side : {BoundarySide::Left, BoundarySide::Right}) {
            Eigen::Vector2d n0 = outward_normal(p.g0, t, side);
            double xb = side == BoundarySide::Left ? 0.0 : p.g0.L;
            Eigen::Vector2d wn = transport_vector(p, t, xb, n0);
            Eigen::Vector2d n1 = outward_normal(p.g1, t, side);
            if (metric_eval(p.g1, t, xb, wn(0), wn(1), n1(0), n1(1)) <= 0.0) positive = false;
        }
    }
    report(2, "lambda-transport matches closed forms, preserves outward normals",
           worst <= 1e-8 && positive, "max " + fmt(worst));
}

// --- criterion 3: spinor transport contract ----------------------------------

void criterion_3() {
    GammaRep rep = make_canonical_rep();
    std::mt19937 rng(303);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0, worst_id = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        MetricPath p{random_metric(rng, 1.0, 1.0), random_metric(rng, 1.0, 1.0)};
        double t = 0.5 + 0.4 * U(rng), x = 0.5 + 0.4 * U(rng);
        TransportResult tr = transport_frame(p, rep, t, x);
        Mat2 k = tr.kappa;
        Eigen::Vector2d v(U(rng), U(rng));
        Eigen::Vector2d v1 = tr.wp * v;
        Mat2 lhs = k * clifford_of(rep, p.g0, t, x, v(0), v(1)) * k.inverse();
        Mat2 rhs = clifford_of(rep, p.g1, t, x, v1(0), v1(1));
        worst = std::max(worst, (lhs - rhs).norm());

        MetricPath same{p.g0, p.g0};
        worst_id = std::max(worst_id,
                            (transport_spinor(same, rep, t, x) - Mat2::Identity()).norm());
    }
    report(3, "spinor transport intertwines Clifford multiplication",
           worst <= 1e-8 && worst_id <= 1e-12,
           "contract " + fmt(worst) + ", identity " + fmt(worst_id));
}

// --- criterion 4: solver convergence, conservation, penalty control ----------

void criterion_4() {
    FlatSetup s;
    const double width = 0.08, t1 = 0.25;
    auto prof = [&](double x) -> cplx {
        double u = (x - 0.5) / width;
        return std::exp(-u * u) * std::exp(cplx(0, 2 * M_PI * x));
    };
    auto exact = [&](double t, double x) -> Vec2c {
        return Vec2c(prof(x - t), 0.7 * prof(x + t));
    };
    std::vector<int> grids{100, 200, 400};
    std::vector<double> errs;
    for (int N : grids) {
        SpinorSlice d0(2, N + 1);
        for (int j = 0; j <= N; ++j) d0.col(j) = exact(0.0, static_cast<double>(j) / N);
        SpinorHistory h = evolve(s.D, s.bl, s.br, d0, nullptr, Grid{N, 0.5, 0.0, t1});
        const SpinorSlice& sl = h.slices.back();
        double e2 = 0.0;
        for (int j = 0; j <= N; ++j) {
            double w = (j == 0 || j == N) ? 0.5 : 1.0;
            e2 += w * (sl.col(j) - exact(t1, static_cast<double>(j) / N)).squaredNorm() / N;
        }
        errs.push_back(std::sqrt(e2));
    }
    double order = fit_order(grids, errs);

    // unit-time energy drift at N=400, boundary reflections included
    const int N = 400;
    SpinorSlice d = gaussian_data(N, 0.5, 0.06, 1, Vec2c(1.0, 0.6), 0.2, 0.8);
    EvolutionReport rpt;
    evolve(s.D, s.bl, s.br, d, nullptr, Grid{N, 0.5, 0.0, 1.0}, 1.0, &rpt);
    double e0 = rpt.energy.front(), drift = 0.0;
    for (double e : rpt.energy) drift = std::max(drift, std::abs(e - e0));
    drift /= e0;

    // wrong-sign penalty: must lose stability outright
    double growth = 0.0;
    try {
        SpinorHistory bad = evolve(s.D, s.bl, s.br, SpinorSlice::Ones(2, 129), nullptr,
                                   Grid{128, 0.5, 0.0, 1.0}, -1.0);
        growth = bad.slices.back().cwiseAbs().maxCoeff();
    } catch (const std::runtime_error&) {
        growth = std::numeric_limits<double>::infinity();
    }

    report(4, "SBP-SAT: 2nd order, conservative, penalty-sign control",
           order >= 1.9 && drift <= 1e-5 && growth > 1e50,
           "order " + fmt(order) + ", drift " + fmt(drift) + ", bad-tau growth " +
               fmt(growth));
}

// --- criterion 5: finite propagation speed -----------------------------------

void criterion_5() {
    GammaRep rep = make_canonical_rep();
    std::mt19937 rng(505);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        SplitMetric g = random_metric(rng, 1.0, 1.0);
        FirstOrderSystem D = build_dirac(g, rep);
        BoundarySpace bl = mit_projector(rep, g, 0.0, BoundarySide::Left);
        BoundarySpace br = mit_projector(rep, g, 0.0, BoundarySide::Right);
        const int N = 300;
        double c = 0.4 + 0.2 * std::abs(U(rng));
        double lo = c - 0.22, hi = c + 0.22;
        SpinorSlice d = gaussian_data(N, c, 0.035, 1 + (trial % 2),
                                      Vec2c(cplx(U(rng), U(rng)), cplx(U(rng), U(rng))),
                                      lo, hi);
        SpinorHistory h = evolve(D, bl, br, d, nullptr, Grid{N, 0.5, 0.0, 0.3});
        auto speed = [&](double t) {
            double v = 0.0;
            for (int i = 0; i <= 40; ++i)
                v = std::max(v, characteristic_speed(g, t, g.L * i / 40.0));
            return v;
        };
        worst = std::max(worst, mass_outside_cone(h, D, lo, hi, speed, 3.0 / N));
    }
    report(5, "finite propagation speed (mass outside cone)", worst <= 1e-10,
           "max " + fmt(worst));
}

// --- criterion 6: Green operators --------------------------------------------

void criterion_6() {
    GammaRep rep = make_canonical_rep();
    SplitMetric g = bump_metric(2.0, 1.0, 0.1, 0.15);
    FirstOrderSystem D = build_dirac(g, rep);
    BoundarySpace bl = mit_projector(rep, g, 0.0, BoundarySide::Left);
    BoundarySpace br = mit_projector(rep, g, 0.0, BoundarySide::Right);
    SourceFn f = [](double t, double x) -> Vec2c {
        double w = smooth_window(x, 0.35, 0.65, 0.08) * smooth_window(t, 0.35, 0.65, 0.1);
        return w * Vec2c(1.0, cplx(0, -0.5));
    };
    std::vector<int> grids{100, 200, 400};
    std::vector<double> res;
    double support = 0.0;
    for (int N : grids) {
        SpinorHistory h = green(D, bl, br, f, +1, Grid{N, 0.5, 0.0, 1.0});
        res.push_back(interior_residual(D, h, f));
        auto speed = [&](double t) {
            double v = 0.0;
            for (int i = 0; i <= 40; ++i)
                v = std::max(v, characteristic_speed(g, t, g.L * i / 40.0));
            return v;
        };
        support = std::max(support, mass_outside_cone(h, D, 0.35, 0.65, speed, 3.0 / N));
    }
    double order = fit_order(grids, res);
    report(6, "Green operators: residual order and causal support",
           order >= 1.9 && support <= 1e-10,
           "order " + fmt(order) + ", support leak " + fmt(support));
}

// --- criteria 7/8: Moller operator -------------------------------------------

MollerPlan make_plan(const MetricPath& path, int N,
                     std::optional<Field> f_override = std::nullopt) {
    return build_moller_plan(path, smooth_chi(0.9, 1.1), Grid{N, 0.5, 0, 0},
                             make_canonical_rep(), f_override);
}

void criterion_7() {
    MetricPath flat{minkowski_metric(2.0, 1.0), minkowski_metric(2.0, 1.0)};
    MetricPath def{minkowski_metric(2.0, 1.0), bump_metric(2.0, 1.0, 0.08, 0.1)};

    // deformed pair: Gram deviation over a family of 5 solutions, 2nd order
    std::vector<int> grids{100, 200, 400};
    std::vector<double> dev;
    std::mt19937 rng(707);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const int fam = 5;
    std::vector<double> cs(fam), ws(fam);
    std::vector<int> ks(fam);
    std::vector<Vec2c> amps(fam);
    for (int i = 0; i < fam; ++i) {
        cs[i] = 0.42 + 0.16 * std::abs(U(rng));
        ws[i] = 0.05 + 0.03 * std::abs(U(rng));
        ks[i] = 1 + (i % 2);
        amps[i] = Vec2c(cplx(U(rng), U(rng)), cplx(U(rng), U(rng)));
    }
    for (int N : grids) {
        MollerPlan plan = make_plan(def, N);
        std::vector<SpinorSlice> in(fam), out(fam);
        for (int i = 0; i < fam; ++i) {
            in[i] = gaussian_data(N, cs[i], ws[i], ks[i], amps[i], 0.2, 0.8);
            out[i] = moller_forward(plan, in[i]);
        }
        double d = 0.0;
        for (int a = 0; a < fam; ++a)
            for (int b = 0; b < fam; ++b)
                d = std::max(d, std::abs(herm_product(plan.D1, plan.grid.t1, out[a], out[b]) -
                                         herm_product(plan.D0, plan.grid.t0, in[a], in[b])));
        dev.push_back(d);
    }
    double order = fit_order(grids, dev);

    // identical metrics, tame data, reduced cfl: deviation near machine scale
    MollerPlan triv = build_moller_plan(flat, smooth_chi(0.9, 1.1), Grid{400, 0.25, 0, 0},
                                        make_canonical_rep());
    SpinorSlice psi = gaussian_data(400, 0.5, 0.1, 1, Vec2c(1.0, 0.5), 0.2, 0.8);
    double exact_dev = check_unitarity(triv, psi, psi) /
                       std::abs(herm_product(triv.D0, triv.grid.t0, psi, psi));

    // wrong conformal weight: order-one defect
    Field f = conformal_factor_f(def.g0, def.g1);
    Field fbad = [f](double t, double x) { return 1.1 * f(t, x); };
    MollerPlan bad = make_plan(def, 200, fbad);
    SpinorSlice phi = gaussian_data(200, 0.5, 0.06, 1, Vec2c(1.0, 0.5), 0.2, 0.8);
    double bad_dev = check_unitarity(bad, phi, phi) /
                     std::abs(herm_product(bad.D0, bad.grid.t0, phi, phi));

    report(7, "Moller map unitarity: order, exact case, wrong-weight control",
           order >= 1.9 && exact_dev <= 1e-10 && bad_dev > 0.05,
           "order " + fmt(order) + ", exact " + fmt(exact_dev) + ", bad-f " +
               fmt(bad_dev));
}

void criterion_8() {
    MetricPath def{minkowski_metric(2.0, 1.0), bump_metric(2.0, 1.0, 0.08, 0.1)};
    std::vector<int> grids{100, 200, 400};
    std::vector<double> err;
    for (int N : grids) {
        MollerPlan plan = make_plan(def, N);
        SpinorSlice psi = gaussian_data(N, 0.5, 0.06, 1, Vec2c(1.0, 0.4), 0.2, 0.8);
        SpinorSlice back = moller_inverse(plan, moller_forward(plan, psi));
        err.push_back((back - psi).norm() / psi.norm());
    }
    double order = fit_order(grids, err);

    MollerPlan plan = make_plan(def, 160);
    SpinorSlice a = gaussian_data(160, 0.5, 0.06, 1, Vec2c(1.0, 0.4), 0.2, 0.8);
    SpinorSlice b = gaussian_data(160, 0.45, 0.07, 2, Vec2c(0.2, cplx(0, 1.0)), 0.2, 0.8);
    cplx ca(0.7, -0.3), cb(-1.1, 0.25);
    SpinorSlice lhs = moller_forward(plan, (ca * a + cb * b).eval());
    SpinorSlice rhs = ca * moller_forward(plan, a) + cb * moller_forward(plan, b);
    double lin = (lhs - rhs).norm() / rhs.norm();

    report(8, "Moller round trip converges, map is linear", order >= 1.9 && lin <= 1e-12,
           "order " + fmt(order) + ", linearity " + fmt(lin));
}

// --- criteria 9/10: CAR representation and ground state ----------------------

std::vector<SpinorSlice> mode_family(const UltrastaticHamiltonian& ham, int count) {
    std::vector<SpinorSlice> fam;
    for (int i : ham.smooth_modes_near_zero(count)) fam.push_back(ham.mode_slice(i));
    return fam;
}

void criterion_9() {
    FlatSetup s;
    UltrastaticHamiltonian ham = boundary_hamiltonian(s.D, s.bl, s.br, 96);
    DoubledSpace space = build_doubled_space(mode_family(ham, 4), s.D, 0.0);
    CarRep car = car_representation(space);
    std::mt19937 rng(909);
    std::normal_distribution<double> G;
    auto rand_vec = [&]() {
        VecX v(2 * space.k);
        for (int i = 0; i < 2 * space.k; ++i) v(i) = cplx(G(rng), G(rng));
        return v;
    };
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        VecX u = rand_vec(), v = rand_vec();
        MatX xu = car.xi(u), xv = car.xi(v);
        worst = std::max(worst, (car.xi(space.gamma_apply(u)) - xu.adjoint()).norm());
        cplx pair = (u.adjoint() * space.gram_doubled() * v)(0);
        MatX ac = xu.adjoint() * xv + xv * xu.adjoint();
        worst = std::max(worst,
                         (ac - pair * MatX::Identity(ac.rows(), ac.cols())).norm() /
                             std::max(1.0, std::abs(pair)));
    }

    // Wick four-point factorization out of the adapted ground-state vacuum
    QuasiFreeState st = ground_state_Q(ham, space);
    CarRep acar = car_representation(space, st);
    auto w2 = [&](const VecX& a, const VecX& b) {
        return acar.vac_expect(acar.xi(a) * acar.xi(b));
    };
    double wick_err = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        VecX u1 = rand_vec(), u2 = rand_vec(), u3 = rand_vec(), u4 = rand_vec();
        cplx four =
            acar.vac_expect(acar.xi(u1) * acar.xi(u2) * acar.xi(u3) * acar.xi(u4));
        cplx wick = w2(u1, u2) * w2(u3, u4) - w2(u1, u3) * w2(u2, u4) +
                    w2(u1, u4) * w2(u2, u3);
        wick_err = std::max(wick_err, std::abs(four - wick));
    }
    report(9, "CAR algebra exact, quasi-free Wick factorization",
           worst <= 1e-13 && wick_err <= 1e-12,
           "CAR " + fmt(worst) + ", Wick " + fmt(wick_err));
}

void criterion_10() {
    FlatSetup s;
    auto lowest = [&](int N, double* maxim) {
        UltrastaticHamiltonian ham = boundary_hamiltonian(s.D, s.bl, s.br, N);
        if (maxim) *maxim = ham.max_imag;
        double best = 1e30;
        for (int i = 0; i < ham.evals.size(); ++i)
            best = std::min(best, std::abs(ham.evals(i)));
        return best;
    };
    double mi128 = 0.0, mi256 = 0.0;
    double e1 = lowest(128, &mi128), e2 = lowest(256, &mi256);
    double extrap = e2 + (e2 - e1) / 3.0;  // 2nd-order Richardson
    double spec_err = std::abs(extrap - M_PI / 2.0);  // independent closed form

    UltrastaticHamiltonian ham = boundary_hamiltonian(s.D, s.bl, s.br, 256);
    DoubledSpace space = build_doubled_space(mode_family(ham, 4), s.D, 0.0);
    QuasiFreeState st = ground_state_Q(ham, space);
    StateCertificate cert = certify_state(space, st);
    bool invariants = cert.q_min >= -1e-12 && cert.q_max <= 1.0 + 1e-12 &&
                      cert.herm_residual <= 1e-12 && cert.gamma_residual <= 1e-12;

    report(10, "boundary Hamiltonian spectrum and ground-state invariants",
           std::max(mi128, mi256) <= 1e-8 && spec_err <= 1e-4 && invariants,
           "max imag " + fmt(std::max(mi128, mi256)) + ", spectral err " + fmt(spec_err) +
               ", Q range [" + fmt(cert.q_min) + ", " + fmt(cert.q_max) + "]");
}

// --- criterion 11: state pullback --------------------------------------------

void criterion_11() {
    FlatSetup s;
    const int N = 400;

    auto run = [&](const MetricPath& path, double* budget, StateCertificate* cert) {
        MollerPlan plan = make_plan(path, N);
        FirstOrderSystem D1 = build_dirac(path.g1, plan.rep);
        BoundarySpace bl = mit_projector(plan.rep, path.g1, 0.0, BoundarySide::Left);
        BoundarySpace br = mit_projector(plan.rep, path.g1, 0.0, BoundarySide::Right);
        UltrastaticHamiltonian ham = boundary_hamiltonian(D1, bl, br, N);
        DoubledSpace space1 = build_doubled_space(mode_family(ham, 3), D1, plan.grid.t1);
        QuasiFreeState st1 = ground_state_Q(ham, space1);
        auto [space0, st0] = pullback_state(st1, space1, plan);
        *budget = (space0.gram - space1.gram).norm() / space1.gram.norm();
        *cert = certify_state(space0, st0);
    };

    // trivial deformation: everything must come back essentially exactly
    double b_triv = 0.0;
    StateCertificate c_triv;
    run(MetricPath{s.g, s.g}, &b_triv, &c_triv);
    bool triv_ok = b_triv <= 1e-8 && c_triv.q_min >= -1e-6 &&
                   c_triv.q_max <= 1.0 + 1e-6 && c_triv.gamma_residual <= 1e-6;

    // genuine deformation with a static out-metric: invariant deviations stay
    // within a small multiple of the measured unitarity budget
    SplitMetric g1 = s.g;
    g1.h = [](double, double x) { return 1.0 + 0.1 * std::exp(-std::pow((x - 0.5) / 0.25, 2)); };
    double b_def = 0.0;
    StateCertificate c_def;
    run(MetricPath{s.g, g1}, &b_def, &c_def);
    double slack = 10.0 * b_def + 1e-10;
    bool def_ok = b_def <= 1e-3 && c_def.q_min >= -slack && c_def.q_max <= 1.0 + slack &&
                  c_def.gamma_residual <= slack && c_def.herm_residual <= slack;

    report(11, "state pullback: invariants within the unitarity budget",
           triv_ok && def_ok,
           "trivial budget " + fmt(b_triv) + ", deformed budget " + fmt(b_def) +
               ", deformed Q max " + fmt(c_def.q_max));
}

// --- criterion 12: two-point function is a bisolution -------------------------

void criterion_12() {
    FlatSetup s;
    SourceFn f = [](double t, double x) -> Vec2c {
        double w = smooth_window(x, 0.35, 0.65, 0.08) * smooth_window(t, 0.6, 1.0, 0.1);
        return w * Vec2c(1.0, cplx(0, 0.4));
    };
    // g smooth and compact; Dg computed from closed-form finite differences so
    // the source is grid-independent
    auto gfun = [](double t, double x) -> Vec2c {
        double w = smooth_window(x, 0.3, 0.7, 0.1) * smooth_window(t, 0.9, 1.4, 0.12);
        return w * Vec2c(cplx(0.5, 0.2), 1.0);
    };
    FirstOrderSystem D = s.D;
    SourceFn Dg = [gfun, D](double t, double x) -> Vec2c {
        const double d = 1e-6;
        Vec2c dt = (gfun(t + d, x) - gfun(t - d, x)) / (2 * d);
        Vec2c dx = (gfun(t, x + d) - gfun(t, x - d)) / (2 * d);
        return D.sigma_dt(t, x) * dt + D.A(t, x) * dx + D.B(t, x) * gfun(t, x);
    };

    std::vector<int> grids{100, 200, 400};
    std::vector<double> vals;
    for (int N : grids) {
        UltrastaticHamiltonian ham = boundary_hamiltonian(s.D, s.bl, s.br, N);
        DoubledSpace space = build_doubled_space(mode_family(ham, 4), s.D, 0.0);
        QuasiFreeState st = ground_state_Q(ham, space);
        StateContext ctx{s.D, s.bl, s.br, Grid{N, 0.5, 0.0, 2.0}, space, st};
        double scale = std::abs(two_point(ctx, f, f)) + 1e-30;
        vals.push_back(std::abs(two_point(ctx, f, Dg)) / scale);
    }
    double order = fit_order(grids, vals);
    report(12, "two-point function annihilates the operator (bisolution)", order >= 1.9,
           "order " + fmt(order) + ", finest " + fmt(vals.back()));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    std::printf("%d/12 criteria passed\n", 12 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
