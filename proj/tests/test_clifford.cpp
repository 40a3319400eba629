#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "moller/clifford.hpp"

using namespace md;
using cplx = std::complex<double>;

TEST_CASE("canonical representation matrices") {
    GammaRep rep = make_canonical_rep();
    Mat2 g0, g1;
    g0 << 0, 1, 1, 0;
    g1 << 0, 1, -1, 0;
    CHECK((rep.gamma0 - g0).norm() == 0.0);
    CHECK((rep.gamma1 - g1).norm() == 0.0);
    CHECK((rep.spin_form - g0).norm() == 0.0);  // M = gamma0
    Mat2 G = g0 * g1;                           // diag(-1, 1)
    CHECK((rep.chirality - G).norm() == 0.0);

    Mat2 id = Mat2::Identity();
    CHECK((rep.gamma0 * rep.gamma0 - id).norm() <= 1e-15);
    CHECK((rep.gamma1 * rep.gamma1 + id).norm() <= 1e-15);
    CHECK((rep.gamma0 * rep.gamma1 + rep.gamma1 * rep.gamma0).norm() <= 1e-15);
    // gamma_mu^dag M = M gamma_mu
    for (const Mat2& g : {rep.gamma0, rep.gamma1})
        CHECK((g.adjoint() * rep.spin_form - rep.spin_form * g).norm() <= 1e-15);
}

TEST_CASE("clifford_of reproduces the metric") {
    GammaRep rep = make_canonical_rep();
    SplitMetric g = conformal_metric(1.0, 1.0, 0.3);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        double t = 0.5 * (U(rng) + 1.0), x = 0.5 * (U(rng) + 1.0);
        double vt = U(rng), vx = U(rng), wt = U(rng), wx = U(rng);
        Mat2 cv = clifford_of(rep, g, t, x, vt, vx);
        Mat2 cw = clifford_of(rep, g, t, x, wt, wx);
        double gvw = metric_eval(g, t, x, vt, vx, wt, wx);
        CHECK((cv * cw + cw * cv + 2.0 * gvw * Mat2::Identity()).norm() <= 1e-12);
    }
    // timelike unit vector squares to +Id, spacelike to -Id
    double b = g.beta(0.3, 0.4);
    Mat2 ct = clifford_of(rep, g, 0.3, 0.4, 1.0 / b, 0.0);
    CHECK((ct * ct - Mat2::Identity()).norm() <= 1e-13);
    CHECK(clifford_of(rep, minkowski_metric(1, 1), 0.2, 0.3, 1.0, 0.0).isApprox(rep.gamma0));
}

TEST_CASE("clifford_of rejects outside points") {
    GammaRep rep = make_canonical_rep();
    SplitMetric g = minkowski_metric(1.0, 1.0);
    CHECK_THROWS_AS(clifford_of(rep, g, 2.0, 0.5, 1.0, 0.0), std::domain_error);
}

TEST_CASE("slice product is the weighted l2 product and positive") {
    GammaRep rep = make_canonical_rep();
    SplitMetric g = bump_metric(2.0, 1.0, 0.0, 0.3);
    const int N = 64;
    std::mt19937 rng(5);
    std::normal_distribution<double> Z;
    SpinorSlice psi(2, N + 1), phi(2, N + 1);
    for (int j = 0; j <= N; ++j) {
        psi.col(j) = Vec2c(cplx(Z(rng), Z(rng)), cplx(Z(rng), Z(rng)));
        phi.col(j) = Vec2c(cplx(Z(rng), Z(rng)), cplx(Z(rng), Z(rng)));
    }
    cplx p = slice_product(rep, g, 1.0, psi, phi);
    // plain weighted dot with the volume_slice weights
    auto w = volume_slice(g, 1.0, N);
    cplx ref = 0.0;
    for (int j = 0; j <= N; ++j) ref += w[j] * psi.col(j).dot(phi.col(j));
    CHECK(std::abs(p - ref) <= 1e-12 * std::abs(ref));

    cplx nrm = slice_product(rep, g, 1.0, psi, psi);
    CHECK(nrm.real() > 0.0);
    CHECK(std::abs(nrm.imag()) <= 1e-13 * nrm.real());
    // Hermitian symmetry
    cplx q = slice_product(rep, g, 1.0, phi, psi);
    CHECK(std::abs(p - std::conj(q)) <= 1e-12 * std::abs(p));

    SpinorSlice bad(2, N);
    CHECK_THROWS_AS(slice_product(rep, g, 1.0, psi, bad), std::invalid_argument);
}
