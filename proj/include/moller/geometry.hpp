#pragma once
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace md {

using Field = std::function<double(double, double)>;  // (t,x) -> value

// 1+1 Lorentzian metric in temporal-splitting form g = -beta^2 dt^2 + h dx^2
// on the rectangle [0,T] x [0,L]. Coefficients are closed-form callables;
// grid consumers sample them at whatever resolution they run at.
struct SplitMetric {
    Field beta;
    Field h;
    double T = 1.0;
    double L = 1.0;

    double beta_at(double t, double x) const { return beta(t, x); }
    double h_at(double t, double x) const { return h(t, x); }
    bool in_domain(double t, double x) const {
        const double eps = 1e-12;
        return t >= -eps && t <= T + eps && x >= -eps && x <= L + eps;
    }
};

SplitMetric minkowski_metric(double T, double L);
// conformal: Omega^2 * minkowski with Omega = 1 + amp*sin(pi x/L)*s(t)
SplitMetric conformal_metric(double T, double L, double amp);
// bump: independent smooth bumps in beta and h, localized in x, gated in t
SplitMetric bump_metric(double T, double L, double amp_beta, double amp_h);

struct MetricPath {
    SplitMetric g0;
    SplitMetric g1;
    int lambda_samples = 1000;

    double h_lambda(double lam, double t, double x) const {
        return (1.0 - lam) * g0.h(t, x) + lam * g1.h(t, x);
    }
    double beta_lambda(double lam, double t, double x) const {
        return (1.0 - lam) * g0.beta(t, x) + lam * g1.beta(t, x);
    }
};

// chi: [0,T] -> [0,1], smooth, 0 below t_minus, 1 above t_plus
struct ChiProfile {
    std::function<double(double)> chi;
    std::function<double(double)> dchi;
    double t_minus = 0.0;
    double t_plus = 1.0;
};

ChiProfile smooth_chi(double t_minus, double t_plus);

// C-infinity ramp: 0 for s<=0, 1 for s>=1
double smoothstep_inf(double s);
// C-infinity window on [a,b] with the given ramp width, 1 on the plateau
double smooth_window(double u, double a, double b, double ramp);

double characteristic_speed(const SplitMetric& g, double t, double x);

// Largest (time-dependent) C with C^2 beta1^-2 h1 <= beta0^-2 h0, times 1-eps.
std::function<double(double)> cone_bound(const SplitMetric& g0, const SplitMetric& g1,
                                         int x_samples = 512, double eps = 1e-6);

// f with vol_{g0} = f^2 vol_{g1}; vol_g = beta sqrt(h) dt dx in 1+1.
Field conformal_factor_f(const SplitMetric& g0, const SplitMetric& g1);

// Trapezoid weights w_j ~ sqrt(h(t,x_j)) dx on the uniform grid with N+1 nodes.
std::vector<double> volume_slice(const SplitMetric& g, double t, int N);

}  // namespace md
