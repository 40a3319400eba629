#include "moller/geometry.hpp"

#include <algorithm>
#include <limits>

namespace md {

// C-infinity step: 0 for s<=0, 1 for s>=1.
double smoothstep_inf(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

double smooth_window(double u, double a, double b, double ramp) {
    return smoothstep_inf((u - a) / ramp) * smoothstep_inf((b - u) / ramp);
}

namespace {

double smoothstep_inf_d(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    // derivative via the quotient rule on a/(a+b)
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    const double da = a / (s * s);
    const double db = -b / ((1.0 - s) * (1.0 - s));
    const double denom = (a + b) * (a + b);
    return (da * (a + b) - a * (da + db)) / denom;
}

}  // namespace

SplitMetric minkowski_metric(double T, double L) {
    SplitMetric g;
    g.T = T;
    g.L = L;
    g.beta = [](double, double) { return 1.0; };
    g.h = [](double, double) { return 1.0; };
    return g;
}

SplitMetric conformal_metric(double T, double L, double amp) {
    SplitMetric g;
    g.T = T;
    g.L = L;
    auto omega = [amp, T, L](double t, double x) {
        return 1.0 + amp * std::sin(M_PI * x / L) * std::sin(M_PI * t / T);
    };
    g.beta = [omega](double t, double x) { return omega(t, x); };
    g.h = [omega](double t, double x) { double w = omega(t, x); return w * w; };
    return g;
}

SplitMetric bump_metric(double T, double L, double amp_beta, double amp_h) {
    SplitMetric g;
    g.T = T;
    g.L = L;
    auto bx = [L](double x) {
        double u = (x - 0.5 * L) / (0.25 * L);
        return std::exp(-u * u);
    };
    auto bt = [T](double t) {
        double u = (t - 0.5 * T) / (0.3 * T);
        return std::exp(-u * u);
    };
    g.beta = [=](double t, double x) { return 1.0 + amp_beta * bt(t) * bx(x); };
    g.h = [=](double t, double x) { return 1.0 + amp_h * bt(t) * bx(x); };
    return g;
}

ChiProfile smooth_chi(double t_minus, double t_plus) {
    if (!(t_minus < t_plus)) throw std::invalid_argument("smooth_chi: need t_minus < t_plus");
    ChiProfile c;
    c.t_minus = t_minus;
    c.t_plus = t_plus;
    const double w = t_plus - t_minus;
    c.chi = [t_minus, w](double t) { return smoothstep_inf((t - t_minus) / w); };
    c.dchi = [t_minus, w](double t) { return smoothstep_inf_d((t - t_minus) / w) / w; };
    return c;
}

double characteristic_speed(const SplitMetric& g, double t, double x) {
    if (!g.in_domain(t, x)) throw std::domain_error("characteristic_speed: point outside domain");
    return g.beta(t, x) / std::sqrt(g.h(t, x));
}

std::function<double(double)> cone_bound(const SplitMetric& g0, const SplitMetric& g1,
                                         int x_samples, double eps) {
    const double L = g0.L;
    return [g0, g1, L, x_samples, eps](double t) {
        double inf = std::numeric_limits<double>::infinity();
        for (int j = 0; j <= x_samples; ++j) {
            const double x = L * j / x_samples;
            const double b0 = g0.beta(t, x), b1 = g1.beta(t, x);
            const double h0 = g0.h(t, x), h1 = g1.h(t, x);
            inf = std::min(inf, b1 * b1 * h0 / (b0 * b0 * h1));
        }
        return (1.0 - eps) * std::sqrt(inf);
    };
}

Field conformal_factor_f(const SplitMetric& g0, const SplitMetric& g1) {
    return [g0, g1](double t, double x) {
        const double v0 = g0.beta(t, x) * std::sqrt(g0.h(t, x));
        const double v1 = g1.beta(t, x) * std::sqrt(g1.h(t, x));
        return std::sqrt(v0 / v1);
    };
}

std::vector<double> volume_slice(const SplitMetric& g, double t, int N) {
    const double dx = g.L / N;
    std::vector<double> w(N + 1);
    for (int j = 0; j <= N; ++j) {
        const double x = dx * j;
        double wj = std::sqrt(g.h(t, x)) * dx;
        if (j == 0 || j == N) wj *= 0.5;
        w[j] = wj;
    }
    return w;
}

}  // namespace md
