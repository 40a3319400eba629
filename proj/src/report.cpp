#include "moller/report.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "../vendor/json.hpp"

namespace md {

using json = nlohmann::ordered_json;

std::string report_schema_version() { return "1.0.0"; }

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

int worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MOLLER_DIRAC_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1 && static_cast<unsigned>(cap) < hw) return cap;
    }
    return static_cast<int>(hw);
}

namespace {

template <class F>
void parallel_for(int n, F&& body) {
    int w = std::min(worker_count(), n);
    if (w <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < w; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

std::string hex_hash(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

}  // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    RunConfig cfg;
    cfg.source = buf.str();

    json j;
    try {
        j = json::parse(cfg.source);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    try {
        if (j.contains("schema") && j["schema"].get<std::string>() != report_schema_version())
            throw ConfigError("config schema mismatch, want " + report_schema_version());
        auto metric = [&](const char* key, std::string& name, bool is_g1) {
            if (!j.contains(key)) return;
            const json& m = j[key];
            name = m.value("preset", name);
            if (is_g1) {
                cfg.amp = m.value("amp", cfg.amp);
                cfg.amp_beta = m.value("amp_beta", cfg.amp_beta);
                cfg.amp_h = m.value("amp_h", cfg.amp_h);
            }
        };
        metric("g0", cfg.g0, false);
        metric("g1", cfg.g1, true);
        cfg.T = j.value("T", cfg.T);
        cfg.L = j.value("L", cfg.L);
        if (j.contains("chi")) {
            cfg.t_minus = j["chi"].value("t_minus", cfg.t_minus);
            cfg.t_plus = j["chi"].value("t_plus", cfg.t_plus);
        }
        if (j.contains("grids")) cfg.grids = j["grids"].get<std::vector<int>>();
        cfg.boundary = j.value("boundary", cfg.boundary);
        if (j.contains("suites")) cfg.suites = j["suites"].get<std::vector<std::string>>();
        cfg.out_dir = j.value("out", cfg.out_dir);
        cfg.seed = j.value("seed", cfg.seed);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
    validate_config(cfg);
    return cfg;
}

void validate_config(const RunConfig& cfg) {
    for (const std::string& m : {cfg.g0, cfg.g1})
        if (m != "minkowski" && m != "conformal" && m != "bump")
            throw ConfigError("unknown metric preset: " + m);
    if (cfg.boundary != "mit" && cfg.boundary != "chiral+" && cfg.boundary != "chiral-" &&
        cfg.boundary != "interpolated-mit")
        throw ConfigError("unknown boundary condition: " + cfg.boundary);
    if (cfg.T <= 0 || cfg.L <= 0) throw ConfigError("T and L must be positive");
    if (!(cfg.t_minus < cfg.t_plus) || cfg.t_minus < 0 || cfg.t_plus > cfg.T)
        throw ConfigError("need 0 <= t_minus < t_plus <= T");
    if (cfg.grids.empty()) throw ConfigError("grid ladder is empty");
    for (size_t i = 0; i < cfg.grids.size(); ++i) {
        if (cfg.grids[i] < 8) throw ConfigError("grid too coarse (N >= 8)");
        if (i && cfg.grids[i] <= cfg.grids[i - 1])
            throw ConfigError("grid ladder must be strictly increasing");
    }
    static const std::vector<std::string> known = {
        "check-clifford", "check-boundary", "evolve", "green",
        "moller",         "state",          "convergence"};
    for (const auto& s : cfg.suites)
        if (std::find(known.begin(), known.end(), s) == known.end())
            throw ConfigError("unknown suite: " + s);
}

SplitMetric metric_preset(const RunConfig& cfg, int which) {
    const std::string& name = which == 0 ? cfg.g0 : cfg.g1;
    if (name == "minkowski") return minkowski_metric(cfg.T, cfg.L);
    if (name == "conformal") return conformal_metric(cfg.T, cfg.L, which == 0 ? 0.0 : cfg.amp);
    return bump_metric(cfg.T, cfg.L, which == 0 ? 0.0 : cfg.amp_beta,
                       which == 0 ? 0.0 : cfg.amp_h);
}

BoundarySpace boundary_by_name(const std::string& name, const GammaRep& rep,
                               const MetricPath& path, double t, BoundarySide side) {
    if (name == "mit") return mit_projector(rep, path.g1, t, side);
    if (name == "chiral+") return chiral_projector(rep, path.g1, t, side, +1);
    if (name == "chiral-") return chiral_projector(rep, path.g1, t, side, -1);
    return interpolated_mit(rep, path, 1.0, t, side);
}

double fit_order(const std::vector<int>& grids, const std::vector<double>& errs) {
    // least-squares slope of log err against log(1/N)
    const size_t n = grids.size();
    if (n < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        double x = -std::log(static_cast<double>(grids[i]));
        double y = std::log(std::max(errs[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

struct SuiteIO {
    const RunConfig& cfg;
    std::string hash;
    std::filesystem::path out;

    json base(const std::string& suite) const {
        json j;
        j["schema"] = report_schema_version();
        j["suite"] = suite;
        j["config_hash"] = hash;
        j["grids"] = cfg.grids;
        j["seed"] = cfg.seed;
        return j;
    }
    void write(const std::string& name, const json& j) const {
        std::ofstream f(out / (name + ".json"));
        f << j.dump(2) << "\n";
    }
    void write_text(const std::string& name, const std::string& text) const {
        std::ofstream f(out / name);
        f << text;
    }
};

unsigned suite_seed(const RunConfig& cfg, const std::string& suite) {
    return static_cast<unsigned>(cfg.seed ^ (fnv1a64(suite) & 0xffffffffu));
}

// Gaussian core with a compact-support window whose ramps sit in the far tail:
// smooth enough for clean second-order convergence on coarse ladders, yet with
// exactly bounded support for the cone tests.
SpinorSlice bump_data(const SplitMetric& g, int N, std::mt19937& rng, double lo = 0.2,
                      double hi = 0.8) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const double dx = g.L / N;
    const int k1 = 1 + static_cast<int>(1.5 * std::abs(U(rng)));
    const std::complex<double> I(0, 1);
    Vec2c amp;
    amp << std::complex<double>(U(rng), U(rng)), std::complex<double>(U(rng), U(rng));
    const double c = 0.5 * (lo + hi), ramp = 0.15 * (hi - lo);
    const double gw = (0.5 * (hi - lo) - ramp) / 4.0;
    SpinorSlice s(2, N + 1);
    for (int j = 0; j <= N; ++j) {
        double x = j * dx;
        double u = (x / g.L - c) / gw;
        double w = std::exp(-u * u) * smooth_window(x / g.L, lo, hi, ramp);
        s.col(j) = w * std::exp(I * (2.0 * M_PI * k1 * x / g.L)) * amp;
    }
    return s;
}

bool suite_check_clifford(const SuiteIO& io, json& j) {
    GammaRep rep = make_canonical_rep();
    SplitMetric g = metric_preset(io.cfg, 1);
    std::mt19937 rng(suite_seed(io.cfg, "check-clifford"));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double res = 0.0;
    Mat2 id = Mat2::Identity();
    res = std::max(res, (rep.gamma0 * rep.gamma0 - id).norm());
    res = std::max(res, (rep.gamma1 * rep.gamma1 + id).norm());
    res = std::max(res, (rep.gamma0 * rep.gamma1 + rep.gamma1 * rep.gamma0).norm());
    for (const Mat2& gm : {rep.gamma0, rep.gamma1})
        res = std::max(res, (gm.adjoint() * rep.spin_form - rep.spin_form * gm).norm());
    for (int i = 0; i < 1000; ++i) {
        double t = U(rng) * g.T, x = U(rng) * g.L;
        double vt = 2 * U(rng) - 1, vx = 2 * U(rng) - 1;
        double wt = 2 * U(rng) - 1, wx = 2 * U(rng) - 1;
        Mat2 cv = clifford_of(rep, g, t, x, vt, vx);
        Mat2 cw = clifford_of(rep, g, t, x, wt, wx);
        double gvw = metric_eval(g, t, x, vt, vx, wt, wx);
        res = std::max(res, (cv * cw + cw * cv + 2.0 * gvw * id).norm());
    }
    j["max_residual"] = res;
    return res <= 1e-12;
}

Vec2c range_vector(const Mat2& proj) {
    Vec2c v = proj.col(0).norm() >= proj.col(1).norm() ? proj.col(0) : proj.col(1);
    return v.normalized();
}

bool suite_check_boundary(const SuiteIO& io, json& j) {
    GammaRep rep = make_canonical_rep();
    SplitMetric g = metric_preset(io.cfg, 1);
    MetricPath path{metric_preset(io.cfg, 0), g};
    std::mt19937 rng(suite_seed(io.cfg, "check-boundary"));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double res = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double t = U(rng) * g.T;
        BoundarySide side = U(rng) < 0.5 ? BoundarySide::Left : BoundarySide::Right;
        double xb = side == BoundarySide::Left ? 0.0 : g.L;
        BoundarySpace b = boundary_by_name(io.cfg.boundary, rep, path, t, side);
        const Mat2& p = b.projector;
        res = std::max(res, (p * p - p).norm());
        res = std::max(res, std::abs(p.trace().real() - 1.0));  // rank 1
        // boundary form vanishes on B (q-null) for mit / interpolated-mit
        if (io.cfg.boundary == "mit" || io.cfg.boundary == "interpolated-mit") {
            Eigen::Vector2d n = outward_normal(g, t, side);
            Mat2 sn = clifford_of(rep, g, t, xb, n(0), n(1));
            Vec2c u = range_vector(p);
            res = std::max(res, std::abs(u.dot(rep.spin_form * sn * u)));
            BoundarySpace adj = adjoint_space(rep, b, sn);
            res = std::max(res, (adj.projector - p).norm());
        }
    }
    j["max_residual"] = res;
    return res <= 1e-12;
}

bool suite_evolve(const SuiteIO& io, json& j) {
    GammaRep rep = make_canonical_rep();
    SplitMetric g = metric_preset(io.cfg, 1);
    MetricPath path{metric_preset(io.cfg, 0), g};
    FirstOrderSystem D = build_dirac(g, rep);
    BoundarySpace bl = boundary_by_name(io.cfg.boundary, rep, path, 0.0, BoundarySide::Left);
    BoundarySpace br = boundary_by_name(io.cfg.boundary, rep, path, 0.0, BoundarySide::Right);

    const auto& grids = io.cfg.grids;
    std::vector<double> drift(grids.size());
    std::vector<std::string> traces(grids.size());
    std::mt19937 seed_rng(suite_seed(io.cfg, "evolve"));
    std::vector<unsigned> seeds(grids.size());
    for (auto& s : seeds) s = seed_rng();
    parallel_for(static_cast<int>(grids.size()), [&](int i) {
        std::mt19937 rng(seeds[0]);  // same data on every grid
        SpinorSlice data = bump_data(g, grids[i], rng);
        Grid grid{grids[i], 0.5, 0.0, std::min(1.0, g.T)};
        EvolutionReport rpt;
        evolve(D, bl, br, data, nullptr, grid, 1.0, &rpt);
        double e0 = rpt.energy.front(), d = 0.0;
        for (double e : rpt.energy) d = std::max(d, std::abs(e - e0));
        drift[i] = d / std::max(std::abs(e0), 1e-30);
        traces[i] = rpt.to_csv();
    });
    for (size_t i = 0; i < grids.size(); ++i)
        io.write_text("evolve_N" + std::to_string(grids[i]) + ".csv", traces[i]);
    j["energy_drift"] = drift;
    double tol = grids.back() >= 400 ? 1e-5 : 1e-3;
    j["drift_tolerance"] = tol;
    // curved metrics carry a larger (but second-order) quadrature drift; accept
    // either the flat-calibrated tolerance or clean convergence of the drift
    double dorder = grids.size() >= 2 ? fit_order(grids, drift) : 0.0;
    j["drift_order"] = dorder;
    return drift.back() <= tol || dorder >= 1.7;
}

SourceFn bump_source(const SplitMetric& g, std::mt19937& rng, double t_lo, double t_hi) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Vec2c amp;
    amp << std::complex<double>(U(rng), U(rng)), std::complex<double>(U(rng), U(rng));
    double L = g.L;
    return [amp, L, t_lo, t_hi](double t, double x) -> Vec2c {
        double w = smooth_window(x / L, 0.35, 0.65, 0.08) *
                   smooth_window(t, t_lo, t_hi, 0.3 * (t_hi - t_lo));
        return w * amp;
    };
}

bool suite_green(const SuiteIO& io, json& j) {
    GammaRep rep = make_canonical_rep();
    SplitMetric g = metric_preset(io.cfg, 1);
    MetricPath path{metric_preset(io.cfg, 0), g};
    FirstOrderSystem D = build_dirac(g, rep);
    BoundarySpace bl = boundary_by_name(io.cfg.boundary, rep, path, 0.0, BoundarySide::Left);
    BoundarySpace br = boundary_by_name(io.cfg.boundary, rep, path, 0.0, BoundarySide::Right);

    double t1 = std::min(1.0, g.T);
    std::mt19937 rng(suite_seed(io.cfg, "green"));
    SourceFn f = bump_source(g, rng, 0.35 * t1, 0.65 * t1);
    const auto& grids = io.cfg.grids;
    std::vector<double> res(grids.size());
    parallel_for(static_cast<int>(grids.size()), [&](int i) {
        Grid grid{grids[i], 0.5, 0.0, t1};
        SpinorHistory hist = green(D, bl, br, f, +1, grid);
        res[i] = interior_residual(D, hist, f);
    });
    double order = fit_order(grids, res);
    j["residual"] = res;
    j["order_estimate"] = order;
    if (grids.size() >= 3) return order >= 1.7;
    return res.back() < res.front();
}

bool suite_moller(const SuiteIO& io, json& j) {
    GammaRep rep = make_canonical_rep();
    MetricPath path{metric_preset(io.cfg, 0), metric_preset(io.cfg, 1)};
    ChiProfile chi = smooth_chi(io.cfg.t_minus, io.cfg.t_plus);
    const auto& grids = io.cfg.grids;
    std::mt19937 rng(suite_seed(io.cfg, "moller"));
    const int fam = 3;
    std::vector<unsigned> seeds(fam);
    for (auto& s : seeds) s = rng();

    std::vector<double> dev(grids.size());
    parallel_for(static_cast<int>(grids.size()), [&](int i) {
        MollerPlan plan = build_moller_plan(path, chi, Grid{grids[i], 0.5, 0, 0}, rep);
        std::vector<SpinorSlice> in(fam), out(fam);
        for (int s = 0; s < fam; ++s) {
            std::mt19937 r(seeds[s]);
            in[s] = bump_data(path.g0, grids[i], r, 0.3, 0.7);
            out[s] = moller_forward(plan, in[s]);
        }
        double d = 0.0;
        for (int a = 0; a < fam; ++a)
            for (int b = 0; b < fam; ++b)
                d = std::max(d, std::abs(herm_product(plan.D1, plan.grid.t1, out[a], out[b]) -
                                         herm_product(plan.D0, plan.grid.t0, in[a], in[b])));
        dev[i] = d;
    });
    double order = fit_order(grids, dev);
    j["grid_sizes"] = grids;
    j["deviation"] = dev;
    j["order_estimate"] = order;
    if (dev.back() <= 1e-10) return true;
    if (grids.size() >= 3) return order >= 1.9 || dev.back() <= 1e-6;
    return order >= 1.9 || dev.back() < dev.front();
}

bool suite_state(const SuiteIO& io, json& j) {
    GammaRep rep = make_canonical_rep();
    SplitMetric g0 = metric_preset(io.cfg, 0);
    MetricPath path{g0, g0};
    FirstOrderSystem D = build_dirac(g0, rep);
    BoundarySpace bl = boundary_by_name(io.cfg.boundary, rep, path, 0.0, BoundarySide::Left);
    BoundarySpace br = boundary_by_name(io.cfg.boundary, rep, path, 0.0, BoundarySide::Right);
    const int N = io.cfg.grids.back();

    UltrastaticHamiltonian ham;
    try {
        ham = boundary_hamiltonian(D, bl, br, N);
    } catch (const std::invalid_argument& e) {
        j["error"] = e.what();
        return false;
    }
    // four resolved modes nearest zero frequency span the sampled family
    std::vector<SpinorSlice> fam;
    for (int i : ham.smooth_modes_near_zero(4)) fam.push_back(ham.mode_slice(i));
    DoubledSpace space = build_doubled_space(fam, D, 0.0);
    QuasiFreeState st = ground_state_Q(ham, space);
    StateCertificate cert = certify_state(space, st);

    // vacuum positivity over random degree-2 algebra elements
    CarRep car = car_representation(space, st);
    std::mt19937 rng(suite_seed(io.cfg, "state"));
    std::normal_distribution<double> G;
    double pos_min = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        MatX A = MatX::Zero(1 << space.k, 1 << space.k);
        for (int term = 0; term < 3; ++term) {
            VecX v(2 * space.k), w(2 * space.k);
            for (int i = 0; i < 2 * space.k; ++i) {
                v(i) = std::complex<double>(G(rng), G(rng));
                w(i) = std::complex<double>(G(rng), G(rng));
            }
            A += std::complex<double>(G(rng), G(rng)) * car.xi(v) * car.xi(w);
            A += std::complex<double>(G(rng), G(rng)) * car.xi(v);
        }
        pos_min = std::min(pos_min, car.vac_expect(A.adjoint() * A).real());
    }

    std::mt19937 rng2(suite_seed(io.cfg, "state-2pt"));
    StateContext ctx{D, bl, br, Grid{N, 0.5, 0.0, g0.T}, space, st};
    json samples = json::array();
    for (int s = 0; s < 2; ++s) {
        SourceFn f1 = bump_source(g0, rng2, 0.3 * g0.T, 0.5 * g0.T);
        SourceFn f2 = bump_source(g0, rng2, 0.45 * g0.T, 0.7 * g0.T);
        std::complex<double> w2 = two_point(ctx, f1, f2);
        samples.push_back({{"re", w2.real()}, {"im", w2.imag()}});
    }

    j["max_imag"] = ham.max_imag;
    j["Q_spectrum_min"] = cert.q_min;
    j["Q_spectrum_max"] = cert.q_max;
    j["gamma_residual"] = cert.gamma_residual;
    j["positivity_min"] = pos_min;
    j["two_point_samples"] = samples;
    return ham.max_imag <= 1e-8 && cert.q_min >= -1e-10 && cert.q_max <= 1.0 + 1e-10 &&
           cert.gamma_residual <= 1e-12 && pos_min >= -1e-10;
}

bool suite_convergence(const SuiteIO& io, json& j) {
    GammaRep rep = make_canonical_rep();
    SplitMetric g = metric_preset(io.cfg, 1);
    MetricPath path{metric_preset(io.cfg, 0), g};
    FirstOrderSystem D = build_dirac(g, rep);
    BoundarySpace bl = boundary_by_name(io.cfg.boundary, rep, path, 0.0, BoundarySide::Left);
    BoundarySpace br = boundary_by_name(io.cfg.boundary, rep, path, 0.0, BoundarySide::Right);
    const auto& grids = io.cfg.grids;
    const int nref = 2 * grids.back();
    // measure over a boundary-free window: the data lives in [0.2, 0.8]*L, so
    // stop before the fastest characteristic reaches an endpoint (the evolve
    // suite already covers the reflecting regime)
    double vmax = 0.0;
    for (int it = 0; it <= 20; ++it)
        for (int ix = 0; ix <= 20; ++ix)
            vmax = std::max(vmax, characteristic_speed(g, g.T * it / 20.0, g.L * ix / 20.0));
    const double t1 = 0.8 * 0.2 * g.L / vmax;
    std::mt19937 rng(suite_seed(io.cfg, "convergence"));
    unsigned data_seed = rng();

    auto final_slice = [&](int n) {
        std::mt19937 r(data_seed);
        SpinorSlice data = bump_data(g, n, r);
        SpinorHistory h = evolve(D, bl, br, data, nullptr, Grid{n, 0.5, 0.0, t1});
        return h.slices.back();
    };
    SpinorSlice ref = final_slice(nref);
    std::vector<double> err(grids.size());
    parallel_for(static_cast<int>(grids.size()), [&](int i) {
        SpinorSlice s = final_slice(grids[i]);
        // weighted discrete L2: the boundary closure is first order pointwise
        // but second order in this norm
        double e2 = 0.0;
        const double dxi = g.L / grids[i];
        for (int c = 0; c < s.cols(); ++c) {
            Vec2c rv;
            if (nref % grids[i] == 0) {
                rv = ref.col(c * (nref / grids[i]));
            } else {
                double xr = static_cast<double>(c) * nref / grids[i];
                int j0 = std::min(static_cast<int>(xr), nref - 1);
                double fr = xr - j0;
                rv = (1 - fr) * ref.col(j0) + fr * ref.col(j0 + 1);
            }
            double w = (c == 0 || c == s.cols() - 1) ? 0.5 * dxi : dxi;
            e2 += w * (s.col(c) - rv).squaredNorm();
        }
        err[i] = std::sqrt(e2);
    });
    double order = fit_order(grids, err);
    j["reference_N"] = nref;
    j["error"] = err;
    j["order_estimate"] = order;
    return grids.size() >= 2 ? order >= 1.7 : err.back() <= 1e-6;
}

}  // namespace

int run_suites(const RunConfig& cfg) {
    validate_config(cfg);
    SuiteIO io{cfg, hex_hash(fnv1a64(cfg.source)), cfg.out_dir};
    std::filesystem::create_directories(io.out);

    std::vector<std::string> suites = cfg.suites;
    if (suites.empty())
        suites = {"check-clifford", "check-boundary", "evolve", "green",
                  "moller",         "state",          "convergence"};

    bool all_ok = true;
    json top = io.base("run");
    json names = json::array();
    for (const std::string& s : suites) {
        json j = io.base(s);
        bool ok = false;
        try {
            if (s == "check-clifford") ok = suite_check_clifford(io, j);
            else if (s == "check-boundary") ok = suite_check_boundary(io, j);
            else if (s == "evolve") ok = suite_evolve(io, j);
            else if (s == "green") ok = suite_green(io, j);
            else if (s == "moller") ok = suite_moller(io, j);
            else if (s == "state") ok = suite_state(io, j);
            else if (s == "convergence") ok = suite_convergence(io, j);
        } catch (const std::exception& e) {
            j["error"] = e.what();
        }
        j["passed"] = ok;
        io.write(s, j);
        names.push_back(s);
        all_ok = all_ok && ok;
    }
    top["suites"] = names;
    top["passed"] = all_ok;
    io.write("run", top);
    return all_ok ? 0 : 1;
}

}  // namespace md
