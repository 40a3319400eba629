#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "moller/quantize.hpp"

namespace md {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Run configuration; JSON schema documented in docs/schemas.md.
struct RunConfig {
    std::string source;  // raw config bytes, kept for hashing
    std::string g0 = "minkowski";
    std::string g1 = "minkowski";
    double T = 2.0, L = 1.0;
    double amp = 0.0;                      // conformal preset amplitude
    double amp_beta = 0.0, amp_h = 0.0;    // bump preset amplitudes
    double t_minus = 0.5, t_plus = 1.5;
    std::vector<int> grids{40, 80};
    std::string boundary = "mit";
    std::vector<std::string> suites;       // empty = all
    std::string out_dir = "out";
    unsigned seed = 1;
};

std::string report_schema_version();
std::uint64_t fnv1a64(const std::string& bytes);

RunConfig load_config(const std::string& path);  // throws ConfigError
void validate_config(const RunConfig& cfg);      // throws ConfigError

SplitMetric metric_preset(const RunConfig& cfg, int which);  // 0 or 1
BoundarySpace boundary_by_name(const std::string& name, const GammaRep& rep,
                               const MetricPath& path, double t, BoundarySide side);

// order of convergence from a least-squares fit of log(err) vs log(N)
double fit_order(const std::vector<int>& grids, const std::vector<double>& errs);

int worker_count();  // capped by MOLLER_DIRAC_THREADS

// runs the selected suites, writes <out_dir>/<suite>.json plus CSV traces;
// returns 0 if every suite passed, 1 otherwise
int run_suites(const RunConfig& cfg);

}  // namespace md
