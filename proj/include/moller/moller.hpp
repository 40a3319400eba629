#pragma once
#include "moller/solver.hpp"

namespace md {

// Everything needed to apply R and R^-1 between (D0, MIT) on g0 and (D1, MIT)
// on g1: the interpolated operator lives on g1 and matches D01 below t_minus
// and D1 above t_plus.
struct MollerPlan {
    MetricPath path;
    ChiProfile chi;
    Field f;                       // conformal factor (possibly perturbed for controls)
    Grid grid;                     // t0 = t_minus, t1 = t_plus
    FirstOrderSystem D0, D1, D01, Dchi;
    BoundarySpace Bl, Br;          // interpolated-MIT spaces (constant matrices here)
    GammaRep rep;
    std::function<KappaF(double, double)> kf;
};

MollerPlan build_moller_plan(const MetricPath& path, const ChiProfile& chi, const Grid& grid,
                             const GammaRep& rep,
                             std::optional<Field> f_override = std::nullopt);

// R: slice at t_minus solving D0  ->  slice at t_plus solving D1
SpinorSlice moller_forward(const MollerPlan& plan, const SpinorSlice& psi0);
// R^-1: slice at t_plus solving D1  ->  slice at t_minus solving D0
SpinorSlice moller_inverse(const MollerPlan& plan, const SpinorSlice& psi1);

// | <<R psi, R phi>>_1 at Sigma_+  -  << psi, phi >>_0 at Sigma_- |
double check_unitarity(const MollerPlan& plan, const SpinorSlice& psi0,
                       const SpinorSlice& phi0);

}  // namespace md
