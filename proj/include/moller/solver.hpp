#pragma once
#include <string>
#include <vector>

#include "moller/boundary.hpp"
#include "moller/dirac.hpp"

namespace md {

struct Grid {
    int N = 100;        // spatial cells; N+1 nodes
    double cfl = 0.5;
    double t0 = 0.0;
    double t1 = 1.0;
};

struct SpinorHistory {
    std::vector<double> times;
    std::vector<SpinorSlice> slices;
    SpinorHistory reversed() const;
};

struct EvolutionReport {
    std::vector<double> t, energy, boundary_residual, support_left, support_right;
    std::string to_csv() const;
};

// Hermitian solution product on the slice at time t for the given system:
//   sum_j P_j beta sqrt(h) psi^dag (M sigma_dt) phi   (trapezoid P).
// For the plain Dirac system this reduces to slice_product.
std::complex<double> herm_product(const FirstOrderSystem& D, double t,
                                  const SpinorSlice& psi, const SpinorSlice& phi);

// Method-of-lines Cauchy evolution U_{S,t0}: SBP spatial operator, SAT penalty
// on (Id - pi_B) at the endpoints, classical RK4 in time. t1 < t0 runs the
// backward (time-reflected) problem through the same code path.
SpinorHistory evolve(const FirstOrderSystem& D, const BoundarySpace& Bl,
                     const BoundarySpace& Br, const SpinorSlice& data,
                     const SourceFn& source, const Grid& grid, double tau = 1.0,
                     EvolutionReport* report = nullptr);

SpinorSlice restrict_slice(const SpinorHistory& hist, double t);

// Green operators: direction +1 = retarded, -1 = advanced
SpinorHistory green(const FirstOrderSystem& D, const BoundarySpace& Bl,
                    const BoundarySpace& Br, const SourceFn& source, int direction,
                    const Grid& grid);

double check_energy_identity(const SpinorHistory& hist, const FirstOrderSystem& D);

// discrete L2 norm of S psi - f over the interior of the history
double interior_residual(const FirstOrderSystem& D, const SpinorHistory& hist,
                         const SourceFn& source, int t_margin = 2, int x_margin = 2);

// max over slices of (mass outside [a - int s - inflate, b + int s + inflate]) / mass
double mass_outside_cone(const SpinorHistory& hist, const FirstOrderSystem& D, double a,
                         double b, const std::function<double(double)>& speed,
                         double inflate);

}  // namespace md
