#pragma once
#include "moller/moller.hpp"
#include "moller/solver.hpp"

namespace md {

using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;

// Doubled solution space Sol + Upsilon Sol over a finite solution family,
// coordinates (a, c) against (psi_i, Upsilon psi_i). Gamma(a,c) = (conj c, conj a)
// (self-dual convention, Gamma^2 = Id).
struct DoubledSpace {
    std::vector<SpinorSlice> basis;  // slices at t_ref
    double t_ref = 0.0;
    int k = 0;
    MatX gram;    // k x k, <<psi_i, psi_j>>
    MatX chol_L;  // gram = L L^dag; ON coords a_on = L^dag a

    MatX gram_doubled() const;                      // diag(G, conj G)
    VecX gamma_apply(const VecX& v) const;          // on raw doubled coords
    VecX to_on(const VecX& v) const;                // raw -> orthonormal coords
    VecX from_on(const VecX& v) const;
};

DoubledSpace build_doubled_space(const std::vector<SpinorSlice>& solutions,
                                 const FirstOrderSystem& D, double t_ref);

// Jordan-Wigner CAR representation on 2^k; Xi acts on ON doubled coordinates
// through a "hole basis" {w_i} (an ON basis of a Gamma-transversal subspace):
//   Xi(v) = sum_i (w_i^dag v) A_i + ((Gamma w_i)^dag v) A_i^dag.
struct CarRep {
    int k = 0;
    std::vector<MatX> ann;  // A_i, 2^k x 2^k
    MatX wbasis;            // columns w_i in ON doubled coordinates (2k x k)
    const DoubledSpace* space = nullptr;

    MatX xi(const VecX& doubled_raw) const;  // raw doubled coords
    MatX xi_on(const VecX& v_on) const;
    VecX vacuum() const;
    std::complex<double> vac_expect(const MatX& X) const;
};

struct QuasiFreeState {
    MatX Q;  // 2k x 2k in raw doubled coordinates; omega(u,v) = u^dag G_d Q v
};

// default rep: w_i = Sol-side ON directions (Fock vacuum = "empty" state)
CarRep car_representation(const DoubledSpace& space);
// rep adapted to a quasi-free state: w_i spans the eigenvalue-0 space of Q,
// so the Fock vacuum implements the state exactly
CarRep car_representation(const DoubledSpace& space, const QuasiFreeState& st);

struct StateCertificate {
    double q_min = 0, q_max = 0, herm_residual = 0, gamma_residual = 0;
};
StateCertificate certify_state(const DoubledSpace& space, const QuasiFreeState& st);
// Gamma Q Gamma as a linear map on coordinates: S conj(Q) S with S the swap
MatX gamma_conj(const MatX& Q);

// Boundary Hamiltonian H = iL of an ultrastatic system with the boundary
// condition folded in by restriction to the constrained subspace.
struct UltrastaticHamiltonian {
    int N = 0;
    double max_imag = 0;       // certificate: largest |Im| of the raw spectrum
    Eigen::VectorXd evals;     // real (symmetrized) spectrum, ascending
    MatX evecs;                // reduced coordinates, W-orthonormal
    MatX prolong;              // reduced -> full 2(N+1) coordinates
    std::vector<double> wdiag; // W weights per full coordinate
    // grid-scale content per mode: ~0 for resolved modes, ~4 for the sawtooth
    // doubler branch the central stencil carries at the same eigenvalues
    std::vector<double> roughness;

    SpinorSlice mode_slice(int i) const;
    // indices of the count smooth modes nearest zero frequency
    std::vector<int> smooth_modes_near_zero(int count) const;
    // W-orthogonal projection of a slice onto the strictly-positive modes
    SpinorSlice project_positive(const SpinorSlice& s) const;
};

UltrastaticHamiltonian boundary_hamiltonian(const FirstOrderSystem& D,
                                            const BoundarySpace& Bl,
                                            const BoundarySpace& Br, int N);

// Q = P_+(H) + (Id - Upsilon P_+(H) Upsilon^-1) on the doubled space
QuasiFreeState ground_state_Q(const UltrastaticHamiltonian& ham, const DoubledSpace& space);

// psi_f = G f = (G^+ - G^-) f restricted to t_ref
SpinorSlice causal_propagator_slice(const FirstOrderSystem& D, const BoundarySpace& Bl,
                                    const BoundarySpace& Br, const Grid& grid,
                                    const SourceFn& f, double t_ref);

struct StateContext {
    FirstOrderSystem D;
    BoundarySpace Bl, Br;
    Grid grid;
    DoubledSpace space;
    QuasiFreeState state;
};

// omega^2(f1,f2) = (psi_f1, Q psi_f2) through the doubled coordinates
std::complex<double> two_point(const StateContext& ctx, const SourceFn& f1,
                               const SourceFn& f2);

// pulls the state back along R^-1; returns the M0-side space and state
std::pair<DoubledSpace, QuasiFreeState> pullback_state(const QuasiFreeState& st1,
                                                       const DoubledSpace& space1,
                                                       const MollerPlan& plan);

}  // namespace md
