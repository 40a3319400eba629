#pragma once
#include <vector>

#include "moller/dirac.hpp"

namespace md {

enum class BoundarySide { Left, Right };
enum class BoundaryLabel { MIT, ChiralPlus, ChiralMinus, Interpolated, Custom };

// Stored as the projector ONTO the admissible space B (the complementary
// convention to ker pi_B = B; the solver penalty consumes "project onto B").
struct BoundarySpace {
    Mat2 projector;
    BoundarySide side;
    BoundaryLabel label;
};

// outward unit normal at the boundary lines: -h^-1/2 d_x at x=0, +h^-1/2 d_x at x=L
Eigen::Vector2d outward_normal(const SplitMetric& g, double t, BoundarySide side);

BoundarySpace mit_projector(const GammaRep& rep, const SplitMetric& g, double t, double x);
BoundarySpace mit_projector(const GammaRep& rep, const SplitMetric& g, double t,
                            BoundarySide side);
BoundarySpace chiral_projector(const GammaRep& rep, const SplitMetric& g, double t,
                               BoundarySide side, int sign);
// B_chi from v = chi*n1 + (1-chi)*wp(n0); projector onto ker(gamma1(v) + i |v|_1)
BoundarySpace interpolated_mit(const GammaRep& rep, const MetricPath& path, double chi_value,
                               double t, BoundarySide side);

// B^dag = spin-form orthocomplement of sigma(n^flat)(B)
BoundarySpace adjoint_space(const GammaRep& rep, const BoundarySpace& B, const Mat2& sigma_n);

// family phi_t(v) = v + t F(v), F = pi_{W0'} o (pi_{W0}|_{W1})^-1 on rank-1
// subspaces with q >= 0 (q Hermitian of inertia (1,1))
struct SubspaceFamily {
    Vec2c w0;    // spans W0
    Vec2c Fw0;   // F applied to w0
    Vec2c wperp; // spans W0' (negative direction of q)
    Vec2c span_at(double t) const { return w0 + t * Fw0; }
    Mat2 phi_matrix(double t) const;  // phi_t extended to V by F o pi_{W0}
};
SubspaceFamily interpolate_subspace(const Vec2c& w0, const Vec2c& w1, const Mat2& q);

// Compatibility residuals of orders 0..k at both endpoints:
//   sum_j C(k,j) (d_t^j pibar) h_{k-j} |_{dSigma} with pibar = Id - pi_B
// and the recursion h_k = sum C(k-1,j) H_j h_{k-1-j} + d_t^{k-1}(sigma^-1 f).
using SourceFn = std::function<Vec2c(double, double)>;
using ProjFn = std::function<Mat2(double)>;  // projector onto B as a function of t

std::vector<double> check_compatibility(const SpinorSlice& data, const SourceFn& source,
                                        const FirstOrderSystem& D, const ProjFn& proj_left,
                                        const ProjFn& proj_right, double t0, int order);
std::vector<double> check_compatibility(const SpinorSlice& data, const SourceFn& source,
                                        const FirstOrderSystem& D, const BoundarySpace& Bl,
                                        const BoundarySpace& Br, double t0, int order);

}  // namespace md
