#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psm/energy.hpp"
#include "psm/grid.hpp"

namespace psm {

enum class Classification {
    trivial_collapse,
    negative_level_minimizer,
    mountain_pass_solution,
    constrained_minimizer,
};

std::string classification_name(Classification c);

struct SolveOutcome {
    Classification classification = Classification::trivial_collapse;
    bool is_radial = false;
    Field2D plane;      // populated when !is_radial
    RadialField radial; // populated when is_radial
    double level = 0.0;
    std::optional<double> multiplier_lambda;
    double q_effective = 0.0;
    // Dual norm of the (projected) gradient: sqrt(<g, M^{-1} g>_L2) with
    // M = -Delta_h + (1 + |x|^alpha). This is the operator norm of the first
    // variation as a functional on the weighted space, so it is amplitude-fair:
    // by Cauchy-Schwarz |<g, v>| <= residual_grad * x_norm(v) for every v.
    double residual_grad = 0.0;
    double residual_nehari = 0.0;        // <grad, u>, signed
    double residual_pohozaev = 0.0;      // dilation identity at r = 0, signed
    double residual_pohozaev_half = 0.0; // dilation identity at r = alpha/2
    long iterations = 0;
    bool converged = false;
    bool sign_change = false;            // min u < 0 < max u
    double solution_x_norm = 0.0;
    double solution_l2_norm = 0.0;
    std::vector<double> start_norms;     // per-multistart final x-norms
    std::string anomaly;                 // nonempty when a certificate failed

    std::string to_json() const;
};

struct SolverOptions {
    int max_iters = 5000;
    double tol_grad = 1e-6;
    int path_points = 9;
    int multistarts = 1;
    std::uint64_t seed = 0x5EEDF1E1DULL;
};

// Scalar dilation rule for u_t = u(./t):
//   V0(u_t) = t^4 V0(u) + (t^4 log t / 2 pi) ||u||_2^4.
double dilated_v0(double t, double v0_u, double l2_sq_u);

// I (or J, by local sign) of the dilated field u_t = u(./t) from the base
// moments, all terms by their exact scaling laws.
struct DilationMoments {
    double grad_sq = 0.0, l2_sq = 0.0, alpha_moment = 0.0, lp_p = 0.0, v0 = 0.0;
};
DilationMoments dilation_moments(const RadialField& u, double alpha, double p);
double dilated_level(double t, const DilationMoments& m, const ProblemParams& params);

// The unique t0 > 0 on the increasing branch of t -> V0(u_t) with
// V0(u_{t0}) = 1, by bracketing + bisection to 1e-12 relative.
// Throws std::invalid_argument when ||u||_2 = 0.
double find_t0_on_H(double v0_u, double l2_sq_u);
double find_t0_on_H(const Field2D& u, const KernelTable& tbl);

// Returns a copy of u with V0 = 1 to roundoff: amplitude rescaling
// c = V0^{-1/4} when V0 > 0 (exact by quartic homogeneity), otherwise one
// dilation through find_t0_on_H followed by the amplitude correction.
Field2D retract_to_H(const Field2D& u, const KernelTable& tbl);

// Constrained minimization of G(u) = 1/2 grad + 1/2 star + int W(u) on
// {V0 = 1} inside the symmetry class: projected preconditioned descent with
// multiplier estimate lambda = <grad_G, grad_V0> / ||grad_V0||_2^2, Armijo
// backtracking, retraction and re-projection every iteration. On success the
// solution solves the coupled system with q_effective = 4 lambda.
SolveOutcome minimize_on_H(const Field2D& seed, const ProblemParams& params,
                           const Nonlinearity& W, const SymmetryClass& cls,
                           const SolverOptions& opt);

// Radial minimization of I (local sign plus) from a dilated-Gaussian seed
// chosen by the scalar dilation formula, plus optional seeded multistarts.
// Preconditioned descent handles the collapse regime; once the level goes
// negative the iterate is polished by a damped Newton method (matrix-free
// second-variation action, preconditioned CG inner solves, dual-norm merit).
// Returns negative_level_minimizer when converged at a negative level with a
// nontrivial field, else trivial_collapse; "minimizer" means the lowest-level
// converged stationary point among the starts.
SolveOutcome minimize_I_radial(const ProblemParams& params, const RadialGrid& g,
                               const SolverOptions& opt);

// Smallest q (1% bisection on top of a geometric search) at which some
// member of the nested dilation trial family {Gaussian(./t)} reaches a
// negative level; upper-bounds the true threshold. Returns +infinity when
// even q = 2^64 q0 fails (misconfiguration signal).
double find_q_tilde(const ProblemParams& params, const RadialGrid& g,
                    int trial_family_size);

// Saddle search for J in the dihedral class: linear path from 0 to a dilated
// endpoint with a negative level, transverse-descent updates of the maximal
// node (half-steps to its neighbors), equal-arclength re-tension, and a
// Gauss-Newton polish of the gradient at the converged node. level is J at
// the saddle; the positive floor from the small-sphere estimate is checked.
SolveOutcome mountain_pass(const ProblemParams& params, int k, const Grid2D& g,
                           const SolverOptions& opt);

// Small-sphere level floor max_rho rho^2 (1/2 - (q C_alpha/4pi) rho^2
//                                             - (C_emb/p) rho^{p-2}).
struct MountainPassFloor {
    double rho = 0.0;
    double floor = 0.0;
};
MountainPassFloor mountain_pass_floor(const ProblemParams& params);

// L2 norm of -Delta_h u + (1+|x|^alpha) u - q phi u + (local term), assembled
// by an independent code path (its own stencil loops, serial potential).
double pde_residual_l2(const Field2D& u, const ProblemParams& params,
                       const KernelTable& tbl);
double pde_residual_l2(const RadialField& u, const ProblemParams& params);
double pde_residual_l2(const Field2D& u, double alpha, double q, const Nonlinearity& W,
                       const KernelTable& tbl);

} // namespace psm
