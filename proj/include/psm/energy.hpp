#pragma once

#include <functional>
#include <optional>
#include <string>

#include "psm/logkernel.hpp"

namespace psm {

// Nonlinearity W with declared growth bounds W(s) <= c1 s^2 + c2 |s|^p.
// audit() samples the admissibility conditions and cross-checks Wp against a
// difference quotient of W; solvers refuse a W that fails its audit.
struct Nonlinearity {
    std::function<double(double)> W;
    std::function<double(double)> Wp;
    double c1 = 0.0, c2 = 0.0, p = 4.0;

    void audit() const;
};

// W(s) = c1 s^2 + c2 |s|^p; |s|^{p-2} s extended by 0 at s = 0.
Nonlinearity builtin_W(double c1, double c2, double p);
Nonlinearity nonlinearity_for(const ProblemParams& params);

struct EnergyBreakdown {
    double grad_sq = 0.0;
    double star_sq = 0.0;
    double l2_sq = 0.0;
    double lp_p = 0.0;
    double v0 = 0.0, v1 = 0.0, v2 = 0.0;
};

EnergyBreakdown breakdown(const Field2D& u, const ProblemParams& params,
                          const KernelTable& tbl);
EnergyBreakdown breakdown(const RadialField& u, const ProblemParams& params);

// I = 1/2 grad + 1/2 star - (q/4) V0 + (1/p) ||u||_p^p   (local sign plus)
// J = 1/2 grad + 1/2 star - (q/4) V0 - (1/p) ||u||_p^p   (local sign minus)
// G = 1/2 grad + 1/2 star + int W(u)                      (uncoupled)
double eval_I(const EnergyBreakdown& b, const ProblemParams& params);
double eval_J(const EnergyBreakdown& b, const ProblemParams& params);
double eval_I(const Field2D& u, const ProblemParams& params, const KernelTable& tbl);
double eval_J(const Field2D& u, const ProblemParams& params, const KernelTable& tbl);
double eval_I(const RadialField& u, const ProblemParams& params);
double eval_J(const RadialField& u, const ProblemParams& params);
double eval_G(const Field2D& u, double alpha, const Nonlinearity& W);
double eval_G(const RadialField& u, double alpha, const Nonlinearity& W);

// L2 gradients as fields; built from the 5-point (resp. radial 3-point)
// Laplacian, which is the exact quadratic-form gradient of grad_sq_norm, so
// <grad,u> matches the Nehari value to roundoff, not just to O(h^2).
Field2D grad_I(const Field2D& u, const ProblemParams& params, const KernelTable& tbl);
Field2D grad_J(const Field2D& u, const ProblemParams& params, const KernelTable& tbl);
RadialField grad_I(const RadialField& u, const ProblemParams& params);
RadialField grad_J(const RadialField& u, const ProblemParams& params);
Field2D grad_G(const Field2D& u, double alpha, const Nonlinearity& W);
RadialField grad_G(const RadialField& u, double alpha, const Nonlinearity& W);

// N(u) = grad_sq + star_sq - q V0 +/- ||u||_p^p = <grad, u>.
double nehari(const EnergyBreakdown& b, const ProblemParams& params);
double nehari(const Field2D& u, const ProblemParams& params, const KernelTable& tbl);
double nehari(const RadialField& u, const ProblemParams& params);

// Dilation identity value at u for exponent r (sign of the |u|_p term follows
// params.local_sign):
//   P(u;r) = r grad + (r+1) l2 + (r+1+alpha/2) int |x|^alpha u^2
//            - (q/8pi) l2^2 - q (r+1) V0 +/- ((p r + 2)/p) ||u||_p^p
// P is affine in r with slope N(u) - that identity is exact here.
double pohozaev(const EnergyBreakdown& b, const ProblemParams& params, double r);
double pohozaev(const Field2D& u, const ProblemParams& params, const KernelTable& tbl,
                double r);
double pohozaev(const RadialField& u, const ProblemParams& params, double r);

// ||u||_2^2 + ((2+alpha)/2) int |x|^alpha u^2 + 2 int W(u); positive for u != 0
// under the admissible W class (certificate for the constrained minimizer).
double pohozaev_uncoupled(const Field2D& u, double alpha, const Nonlinearity& W);
double pohozaev_uncoupled(const RadialField& u, double alpha, const Nonlinearity& W);

// Dilation identity for the coupled equation with a two-term W (the built-in
// family W = c1 s^2 + c2 |s|^p; exact only for that family):
//   P(u;r) = r grad + (r+1) l2 + (r+1+alpha/2) int |x|^alpha u^2
//            - (q/8pi) l2^2 - q(r+1) V0 + 2 int W + r int W'(u) u.
double pohozaev_general(const EnergyBreakdown& b, double alpha, double q,
                        const Nonlinearity& W, double r);

// Empirical Gagliardo-Nirenberg check: returns (||u||_p^p, C_gn ||u||_2^2
// ||grad u||_2^{p-2}) with C_gn the stored library constant for this p.
std::pair<double, double> gagliardo_nirenberg_check(const Field2D& u, double p);
double gn_constant(double p); // cached max of the ratio over the field library

struct EnergyReport {
    double value_I = 0.0, value_J = 0.0, value_G = 0.0;
    double v0 = 0.0, v1 = 0.0, v2 = 0.0;
    double grad_sq = 0.0, star_sq = 0.0, lp_p = 0.0;
    double nehari = 0.0;
    double pohozaev_r0 = 0.0, pohozaev_r_half_alpha = 0.0;
    double grad_x_norm = 0.0;
    std::string to_json() const;
};

EnergyReport energy_report(const Field2D& u, const ProblemParams& params,
                           const KernelTable& tbl);
EnergyReport energy_report(const RadialField& u, const ProblemParams& params);

} // namespace psm
