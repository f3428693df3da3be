#pragma once

#include "psm/grid.hpp"

namespace psm {

// All integrals use the midpoint rule: cell sums times h^2 (2-D), or weights
// r_i*h in the measure r dr (radial; the weight of each cell is exact).
// Reductions go through pairwise summation, so every norm is deterministic
// and absolutely homogeneous to ~1e-16.

// Dirichlet form sum over faces (ghost value 0 outside the box); this is the
// exact quadratic form of the 5-point Laplacian, so energy gradients satisfy
// <grad,u> identities to roundoff.
double grad_sq_norm(const Field2D& u);
double grad_sq_norm(const RadialField& u);

double star_norm_sq(const Field2D& u, double alpha);
double star_norm_sq(const RadialField& u, double alpha);

double l2_norm_sq(const Field2D& u);
double l2_norm_sq(const RadialField& u);

// ||u||_p^p and ||u||_p
double lp_norm_pow(const Field2D& u, double p);
double lp_norm_pow(const RadialField& u, double p);
double lp_norm(const Field2D& u, double p);
double lp_norm(const RadialField& u, double p);

// Weighted-space norm: sqrt(grad_sq + star_sq). Exact by construction.
double x_norm(const Field2D& u, double alpha);
double x_norm(const RadialField& u, double alpha);

double dot_l2(const Field2D& a, const Field2D& b);
double dot_l2(const RadialField& a, const RadialField& b);

// y += c*x
void axpy(Field2D& y, double c, const Field2D& x);
void axpy(RadialField& y, double c, const RadialField& x);
void scale(Field2D& u, double c);
void scale(RadialField& u, double c);

// 5-point Laplacian with Dirichlet ghost cells; out[k] = (-Delta_h u)[k].
void apply_neg_laplacian(const Field2D& u, Field2D& out);
// Radial version: -(1/r)(r u')' with a natural (weight-0) face at the origin
// and a Dirichlet ghost at r = R.
void apply_neg_laplacian(const RadialField& u, RadialField& out);

// Bilinear sample of u at an arbitrary point, zero outside the box.
double bilinear(const Field2D& u, double x, double y);

struct DilateResult {
    Field2D field;
    bool truncation_warn = false; // >1% of the source L2 mass left the box
    double mass_fraction_lost = 0.0;
};

// t^{r_pow} u(x/t) resampled on u's own grid by bilinear interpolation.
DilateResult resample_dilate(const Field2D& u, double t, double r_pow);

// Max of (1+|x|^alpha) u(x)^2 over boundary cells, used by the box pickers:
// the default L satisfies weighted_boundary_max < 1e-10 * star_norm_sq.
double weighted_boundary_max(const Field2D& u, double alpha);
double weighted_boundary_max(const RadialField& u, double alpha);

// Doubling study: evaluates the basic norms at (L,n) and (2L,2n) (same h) and
// returns the largest relative change; small values certify the box.
template <class SampleFn>
double truncation_study(SampleFn&& f, double L, int n, double alpha, double p)
{
    Field2D a = Field2D::sample(Grid2D(L, n), f);
    Field2D b = Field2D::sample(Grid2D(2.0 * L, 2 * n), f);
    auto rel = [](double x, double y) {
        return std::fabs(x - y) / std::max({1e-300, std::fabs(x), std::fabs(y)});
    };
    double worst = rel(grad_sq_norm(a), grad_sq_norm(b));
    worst = std::max(worst, rel(star_norm_sq(a, alpha), star_norm_sq(b, alpha)));
    worst = std::max(worst, rel(lp_norm_pow(a, p), lp_norm_pow(b, p)));
    return worst;
}

// Smallest half-width from the doubling sequence L0*2^k whose boundary is
// negligible for the sampled function.
template <class SampleFn>
double default_half_width(SampleFn&& f, double alpha, int n, double L0 = 4.0)
{
    for (double L = L0; L <= 1024.0; L *= 2.0) {
        Field2D u = Field2D::sample(Grid2D(L, n), f);
        if (weighted_boundary_max(u, alpha) < 1e-10 * star_norm_sq(u, alpha)) return L;
    }
    return 1024.0;
}

} // namespace psm
