#pragma once

#include <functional>

namespace psm {

// Gauss-Legendre nodes/weights on [-1,1], computed once per order by Newton
// iteration on P_n (machine precision, no tables to transcribe).
struct GaussRule {
    std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int n);

// Adaptive 1-D integration by panel bisection: a panel is accepted when the
// order-n estimate agrees with the sum of its two half-panel estimates.
// Handles integrable endpoint singularities (nodes stay interior).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12, double abs_tol = 1e-14);

// int_0^infty f(r) dr with the tail [split,inf) mapped through r = split/s.
// The caller must ensure f decays fast enough for the mapped integrand to be
// integrable at s -> 0+.
double integrate_to_infinity(const std::function<double(double)>& f, double split,
                             double rel_tol = 1e-12);

// Maximize a unimodal-after-bracketing function on [lo,hi]: coarse scan to
// bracket, then golden-section refinement. Returns location of the max.
double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol = 1e-10);

// Average of a radial function f(|y|) over the h x h cell centered at the
// origin, by polar decomposition over one octant (inner integral in r is
// smooth or endpoint-integrable, outer in theta is smooth).
double origin_cell_average(const std::function<double(double)>& f, double h,
                           double rel_tol = 1e-12);

// Average of f(x,y) over an axis-aligned rectangle via adaptive quadrisection
// with an embedded 3x3 vs 5x5 tensor Gauss error estimate.
double adaptive_cell_average(const std::function<double(double, double)>& f,
                             double x0, double x1, double y0, double y1,
                             double rel_tol = 1e-12);

// Fixed tensor Gauss average over a rectangle (for smooth integrands).
double gauss_cell_average(const std::function<double(double, double)>& f,
                          double x0, double x1, double y0, double y1, int order = 4);

} // namespace psm
