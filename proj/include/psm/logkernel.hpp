#pragma once

#include <memory>

#include "psm/fields.hpp"

namespace psm {

// Cell-averaged kernel tables over lattice offsets (di,dj) in (-n,n)^2, each
// entry the exact average of the kernel over the h x h cell centered at the
// offset, including the 1/(2pi) prefactor:
//   k_log:  log|y|            closed-form antiderivative; zero offset is the
//                             analytic (log h + c0)/(2pi) with c0 the unit-cell
//                             average of log|y| (adaptive polar quadrature)
//   k_v1:   log(2 + |y|)      tensor Gauss, adaptive near the origin
//   k_v2:   log(1 + 2/|y|)    independent quadrature; zero offset via the
//                             pointwise identity log(1+2/r)=log(2+r)-log(r)
// Entries are deduplicated by |di|,|dj| symmetry. Tables are cached per grid.
class KernelTable {
  public:
    explicit KernelTable(const Grid2D& g);

    const Grid2D& grid() const { return grid_; }
    double c0() const { return c0_; }

    double klog(int di, int dj) const { return k_log_[at(di, dj)]; }
    double kv1(int di, int dj) const { return k_v1_[at(di, dj)]; }
    double kv2(int di, int dj) const { return k_v2_[at(di, dj)]; }

    const std::vector<double>& raw_log() const { return k_log_; }
    const std::vector<double>& raw_v1() const { return k_v1_; }
    const std::vector<double>& raw_v2() const { return k_v2_; }
    std::size_t at(int di, int dj) const
    {
        return static_cast<std::size_t>(std::abs(dj)) * grid_.n + std::abs(di);
    }

  private:
    Grid2D grid_;
    double c0_ = 0.0;
    std::vector<double> k_log_, k_v1_, k_v2_; // n x n quarter tables
};

// Shared cache (scans and solvers reuse tables across calls).
std::shared_ptr<const KernelTable> kernel_table(const Grid2D& g);

// Unit-cell average of log|y|; equals pi/4 - 3/2 - log(2)/2. Computed by
// adaptive polar quadrature (not hardcoded); exposed for tests.
double log_cell_average_c0();

// phi(x_i) = sum_j k_log(i-j) u2_j h^2, the potential of the density w = u^2.
// Row-parallel with fixed pairwise reduction order: bit-identical for any
// thread count. The _serial variant is the naive reference kept for testing.
Field2D newtonian_potential(const Field2D& u, const KernelTable& tbl);
Field2D newtonian_potential_serial(const Field2D& u, const KernelTable& tbl);

// phi(r_i) = int_0^R log(max(r_i,s)) u(s)^2 s ds via prefix sums, O(m).
RadialField radial_potential(const RadialField& u);

// Same kernel applied to a given density w (not squared):
// int_0^R log(max(r_i,s)) w(s) s ds. Used for second-variation actions,
// where the density is a product of two distinct fields.
RadialField radial_potential_density(const RadialField& dens);

struct V0Split {
    double v0 = 0.0;       // directly summed log kernel
    double v1 = 0.0;       // log(2+|x-y|) part, >= 0
    double v2 = 0.0;       // log(1+2/|x-y|) part, >= 0
    double consistency = 0.0; // |v0 - (v1-v2)| / max(1, v1+v2), asserted <= 1e-8
};

// Double sums (1/2pi) iint K(x-y) u(x)^2 w(y)^2 dx dy for the three kernels.
// Pair variant rejects mismatched grids.
V0Split v_split(const Field2D& u, const Field2D& w, const KernelTable& tbl);
V0Split v_split(const Field2D& u, const KernelTable& tbl);
V0Split v_split_serial(const Field2D& u, const KernelTable& tbl);

double v0(const Field2D& u, const KernelTable& tbl);
double v1(const Field2D& u, const KernelTable& tbl);
double v2(const Field2D& u, const KernelTable& tbl);

// Radial counterparts. v0 goes through the O(m) potential route; v1 uses the
// angular average of log(2+d) (periodic trapezoid, smooth integrand); v2 uses
// the exact angular mean of the log kernel, int log d dtheta = 2pi log max(r,s).
V0Split v_split(const RadialField& u);
double v0(const RadialField& u);

// V0'(u) action as a field: 4 (Phi * u^2) u. <g,u>_L2 = 4 V0(u) to roundoff.
Field2D v0_gradient_action(const Field2D& u, const KernelTable& tbl);
RadialField v0_gradient_action(const RadialField& u);

} // namespace psm
