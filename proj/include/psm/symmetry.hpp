#pragma once

#include "psm/grid.hpp"

namespace psm {

// w(x) = u(R(theta) x) with R(theta) the rotation by theta. Multiples of
// pi/2 map the cell-centered lattice to itself and are applied as exact index
// permutations; any other angle samples u bilinearly (zero outside the box).
Field2D rotate_sample(const Field2D& u, double theta);

// Averaging projector onto the symmetry class:
//   odd_even     1/4 (u(x1,x2) - u(-x1,x2) + u(x1,-x2) - u(-x1,-x2))
//   dihedral(k)  (1/2k) sum_{j=1..2k} (-1)^j u(A^j x),  A = rotation by pi/k
//   radial       angular average over polar bins of width h, reconstructed
//                piecewise-linearly in the radius
// odd_even and dihedral(1), dihedral(2) are exact index permutations; other
// dihedral orders go through bilinear interpolation and are idempotent only
// up to interpolation error. The output carries the class tag.
Field2D project(const Field2D& u, const SymmetryClass& c);

// ||u - project(u)||_2 / max(||u||_2, eps): 0 for a field already in the
// class, 1 for a field the projector annihilates.
double symmetry_defect(const Field2D& u, const SymmetryClass& c);

// Angular average as a radial profile: cells are binned by center radius
// with bin width h; empty bins (none occur for n >= 16) are filled by the
// piecewise-linear reconstruction. The profile reaches the box corner.
RadialField angular_average(const Field2D& u);

// Radial profile lifted to the plane: linear interpolation in r between
// samples, constant below the first sample, linear to zero at R, zero beyond.
Field2D lift_radial(const RadialField& f, const Grid2D& g);

} // namespace psm
