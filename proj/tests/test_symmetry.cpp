#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "psm/energy.hpp"
#include "psm/fieldlib.hpp"
#include "psm/fields.hpp"
#include "psm/symmetry.hpp"

using namespace psm;

namespace {

double rel_l2_diff(const Field2D& a, const Field2D& b)
{
    Field2D d = a;
    axpy(d, -1.0, b);
    return std::sqrt(l2_norm_sq(d)) /
           std::max(1e-300, std::sqrt(std::max(l2_norm_sq(a), l2_norm_sq(b))));
}

double max_abs_diff(const Field2D& a, const Field2D& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i)
        m = std::max(m, std::fabs(a.v[i] - b.v[i]));
    return m;
}

Field2D wide_gaussian(const Grid2D& g)
{
    return Field2D::sample(g, [](double x, double y) {
        return std::exp(-0.25 * (x * x + y * y));
    });
}

} // namespace

TEST_CASE("quarter-turn rotations are exact permutations")
{
    const Grid2D g(6.0, 32);
    const Field2D u = random_smooth_field(g, kFieldLibrarySeed, 7);

    Field2D r = u;
    for (int i = 0; i < 4; ++i) r = rotate_sample(r, M_PI_2);
    CHECK(max_abs_diff(r, u) == 0.0);

    const Field2D half = rotate_sample(u, M_PI);
    const Field2D two_quarters = rotate_sample(rotate_sample(u, M_PI_2), M_PI_2);
    CHECK(max_abs_diff(half, two_quarters) == 0.0);
}

TEST_CASE("generic-angle rotation inverts to the identity up to interpolation error")
{
    const Grid2D g(6.0, 64);
    const Field2D u = wide_gaussian(g);
    const Field2D back = rotate_sample(rotate_sample(u, 0.3), -0.3);
    CHECK(rel_l2_diff(back, u) < 1e-2);
}

TEST_CASE("exact-permutation projectors are idempotent")
{
    const Grid2D g(6.0, 32);
    const Field2D u = random_smooth_field(g, kFieldLibrarySeed, 11);
    for (const SymmetryClass& c : {SymmetryClass::odd_even(), SymmetryClass::dihedral(1),
                                   SymmetryClass::dihedral(2)}) {
        const Field2D p = project(u, c);
        CHECK(rel_l2_diff(project(p, c), p) < 1e-14);
        CHECK(symmetry_defect(p, c) < 1e-13);
        CHECK(p.sym == c);
    }
}

TEST_CASE("the odd-even projector annihilates an even field")
{
    const Grid2D g(6.0, 32);
    const Field2D u = wide_gaussian(g); // even in both coordinates
    const Field2D p = project(u, SymmetryClass::odd_even());
    CHECK(l2_norm_sq(p) == 0.0);
    CHECK(symmetry_defect(u, SymmetryClass::odd_even()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("order-1 alternating projector extracts the odd part")
{
    const Grid2D g(6.0, 32);
    const Field2D u = random_smooth_field(g, kFieldLibrarySeed, 13);
    const Field2D p = project(u, SymmetryClass::dihedral(1));

    Field2D odd = u; // (u(x) - u(-x)) / 2
    axpy(odd, -1.0, rotate_sample(u, M_PI));
    scale(odd, 0.5);
    CHECK(rel_l2_diff(p, odd) < 1e-15);
}

TEST_CASE("the radial projector fixes a radial field up to binning error")
{
    const Grid2D g(6.0, 64);
    const Field2D u = wide_gaussian(g);
    CHECK(rel_l2_diff(project(u, SymmetryClass::radial()), u) < 1e-2);
    CHECK(symmetry_defect(u, SymmetryClass::radial()) < 1e-2);
}

TEST_CASE("angular average and radial lift are mutually consistent")
{
    const Grid2D g(6.0, 64);
    const Field2D u = wide_gaussian(g);

    // lift(avg(u)) reproduces a radial plane field
    const RadialField a1 = angular_average(u);
    const Field2D w = lift_radial(a1, g);
    CHECK(rel_l2_diff(w, u) < 1e-2);

    // avg(lift(avg(u))) reproduces avg(u) on the same bin grid
    const RadialField a2 = angular_average(w);
    REQUIRE(a1.v.size() == a2.v.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a1.v.size(); ++i) {
        num += (a1.v[i] - a2.v[i]) * (a1.v[i] - a2.v[i]);
        den += a1.v[i] * a1.v[i];
    }
    CHECK(std::sqrt(num / std::max(den, 1e-300)) < 1e-2);
}

TEST_CASE("a 3-fold equivariant field has small defect in its own class")
{
    const Grid2D g(6.0, 64);
    // Im((x+iy)^3) e^{-r^2/2} flips sign under rotation by pi/3.
    const Field2D u = Field2D::sample(g, [](double x, double y) {
        return (3.0 * x * x * y - y * y * y) * std::exp(-0.5 * (x * x + y * y));
    });
    CHECK(symmetry_defect(u, SymmetryClass::dihedral(3)) < 2e-2);
    CHECK(rel_l2_diff(project(u, SymmetryClass::dihedral(3)), u) < 2e-2);
}

TEST_CASE("energy gradients preserve the odd-even class")
{
    const Grid2D g(6.0, 32);
    auto tbl = kernel_table(g);
    ProblemParams params;
    params.alpha = 2.0;
    params.p = 4.0;
    params.q = 1.0;

    const Field2D u = project(random_smooth_field(g, kFieldLibrarySeed, 17),
                              SymmetryClass::odd_even());
    const Field2D gi = grad_I(u, params, *tbl);
    CHECK(symmetry_defect(gi, SymmetryClass::odd_even()) < 1e-12);
}

TEST_CASE("defects are normalized into the unit range")
{
    const Grid2D g(6.0, 32);
    for (int k = 0; k < 6; ++k) {
        const Field2D u = random_smooth_field(g, kFieldLibrarySeed, 300 + k);
        // Permutation-based projectors are orthogonal, so the defect cannot
        // exceed 1 beyond roundoff.
        for (const SymmetryClass& c : {SymmetryClass::odd_even(),
                                       SymmetryClass::dihedral(1),
                                       SymmetryClass::dihedral(2)}) {
            const double d = symmetry_defect(u, c);
            CHECK(d >= 0.0);
            CHECK(d <= 1.0 + 1e-12);
        }
        // Interpolating projectors may overshoot by the interpolation error.
        for (const SymmetryClass& c :
             {SymmetryClass::radial(), SymmetryClass::dihedral(4)}) {
            const double d = symmetry_defect(u, c);
            CHECK(d >= 0.0);
            CHECK(d <= 1.1);
        }
    }
}
