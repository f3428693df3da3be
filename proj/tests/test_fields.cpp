#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "psm/fieldlib.hpp"
#include "psm/fields.hpp"

using namespace psm;

// Closed-form moments of the reference profile u(x) = exp(-|x|^2/2):
//   ||u||_2^2 = pi                 ||grad u||_2^2 = pi
//   int |x|^alpha u^2 = pi Gamma(alpha/2 + 1)
//   ||u||_p^p = 2 pi / p
namespace {

double gauss(double x, double y) { return std::exp(-0.5 * (x * x + y * y)); }

constexpr double kPi = 3.14159265358979323846;

double rel(double a, double b)
{
    return std::fabs(a - b) / std::max({1e-300, std::fabs(a), std::fabs(b)});
}

} // namespace

TEST_CASE("plane Gaussian moments match the closed forms")
{
    const Grid2D g(8.0, 96);
    const Field2D u = Field2D::sample(g, gauss);

    // Lattice sums of a smooth rapidly decaying function converge faster than
    // any power of h; only the truncated tail and roundoff remain.
    CHECK(rel(l2_norm_sq(u), kPi) < 1e-12);
    CHECK(rel(lp_norm_pow(u, 4.0), kPi / 2.0) < 1e-12);
    CHECK(rel(lp_norm_pow(u, 6.0), 2.0 * kPi / 6.0) < 1e-12);
    CHECK(rel(std::pow(lp_norm(u, 4.0), 4.0), kPi / 2.0) < 1e-11);

    // alpha = 2 moment: pi * Gamma(2) = pi; alpha = 5: pi * Gamma(7/2).
    CHECK(rel(star_norm_sq(u, 2.0) - l2_norm_sq(u), kPi) < 1e-10);
    CHECK(rel(star_norm_sq(u, 5.0) - l2_norm_sq(u), 10.440614994059453) < 1e-7);

    // The Dirichlet form is a second-order difference quotient: O(h^2).
    CHECK(rel(grad_sq_norm(u), kPi) < 1e-2);
}

TEST_CASE("Dirichlet form converges at second order")
{
    double err[3];
    int n = 48;
    for (int k = 0; k < 3; ++k, n *= 2) {
        const Field2D u = Field2D::sample(Grid2D(8.0, n), gauss);
        err[k] = std::fabs(grad_sq_norm(u) - kPi);
    }
    CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.1));
    CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("radial moments match the closed forms and refine at second order")
{
    const RadialGrid g(10.0, 512);
    const RadialField u =
        RadialField::sample(g, [](double r) { return std::exp(-0.5 * r * r); });

    // Radial quadrature is midpoint in the measure r dr: O(h^2).
    CHECK(rel(l2_norm_sq(u), kPi) < 5e-4);
    CHECK(rel(lp_norm_pow(u, 6.0), kPi / 3.0) < 5e-4);
    CHECK(rel(star_norm_sq(u, 5.0) - l2_norm_sq(u), 10.440614994059453) < 5e-4);
    CHECK(rel(grad_sq_norm(u), kPi) < 1e-3);

    double err[3];
    int m = 128;
    for (int k = 0; k < 3; ++k, m *= 2) {
        const RadialField w = RadialField::sample(
            RadialGrid(10.0, m), [](double r) { return std::exp(-0.5 * r * r); });
        err[k] = std::fabs(l2_norm_sq(w) - kPi);
    }
    CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.15));
    CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("norms are absolutely homogeneous to roundoff")
{
    const Grid2D g(6.0, 48);
    Field2D u = random_smooth_field(g, kFieldLibrarySeed, 7);
    const double g0 = grad_sq_norm(u);
    const double s0 = star_norm_sq(u, 3.0);
    const double p0 = lp_norm_pow(u, 5.0);
    const double x0 = x_norm(u, 3.0);
    const double c = -2.7;
    scale(u, c);
    CHECK(rel(grad_sq_norm(u), c * c * g0) < 5e-14);
    CHECK(rel(star_norm_sq(u, 3.0), c * c * s0) < 5e-14);
    CHECK(rel(lp_norm_pow(u, 5.0), std::pow(std::fabs(c), 5.0) * p0) < 5e-13);
    CHECK(rel(x_norm(u, 3.0), std::fabs(c) * x0) < 5e-14);
}

TEST_CASE("x_norm is exactly the root of grad_sq + star_sq")
{
    const Grid2D g(6.0, 32);
    const Field2D u = random_smooth_field(g, kFieldLibrarySeed, 3);
    const double xn = x_norm(u, 4.0);
    CHECK(rel(xn * xn, grad_sq_norm(u) + star_norm_sq(u, 4.0)) < 1e-14);

    const RadialField ur = random_radial_field(RadialGrid(8.0, 128), kFieldLibrarySeed, 3);
    const double xr = x_norm(ur, 4.0);
    CHECK(rel(xr * xr, grad_sq_norm(ur) + star_norm_sq(ur, 4.0)) < 1e-14);
}

TEST_CASE("the 5-point Laplacian is the exact quadratic-form gradient")
{
    const Grid2D g(6.0, 32);
    const Field2D u = random_smooth_field(g, kFieldLibrarySeed, 11);
    Field2D lap(g);
    apply_neg_laplacian(u, lap);
    CHECK(rel(dot_l2(lap, u), grad_sq_norm(u)) < 1e-13);

    const RadialGrid gr(8.0, 128);
    const RadialField ur = random_radial_field(gr, kFieldLibrarySeed, 11);
    RadialField lr(gr);
    apply_neg_laplacian(ur, lr);
    CHECK(rel(dot_l2(lr, ur), grad_sq_norm(ur)) < 1e-13);
}

TEST_CASE("dot_l2 is symmetric and bilinear; axpy matches by-hand updates")
{
    const Grid2D g(6.0, 32);
    const Field2D a = random_smooth_field(g, kFieldLibrarySeed, 1);
    const Field2D b = random_smooth_field(g, kFieldLibrarySeed, 2);
    CHECK(dot_l2(a, b) == dot_l2(b, a));
    Field2D c = a;
    axpy(c, 1.5, b);
    CHECK(rel(dot_l2(c, a), dot_l2(a, a) + 1.5 * dot_l2(b, a)) < 1e-13);
    CHECK(rel(l2_norm_sq(a), dot_l2(a, a)) < 1e-15);
}

TEST_CASE("bilinear sampling reproduces bilinear functions and vanishes outside")
{
    const Grid2D g(4.0, 32);
    const Field2D u =
        Field2D::sample(g, [](double x, double y) { return 2.0 * x + 3.0 * y - 0.5; });
    CHECK(bilinear(u, 0.31, -1.17) == doctest::Approx(2.0 * 0.31 - 3.0 * 1.17 - 0.5)
                                          .epsilon(1e-12));
    CHECK(bilinear(u, g.x(10), g.y(20)) == u.at(10, 20));
    CHECK(bilinear(u, 5.0, 0.0) == 0.0);
    CHECK(bilinear(u, 0.0, -7.0) == 0.0);
}

TEST_CASE("resample_dilate matches a directly sampled dilation")
{
    const Grid2D g(8.0, 96);
    const Field2D u = Field2D::sample(g, gauss);
    const DilateResult d = resample_dilate(u, 2.0, 0.0);
    const Field2D ref =
        Field2D::sample(g, [](double x, double y) { return gauss(x / 2.0, y / 2.0); });
    Field2D diff = d.field;
    axpy(diff, -1.0, ref);
    CHECK(std::sqrt(l2_norm_sq(diff) / l2_norm_sq(ref)) < 1e-2);
    CHECK_FALSE(d.truncation_warn);
    CHECK(d.mass_fraction_lost < 1e-2);

    // Dilating far past the box loses most of the mass and must be flagged.
    const DilateResult wide = resample_dilate(u, 100.0, 0.0);
    CHECK(wide.truncation_warn);
    CHECK(wide.mass_fraction_lost > 0.5);
}

TEST_CASE("boundary weight and box pickers certify compactly supported fields")
{
    const Grid2D g(8.0, 64);
    const Field2D u = Field2D::sample(g, gauss);
    CHECK(weighted_boundary_max(u, 4.0) < 1e-10 * star_norm_sq(u, 4.0));

    const double L = default_half_width(gauss, 4.0, 64);
    CHECK(L >= 4.0);
    const Field2D w = Field2D::sample(Grid2D(L, 64), gauss);
    CHECK(weighted_boundary_max(w, 4.0) < 1e-10 * star_norm_sq(w, 4.0));

    CHECK(truncation_study(gauss, 8.0, 48, 4.0, 4.0) < 1e-10);
}

TEST_CASE("grid constructors reject degenerate shapes")
{
    CHECK_THROWS_AS(Grid2D(0.0, 32), std::invalid_argument);
    CHECK_THROWS_AS(Grid2D(4.0, 7), std::invalid_argument); // odd
    CHECK_THROWS_AS(Grid2D(4.0, 4), std::invalid_argument); // too small
    CHECK_THROWS_AS(RadialGrid(-1.0, 64), std::invalid_argument);
    CHECK_THROWS_AS(RadialGrid(4.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(SymmetryClass::dihedral(0), std::invalid_argument);

    ProblemParams bad;
    bad.p = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("cell centers avoid the origin and the axes")
{
    const Grid2D g(4.0, 32);
    for (int i = 0; i < g.n; ++i) {
        CHECK(std::fabs(g.x(i)) > 1e-12);
        CHECK(std::fabs(g.y(i)) > 1e-12);
    }
    const RadialGrid gr(4.0, 64);
    CHECK(gr.r(0) == doctest::Approx(0.5 * gr.h()));
}
