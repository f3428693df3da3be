#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "psm/fieldlib.hpp"
#include "psm/fields.hpp"
#include "psm/logkernel.hpp"

using namespace psm;

// Reference values for the potential of the density w = u^2 = exp(-r^2),
// phi(r) = log(r) int_0^r w s ds + int_r^inf log(s) w s ds, computed by
// adaptive quadrature of the closed-form radial reduction (independent of the
// prefix-sum code path). phi(0) = -EulerGamma/4 exactly.
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPhi0 = -0.14430391622538322;  // -EulerGamma/4
constexpr double kPhiHalf = -0.08550293166903822;
constexpr double kPhi1 = 0.05484598359888010;   // E1(1)/4
constexpr double kPhi2 = 0.34751842838243485;
constexpr double kV0Gauss = 0.09105239947839394;
constexpr double kV1Gauss = 1.82214247513505;

double gauss(double x, double y) { return std::exp(-0.5 * (x * x + y * y)); }

double rel(double a, double b)
{
    return std::fabs(a - b) / std::max({1e-300, std::fabs(a), std::fabs(b)});
}

double interp_radial(const RadialField& f, double r)
{
    const RadialGrid& g = f.grid;
    const double s = r / g.h() - 0.5;
    const int i = static_cast<int>(std::floor(s));
    if (i < 0) return f.v.front();
    if (i + 1 >= g.m) return f.v.back();
    const double w = s - i;
    return (1.0 - w) * f.v[i] + w * f.v[i + 1];
}

} // namespace

TEST_CASE("unit-cell average of log|y| matches the closed form")
{
    // pi/4 - 3/2 - log(2)/2, recovered by the adaptive polar quadrature.
    CHECK(rel(log_cell_average_c0(), -1.0611754268825244) < 1e-10);
    const KernelTable tbl{Grid2D(4.0, 16)};
    CHECK(tbl.c0() == log_cell_average_c0());
}

TEST_CASE("far-field kernel entries approach the point kernel")
{
    const Grid2D g(4.0, 32);
    auto tbl = kernel_table(g);
    const double h = g.h();
    const double d = 10.0 * h;
    CHECK(rel(tbl->klog(10, 0), std::log(d) / (2.0 * kPi)) < 1e-3);
    CHECK(rel(tbl->kv1(10, 0), std::log(2.0 + d) / (2.0 * kPi)) < 1e-3);
    CHECK(rel(tbl->kv2(10, 0), std::log(1.0 + 2.0 / d) / (2.0 * kPi)) < 1e-3);
}

TEST_CASE("cell-averaged kernels satisfy log = v1 - v2 entrywise")
{
    // log r = log(2+r) - log(1+2/r) pointwise, hence also for cell averages;
    // the three tables are built by independent quadratures.
    const Grid2D g(4.0, 32);
    auto tbl = kernel_table(g);
    double worst = 0.0;
    for (int dj = 0; dj < g.n; ++dj)
        for (int di = 0; di < g.n; ++di)
            worst = std::max(worst, std::fabs(tbl->klog(di, dj) - tbl->kv1(di, dj) +
                                              tbl->kv2(di, dj)));
    CHECK(worst < 1e-8);
}

TEST_CASE("radial potential matches the quadrature oracle for a Gaussian")
{
    const RadialGrid g(8.0, 1024);
    const RadialField u =
        RadialField::sample(g, [](double r) { return std::exp(-0.5 * r * r); });
    const RadialField phi = radial_potential(u);

    CHECK(std::fabs(phi.v[0] - kPhi0) < 2e-4);
    CHECK(std::fabs(interp_radial(phi, 0.5) - kPhiHalf) < 2e-4);
    CHECK(std::fabs(interp_radial(phi, 1.0) - kPhi1) < 2e-4);
    CHECK(std::fabs(interp_radial(phi, 2.0) - kPhi2) < 2e-4);

    CHECK(rel(v0(u), kV0Gauss) < 5e-4);

    // Refinement halves h: the defect of V0 must drop by about 4.
    const RadialField uc = RadialField::sample(
        RadialGrid(8.0, 512), [](double r) { return std::exp(-0.5 * r * r); });
    const double e_coarse = std::fabs(v0(uc) - kV0Gauss);
    const double e_fine = std::fabs(v0(u) - kV0Gauss);
    CHECK(e_fine < 0.5 * e_coarse);
}

TEST_CASE("plane potential and energies match the oracle for a Gaussian")
{
    const Grid2D g(6.0, 96);
    const Field2D u = Field2D::sample(g, gauss);
    auto tbl = kernel_table(g);

    const Field2D phi = newtonian_potential(u, *tbl);
    CHECK(std::fabs(bilinear(phi, 0.0, 0.0) - kPhi0) < 5e-3);
    CHECK(std::fabs(bilinear(phi, 1.0, 0.0) - kPhi1) < 2e-3);
    CHECK(std::fabs(bilinear(phi, 0.0, 2.0) - kPhi2) < 2e-3);

    const V0Split s = v_split(u, *tbl);
    CHECK(rel(s.v0, kV0Gauss) < 3e-2);
    CHECK(rel(s.v1, kV1Gauss) < 2e-3);
    CHECK(s.v1 >= 0.0);
    CHECK(s.v2 >= 0.0);
    CHECK(s.consistency <= 1e-8);
    CHECK(rel(s.v0, s.v1 - s.v2) < 1e-8);
    CHECK(rel(v0(u, *tbl), s.v0) < 1e-12);
}

TEST_CASE("unit-disk source: closed-form potential and energy")
{
    // For w = u^2 = 1_{|x| <= 1}: phi(0) = -1/4, phi(1) = 0, and
    // V0 = int phi = -pi/8. The grid step divides the disk radius, so the
    // sampled indicator is sharp on the radial grid.
    const RadialGrid g(2.0, 512);
    const RadialField u =
        RadialField::sample(g, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
    const RadialField phi = radial_potential(u);
    CHECK(std::fabs(phi.v[0] + 0.25) < 1e-4);
    CHECK(std::fabs(interp_radial(phi, 1.0)) < 1e-4);
    CHECK(rel(v0(u), -kPi / 8.0) < 1e-3);
}

TEST_CASE("radial and plane code paths agree on a shared source")
{
    const RadialGrid gr(6.0, 1024);
    const RadialField ur =
        RadialField::sample(gr, [](double r) { return std::exp(-0.5 * r * r); });
    const Grid2D gp(6.0, 96);
    const Field2D up = Field2D::sample(gp, gauss);
    CHECK(std::fabs(v0(ur) - v0(up, *kernel_table(gp))) < 2e-3);
}

TEST_CASE("pair energy generalizes the single-field energy")
{
    const Grid2D g(5.0, 32);
    auto tbl = kernel_table(g);
    const Field2D u = random_smooth_field(g, kFieldLibrarySeed, 4);
    const V0Split one = v_split(u, *tbl);
    const V0Split two = v_split(u, u, *tbl);
    CHECK(rel(one.v0, two.v0) < 1e-12);
    CHECK(rel(one.v1, two.v1) < 1e-12);

    const Field2D w = random_smooth_field(Grid2D(5.0, 48), kFieldLibrarySeed, 5);
    CHECK_THROWS_AS((void)v_split(u, w, *tbl), std::invalid_argument);
}

TEST_CASE("rescaling identity for dilations of a radial field")
{
    // V0(u(./t)) = t^4 V0(u) + (t^4 log t / 2 pi) ||u||_2^4; sampling a width-t
    // Gaussian is an exact dilation, so only quadrature error remains.
    const double t = 1.7;
    const RadialGrid g(14.0, 1024);
    const RadialField u =
        RadialField::sample(g, [](double r) { return std::exp(-0.5 * r * r); });
    const RadialField ut = RadialField::sample(
        g, [t](double r) { return std::exp(-0.5 * (r / t) * (r / t)); });
    const double m2 = l2_norm_sq(u);
    const double predicted =
        std::pow(t, 4.0) * v0(u) + std::pow(t, 4.0) * std::log(t) / (2.0 * kPi) * m2 * m2;
    CHECK(rel(v0(ut), predicted) < 1e-5);
}

TEST_CASE("gradient action of the quartic energy pairs to 4 V0")
{
    const Grid2D g(5.0, 32);
    auto tbl = kernel_table(g);
    const Field2D u = random_smooth_field(g, kFieldLibrarySeed, 6);
    const Field2D act = v0_gradient_action(u, *tbl);
    CHECK(rel(dot_l2(act, u), 4.0 * v0(u, *tbl)) < 1e-12);

    const RadialField ur = random_radial_field(RadialGrid(8.0, 256), kFieldLibrarySeed, 6);
    const RadialField actr = v0_gradient_action(ur);
    CHECK(rel(dot_l2(actr, ur), 4.0 * v0(ur)) < 1e-12);
}

TEST_CASE("density potential: consistency and self-adjointness")
{
    const RadialGrid g(8.0, 256);
    const RadialField u = random_radial_field(g, kFieldLibrarySeed, 8);
    RadialField usq(g);
    for (int i = 0; i < g.m; ++i) usq.v[i] = u.v[i] * u.v[i];

    // Same kernel, same summation: bitwise equality.
    const RadialField a = radial_potential(u);
    const RadialField b = radial_potential_density(usq);
    for (int i = 0; i < g.m; ++i) CHECK(a.v[i] == b.v[i]);

    // The kernel log(max(r,s)) is symmetric: <v, Phi[w]> = <w, Phi[v]> in the
    // r dr inner product.
    const RadialField v = random_radial_field(g, kFieldLibrarySeed, 9);
    const RadialField w = random_radial_field(g, kFieldLibrarySeed, 10);
    CHECK(rel(dot_l2(v, radial_potential_density(w)),
              dot_l2(w, radial_potential_density(v))) < 1e-12);
}
