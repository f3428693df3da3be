#include "psm/fields.hpp"

#include <algorithm>
#include <cmath>

#include "psm/reduce.hpp"

namespace psm {

double grad_sq_norm(const Field2D& u)
{
    const int n = u.grid.n;
    const auto& v = u.v;
    // Horizontal faces: (n+1) per row counting the two boundary faces; the
    // ghost value outside the box is 0. Same vertically. Each face term is
    // ((du)/h)^2 * h^2 = (du)^2.
    auto hterm = [&](std::size_t k) {
        const int iy = static_cast<int>(k / (n + 1));
        const int f = static_cast<int>(k % (n + 1));
        const double a = (f == 0) ? 0.0 : v[u.grid.idx(f - 1, iy)];
        const double b = (f == n) ? 0.0 : v[u.grid.idx(f, iy)];
        const double d = b - a;
        return d * d;
    };
    auto vterm = [&](std::size_t k) {
        const int ix = static_cast<int>(k / (n + 1));
        const int f = static_cast<int>(k % (n + 1));
        const double a = (f == 0) ? 0.0 : v[u.grid.idx(ix, f - 1)];
        const double b = (f == n) ? 0.0 : v[u.grid.idx(ix, f)];
        const double d = b - a;
        return d * d;
    };
    const std::size_t nf = static_cast<std::size_t>(n) * (n + 1);
    return pairwise_map_sum(0, nf, hterm) + pairwise_map_sum(0, nf, vterm);
}

double grad_sq_norm(const RadialField& u)
{
    const int m = u.grid.m;
    const double h = u.grid.h();
    // Faces between cells i,i+1 at radius (i+1)h; outer face at R with ghost 0;
    // the face at the origin has weight r=0 and drops out (natural condition).
    auto term = [&](std::size_t i) {
        const double a = u.v[i];
        const double b = (i + 1 < static_cast<std::size_t>(m)) ? u.v[i + 1] : 0.0;
        const double d = b - a;
        const double rf = (i + 1) * h;
        return d * d / (h * h) * rf * h;
    };
    return 2.0 * M_PI * pairwise_map_sum(0, static_cast<std::size_t>(m), term);
}

double star_norm_sq(const Field2D& u, double alpha)
{
    const Grid2D& g = u.grid;
    const double h2 = g.h() * g.h();
    return h2 * pairwise_map_sum(0, g.size(), [&](std::size_t k) {
               const int ix = static_cast<int>(k % g.n), iy = static_cast<int>(k / g.n);
               const double r = std::hypot(g.x(ix), g.y(iy));
               const double w = 1.0 + std::pow(r, alpha);
               return w * u.v[k] * u.v[k];
           });
}

double star_norm_sq(const RadialField& u, double alpha)
{
    const double h = u.grid.h();
    return 2.0 * M_PI * h *
           pairwise_map_sum(0, u.v.size(), [&](std::size_t i) {
               const double r = u.grid.r(static_cast<int>(i));
               return (1.0 + std::pow(r, alpha)) * u.v[i] * u.v[i] * r;
           });
}

double l2_norm_sq(const Field2D& u)
{
    const double h2 = u.grid.h() * u.grid.h();
    return h2 * pairwise_map_sum(0, u.v.size(),
                                 [&](std::size_t k) { return u.v[k] * u.v[k]; });
}

double l2_norm_sq(const RadialField& u)
{
    const double h = u.grid.h();
    return 2.0 * M_PI * h *
           pairwise_map_sum(0, u.v.size(), [&](std::size_t i) {
               return u.v[i] * u.v[i] * u.grid.r(static_cast<int>(i));
           });
}

double lp_norm_pow(const Field2D& u, double p)
{
    const double h2 = u.grid.h() * u.grid.h();
    return h2 * pairwise_map_sum(0, u.v.size(), [&](std::size_t k) {
               return std::pow(std::fabs(u.v[k]), p);
           });
}

double lp_norm_pow(const RadialField& u, double p)
{
    const double h = u.grid.h();
    return 2.0 * M_PI * h *
           pairwise_map_sum(0, u.v.size(), [&](std::size_t i) {
               return std::pow(std::fabs(u.v[i]), p) * u.grid.r(static_cast<int>(i));
           });
}

double lp_norm(const Field2D& u, double p) { return std::pow(lp_norm_pow(u, p), 1.0 / p); }
double lp_norm(const RadialField& u, double p) { return std::pow(lp_norm_pow(u, p), 1.0 / p); }

double x_norm(const Field2D& u, double alpha)
{
    return std::sqrt(grad_sq_norm(u) + star_norm_sq(u, alpha));
}

double x_norm(const RadialField& u, double alpha)
{
    return std::sqrt(grad_sq_norm(u) + star_norm_sq(u, alpha));
}

double dot_l2(const Field2D& a, const Field2D& b)
{
    if (a.grid != b.grid) throw std::invalid_argument("dot_l2: grid mismatch");
    const double h2 = a.grid.h() * a.grid.h();
    return h2 * pairwise_map_sum(0, a.v.size(),
                                 [&](std::size_t k) { return a.v[k] * b.v[k]; });
}

double dot_l2(const RadialField& a, const RadialField& b)
{
    if (a.grid != b.grid) throw std::invalid_argument("dot_l2: grid mismatch");
    const double h = a.grid.h();
    return 2.0 * M_PI * h *
           pairwise_map_sum(0, a.v.size(), [&](std::size_t i) {
               return a.v[i] * b.v[i] * a.grid.r(static_cast<int>(i));
           });
}

void axpy(Field2D& y, double c, const Field2D& x)
{
    if (y.grid != x.grid) throw std::invalid_argument("axpy: grid mismatch");
    for (std::size_t k = 0; k < y.v.size(); ++k) y.v[k] += c * x.v[k];
}

void axpy(RadialField& y, double c, const RadialField& x)
{
    if (y.grid != x.grid) throw std::invalid_argument("axpy: grid mismatch");
    for (std::size_t k = 0; k < y.v.size(); ++k) y.v[k] += c * x.v[k];
}

void scale(Field2D& u, double c)
{
    for (double& x : u.v) x *= c;
}

void scale(RadialField& u, double c)
{
    for (double& x : u.v) x *= c;
}

void apply_neg_laplacian(const Field2D& u, Field2D& out)
{
    const int n = u.grid.n;
    const double inv_h2 = 1.0 / (u.grid.h() * u.grid.h());
    if (out.grid != u.grid) out = Field2D(u.grid);
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const double c = u.at(ix, iy);
            const double w = ix > 0 ? u.at(ix - 1, iy) : 0.0;
            const double e = ix < n - 1 ? u.at(ix + 1, iy) : 0.0;
            const double s = iy > 0 ? u.at(ix, iy - 1) : 0.0;
            const double t = iy < n - 1 ? u.at(ix, iy + 1) : 0.0;
            out.at(ix, iy) = (4.0 * c - w - e - s - t) * inv_h2;
        }
    }
}

void apply_neg_laplacian(const RadialField& u, RadialField& out)
{
    const int m = u.grid.m;
    const double h = u.grid.h();
    if (out.grid != u.grid) out = RadialField(u.grid);
    for (int i = 0; i < m; ++i) {
        const double r = u.grid.r(i);
        const double rp = (i + 1) * h; // face radius toward i+1 (or the R ghost)
        const double rm = i * h;       // face radius toward i-1; 0 at the origin
        const double up = (i + 1 < m) ? u.v[i + 1] : 0.0;
        const double um = (i > 0) ? u.v[i - 1] : 0.0;
        const double flux = rp * (up - u.v[i]) - rm * (u.v[i] - um);
        out.v[i] = -flux / (r * h * h);
    }
}

double bilinear(const Field2D& u, double x, double y)
{
    const Grid2D& g = u.grid;
    const double h = g.h();
    const double fx = (x + g.L) / h - 0.5;
    const double fy = (y + g.L) / h - 0.5;
    const int ix = static_cast<int>(std::floor(fx));
    const int iy = static_cast<int>(std::floor(fy));
    const double tx = fx - ix, ty = fy - iy;
    auto val = [&](int i, int j) -> double {
        if (i < 0 || i >= g.n || j < 0 || j >= g.n) return 0.0;
        return u.v[g.idx(i, j)];
    };
    return (1 - tx) * (1 - ty) * val(ix, iy) + tx * (1 - ty) * val(ix + 1, iy) +
           (1 - tx) * ty * val(ix, iy + 1) + tx * ty * val(ix + 1, iy + 1);
}

DilateResult resample_dilate(const Field2D& u, double t, double r_pow)
{
    if (!(t > 0.0)) throw std::invalid_argument("resample_dilate: t must be > 0");
    const Grid2D& g = u.grid;
    DilateResult res;
    res.field = Field2D(g);
    res.field.sym = u.sym;
    const double amp = std::pow(t, r_pow);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix)
            res.field.at(ix, iy) = amp * bilinear(u, g.x(ix) / t, g.y(iy) / t);

    if (t > 1.0) {
        // Mass of the source outside the back-mapped box [-L/t, L/t]^2 is lost.
        const double cut = g.L / t;
        double lost = 0.0, total = 0.0;
        for (int iy = 0; iy < g.n; ++iy)
            for (int ix = 0; ix < g.n; ++ix) {
                const double m = u.at(ix, iy) * u.at(ix, iy);
                total += m;
                if (std::fabs(g.x(ix)) > cut || std::fabs(g.y(iy)) > cut) lost += m;
            }
        res.mass_fraction_lost = total > 0.0 ? lost / total : 0.0;
        res.truncation_warn = res.mass_fraction_lost > 0.01;
    }
    return res;
}

double weighted_boundary_max(const Field2D& u, double alpha)
{
    const Grid2D& g = u.grid;
    double worst = 0.0;
    auto consider = [&](int ix, int iy) {
        const double r = std::hypot(g.x(ix), g.y(iy));
        const double w = (1.0 + std::pow(r, alpha)) * u.at(ix, iy) * u.at(ix, iy);
        worst = std::max(worst, w);
    };
    for (int i = 0; i < g.n; ++i) {
        consider(i, 0);
        consider(i, g.n - 1);
        consider(0, i);
        consider(g.n - 1, i);
    }
    return worst;
}

double weighted_boundary_max(const RadialField& u, double alpha)
{
    const int i = u.grid.m - 1;
    const double r = u.grid.r(i);
    return (1.0 + std::pow(r, alpha)) * u.v[i] * u.v[i];
}

} // namespace psm
