#include "psm/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "psm/fields.hpp"

namespace psm {

namespace {

// Quarter turns map cell (ix,iy) -> (qx,qy); q counts turns by pi/2.
inline void quarter_turn_index(int q, int n, int ix, int iy, int& qx, int& qy)
{
    switch (q & 3) {
        case 0: qx = ix; qy = iy; break;
        case 1: qx = n - 1 - iy; qy = ix; break;          // sample at (-y, x)
        case 2: qx = n - 1 - ix; qy = n - 1 - iy; break;  // sample at (-x,-y)
        default: qx = iy; qy = n - 1 - ix; break;         // sample at ( y,-x)
    }
}

// Nonempty polar bins of width h: (bin center radius, mean of cell values).
std::vector<std::pair<double, double>> polar_bins(const Field2D& u)
{
    const Grid2D& g = u.grid;
    const double h = g.h();
    const int nbins = static_cast<int>(std::ceil(std::sqrt(2.0) * g.L / h)) + 1;
    std::vector<double> sum(nbins, 0.0);
    std::vector<long> cnt(nbins, 0);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            const double r = std::hypot(g.x(ix), g.y(iy));
            const int b = std::min(static_cast<int>(r / h), nbins - 1);
            sum[b] += u.v[g.idx(ix, iy)];
            ++cnt[b];
        }
    std::vector<std::pair<double, double>> bins;
    bins.reserve(nbins);
    for (int b = 0; b < nbins; ++b)
        if (cnt[b] > 0) bins.emplace_back((b + 0.5) * h, sum[b] / cnt[b]);
    return bins;
}

// Piecewise-linear evaluation of (r, value) samples, clamped at both ends.
double eval_profile(const std::vector<std::pair<double, double>>& s, double r)
{
    if (s.empty()) return 0.0;
    if (r <= s.front().first) return s.front().second;
    if (r >= s.back().first) return s.back().second;
    auto hi = std::upper_bound(s.begin(), s.end(), r,
                               [](double x, const auto& p) { return x < p.first; });
    auto lo = hi - 1;
    const double t = (r - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

Field2D project_odd_even(const Field2D& u)
{
    const Grid2D& g = u.grid;
    Field2D w(g);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            const int rx = g.n - 1 - ix;
            const int ry = g.n - 1 - iy;
            w.v[g.idx(ix, iy)] = 0.25 * (u.at(ix, iy) - u.at(rx, iy) +
                                         u.at(ix, ry) - u.at(rx, ry));
        }
    return w;
}

Field2D project_dihedral(const Field2D& u, int k)
{
    const Grid2D& g = u.grid;
    Field2D w(g);
    for (int j = 1; j <= 2 * k; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        const Field2D rot = rotate_sample(u, j * M_PI / k);
        axpy(w, sign / (2.0 * k), rot);
    }
    return w;
}

Field2D project_radial(const Field2D& u)
{
    const auto bins = polar_bins(u);
    const Grid2D& g = u.grid;
    Field2D w(g);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix)
            w.v[g.idx(ix, iy)] = eval_profile(bins, std::hypot(g.x(ix), g.y(iy)));
    return w;
}

} // namespace

Field2D rotate_sample(const Field2D& u, double theta)
{
    const Grid2D& g = u.grid;
    Field2D w(g);
    const double quarter = theta / (0.5 * M_PI);
    const double qr = std::round(quarter);
    if (std::fabs(quarter - qr) < 1e-12) {
        const int q = static_cast<int>(std::llround(qr)) & 3;
        for (int iy = 0; iy < g.n; ++iy)
            for (int ix = 0; ix < g.n; ++ix) {
                int qx, qy;
                quarter_turn_index(q, g.n, ix, iy, qx, qy);
                w.v[g.idx(ix, iy)] = u.at(qx, qy);
            }
        return w;
    }
    const double c = std::cos(theta), s = std::sin(theta);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            const double x = g.x(ix), y = g.y(iy);
            w.v[g.idx(ix, iy)] = bilinear(u, c * x - s * y, s * x + c * y);
        }
    return w;
}

Field2D project(const Field2D& u, const SymmetryClass& c)
{
    Field2D w;
    switch (c.kind) {
        case SymmetryKind::none: w = u; break;
        case SymmetryKind::radial: w = project_radial(u); break;
        case SymmetryKind::odd_even: w = project_odd_even(u); break;
        case SymmetryKind::dihedral: w = project_dihedral(u, c.k); break;
    }
    w.sym = c;
    return w;
}

double symmetry_defect(const Field2D& u, const SymmetryClass& c)
{
    Field2D d = project(u, c);
    scale(d, -1.0);
    axpy(d, 1.0, u);
    const double nu = std::sqrt(l2_norm_sq(u));
    return std::sqrt(l2_norm_sq(d)) / std::max(nu, std::numeric_limits<double>::epsilon());
}

RadialField angular_average(const Field2D& u)
{
    const auto bins = polar_bins(u);
    const double h = u.grid.h();
    const int m = std::max(static_cast<int>(std::ceil(std::sqrt(2.0) * u.grid.L / h)), 16);
    RadialField f(RadialGrid(m * h, m));
    for (int i = 0; i < m; ++i) f.v[i] = eval_profile(bins, f.grid.r(i));
    return f;
}

Field2D lift_radial(const RadialField& f, const Grid2D& g)
{
    std::vector<std::pair<double, double>> s;
    s.reserve(f.v.size() + 1);
    for (int i = 0; i < f.grid.m; ++i) s.emplace_back(f.grid.r(i), f.v[i]);
    s.emplace_back(f.grid.R, 0.0);
    Field2D w(g);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            const double r = std::hypot(g.x(ix), g.y(iy));
            w.v[g.idx(ix, iy)] = r >= f.grid.R ? 0.0 : eval_profile(s, r);
        }
    return w;
}

} // namespace psm
