#include "psm/logkernel.hpp"

#include <cassert>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "psm/quadrature.hpp"
#include "psm/reduce.hpp"

namespace psm {

namespace {

// Antiderivative with d2G/dxdy = ln(x^2+y^2); continuous away from the
// origin, odd in each argument, so inclusion-exclusion over any axis-aligned
// rectangle not containing the origin in its interior gives the exact cell
// integral of ln|z|^2.
double Gfun(double x, double y)
{
    if (x == 0.0 && y == 0.0) return 0.0;
    double t = -3.0 * x * y;
    if (x != 0.0 && y != 0.0) t += x * y * std::log(x * x + y * y);
    if (x != 0.0) t += x * x * std::atan(y / x);
    if (y != 0.0) t += y * y * std::atan(x / y);
    return t;
}

// Exact average of log|z| over the h x h cell centered at (a,b).
double log_avg_closed(double a, double b, double h)
{
    const double x0 = a - 0.5 * h, x1 = a + 0.5 * h;
    const double y0 = b - 0.5 * h, y1 = b + 0.5 * h;
    const double I = Gfun(x1, y1) - Gfun(x0, y1) - Gfun(x1, y0) + Gfun(x0, y0);
    return 0.5 * I / (h * h);
}

struct Triple {
    double a = 0.0, b = 0.0, c = 0.0;
};

// Pairwise reduction of per-cell triples with a fixed split pattern.
template <class F>
Triple pairwise_triple(std::size_t lo, std::size_t hi, F&& term)
{
    const std::size_t n = hi - lo;
    if (n <= kPairwiseBase) {
        Triple s;
        for (std::size_t i = lo; i < hi; ++i) {
            const Triple t = term(i);
            s.a += t.a;
            s.b += t.b;
            s.c += t.c;
        }
        return s;
    }
    const std::size_t mid = lo + n / 2;
    const Triple l = pairwise_triple(lo, mid, term);
    const Triple r = pairwise_triple(mid, hi, term);
    return {l.a + r.a, l.b + r.b, l.c + r.c};
}

} // namespace

double log_cell_average_c0()
{
    static const double c0 =
        origin_cell_average([](double r) { return std::log(r); }, 1.0, 1e-13);
    return c0;
}

KernelTable::KernelTable(const Grid2D& g) : grid_(g)
{
    const int n = g.n;
    const double h = g.h();
    const double inv2pi = 1.0 / (2.0 * M_PI);
    const std::size_t sz = static_cast<std::size_t>(n) * n;
    k_log_.resize(sz);
    k_v1_.resize(sz);
    k_v2_.resize(sz);
    c0_ = log_cell_average_c0();

    // Cells with offset index below this (in inf-norm) get adaptive treatment
    // for the smooth-but-steep kernels; beyond it a fixed tensor Gauss rule is
    // already exact to ~1e-13 of the entry.
    constexpr int kNear = 6;

    auto v1_kernel = [](double x, double y) { return std::log(2.0 + std::hypot(x, y)); };
    auto v2_kernel = [](double x, double y) {
        return std::log1p(2.0 / std::hypot(x, y));
    };

#pragma omp parallel for schedule(dynamic)
    for (int dj = 0; dj < n; ++dj) {
        for (int di = 0; di < n; ++di) {
            const std::size_t k = static_cast<std::size_t>(dj) * n + di;
            const double ax = di * h, ay = dj * h;
            const double x0 = ax - 0.5 * h, x1 = ax + 0.5 * h;
            const double y0 = ay - 0.5 * h, y1 = ay + 0.5 * h;
            if (di == 0 && dj == 0) {
                k_log_[k] = (std::log(h) + c0_) * inv2pi;
                k_v1_[k] = origin_cell_average(
                               [](double r) { return std::log(2.0 + r); }, h, 1e-13) *
                           inv2pi;
                // log(1+2/r) = log(2+r) - log(r) pointwise, so the zero-offset
                // average follows from the two averages above.
                k_v2_[k] = k_v1_[k] - k_log_[k];
                continue;
            }
            k_log_[k] = log_avg_closed(ax, ay, h) * inv2pi;
            if (std::max(di, dj) <= kNear) {
                k_v1_[k] = adaptive_cell_average(v1_kernel, x0, x1, y0, y1, 1e-13) * inv2pi;
                k_v2_[k] = adaptive_cell_average(v2_kernel, x0, x1, y0, y1, 1e-13) * inv2pi;
            } else {
                k_v1_[k] = gauss_cell_average(v1_kernel, x0, x1, y0, y1, 4) * inv2pi;
                k_v2_[k] = gauss_cell_average(v2_kernel, x0, x1, y0, y1, 4) * inv2pi;
            }
        }
    }
}

std::shared_ptr<const KernelTable> kernel_table(const Grid2D& g)
{
    static std::map<std::pair<double, int>, std::shared_ptr<const KernelTable>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(g.L, g.n);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_shared<const KernelTable>(g)).first;
    return it->second;
}

namespace {

std::vector<double> squared(const Field2D& u)
{
    std::vector<double> w(u.v.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = u.v[k] * u.v[k];
    return w;
}

// Inner sum over all source cells for one target, kernel selected by table
// pointer. Pairwise over each source row, then pairwise over rows; the order
// is a pure function of the index space.
double target_sum(const KernelTable& tbl, const std::vector<double>& ktab,
                  const std::vector<double>& w, int ix, int iy, std::vector<double>& rows)
{
    const int n = tbl.grid().n;
    for (int jy = 0; jy < n; ++jy) {
        const std::size_t roff = static_cast<std::size_t>(std::abs(iy - jy)) * n;
        const double* wrow = &w[static_cast<std::size_t>(jy) * n];
        rows[jy] = pairwise_map_sum(0, static_cast<std::size_t>(n), [&](std::size_t jx) {
            return ktab[roff + std::abs(ix - static_cast<int>(jx))] * wrow[jx];
        });
    }
    return pairwise_sum(rows);
}

} // namespace

Field2D newtonian_potential(const Field2D& u, const KernelTable& tbl)
{
    if (u.grid != tbl.grid()) throw std::invalid_argument("newtonian_potential: grid mismatch");
    const int n = u.grid.n;
    const double h2 = u.grid.h() * u.grid.h();
    const std::vector<double> w = squared(u);
    Field2D phi(u.grid);
#pragma omp parallel
    {
        std::vector<double> rows(n);
#pragma omp for schedule(static)
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix)
                phi.at(ix, iy) = h2 * target_sum(tbl, tbl.raw_log(), w, ix, iy, rows);
    }
    return phi;
}

Field2D newtonian_potential_serial(const Field2D& u, const KernelTable& tbl)
{
    if (u.grid != tbl.grid()) throw std::invalid_argument("newtonian_potential: grid mismatch");
    const int n = u.grid.n;
    const double h2 = u.grid.h() * u.grid.h();
    const std::vector<double> w = squared(u);
    Field2D phi(u.grid);
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            double acc = 0.0;
            for (int jy = 0; jy < n; ++jy)
                for (int jx = 0; jx < n; ++jx)
                    acc += tbl.klog(ix - jx, iy - jy) * w[u.grid.idx(jx, jy)];
            phi.at(ix, iy) = h2 * acc;
        }
    return phi;
}

RadialField radial_potential_density(const RadialField& dens)
{
    const int m = dens.grid.m;
    const double h = dens.grid.h();
    // phi(r_i) = log(r_i) * sum_{j<=i} w_j + sum_{j>i} log(r_j) w_j,
    // w_j = dens_j r_j h; running sums in index order (deterministic).
    std::vector<double> wlog(m);
    double T_total = 0.0;
    for (int j = 0; j < m; ++j) {
        const double w = dens.v[j] * dens.grid.r(j) * h;
        wlog[j] = std::log(dens.grid.r(j)) * w;
        T_total += wlog[j];
    }
    RadialField phi(dens.grid);
    double P = 0.0, T = 0.0;
    for (int i = 0; i < m; ++i) {
        const double w = dens.v[i] * dens.grid.r(i) * h;
        P += w;
        T += wlog[i];
        phi.v[i] = std::log(dens.grid.r(i)) * P + (T_total - T);
    }
    return phi;
}

RadialField radial_potential(const RadialField& u)
{
    RadialField dens(u.grid);
    for (std::size_t i = 0; i < dens.v.size(); ++i) dens.v[i] = u.v[i] * u.v[i];
    return radial_potential_density(dens);
}

static V0Split v_split_impl(const Field2D& u, const Field2D& uw, const KernelTable& tbl,
                            bool parallel)
{
    if (u.grid != uw.grid || u.grid != tbl.grid())
        throw std::invalid_argument("v_split: grid mismatch between integrand factors");
    const int n = u.grid.n;
    const double h4 = std::pow(u.grid.h(), 4);
    const std::vector<double> wu = squared(u);
    const std::vector<double> ww = squared(uw);
    const std::size_t N = wu.size();
    std::vector<double> p0(N), p1(N), p2(N);
#pragma omp parallel if (parallel)
    {
#pragma omp for schedule(static)
        for (int iy = 0; iy < n; ++iy) {
            for (int ix = 0; ix < n; ++ix) {
                const std::size_t i = u.grid.idx(ix, iy);
                Triple t = pairwise_triple(0, N, [&](std::size_t j) -> Triple {
                    const int jx = static_cast<int>(j) % n;
                    const int jy = static_cast<int>(j) / n;
                    const std::size_t off = tbl.at(ix - jx, iy - jy);
                    const double wj = ww[j];
                    return {tbl.raw_log()[off] * wj, tbl.raw_v1()[off] * wj,
                            tbl.raw_v2()[off] * wj};
                });
                p0[i] = t.a * wu[i];
                p1[i] = t.b * wu[i];
                p2[i] = t.c * wu[i];
            }
        }
    }
    V0Split s;
    s.v0 = h4 * pairwise_sum(p0);
    s.v1 = h4 * pairwise_sum(p1);
    s.v2 = h4 * pairwise_sum(p2);
    s.consistency = std::fabs(s.v0 - (s.v1 - s.v2)) / std::max(1.0, s.v1 + s.v2);
    if (s.consistency > 1e-8)
        throw std::runtime_error("v_split: kernel split consistency violated");
    return s;
}

V0Split v_split(const Field2D& u, const Field2D& w, const KernelTable& tbl)
{
    return v_split_impl(u, w, tbl, true);
}

V0Split v_split(const Field2D& u, const KernelTable& tbl)
{
    return v_split_impl(u, u, tbl, true);
}

V0Split v_split_serial(const Field2D& u, const KernelTable& tbl)
{
    // Naive reference: plain accumulation order, no threading.
    if (u.grid != tbl.grid()) throw std::invalid_argument("v_split: grid mismatch");
    const int n = u.grid.n;
    const double h4 = std::pow(u.grid.h(), 4);
    const std::vector<double> w = squared(u);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            const double wi = w[u.grid.idx(ix, iy)];
            double a = 0.0, b = 0.0, c = 0.0;
            for (int jy = 0; jy < n; ++jy)
                for (int jx = 0; jx < n; ++jx) {
                    const std::size_t off = tbl.at(ix - jx, iy - jy);
                    const double wj = w[u.grid.idx(jx, jy)];
                    a += tbl.raw_log()[off] * wj;
                    b += tbl.raw_v1()[off] * wj;
                    c += tbl.raw_v2()[off] * wj;
                }
            s0 += a * wi;
            s1 += b * wi;
            s2 += c * wi;
        }
    V0Split s;
    s.v0 = h4 * s0;
    s.v1 = h4 * s1;
    s.v2 = h4 * s2;
    s.consistency = std::fabs(s.v0 - (s.v1 - s.v2)) / std::max(1.0, s.v1 + s.v2);
    return s;
}

double v0(const Field2D& u, const KernelTable& tbl) { return v_split(u, tbl).v0; }
double v1(const Field2D& u, const KernelTable& tbl) { return v_split(u, tbl).v1; }
double v2(const Field2D& u, const KernelTable& tbl) { return v_split(u, tbl).v2; }

V0Split v_split(const RadialField& u)
{
    const int m = u.grid.m;
    const double h = u.grid.h();
    // v0 through the O(m) potential route.
    const RadialField phi = radial_potential(u);
    V0Split s;
    s.v0 = 2.0 * M_PI * h *
           pairwise_map_sum(0, static_cast<std::size_t>(m), [&](std::size_t i) {
               return phi.v[i] * u.v[i] * u.v[i] * u.grid.r(static_cast<int>(i));
           });

    // v1: angular average of log(2+d) by periodic trapezoid (spectral except
    // for the mild |sin| kink on the diagonal); v2 via the exact angular mean
    // of the log kernel, int_0^2pi log d dtheta = 2pi log max(r,s).
    constexpr int K = 256;
    std::vector<double> cosk(K);
    for (int k = 0; k < K; ++k) cosk[k] = std::cos(2.0 * M_PI * k / K);
    std::vector<double> w(m);
    for (int i = 0; i < m; ++i) w[i] = u.v[i] * u.v[i] * u.grid.r(i) * h;

    std::vector<double> row1(m), row2(m);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
        const double r = u.grid.r(i);
        double acc1 = 0.0, acc2 = 0.0;
        for (int j = 0; j < m; ++j) {
            const double sr = u.grid.r(j);
            const double a = r * r + sr * sr, b = 2.0 * r * sr;
            double ang = 0.0;
            for (int k = 0; k < K; ++k) {
                const double d2 = std::max(a - b * cosk[k], 0.0);
                ang += std::log(2.0 + std::sqrt(d2));
            }
            ang *= 2.0 * M_PI / K;
            const double logmax = 2.0 * M_PI * std::log(std::max(r, sr));
            acc1 += ang * w[j];
            acc2 += (ang - logmax) * w[j];
        }
        row1[i] = acc1 * w[i];
        row2[i] = acc2 * w[i];
    }
    // One angular 2pi cancels the 1/(2pi) kernel prefactor:
    // V = sum_ij A(r_i,r_j) w_i w_j with w_i = u_i^2 r_i h.
    s.v1 = pairwise_sum(row1);
    s.v2 = pairwise_sum(row2);
    s.consistency = std::fabs(s.v0 - (s.v1 - s.v2)) / std::max(1.0, s.v1 + s.v2);
    if (s.consistency > 1e-8)
        throw std::runtime_error("v_split(radial): kernel split consistency violated");
    return s;
}

double v0(const RadialField& u)
{
    const RadialField phi = radial_potential(u);
    const double h = u.grid.h();
    return 2.0 * M_PI * h *
           pairwise_map_sum(0, u.v.size(), [&](std::size_t i) {
               return phi.v[i] * u.v[i] * u.v[i] * u.grid.r(static_cast<int>(i));
           });
}

Field2D v0_gradient_action(const Field2D& u, const KernelTable& tbl)
{
    Field2D g = newtonian_potential(u, tbl);
    for (std::size_t k = 0; k < g.v.size(); ++k) g.v[k] = 4.0 * g.v[k] * u.v[k];
    return g;
}

RadialField v0_gradient_action(const RadialField& u)
{
    RadialField g = radial_potential(u);
    for (std::size_t k = 0; k < g.v.size(); ++k) g.v[k] = 4.0 * g.v[k] * u.v[k];
    return g;
}

} // namespace psm
