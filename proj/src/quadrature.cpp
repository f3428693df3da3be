#include "psm/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "psm/reduce.hpp"

namespace psm {

static GaussRule make_gauss(int n)
{
    GaussRule g;
    g.x.resize(n);
    g.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev initial guess, Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        g.x[i] = -x;
        g.x[n - 1 - i] = x;
        g.w[i] = g.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return g;
}

const GaussRule& gauss_legendre(int n)
{
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss(n)).first;
    return it->second;
}

namespace {

double panel(const std::function<double(double)>& f, double a, double b, const GaussRule& g)
{
    const double c = 0.5 * (a + b), s = 0.5 * (b - a);
    return s * pairwise_map_sum(0, g.x.size(),
                                [&](std::size_t i) { return g.w[i] * f(c + s * g.x[i]); });
}

struct AdaptCtx {
    const std::function<double(double)>* f;
    const GaussRule* g;
    double abs_tol;
    int max_depth;
};

double adapt(const AdaptCtx& ctx, double a, double b, double whole, double tol, int depth)
{
    const double mid = 0.5 * (a + b);
    const double left = panel(*ctx.f, a, mid, *ctx.g);
    const double right = panel(*ctx.f, mid, b, *ctx.g);
    const double err = std::fabs(left + right - whole);
    if (err < tol || depth >= ctx.max_depth) return left + right;
    return adapt(ctx, a, mid, left, 0.5 * tol, depth + 1) +
           adapt(ctx, mid, b, right, 0.5 * tol, depth + 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol)
{
    if (a == b) return 0.0;
    const GaussRule& g = gauss_legendre(16);
    const double whole = panel(f, a, b, g);
    AdaptCtx ctx{&f, &g, abs_tol, 60};
    const double tol = std::max(abs_tol, rel_tol * std::fabs(whole));
    return adapt(ctx, a, b, whole, tol, 0);
}

double integrate_to_infinity(const std::function<double(double)>& f, double split,
                             double rel_tol)
{
    if (!(split > 0.0)) throw std::invalid_argument("integrate_to_infinity: split must be > 0");
    const double head = integrate(f, 0.0, split, rel_tol);
    // r = split/s maps [split,inf) to (0,1]; dr = -split/s^2 ds.
    const double tail = integrate(
        [&](double s) {
            const double r = split / s;
            return f(r) * split / (s * s);
        },
        0.0, 1.0, rel_tol);
    return head + tail;
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol)
{
    // Coarse scan to bracket the max, then golden section.
    constexpr int kScan = 512;
    double best = lo, fbest = f(lo);
    for (int i = 1; i <= kScan; ++i) {
        const double x = lo + (hi - lo) * i / kScan;
        const double fx = f(x);
        if (fx > fbest) {
            fbest = fx;
            best = x;
        }
    }
    double a = std::max(lo, best - (hi - lo) / kScan);
    double b = std::min(hi, best + (hi - lo) / kScan);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol * std::max(1.0, std::fabs(a) + std::fabs(b))) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

double origin_cell_average(const std::function<double(double)>& f, double h, double rel_tol)
{
    // One octant: theta in [0,pi/4], r in (0, h/(2 cos theta)); x8, /h^2.
    auto inner = [&](double theta) {
        const double rmax = 0.5 * h / std::cos(theta);
        return integrate([&](double r) { return f(r) * r; }, 0.0, rmax, rel_tol);
    };
    const double oct = integrate(inner, 0.0, 0.25 * M_PI, rel_tol);
    return 8.0 * oct / (h * h);
}

namespace {

double gauss_cell_integral(const std::function<double(double, double)>& f,
                           double x0, double x1, double y0, double y1, const GaussRule& g)
{
    const double cx = 0.5 * (x0 + x1), sx = 0.5 * (x1 - x0);
    const double cy = 0.5 * (y0 + y1), sy = 0.5 * (y1 - y0);
    const std::size_t n = g.x.size();
    double acc = pairwise_map_sum(0, n * n, [&](std::size_t k) {
        const std::size_t i = k / n, j = k % n;
        return g.w[i] * g.w[j] * f(cx + sx * g.x[i], cy + sy * g.x[j]);
    });
    return acc * sx * sy;
}

double adapt2d(const std::function<double(double, double)>& f, double x0, double x1,
               double y0, double y1, double whole5, double tol, int depth)
{
    const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
    const GaussRule& g5 = gauss_legendre(5);
    const double q[4] = {gauss_cell_integral(f, x0, xm, y0, ym, g5),
                         gauss_cell_integral(f, xm, x1, y0, ym, g5),
                         gauss_cell_integral(f, x0, xm, ym, y1, g5),
                         gauss_cell_integral(f, xm, x1, ym, y1, g5)};
    const double sum = q[0] + q[1] + q[2] + q[3];
    if (std::fabs(sum - whole5) < tol || depth >= 24) return sum;
    double acc = 0.0;
    const double xs[4] = {x0, xm, x0, xm}, xe[4] = {xm, x1, xm, x1};
    const double ys[4] = {y0, y0, ym, ym}, ye[4] = {ym, ym, y1, y1};
    for (int c = 0; c < 4; ++c)
        acc += adapt2d(f, xs[c], xe[c], ys[c], ye[c], q[c], 0.25 * tol, depth + 1);
    return acc;
}

} // namespace

double adaptive_cell_average(const std::function<double(double, double)>& f,
                             double x0, double x1, double y0, double y1, double rel_tol)
{
    const GaussRule& g5 = gauss_legendre(5);
    const double whole = gauss_cell_integral(f, x0, x1, y0, y1, g5);
    const double tol = std::max(1e-300, rel_tol * std::fabs(whole));
    const double integral = adapt2d(f, x0, x1, y0, y1, whole, tol, 0);
    return integral / ((x1 - x0) * (y1 - y0));
}

double gauss_cell_average(const std::function<double(double, double)>& f,
                          double x0, double x1, double y0, double y1, int order)
{
    const GaussRule& g = gauss_legendre(order);
    return gauss_cell_integral(f, x0, x1, y0, y1, g) / ((x1 - x0) * (y1 - y0));
}

} // namespace psm
