#include "psm/inequalities.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "psm/energy.hpp"
#include "psm/fieldlib.hpp"
#include "psm/fields.hpp"
#include "psm/logkernel.hpp"
#include "psm/quadrature.hpp"
#include "psm/reduce.hpp"

namespace psm {

void LemmaParams::validate() const
{
    if (!(alpha > 0.0)) throw std::invalid_argument("LemmaParams: alpha must be > 0");
    if (!(p > 2.0)) throw std::invalid_argument("LemmaParams: p must be > 2");
    if (!(beta > 2.0)) throw std::invalid_argument("LemmaParams: beta must be > 2");
    if (!(epsilon > 0.0)) throw std::invalid_argument("LemmaParams: epsilon must be > 0");
    if (!(margin() > 0.0))
        throw std::invalid_argument(
            "LemmaParams: need alpha p / ((p-2)(beta-1)) > 2 (integral diverges)");
}

double lemma_constant(const LemmaParams& lp)
{
    lp.validate();
    static std::mutex mtx;
    static std::map<std::array<double, 4>, double> cache;
    const std::array<double, 4> key{lp.alpha, lp.p, lp.beta, lp.epsilon};
    {
        std::lock_guard<std::mutex> lock(mtx);
        const auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    const double a = lp.beta * lp.p / ((lp.beta - 1.0) * (lp.p - 2.0));
    const double b = lp.p / ((lp.beta - 1.0) * (lp.p - 2.0));
    const double alpha = lp.alpha;
    // Head on [0,1] in the radial variable; the integrand is smooth there.
    const auto f = [a, b, alpha](double r) -> double {
        if (r <= 0.0) return 0.0;
        return std::exp(a * std::log(std::log(2.0 + r)) - b * std::log1p(std::pow(r, alpha)) +
                        std::log(r));
    };
    const double head = integrate(f, 0.0, 1.0, 1e-12, 1e-16);
    // Tail via r = e^w: the integrand becomes ~ w^a exp((2 - alpha b) w) with
    // alpha b > 2, i.e. smooth exponential decay with no endpoint
    // singularity (the direct r -> 1/s fold has one when alpha b - 2 < 1).
    // Summed over fixed windows until a window stops contributing.
    const auto g_log = [a, b, alpha](double w) -> double {
        const double log_2pe =
            w > 40.0 ? w + std::log1p(2.0 * std::exp(-w)) : std::log(2.0 + std::exp(w));
        const double aw = alpha * w;
        const double log_weight =
            aw > 40.0 ? aw + std::log1p(std::exp(-aw)) : std::log1p(std::exp(aw));
        return a * std::log(log_2pe) - b * log_weight + 2.0 * w;
    };
    double tail = 0.0;
    for (int k = 0; k < 100000; ++k) {
        const double w0 = 10.0 * k;
        const double piece = integrate(
            [&](double w) {
                const double lg = g_log(w);
                return lg < -745.0 ? 0.0 : std::exp(lg);
            },
            w0, w0 + 10.0, 1e-12, 1e-300);
        tail += piece;
        if (k > 0 && !(piece > 1e-14 * tail)) break;
    }
    const double integral = 2.0 * M_PI * (head + tail);
    const double outer_exp = 2.0 * (lp.beta - 1.0) * (lp.p - 2.0) / ((lp.beta - 2.0) * lp.p);
    const double prefactor =
        (lp.beta - 2.0) / (lp.beta * std::pow(lp.epsilon, 2.0 / (lp.beta - 2.0)));
    const double value = prefactor * std::pow(integral, outer_exp);
    std::lock_guard<std::mutex> lock(mtx);
    cache.emplace(key, value);
    return value;
}

namespace {

double log_moment(const Field2D& u)
{
    const Grid2D& g = u.grid;
    const double h2 = g.h() * g.h();
    return h2 * pairwise_map_sum(0, u.v.size(), [&](std::size_t kk) {
               const int ix = static_cast<int>(kk) % g.n;
               const int iy = static_cast<int>(kk) / g.n;
               const double r = std::hypot(g.x(ix), g.y(iy));
               return std::log(2.0 + r) * u.v[kk] * u.v[kk];
           });
}

double log_moment(const RadialField& u)
{
    const double h = u.grid.h();
    return 2.0 * M_PI * h * pairwise_map_sum(0, u.v.size(), [&](std::size_t i) {
               const double r = u.grid.r(static_cast<int>(i));
               return std::log(2.0 + r) * u.v[i] * u.v[i] * r;
           });
}

template <class FieldT>
BoundCheck verify_lemma_impl(const FieldT& u, const LemmaParams& lp)
{
    lp.validate();
    BoundCheck c;
    const double lm = log_moment(u);
    c.lhs = lm * lm;
    const double e = 4.0 * (lp.beta - 1.0) / (lp.beta - 2.0);
    c.rhs = (2.0 * lp.epsilon / lp.beta) * star_norm_sq(u, lp.alpha) +
            lemma_constant(lp) * std::pow(lp_norm(u, lp.p), e);
    return c;
}

} // namespace

BoundCheck verify_lemma(const Field2D& u, const LemmaParams& lp)
{
    return verify_lemma_impl(u, lp);
}

BoundCheck verify_lemma(const RadialField& u, const LemmaParams& lp)
{
    return verify_lemma_impl(u, lp);
}

NonexistenceConstants nonexistence_constants(double alpha, double p)
{
    if (!(p > 4.0))
        throw std::invalid_argument("nonexistence threshold requires p > 4");
    const double ptilde = (2.0 * p - 4.0) / (p - 4.0);
    if (!(alpha > ptilde))
        throw std::invalid_argument("nonexistence threshold requires alpha > (2p-4)/(p-4)");
    NonexistenceConstants c;
    c.alpha = alpha;
    c.p = p;
    c.beta = ptilde; // the exponent choice that turns the p-norm power into p
    c.epsilon = 1.0;
    LemmaParams lp{alpha, p, c.beta, c.epsilon};
    c.C = lemma_constant(lp);
    const double pilog2 = M_PI * std::log(2.0);
    c.C1 = 2.0 / (c.beta * pilog2);
    c.C2 = c.C / pilog2;
    c.qbar = std::min(1.0 / c.C1, 1.0 / c.C2);
    return c;
}

double nonexistence_qbar(double alpha, double p)
{
    return nonexistence_constants(alpha, p).qbar;
}

std::string constants_csv_header()
{
    return "alpha,p,beta,epsilon,C,C1,C2,qbar";
}

std::string constants_csv_row(const NonexistenceConstants& c)
{
    std::ostringstream os;
    os.precision(17);
    os << c.alpha << ',' << c.p << ',' << c.beta << ',' << c.epsilon << ',' << c.C << ','
       << c.C1 << ',' << c.C2 << ',' << c.qbar;
    return os.str();
}

double strauss_coefficient(double alpha)
{
    const double k = 0.5 * (alpha + 2.0);
    return std::sqrt((k + 1.0) / std::sqrt(2.0 * M_PI) + 1.0 / (2.0 * M_PI));
}

BoundCheck strauss_bound(const RadialField& u, double alpha)
{
    BoundCheck c;
    const double decay = 0.25 * (alpha + 2.0);
    for (int i = 0; i < u.grid.m; ++i) {
        const double r = u.grid.r(i);
        if (r < 1.0) continue;
        c.lhs = std::max(c.lhs, std::pow(r, decay) * std::fabs(u.v[i]));
    }
    c.rhs = strauss_coefficient(alpha) * x_norm(u, alpha);
    return c;
}

namespace {

const Grid2D& library_grid()
{
    static const Grid2D g(8.0, 48);
    return g;
}

constexpr int kLibraryCount = 200;

} // namespace

EmbeddingConstants embedding_constants(double alpha, double p)
{
    static std::map<std::pair<double, double>, EmbeddingConstants> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find({alpha, p});
    if (it != cache.end()) return it->second;

    EmbeddingConstants e;
    const auto ratio1 = [alpha](double r) {
        return std::log(2.0 + r) / (1.0 + std::pow(r, alpha));
    };
    const auto ratio2 = [alpha](double r) {
        const double l = std::log(2.0 + r);
        return l * l / (1.0 + std::pow(r, alpha));
    };
    // The maximizer sits at moderate r: the ratio decays for r^alpha >> log r.
    const double hi = std::max(10.0, std::pow(1e6, 1.0 / alpha));
    e.c_alpha = ratio1(golden_section_max(ratio1, 0.0, hi));
    if (e.c_alpha < 1.0 + 1e-9) {
        e.c_alpha = 1.0 + 1e-9;
        e.c_alpha_clamped = true;
    }
    e.c_alpha_prime = ratio2(golden_section_max(ratio2, 0.0, hi));
    e.c_gn = gn_constant(p);

    const KernelTable& tbl = *kernel_table(library_grid());
    double best = 0.0;
    for (const Field2D& u : field_library(library_grid(), kLibraryCount)) {
        const double v2 = v_split(u, tbl).v2;
        const double denom = std::pow(lp_norm(u, 8.0 / 3.0), 4.0);
        if (denom > 0.0) best = std::max(best, v2 / denom);
    }
    e.d_est = best;
    cache[{alpha, p}] = e;
    return e;
}

double lp_embedding_constant(double alpha, double p)
{
    static std::map<std::pair<double, double>, double> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find({alpha, p});
    if (it != cache.end()) return it->second;
    double best = 0.0;
    for (const Field2D& u : field_library(library_grid(), kLibraryCount)) {
        const double xn = x_norm(u, alpha);
        if (xn > 0.0) best = std::max(best, lp_norm_pow(u, p) / std::pow(xn, p));
    }
    cache[{alpha, p}] = best;
    return best;
}

} // namespace psm
